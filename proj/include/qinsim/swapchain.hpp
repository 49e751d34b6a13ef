#pragma once

#include <optional>
#include <vector>

#include "qinsim/core.hpp"
#include "qinsim/linkbudget.hpp"

// Analytic repeater-chain model: segmentation into N elementary links,
// single-shot end-to-end success probability, BSM firing plans, and the
// exponential-vs-polynomial scaling discriminator.

namespace qinsim {

// A chain of N segments with a BSM node between neighbours (N-1 of them).
struct ChainConfig {
    int n_segments = 1;
    std::vector<Transmittance> per_segment_transmittance;  // length n_segments
    BsmParams bsm;
    std::optional<MemoryParams> memory;
    double source_attempt_rate_hz = 1.0;
};

// Multi-round BSM firing plan. rounds partitions {1..n_bsm} (1-based).
struct SwapSchedule {
    std::vector<std::vector<int>> rounds;
};

enum class SwapStrategy { Sequential, Balanced };

// Equal division of the channel; the sums conserve total length.
std::vector<double> segment_chain(double total_length_km, int n_segments);

// Sequential: one round per BSM, in index order. Balanced: two rounds,
// odd indices then even, so four BSMs fire as two+two.
SwapSchedule build_swap_schedule(int n_bsm, SwapStrategy strategy);

// P = prod(p_i) * (q*V)^(N-1): every segment and every swap must succeed in
// one synchronized shot. Memory is ignored here.
double single_shot_e2e_prob(const ChainConfig& chain);

// source_attempt_rate_hz * single_shot_e2e_prob.
double memoryless_rate_hz(const ChainConfig& chain);

enum class ScalingClass { Exponential, Polynomial };

const char* to_string(ScalingClass cls);

struct ScalingFit {
    ScalingClass cls = ScalingClass::Exponential;
    double exponential_rss = 0.0;  // residuals of log(rate) ~ distance
    double polynomial_rss = 0.0;   // residuals of log(rate) ~ log(distance)
    double exponential_r2 = 0.0;
    double polynomial_r2 = 0.0;
    double decay_db_per_km = 0.0;  // from the exponential fit slope
    double polynomial_exponent = 0.0;
};

// Least-squares fit of both models on log-transformed data; the smaller
// residual sum of squares wins (Polynomial on a tie). Needs >= 4 points,
// strictly increasing distances, all rates > 0.
ScalingFit classify_scaling(const std::vector<double>& distances_km,
                            const std::vector<double>& rates_hz);

}  // namespace qinsim
