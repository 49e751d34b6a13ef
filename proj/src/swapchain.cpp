#include "qinsim/swapchain.hpp"

#include <cmath>
#include <stdexcept>

namespace qinsim {

std::vector<double> segment_chain(double total_length_km, int n_segments) {
    if (total_length_km <= 0.0) throw std::invalid_argument("total_length_km must be > 0");
    if (n_segments < 1) throw std::invalid_argument("n_segments must be >= 1");
    return std::vector<double>(static_cast<size_t>(n_segments),
                               total_length_km / n_segments);
}

SwapSchedule build_swap_schedule(int n_bsm, SwapStrategy strategy) {
    if (n_bsm < 1) throw std::invalid_argument("n_bsm must be >= 1");
    SwapSchedule schedule;
    if (strategy == SwapStrategy::Sequential) {
        for (int i = 1; i <= n_bsm; ++i) schedule.rounds.push_back({i});
        return schedule;
    }
    std::vector<int> odd, even;
    for (int i = 1; i <= n_bsm; ++i) (i % 2 ? odd : even).push_back(i);
    schedule.rounds.push_back(odd);
    if (!even.empty()) schedule.rounds.push_back(even);
    return schedule;
}

namespace {

void check_chain(const ChainConfig& chain) {
    if (chain.n_segments < 1) throw std::invalid_argument("n_segments must be >= 1");
    if (chain.per_segment_transmittance.size() != static_cast<size_t>(chain.n_segments))
        throw std::invalid_argument("per_segment_transmittance length must equal n_segments");
    if (chain.source_attempt_rate_hz <= 0.0)
        throw std::invalid_argument("source_attempt_rate_hz must be > 0");
}

}  // namespace

double single_shot_e2e_prob(const ChainConfig& chain) {
    check_chain(chain);
    double p = 1.0;
    for (const auto& t : chain.per_segment_transmittance) p *= t.value();
    const double swap = chain.bsm.success_prob_q * chain.bsm.indistinguishability_v;
    return p * std::pow(swap, chain.n_segments - 1);
}

double memoryless_rate_hz(const ChainConfig& chain) {
    return chain.source_attempt_rate_hz * single_shot_e2e_prob(chain);
}

const char* to_string(ScalingClass cls) {
    return cls == ScalingClass::Exponential ? "exponential" : "polynomial";
}

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rss = 0.0;
    double r2 = 1.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    double tss = 0;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        fit.rss += r * r;
        tss += (y[i] - my) * (y[i] - my);
    }
    fit.r2 = tss > 0.0 ? 1.0 - fit.rss / tss : 1.0;
    return fit;
}

}  // namespace

ScalingFit classify_scaling(const std::vector<double>& distances_km,
                            const std::vector<double>& rates_hz) {
    if (distances_km.size() != rates_hz.size())
        throw std::invalid_argument("distances and rates must have equal length");
    if (distances_km.size() < 4) throw std::invalid_argument("need >= 4 points");
    for (size_t i = 0; i < distances_km.size(); ++i) {
        if (rates_hz[i] <= 0.0) throw std::invalid_argument("rates must be > 0");
        if (distances_km[i] <= 0.0) throw std::invalid_argument("distances must be > 0");
        if (i > 0 && distances_km[i] <= distances_km[i - 1])
            throw std::invalid_argument("distances must be strictly increasing");
    }

    std::vector<double> log_rate(rates_hz.size()), log_dist(distances_km.size());
    for (size_t i = 0; i < rates_hz.size(); ++i) {
        log_rate[i] = std::log(rates_hz[i]);
        log_dist[i] = std::log(distances_km[i]);
    }

    const LineFit exp_fit = least_squares(distances_km, log_rate);
    const LineFit poly_fit = least_squares(log_dist, log_rate);

    ScalingFit out;
    out.exponential_rss = exp_fit.rss;
    out.polynomial_rss = poly_fit.rss;
    out.exponential_r2 = exp_fit.r2;
    out.polynomial_r2 = poly_fit.r2;
    // rate = C*10^(-alpha*d/10)  =>  ln rate = ln C - (alpha*ln10/10)*d
    out.decay_db_per_km = -exp_fit.slope * 10.0 / std::log(10.0);
    out.polynomial_exponent = poly_fit.slope;
    out.cls = poly_fit.rss <= exp_fit.rss ? ScalingClass::Polynomial
                                          : ScalingClass::Exponential;
    return out;
}

}  // namespace qinsim
