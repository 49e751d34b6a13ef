#pragma once

#include <string>

#include "qinsim/core.hpp"

// Per-photon transmittance from channel parameters and geometry. All outputs
// live in [0,1]; composition multiplies and never amplifies.

namespace qinsim {

// A probability that a photon survives a channel. Constructor enforces [0,1].
class Transmittance {
  public:
    Transmittance() : value_(1.0) {}
    explicit Transmittance(double value);

    double value() const { return value_; }

    // Channel composition.
    Transmittance operator*(const Transmittance& other) const {
        return Transmittance(value_ * other.value_);
    }

  private:
    double value_;
};

// 10^(-loss_db/10). Rejects negative input.
Transmittance db_to_transmittance(double loss_db);

// 10^(-alpha*length/10). Rejects negative input.
Transmittance fiber_transmittance(double length_km, double alpha_db_per_km);

// Far-field diffraction-limited aperture coupling,
// min(1, (pi*Dt*Dr / (4*lambda*L))^2). Rejects nonpositive input.
Transmittance freespace_geometric_transmittance(double range_km, double wavelength_m,
                                                double tx_aperture_m, double rx_aperture_m);

// Distance tagged by how the channel interprets it. Fiber links take a cable
// length; optical kinds take a line-of-sight range.
struct PathGeometry {
    enum class Kind { FiberLength, FreeSpaceRange };
    Kind kind;
    double km;

    static PathGeometry fiber_length_km(double km) { return {Kind::FiberLength, km}; }
    static PathGeometry free_space_range_km(double km) { return {Kind::FreeSpaceRange, km}; }
};

// End-to-end per-photon transmittance of one channel, including detector
// efficiency. Qoisl is evaluated with atmospheric_penalty_db forced to 0.
// Rejects a geometry whose kind does not match the channel kind.
Transmittance channel_transmittance(const ChannelParams& channel, const PathGeometry& geometry);

// Mean of the Poisson detection count: source_rate_hz * T * duration_s.
double expected_detections(double source_rate_hz, Transmittance transmittance,
                           double duration_s);

// One row of the dB-itemized budget table the `linkbudget` subcommand emits.
struct BudgetRow {
    std::string link;
    LinkKind kind;
    double distance_km = 0.0;
    double geometric_db = 0.0;   // distance-dependent term (fiber alpha*L or free-space)
    double atmospheric_db = 0.0;
    double pointing_db = 0.0;
    double system_db = 0.0;
    double detector_db = 0.0;
    double total_db = 0.0;
    double transmittance = 1.0;
};

BudgetRow itemize_budget(const std::string& label, const ChannelParams& channel,
                         const PathGeometry& geometry);

// Seconds per Julian century; the duration behind "per century" figures.
inline constexpr double kSecondsPerCentury = 3.1557e9;

}  // namespace qinsim
