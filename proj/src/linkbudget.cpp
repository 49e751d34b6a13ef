#include "qinsim/linkbudget.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qinsim {

Transmittance::Transmittance(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0))
        throw std::invalid_argument("transmittance must lie in [0,1], got " +
                                    std::to_string(value));
}

Transmittance db_to_transmittance(double loss_db) {
    if (loss_db < 0.0) throw std::invalid_argument("loss_db must be >= 0");
    return Transmittance(std::pow(10.0, -loss_db / 10.0));
}

Transmittance fiber_transmittance(double length_km, double alpha_db_per_km) {
    if (length_km < 0.0) throw std::invalid_argument("length_km must be >= 0");
    if (alpha_db_per_km < 0.0) throw std::invalid_argument("alpha_db_per_km must be >= 0");
    return db_to_transmittance(alpha_db_per_km * length_km);
}

Transmittance freespace_geometric_transmittance(double range_km, double wavelength_m,
                                                double tx_aperture_m, double rx_aperture_m) {
    if (range_km <= 0.0) throw std::invalid_argument("range_km must be > 0");
    if (wavelength_m <= 0.0) throw std::invalid_argument("wavelength_m must be > 0");
    if (tx_aperture_m <= 0.0) throw std::invalid_argument("tx_aperture_m must be > 0");
    if (rx_aperture_m <= 0.0) throw std::invalid_argument("rx_aperture_m must be > 0");

    const double range_m = range_km * 1e3;
    const double coupling =
        std::numbers::pi * tx_aperture_m * rx_aperture_m / (4.0 * wavelength_m * range_m);
    return Transmittance(std::min(1.0, coupling * coupling));
}

namespace {

double fixed_losses_db(const ChannelParams& c) {
    if (c.kind == LinkKind::Fiber) return c.system_loss_db;
    // Qoisl sees no atmosphere regardless of what the config says.
    const double atmospheric = c.kind == LinkKind::Qoisl ? 0.0 : c.atmospheric_penalty_db;
    return atmospheric + c.pointing_loss_db + c.system_loss_db;
}

}  // namespace

Transmittance channel_transmittance(const ChannelParams& channel, const PathGeometry& geometry) {
    const bool wants_fiber = channel.kind == LinkKind::Fiber;
    if (wants_fiber != (geometry.kind == PathGeometry::Kind::FiberLength))
        throw std::invalid_argument("geometry kind does not match channel kind");

    Transmittance t = wants_fiber
                          ? fiber_transmittance(geometry.km, channel.fiber_alpha_db_per_km)
                          : freespace_geometric_transmittance(geometry.km, channel.wavelength_m,
                                                              channel.tx_aperture_m,
                                                              channel.rx_aperture_m);
    t = t * db_to_transmittance(fixed_losses_db(channel));
    return t * Transmittance(channel.detector_efficiency);
}

double expected_detections(double source_rate_hz, Transmittance transmittance,
                           double duration_s) {
    if (source_rate_hz <= 0.0) throw std::invalid_argument("source_rate_hz must be > 0");
    if (duration_s < 0.0) throw std::invalid_argument("duration_s must be >= 0");
    return source_rate_hz * transmittance.value() * duration_s;
}

BudgetRow itemize_budget(const std::string& label, const ChannelParams& channel,
                         const PathGeometry& geometry) {
    BudgetRow row;
    row.link = label;
    row.kind = channel.kind;
    row.distance_km = geometry.km;

    if (channel.kind == LinkKind::Fiber) {
        row.geometric_db = channel.fiber_alpha_db_per_km * geometry.km;
    } else {
        const double geo = freespace_geometric_transmittance(geometry.km, channel.wavelength_m,
                                                             channel.tx_aperture_m,
                                                             channel.rx_aperture_m)
                               .value();
        row.geometric_db = -10.0 * std::log10(geo);
        row.atmospheric_db =
            channel.kind == LinkKind::Qoisl ? 0.0 : channel.atmospheric_penalty_db;
    }
    row.pointing_db = channel.kind == LinkKind::Fiber ? 0.0 : channel.pointing_loss_db;
    row.system_db = channel.system_loss_db;
    row.detector_db = -10.0 * std::log10(channel.detector_efficiency) + 0.0;  // avoid -0
    row.total_db =
        row.geometric_db + row.atmospheric_db + row.pointing_db + row.system_db + row.detector_db;
    row.transmittance = channel_transmittance(channel, geometry).value();
    return row;
}

}  // namespace qinsim
