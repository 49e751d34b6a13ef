#include "qinsim/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qinsim {

namespace {

constexpr double kPi = std::numbers::pi;

double deg_to_rad(double deg) { return deg * kPi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

double orbital_period_s(double altitude_km) {
    if (altitude_km <= 0.0) throw std::invalid_argument("altitude_km must be > 0");
    const double a = kEarthRadiusKm + altitude_km;
    return 2.0 * kPi * std::sqrt(a * a * a / kMuKm3PerS2);
}

Vec3 propagate_eci_km(const Orbit& orbit, double t_s) {
    const double a = kEarthRadiusKm + orbit.altitude_km;
    const double n = std::sqrt(kMuKm3PerS2 / (a * a * a));  // mean motion, rad/s
    const double u = deg_to_rad(orbit.initial_anomaly_deg) + n * (t_s - orbit.epoch_s);

    // In-plane position, then rotate by inclination about x and RAAN about z.
    const double xp = a * std::cos(u);
    const double yp = a * std::sin(u);
    const double ci = std::cos(deg_to_rad(orbit.inclination_deg));
    const double si = std::sin(deg_to_rad(orbit.inclination_deg));
    const double co = std::cos(deg_to_rad(orbit.raan_deg));
    const double so = std::sin(deg_to_rad(orbit.raan_deg));

    return {co * xp - so * ci * yp, so * xp + co * ci * yp, si * yp};
}

Vec3 site_position_eci_km(const GroundSite& site, double t_s) {
    const double r = kEarthRadiusKm + site.altitude_m / 1e3;
    const double lat = deg_to_rad(site.latitude_deg);
    // Earth-fixed longitude drifts east at the sidereal rate in this frame.
    const double lon = deg_to_rad(site.longitude_deg) + kSiderealRateRadPerS * t_s;
    return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon),
            r * std::sin(lat)};
}

double elevation_deg(const Orbit& orbit, const GroundSite& site, double t_s) {
    const Vec3 rsite = site_position_eci_km(site, t_s);
    const Vec3 los = propagate_eci_km(orbit, t_s) - rsite;
    const double sin_el = rsite.dot(los) / (rsite.norm() * los.norm());
    return rad_to_deg(std::asin(std::clamp(sin_el, -1.0, 1.0)));
}

double slant_range_km(const Orbit& orbit, const GroundSite& site, double t_s) {
    return (propagate_eci_km(orbit, t_s) - site_position_eci_km(site, t_s)).norm();
}

namespace {

// Shared scan/bisect machinery over an arbitrary elevation-like function so
// single and dual windows behave identically.
template <typename ElevFn>
std::vector<VisibilityWindow> scan_windows(ElevFn elev, double mask_deg, double t0_s,
                                           double t1_s, double step_s) {
    if (!(t0_s < t1_s)) throw std::invalid_argument("t0_s must be < t1_s");
    if (step_s <= 0.0) throw std::invalid_argument("step_s must be > 0");

    auto above = [&](double t) { return elev(t) >= mask_deg; };

    // Bisect a rise/set crossing inside [lo, hi] to +-step_s/100.
    auto refine = [&](double lo, double hi, bool rising) {
        for (int i = 0; i < 60 && (hi - lo) > step_s / 100.0; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (above(mid) == rising)
                hi = mid;
            else
                lo = mid;
        }
        return 0.5 * (lo + hi);
    };

    std::vector<VisibilityWindow> windows;
    bool in_window = above(t0_s);
    double start = t0_s;
    double peak = in_window ? elev(t0_s) : -90.0;

    double prev = t0_s;
    for (double t = t0_s + step_s;; t += step_s) {
        const bool last = t >= t1_s;
        if (last) t = t1_s;
        const bool up = above(t);
        if (up && !in_window) {
            start = refine(prev, t, true);
            peak = elev(t);
            in_window = true;
        } else if (!up && in_window) {
            windows.push_back({start, refine(prev, t, false), peak});
            in_window = false;
        } else if (up) {
            peak = std::max(peak, elev(t));
        }
        prev = t;
        if (last) break;
    }
    if (in_window) windows.push_back({start, t1_s, peak});
    return windows;
}

}  // namespace

std::vector<VisibilityWindow> visibility_windows(const Orbit& orbit, const GroundSite& site,
                                                 double elevation_mask_deg, double t0_s,
                                                 double t1_s, double step_s) {
    return scan_windows([&](double t) { return elevation_deg(orbit, site, t); },
                        elevation_mask_deg, t0_s, t1_s, step_s);
}

std::vector<VisibilityWindow> dual_visibility_windows(const Orbit& orbit,
                                                      const GroundSite& site_a,
                                                      const GroundSite& site_b, double mask_deg,
                                                      double t0_s, double t1_s, double step_s) {
    // Scanning min(elev_a, elev_b) is exactly the intersection of the two
    // single-site window sets, with boundaries refined the same way.
    return scan_windows(
        [&](double t) {
            return std::min(elevation_deg(orbit, site_a, t), elevation_deg(orbit, site_b, t));
        },
        mask_deg, t0_s, t1_s, step_s);
}

double max_ground_separation_km(double altitude_km, double elevation_mask_deg) {
    if (altitude_km <= 0.0) throw std::invalid_argument("altitude_km must be > 0");
    if (elevation_mask_deg < 0.0 || elevation_mask_deg >= 90.0)
        throw std::invalid_argument("elevation_mask_deg must lie in [0,90)");
    const double eps = deg_to_rad(elevation_mask_deg);
    const double psi =
        std::acos(kEarthRadiusKm * std::cos(eps) / (kEarthRadiusKm + altitude_km)) - eps;
    return 2.0 * kEarthRadiusKm * psi;
}

double great_circle_distance_km(const GroundSite& a, const GroundSite& b) {
    const double la = deg_to_rad(a.latitude_deg), lb = deg_to_rad(b.latitude_deg);
    const double dlon = deg_to_rad(b.longitude_deg - a.longitude_deg);
    const double c = std::sin(la) * std::sin(lb) + std::cos(la) * std::cos(lb) * std::cos(dlon);
    return kEarthRadiusKm * std::acos(std::clamp(c, -1.0, 1.0));
}

bool intersatellite_line_of_sight(const Orbit& a, const Orbit& b, double t_s) {
    const Vec3 pa = propagate_eci_km(a, t_s);
    const Vec3 pb = propagate_eci_km(b, t_s);
    const Vec3 d = pb - pa;
    const double len2 = d.dot(d);
    if (len2 == 0.0) return true;
    // Closest approach of the segment to the Earth's center.
    const double s = std::clamp(-pa.dot(d) / len2, 0.0, 1.0);
    return (pa + d * s).norm() > kEarthRadiusKm;
}

}  // namespace qinsim
