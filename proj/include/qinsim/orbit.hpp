#pragma once

#include <vector>

#include "qinsim/core.hpp"

// Circular-orbit propagation, slant ranges, and ground-station visibility
// windows. Spherical Earth; site altitude is added radially. The inertial
// frame convention: prime meridian aligned with the x-axis at t = 0, Earth
// spins at the sidereal rate about +z.

namespace qinsim {

inline constexpr double kEarthRadiusKm = 6378.137;
inline constexpr double kMuKm3PerS2 = 398600.4418;
inline constexpr double kSiderealRateRadPerS = 7.2921159e-5;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const;
};

// Kepler period 2*pi*sqrt((Re+h)^3/mu). Rejects nonpositive altitude.
double orbital_period_s(double altitude_km);

// Satellite position in the Earth-centered inertial frame, km.
Vec3 propagate_eci_km(const Orbit& orbit, double t_s);

// Ground site position in the same frame at time t, km.
Vec3 site_position_eci_km(const GroundSite& site, double t_s);

// Geometric elevation of the satellite above the site's local horizon.
double elevation_deg(const Orbit& orbit, const GroundSite& site, double t_s);

// Euclidean satellite-site distance, km.
double slant_range_km(const Orbit& orbit, const GroundSite& site, double t_s);

struct VisibilityWindow {
    double start_s = 0.0;
    double end_s = 0.0;
    double max_elevation_deg = 0.0;

    double duration_s() const { return end_s - start_s; }
};

// Maximal disjoint intervals in [t0,t1] with elevation >= mask, sorted by
// start. Fixed-step scan with bisection refinement of the boundaries to
// +-step_s/100.
std::vector<VisibilityWindow> visibility_windows(const Orbit& orbit, const GroundSite& site,
                                                 double elevation_mask_deg, double t0_s,
                                                 double t1_s, double step_s = 1.0);

// Interval intersection of the two single-site lists; max_elevation_deg is
// the peak of min(elevation_a, elevation_b) over the intersection.
std::vector<VisibilityWindow> dual_visibility_windows(const Orbit& orbit,
                                                      const GroundSite& site_a,
                                                      const GroundSite& site_b, double mask_deg,
                                                      double t0_s, double t1_s,
                                                      double step_s = 1.0);

// Largest ground separation (great-circle km) at which one satellite at the
// given altitude can sit above both sites' elevation masks simultaneously:
// 2*Re*psi with psi = arccos(Re*cos(eps)/(Re+h)) - eps. Rejects mask >= 90.
double max_ground_separation_km(double altitude_km, double elevation_mask_deg);

// Great-circle distance between two sites on the spherical Earth, km.
double great_circle_distance_km(const GroundSite& a, const GroundSite& b);

// True when the straight segment between two satellites clears the Earth
// sphere (inter-satellite line of sight).
bool intersatellite_line_of_sight(const Orbit& a, const Orbit& b, double t_s);

}  // namespace qinsim
