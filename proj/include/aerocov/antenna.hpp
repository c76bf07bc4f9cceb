#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace aerocov {

inline constexpr double kPi = std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

enum class UavAntennaKind { Omni, FixedDirectional, SteerableDirectional };

inline const char* to_string(UavAntennaKind k) {
    switch (k) {
        case UavAntennaKind::Omni: return "omni";
        case UavAntennaKind::FixedDirectional: return "fixed";
        case UavAntennaKind::SteerableDirectional: return "steerable";
    }
    return "?";
}

/// UAV receive antenna: omnidirectional, downtilted cone, or steerable lobe.
struct UavAntenna {
    UavAntennaKind kind = UavAntennaKind::Omni;
    double beamwidth_rad = 0.0;  ///< omega, unused for Omni

    static UavAntenna omni() { return {UavAntennaKind::Omni, 0.0}; }
    static UavAntenna fixed_directional(double beamwidth_rad) {
        return {UavAntennaKind::FixedDirectional, beamwidth_rad};
    }
    static UavAntenna steerable(double beamwidth_rad) {
        return {UavAntennaKind::SteerableDirectional, beamwidth_rad};
    }

    void validate() const {
        if (kind != UavAntennaKind::Omni &&
            !(beamwidth_rad > 0.0 && beamwidth_rad < 2.0 * kPi))
            throw std::invalid_argument("antenna.beamwidth_rad must lie in (0, 2*pi)");
    }
};

/// Main-lobe gain: 1 for omni, 16*pi/omega^2 for the directional kinds.
/// Lobe membership is encoded separately by the illuminated region.
inline double uav_gain(const UavAntenna& antenna) {
    antenna.validate();
    if (antenna.kind == UavAntennaKind::Omni)
        return 1.0;
    return 16.0 * kPi / (antenna.beamwidth_rad * antenna.beamwidth_rad);
}

/// Ring sector of ground positions received with nonzero UAV gain:
/// inner radius r1 (serving distance), outer radius v, arc angle rho
/// centered on the lobe boresight azimuth.
struct IlluminatedRegion {
    double inner_radius_m = 0.0;
    double outer_radius_m = 0.0;  ///< may be +infinity
    double arc_angle_rad = 2.0 * kPi;

    bool empty() const { return !(outer_radius_m > inner_radius_m); }

    /// Membership test for a transmitter at horizontal distance r and azimuth
    /// offset (radians, any branch) from the lobe boresight.
    bool contains(double r_m, double azimuth_offset_rad) const {
        if (r_m < inner_radius_m || r_m > outer_radius_m)
            return false;
        double off = std::remainder(azimuth_offset_rad, 2.0 * kPi);
        return std::abs(off) <= arc_angle_rad / 2.0;
    }
};

/// Region illuminated beyond the serving station at distance r1, for a UAV at
/// height offset delta_gamma above the station plane.
inline IlluminatedRegion illuminated_region(const UavAntenna& antenna, double delta_gamma_m,
                                            double r1_m) {
    antenna.validate();
    if (!(r1_m >= 0.0))
        throw std::invalid_argument("illuminated_region: r1_m must be >= 0");
    if (!std::isfinite(delta_gamma_m))
        throw std::invalid_argument("illuminated_region: delta_gamma_m must be finite");

    const double inf = std::numeric_limits<double>::infinity();
    const double w = antenna.beamwidth_rad;

    switch (antenna.kind) {
        case UavAntennaKind::Omni:
            return {r1_m, inf, 2.0 * kPi};

        case UavAntennaKind::FixedDirectional: {
            // Downtilted cone: illuminates a disc of radius dg*tan(w/2) beneath
            // the UAV. A UAV at or below station height illuminates nothing.
            if (delta_gamma_m <= 0.0)
                return {r1_m, r1_m, 2.0 * kPi};
            if (w >= kPi)
                return {r1_m, inf, 2.0 * kPi};
            double v = delta_gamma_m * std::tan(w / 2.0);
            if (v < r1_m)
                v = r1_m;  // empty ring
            return {r1_m, v, 2.0 * kPi};
        }

        case UavAntennaKind::SteerableDirectional: {
            if (w >= kPi / 2.0)
                return {r1_m, inf, w};
            const double dg = std::abs(delta_gamma_m);
            const double phi1 = std::atan2(dg, r1_m);
            double v;
            if (phi1 > kPi / 2.0 - w / 2.0)
                v = dg / std::tan(kPi / 2.0 - w);
            else if (phi1 > w / 2.0)
                v = dg / std::tan(phi1 - w / 2.0);
            else
                v = inf;
            if (v < r1_m)
                v = r1_m;
            return {r1_m, v, w};
        }
    }
    return {r1_m, r1_m, 2.0 * kPi};
}

/// Station tri-sector antenna: constant horizontal gain times the 3GPP
/// vertical pattern around the tilt angle.
struct SectorAntennaParams {
    double horizontal_gain = 1.0;  ///< mu_h, linear scale
    double tilt_rad = 0.0;         ///< phi_T (uptilt > 0, downtilt < 0)
    double vertical_3db_beamwidth_rad = deg_to_rad(10.0);
    double sidelobe_floor_db = 20.0;  ///< SLA

    void validate() const {
        if (!(horizontal_gain > 0.0))
            throw std::invalid_argument("sector.horizontal_gain must be > 0");
        if (!(vertical_3db_beamwidth_rad > 0.0))
            throw std::invalid_argument("sector.vertical_3db_beamwidth_rad must be > 0");
        if (!(sidelobe_floor_db > 0.0))
            throw std::invalid_argument("sector.sidelobe_floor_db must be > 0");
    }
};

/// 3GPP vertical pattern: mu(phi) = mu_h * 10^(-min(12*((phi-phi_T)/phi_3dB)^2, SLA)/10).
inline double sector_gain(const SectorAntennaParams& params, double phi_rad) {
    const double x = (phi_rad - params.tilt_rad) / params.vertical_3db_beamwidth_rad;
    const double att_db = std::min(12.0 * x * x, params.sidelobe_floor_db);
    return params.horizontal_gain * std::pow(10.0, -att_db / 10.0);
}

}  // namespace aerocov
