#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace aerocov {

/// Urban building-grid statistics for the ITU-R LOS model.
struct EnvironmentParams {
    double beta_per_km2 = 300.0;  ///< buildings per square kilometer
    double delta = 0.5;           ///< fraction of area occupied by buildings
    double kappa_m = 20.0;        ///< Rayleigh scale of building heights [m]

    void validate() const {
        if (!(beta_per_km2 > 0.0))
            throw std::invalid_argument("environment.beta_per_km2 must be > 0");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("environment.delta must lie in (0,1)");
        if (!(kappa_m > 0.0))
            throw std::invalid_argument("environment.kappa_m must be > 0");
    }
};

/// Geometry of one air-to-ground link.
struct LinkGeometry {
    double horizontal_distance_m = 0.0;
    double tx_height_m = 0.0;  ///< station height
    double rx_height_m = 0.0;  ///< UAV height

    double delta_height_m() const { return rx_height_m - tx_height_m; }

    void validate() const {
        if (!(horizontal_distance_m >= 0.0) || !std::isfinite(horizontal_distance_m))
            throw std::invalid_argument("link.horizontal_distance_m must be finite and >= 0");
        if (!std::isfinite(tx_height_m) || !std::isfinite(rx_height_m))
            throw std::invalid_argument("link heights must be finite");
    }
};

/// Vertical angle from the station to the receiver, phi = arctan(dh/r).
/// At r = 0 the limit convention applies: +-pi/2 for dh <> 0, 0 for dh = 0.
inline double vertical_angle(const LinkGeometry& link) {
    // atan2 realizes the r = 0 convention directly.
    return std::atan2(link.delta_height_m(), link.horizontal_distance_m);
}

/// Number of buildings crossed by a link of horizontal length r.
inline int buildings_crossed(const EnvironmentParams& env, double horizontal_distance_m) {
    const double r_km = horizontal_distance_m / 1000.0;
    const double b = std::floor(r_km * std::sqrt(env.beta_per_km2 * env.delta));
    return b > 0.0 ? static_cast<int>(b) : 0;
}

/// Distance between successive increments of buildings_crossed: P_l(r) is
/// piecewise constant with jumps at the multiples of this spacing.
inline double los_step_spacing_m(const EnvironmentParams& env) {
    return 1000.0 / std::sqrt(env.beta_per_km2 * env.delta);
}

/// LOS probability for b crossed buildings between the given endpoint heights.
/// Product over buildings of P(building height < link height at that building),
/// with the link height linearly interpolated at the midpoint of each grid cell.
inline double los_probability_for_count(const EnvironmentParams& env, int b,
                                        double tx_height_m, double rx_height_m) {
    if (b <= 0)
        return 1.0;
    const double two_kappa_sq = 2.0 * env.kappa_m * env.kappa_m;
    double p = 1.0;
    for (int n = 0; n < b; ++n) {
        const double frac = (n + 0.5) / b;
        const double h = tx_height_m + frac * (rx_height_m - tx_height_m);
        p *= 1.0 - std::exp(-(h * h) / two_kappa_sq);
    }
    return p;
}

/// ITU-R building-grid LOS probability P_l(r).
inline double los_probability(const EnvironmentParams& env, const LinkGeometry& link) {
    env.validate();
    link.validate();
    return los_probability_for_count(env, buildings_crossed(env, link.horizontal_distance_m),
                                     link.tx_height_m, link.rx_height_m);
}

/// Memoized P_l for fixed endpoint heights. P_l(r) is piecewise constant in r
/// (the per-building heights depend only on the crossing count), so one value
/// per count covers every distance. Shared by the simulator and the quadrature
/// integrands, which evaluate P_l millions of times.
class LosProbabilityTable {
  public:
    LosProbabilityTable(const EnvironmentParams& env, double tx_height_m, double rx_height_m)
        : env_(env), tx_height_m_(tx_height_m), rx_height_m_(rx_height_m) {
        env_.validate();
        by_count_.push_back(1.0);  // b = 0
    }

    double operator()(double horizontal_distance_m) const {
        const int b = buildings_crossed(env_, horizontal_distance_m);
        if (underflow_count_ >= 0 && b >= underflow_count_)
            return 0.0;
        while (static_cast<int>(by_count_.size()) <= b) {
            const int next = static_cast<int>(by_count_.size());
            const double p =
                los_probability_for_count(env_, next, tx_height_m_, rx_height_m_);
            // Extending each count costs O(count); once the value underflows,
            // clamp everything farther out to zero instead of growing the
            // table quadratically toward huge distances.
            if (p < 1e-300) {
                underflow_count_ = next;
                return 0.0;
            }
            by_count_.push_back(p);
        }
        return by_count_[static_cast<std::size_t>(b)];
    }

    /// Radius beyond which P_l stays below eps; past it the LOS weight is
    /// negligible and 1 - P_l is effectively smooth (quadrature knot cutoff).
    double negligible_beyond_m(double eps = 1e-12) const {
        const double spacing = los_step_spacing_m(env_);
        int b = 0;
        while ((*this)(static_cast<double>(b) * spacing) > eps && b < 4096)
            ++b;
        return static_cast<double>(b) * spacing;
    }

  private:
    EnvironmentParams env_;
    double tx_height_m_;
    double rx_height_m_;
    mutable std::vector<double> by_count_;
    mutable int underflow_count_ = -1;  ///< first count with P_l < 1e-300, if seen
};

}  // namespace aerocov
