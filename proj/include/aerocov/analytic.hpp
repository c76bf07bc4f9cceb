#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "aerocov/antenna.hpp"
#include "aerocov/channel.hpp"
#include "aerocov/environment.hpp"
#include "aerocov/quadrature.hpp"

namespace aerocov {

/// Full evaluation context for one coverage-probability computation.
struct Scenario {
    EnvironmentParams env;
    NetworkParams net;
    UavAntenna antenna;
    double uav_height_m = 120.0;  ///< gamma
    double threshold = 10.0;      ///< theta, linear scale

    double delta_gamma_m() const { return uav_height_m - net.station_height_m; }

    void validate() const {
        env.validate();
        net.validate();
        antenna.validate();
        if (!(uav_height_m >= 0.0))
            throw std::invalid_argument("scenario.uav_height_m must be >= 0");
        if (!(threshold > 0.0))
            throw std::invalid_argument("scenario.threshold must be > 0");
    }
};

/// Mean nearest-station distance of a PPP of the given density: 1/(2*sqrt(lambda)).
inline double mean_serving_distance_m(double density_per_m2) {
    return 0.5 / std::sqrt(density_per_m2);
}

/// Rayleigh nearest-distance density f_R1(r) = 2*pi*lambda*r*exp(-pi*lambda*r^2).
inline double serving_distance_pdf(double density_per_m2, double r_m) {
    const double pl = kPi * density_per_m2;
    return 2.0 * pl * r_m * std::exp(-pl * r_m * r_m);
}

/// Station uptilt aimed at the mean serving geometry: arctan(dg / E[R1]).
inline double auto_uptilt_rad(const Scenario& scn) {
    return std::atan2(scn.delta_gamma_m(), mean_serving_distance_m(scn.net.density_per_m2));
}

inline Scenario with_auto_uptilt(Scenario scn) {
    scn.net.sector.tilt_rad = auto_uptilt_rad(scn);
    return scn;
}

/// Numerical-evaluation knobs for the analytic pipeline.
struct QuadratureConfig {
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    /// Tolerances of the outer serving-distance integral. Every outer sample
    /// costs four inner quadratures, so this is deliberately looser; the
    /// achieved error is reported in CoverageResult::std_error.
    double outer_rel_tol = 1e-4;
    double outer_abs_tol = 1e-6;
    double r_max_m = 0.0;  ///< outer-integral truncation radius; 0 = auto
    double fd_step = 1e-3; ///< relative step for finite-difference verification
    int max_fading_order = 5;
    bool use_finite_differences = false;  ///< FD fallback for the m > 1 derivatives

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::invalid_argument("quadrature tolerances must be > 0");
        if (!(outer_rel_tol > 0.0) || !(outer_abs_tol > 0.0))
            throw std::invalid_argument("quadrature outer tolerances must be > 0");
        if (!(fd_step > 0.0))
            throw std::invalid_argument("quadrature.fd_step must be > 0");
        if (r_max_m < 0.0)
            throw std::invalid_argument("quadrature.r_max_m must be >= 0");
    }
};

namespace detail {

/// Per-interferer coupling a(r) = mu(phi(r)) * (r^2 + dg^2)^(-alpha/2), so that
/// the interference Laplace exponent integrand depends on s only through s*a(r).
struct InterfererKernel {
    const SectorAntennaParams& sector;
    double delta_gamma_m;
    double alpha;

    double operator()(double r_m) const {
        const double phi = std::atan2(delta_gamma_m, r_m);
        const double d_sq = r_m * r_m + delta_gamma_m * delta_gamma_m;
        return sector_gain(sector, phi) * std::pow(d_sq, -alpha / 2.0);
    }
};

inline double rising_factorial(int m, int j) {
    double v = 1.0;
    for (int i = 0; i < j; ++i)
        v *= m + i;
    return v;
}

/// Scaled j-th s-derivative s^j * G^(j)(s) of the log-Laplace exponent
///   G(s) = -lambda*rho * Int_{r1}^{v} (1 - (m/(s*a(r)+m))^m) w(r) r dr
/// for one interferer class. Differentiation under the integral sign gives
///   G^(j)(s) = lambda*rho*(-1)^j * m^m * (m)_j * Int a^j (s*a+m)^(-(m+j)) w r dr;
/// the raw derivatives shrink like s^(-j) (far below any absolute quadrature
/// tolerance for realistic s ~ 1e7), so the integrand here carries the factor
/// (s*a/(s*a+m))^j instead of (a/(s*a+m))^j, keeping everything O(1). The Bell
/// recurrence downstream is form-invariant under this uniform scaling.
template <class WeightFn>
double log_laplace_derivative(double s, const IlluminatedRegion& region, int m_fading,
                              const InterfererKernel& kernel, const WeightFn& weight,
                              double density_per_m2, const QuadratureConfig& q, int order,
                              double knot_spacing_m = 0.0, double knot_cutoff_m = 0.0) {
    if (region.empty())
        return 0.0;
    if (s == 0.0 && order == 0)
        return 0.0;

    const double scale = density_per_m2 * region.arc_angle_rad;
    const double m = static_cast<double>(m_fading);

    auto integrand = [&](double r) {
        const double a = kernel(r);
        // x = s*a/(s*a+m) in [0,1); base = (m/(s*a+m))^m = (1-x)^m. Both the
        // far tail (x -> 0, where 1 - base cancels catastrophically) and the
        // near field (x -> 1) stay fully accurate via log1p/expm1.
        const double sa = s * a;
        const double x = sa / (sa + m);
        const double log_one_minus_x = std::log1p(-x);
        double v;
        if (order == 0) {
            v = -std::expm1(m * log_one_minus_x);  // 1 - (1-x)^m
        } else {
            v = std::exp(m * log_one_minus_x) * rising_factorial(m_fading, order) *
                std::pow(x, static_cast<double>(order));
        }
        return scale * v * weight(r) * r;
    };

    // The LOS/NLOS weights are piecewise constant in r; seeding the quadrature
    // at their jump radii keeps the refinement budget on the smooth parts.
    QuadratureResult res;
    if (std::isinf(region.outer_radius_m)) {
        const double unit = std::max({100.0, region.inner_radius_m,
                                      std::abs(kernel.delta_gamma_m)});
        res = integrate_semi_infinite(integrand, region.inner_radius_m, q.rel_tol, q.abs_tol,
                                      unit, 64, knot_spacing_m, knot_cutoff_m);
    } else {
        res = integrate_knots(integrand,
                              uniform_knots(region.inner_radius_m, region.outer_radius_m,
                                            knot_spacing_m, knot_cutoff_m),
                              q.rel_tol, q.abs_tol);
    }

    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    return (order == 0 ? -1.0 : sign) * res.value;
}

}  // namespace detail

/// Laplace transform of the aggregate interference of one LOS class, evaluated
/// so that the exponent argument per interferer is s*mu(phi)*(r^2+dg^2)^(-a/2).
/// The serving-state substitution (s_l vs s_n) is carried by the caller in s.
inline double laplace_interference(const Scenario& scn, double s, double serving_r1_m,
                                   LosState interferer_state,
                                   const QuadratureConfig& q = {}) {
    scn.validate();
    q.validate();
    if (!(s >= 0.0))
        throw std::invalid_argument("laplace_interference: s must be >= 0");
    if (!(serving_r1_m >= 0.0))
        throw std::invalid_argument("laplace_interference: serving_r1_m must be >= 0");

    const double dg = scn.delta_gamma_m();
    const auto region = illuminated_region(scn.antenna, dg, serving_r1_m);
    const detail::InterfererKernel kernel{scn.net.sector, dg, scn.net.alpha(interferer_state)};
    const LosProbabilityTable pl(scn.env, scn.net.station_height_m, scn.uav_height_m);
    auto weight = [&](double r) {
        return interferer_state == LosState::Los ? pl(r) : 1.0 - pl(r);
    };
    const double g0 = detail::log_laplace_derivative(
        s, region, scn.net.fading_order(interferer_state), kernel, weight,
        scn.net.density_per_m2, q, 0, los_step_spacing_m(scn.env),
        pl.negligible_beyond_m());
    return std::exp(g0);
}

namespace detail {

/// Scaled derivatives s^j * G^(j) (j = 0..k_max) of the total log of
///   F(s) = exp(-s*sigma^2/(p*eta*c)) * L_l(s) * L_n(s)
/// with respect to s, at the given serving distance.
inline std::vector<double> total_log_derivatives(const Scenario& scn, double s,
                                                 const IlluminatedRegion& region,
                                                 const LosProbabilityTable& pl, int k_max,
                                                 const QuadratureConfig& q) {
    const double dg = scn.delta_gamma_m();
    const double p_eta_c = scn.net.tx_power_w * uav_gain(scn.antenna) * scn.net.near_field_loss;

    std::vector<double> g(static_cast<std::size_t>(k_max) + 1, 0.0);
    g[0] = -s * scn.net.noise_w / p_eta_c;
    if (k_max >= 1)
        g[1] = -s * scn.net.noise_w / p_eta_c;

    const double spacing = los_step_spacing_m(scn.env);
    const double cutoff = pl.negligible_beyond_m();
    for (LosState cls : {LosState::Los, LosState::Nlos}) {
        const InterfererKernel kernel{scn.net.sector, dg, scn.net.alpha(cls)};
        auto weight = [&](double r) {
            return cls == LosState::Los ? pl(r) : 1.0 - pl(r);
        };
        for (int j = 0; j <= k_max; ++j)
            g[static_cast<std::size_t>(j)] += log_laplace_derivative(
                s, region, scn.net.fading_order(cls), kernel, weight, scn.net.density_per_m2,
                q, j, spacing, cutoff);
    }
    return g;
}

/// F^(0..k_max) from the log derivatives via the exponential (Bell) recurrence
///   F^(k) = sum_{j<k} C(k-1, j) G^(k-j) F^(j).
/// The recurrence is invariant under the uniform scaling G^(j) -> s^j G^(j),
/// F^(k) -> s^k F^(k), so feeding it the scaled log derivatives yields the
/// scaled F derivatives directly.
inline std::vector<double> exp_derivatives(const std::vector<double>& g) {
    const std::size_t n = g.size();
    std::vector<double> f(n, 0.0);
    f[0] = std::exp(g[0]);
    for (std::size_t k = 1; k < n; ++k) {
        double sum = 0.0;
        double binom = 1.0;  // C(k-1, j), built incrementally
        for (std::size_t j = 0; j < k; ++j) {
            sum += binom * g[k - j] * f[j];
            binom = binom * static_cast<double>(k - 1 - j) / static_cast<double>(j + 1);
        }
        f[k] = sum;
    }
    return f;
}

/// Central finite-difference derivative of order k with one Richardson step.
template <class F>
double fd_derivative(const F& f, double x, int k, double h) {
    auto stencil = [&](double step) {
        switch (k) {
            case 1: return (f(x + step) - f(x - step)) / (2.0 * step);
            case 2: return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
            case 3:
                return (f(x + 2.0 * step) - 2.0 * f(x + step) + 2.0 * f(x - step) -
                        f(x - 2.0 * step)) /
                       (2.0 * step * step * step);
            case 4:
                return (f(x + 2.0 * step) - 4.0 * f(x + step) + 6.0 * f(x) -
                        4.0 * f(x - step) + f(x - 2.0 * step)) /
                       (step * step * step * step);
            default:
                throw std::invalid_argument("fd_derivative: order must be 1..4");
        }
    };
    const double coarse = stencil(h);
    const double fine = stencil(h / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

inline double conditional_backhaul_impl(const Scenario& scn, double r1_m,
                                        LosState serving_state,
                                        const LosProbabilityTable& pl,
                                        const QuadratureConfig& q) {
    const int m_t = scn.net.fading_order(serving_state);
    if (m_t > q.max_fading_order)
        throw std::invalid_argument("conditional_backhaul: fading order exceeds configured max");

    const double dg = scn.delta_gamma_m();
    const double theta = scn.threshold;
    const double phi1 = std::atan2(dg, r1_m);
    const double mu1 = sector_gain(scn.net.sector, phi1);
    const double d_sq = r1_m * r1_m + dg * dg;
    const double s =
        m_t * theta * std::pow(d_sq, scn.net.alpha(serving_state) / 2.0) / mu1;

    const auto region = illuminated_region(scn.antenna, dg, r1_m);

    std::vector<double> f_derivs;
    if (!q.use_finite_differences || m_t == 1) {
        const auto g = total_log_derivatives(scn, s, region, pl, m_t - 1, q);
        f_derivs = exp_derivatives(g);
    } else {
        auto big_f = [&](double x) {
            const auto g0 = total_log_derivatives(scn, x, region, pl, 0, q);
            return std::exp(g0[0]);
        };
        f_derivs.resize(static_cast<std::size_t>(m_t));
        f_derivs[0] = big_f(s);
        const double h = q.fd_step * std::max(s, 1.0);
        double s_pow = 1.0;
        for (int k = 1; k < m_t; ++k) {
            s_pow *= s;  // FD yields raw F^(k); rescale to match the Bell path
            f_derivs[static_cast<std::size_t>(k)] = s_pow * fd_derivative(big_f, s, k, h);
        }
    }

    // P = sum_k (-1)^k s^k F^(k) / k!, with s^k F^(k) already in f_derivs.
    double prob = 0.0;
    double inv_fact = 1.0;
    for (int k = 0; k < m_t; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        prob += sign * inv_fact * f_derivs[static_cast<std::size_t>(k)];
        inv_fact /= (k + 1);
    }
    return std::clamp(prob, 0.0, 1.0);
}

}  // namespace detail

/// P(SINR >= theta | R1 = r1, serving LOS state), the Nakagami-m conditional
/// backhaul probability.
inline double conditional_backhaul(const Scenario& scn, double r1_m, LosState serving_state,
                                   const QuadratureConfig& q = {}) {
    scn.validate();
    q.validate();
    if (!(r1_m >= 0.0))
        throw std::invalid_argument("conditional_backhaul: r1_m must be >= 0");
    const LosProbabilityTable pl(scn.env, scn.net.station_height_m, scn.uav_height_m);
    return detail::conditional_backhaul_impl(scn, r1_m, serving_state, pl, q);
}

/// Outer-integral truncation radius: Rayleigh serving-distance tail mass below
/// abs_tol/10.
inline double serving_distance_truncation_m(double density_per_m2, double abs_tol) {
    return std::sqrt(std::log(10.0 / abs_tol) / (kPi * density_per_m2));
}

/// Overall backhaul probability P(SINR >= theta): the conditional probabilities
/// deconditioned over the serving LOS state and the Rayleigh serving distance.
inline CoverageResult backhaul_probability(const Scenario& scn,
                                           const QuadratureConfig& q = {}) {
    scn.validate();
    q.validate();

    const double lambda = scn.net.density_per_m2;
    const double r_max =
        q.r_max_m > 0.0 ? q.r_max_m
                        : serving_distance_truncation_m(lambda, q.outer_abs_tol);
    const double tail_mass = std::exp(-kPi * lambda * r_max * r_max);

    const LosProbabilityTable pl(scn.env, scn.net.station_height_m, scn.uav_height_m);

    auto integrand = [&](double r1) {
        const double w_los = pl(r1);
        double v = 0.0;
        if (w_los > 0.0)
            v += w_los * detail::conditional_backhaul_impl(scn, r1, LosState::Los, pl, q);
        if (w_los < 1.0)
            v += (1.0 - w_los) *
                 detail::conditional_backhaul_impl(scn, r1, LosState::Nlos, pl, q);
        return v * serving_distance_pdf(lambda, r1);
    };

    // pl(r1) is piecewise constant: seed the outer quadrature at its jumps.
    const auto res = integrate_knots(
        integrand,
        uniform_knots(0.0, r_max, los_step_spacing_m(scn.env), pl.negligible_beyond_m()),
        q.outer_rel_tol, q.outer_abs_tol);

    CoverageResult out;
    out.probability = std::clamp(res.value, 0.0, 1.0);
    out.std_error = res.error + tail_mass;
    out.n_trials = 0;
    out.method = Method::Analytic;
    return out;
}

}  // namespace aerocov
