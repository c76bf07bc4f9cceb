#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "aerocov/antenna.hpp"

namespace aerocov {

enum class LosState { Los, Nlos };

/// Station deployment and channel parameters.
struct NetworkParams {
    double density_per_m2 = 1e-6;   ///< lambda
    double station_height_m = 30.0; ///< gamma_G
    double tx_power_w = 40.0;       ///< p
    double near_field_loss = 1.0;   ///< c, linear scale
    double noise_w = 8e-13;         ///< sigma^2
    double alpha_los = 2.1;
    double alpha_nlos = 4.0;
    int m_los = 1;
    int m_nlos = 1;
    SectorAntennaParams sector;

    double alpha(LosState s) const { return s == LosState::Los ? alpha_los : alpha_nlos; }
    int fading_order(LosState s) const { return s == LosState::Los ? m_los : m_nlos; }

    void validate() const {
        if (!(density_per_m2 > 0.0))
            throw std::invalid_argument("network.density must be > 0");
        if (!(tx_power_w > 0.0))
            throw std::invalid_argument("network.tx_power_w must be > 0");
        if (!(near_field_loss > 0.0))
            throw std::invalid_argument("network.near_field_loss must be > 0");
        if (!(noise_w >= 0.0))
            throw std::invalid_argument("network.noise_w must be >= 0");
        if (!(alpha_los > 0.0) || !(alpha_nlos > 0.0))
            throw std::invalid_argument("network path-loss exponents must be > 0");
        if (m_los < 1 || m_nlos < 1)
            throw std::invalid_argument("network fading orders must be integers >= 1");
        sector.validate();
    }
};

/// Received power p*H*eta*mu*c*(r^2 + dg^2)^(-alpha_t/2).
inline double received_power(const NetworkParams& net, double eta, double mu, double r_m,
                             double delta_gamma_m, LosState state, double fading) {
    if (!(fading >= 0.0))
        throw std::invalid_argument("received_power: fading must be >= 0");
    const double d_sq = r_m * r_m + delta_gamma_m * delta_gamma_m;
    if (!(d_sq > 0.0))
        throw std::invalid_argument("received_power: zero 3D distance");
    return net.tx_power_w * fading * eta * mu * net.near_field_loss *
           std::pow(d_sq, -net.alpha(state) / 2.0);
}

/// Unit-mean Nakagami-m power fading: H ~ Gamma(m, 1/m), drawn as the mean of
/// m unit exponentials. m = 1 is Rayleigh (exponential power).
template <class Rng>
double sample_fading(int m, Rng& rng) {
    if (m < 1)
        throw std::invalid_argument("sample_fading: m must be >= 1");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double sum = 0.0;
    for (int i = 0; i < m; ++i)
        sum += -std::log1p(-u01(rng));
    return sum / m;
}

inline double sinr(double signal_w, double interference_w, double noise_w) {
    if (!(signal_w >= 0.0) || !(interference_w >= 0.0) || !(noise_w >= 0.0))
        throw std::invalid_argument("sinr: negative input");
    const double denom = interference_w + noise_w;
    if (!(denom > 0.0))
        throw std::invalid_argument("sinr: zero denominator");
    return signal_w / denom;
}

enum class Method { Analytic, MonteCarlo };

inline const char* to_string(Method m) {
    return m == Method::Analytic ? "analytic" : "monte-carlo";
}

/// Coverage probability estimate with provenance.
struct CoverageResult {
    double probability = 0.0;
    double std_error = 0.0;  ///< MC standard error, or quadrature tolerance
    std::uint64_t n_trials = 0;  ///< 0 for analytic
    Method method = Method::Analytic;
};

}  // namespace aerocov
