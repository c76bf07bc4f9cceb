#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "aerocov/analytic.hpp"
#include "aerocov/antenna.hpp"
#include "aerocov/channel.hpp"
#include "aerocov/environment.hpp"
#include "aerocov/rng.hpp"

namespace aerocov {

enum class Association { Nearest, StrongestMeanPower };

/// Terrestrial comparison network: its own density, height and (downtilted)
/// sector pattern; channel constants are shared with the scenario.
struct TerrestrialBsParams {
    double density_per_m2 = 5e-6;
    double height_m = 30.0;
    SectorAntennaParams sector{db_to_linear(-5.0), deg_to_rad(-6.0), deg_to_rad(10.0), 20.0};

    void validate() const {
        if (!(density_per_m2 > 0.0))
            throw std::invalid_argument("terrestrial.density must be > 0");
        sector.validate();
    }
};

/// Which network serves the UAV in a simulation run.
struct Deployment {
    enum class Kind { DedicatedGs, TerrestrialBs };
    Kind kind = Kind::DedicatedGs;
    TerrestrialBsParams bs;  ///< used only for TerrestrialBs
    Association association = Association::Nearest;

    static Deployment dedicated_gs() { return {}; }
    static Deployment terrestrial(TerrestrialBsParams p,
                                  Association a = Association::Nearest) {
        return {Kind::TerrestrialBs, p, a};
    }
};

inline const char* to_string(Deployment::Kind k) {
    return k == Deployment::Kind::DedicatedGs ? "gs" : "terrestrial";
}

struct TrialConfig {
    std::uint64_t n_trials = 100000;
    double sim_radius_m = 0.0;  ///< 0 = auto
    std::uint64_t seed = 1;
    int n_workers = 0;  ///< 0 = hardware concurrency
    bool serving_lobe_exclusion = false;  ///< fixed antenna: zero serving gain when r1 > v

    void validate() const {
        if (n_trials < 1)
            throw std::invalid_argument("trials.n_trials must be >= 1");
        if (sim_radius_m < 0.0)
            throw std::invalid_argument("trials.sim_radius_m must be >= 0");
    }
};

struct McDiagnostics {
    std::uint64_t resampled_empty = 0;
    std::uint64_t serving_outside_lobe = 0;  ///< fixed antenna, r1 > v
};

struct StationPos {
    double x = 0.0, y = 0.0;
    double r() const { return std::hypot(x, y); }
    double azimuth() const { return std::atan2(y, x); }
};

/// PPP sample on a disc of the given radius centered at the origin.
template <class Rng>
std::vector<StationPos> sample_deployment(double density_per_m2, double sim_radius_m,
                                          Rng& rng) {
    if (!(density_per_m2 > 0.0) || !(sim_radius_m > 0.0))
        throw std::invalid_argument("sample_deployment: density and radius must be > 0");
    const double mean = density_per_m2 * kPi * sim_radius_m * sim_radius_m;
    std::poisson_distribution<int> count(mean);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int n = count(rng);
    std::vector<StationPos> out(static_cast<std::size_t>(n));
    for (auto& p : out) {
        const double r = sim_radius_m * std::sqrt(u01(rng));
        const double az = 2.0 * kPi * u01(rng);
        p = {r * std::cos(az), r * std::sin(az)};
    }
    return out;
}

namespace detail {

/// Mean aggregate-interference density at horizontal distance r (unit fading,
/// both LOS classes, full circle): used only to size the simulation disc.
inline double mean_interference_density(const Scenario& scn, double station_height_m,
                                        const SectorAntennaParams& sector, double density,
                                        const LosProbabilityTable& pl, double r) {
    const double dg = scn.uav_height_m - station_height_m;
    const double phi = std::atan2(dg, r);
    const double d_sq = r * r + dg * dg;
    const double w = pl(r);
    const double path = w * std::pow(d_sq, -scn.net.alpha_los / 2.0) +
                        (1.0 - w) * std::pow(d_sq, -scn.net.alpha_nlos / 2.0);
    return density * 2.0 * kPi * sector_gain(sector, phi) * path * r;
}

}  // namespace detail

/// Simulation disc radius: at least max(10*E[R1], 5 km), grown until the mean
/// interference originating beyond the disc is under 0.1% of the in-disc mean.
inline double recommended_sim_radius(const Scenario& scn, const Deployment& dep) {
    const bool bs = dep.kind == Deployment::Kind::TerrestrialBs;
    const double density = bs ? dep.bs.density_per_m2 : scn.net.density_per_m2;
    const double station_h = bs ? dep.bs.height_m : scn.net.station_height_m;
    const auto& sector = bs ? dep.bs.sector : scn.net.sector;

    double radius = std::max(10.0 * mean_serving_distance_m(density), 5000.0);

    const LosProbabilityTable pl(scn.env, station_h, scn.uav_height_m);
    auto density_fn = [&](double r) {
        return detail::mean_interference_density(scn, station_h, sector, density, pl, r);
    };
    const double r_lo = std::max(1.0, 0.1 * mean_serving_distance_m(density));
    const double spacing = los_step_spacing_m(scn.env);
    const double cutoff = pl.negligible_beyond_m();
    while (radius < 2e5) {
        const double inside =
            integrate_knots(density_fn, uniform_knots(r_lo, radius, spacing, cutoff),
                            1e-4, 1e-12)
                .value;
        const double tail = integrate_semi_infinite(density_fn, radius, 1e-4, 1e-12,
                                                    radius, 64, spacing, cutoff)
                                .value;
        if (tail <= 1e-3 * inside)
            break;
        radius *= 2.0;
    }
    return radius;
}

struct TrialDetail {
    double r1_m = 0.0;
    LosState serving_state = LosState::Los;
    double signal_w = 0.0;
    double interference_w = 0.0;
    int n_interferers = 0;
    double min_interferer_r_m = std::numeric_limits<double>::infinity();
    bool covered = false;
};

/// Precomputed per-(scenario, deployment) state shared by all trials.
class TrialContext {
  public:
    TrialContext(const Scenario& scn, const Deployment& dep, const TrialConfig& cfg)
        : scn_(scn),
          dep_(dep),
          cfg_(cfg),
          bs_(dep.kind == Deployment::Kind::TerrestrialBs),
          density_(bs_ ? dep.bs.density_per_m2 : scn.net.density_per_m2),
          station_height_m_(bs_ ? dep.bs.height_m : scn.net.station_height_m),
          sector_(bs_ ? dep.bs.sector : scn.net.sector),
          delta_gamma_m_(scn.uav_height_m - station_height_m_),
          eta_(uav_gain(scn.antenna)),
          pl_(scn.env, station_height_m_, scn.uav_height_m),
          radius_m_(cfg.sim_radius_m > 0.0 ? cfg.sim_radius_m
                                           : recommended_sim_radius(scn, dep)) {
        scn.validate();
        cfg.validate();
        if (bs_)
            dep.bs.validate();
    }

    const Scenario& scenario() const { return scn_; }
    double sim_radius_m() const { return radius_m_; }
    double density() const { return density_; }
    double delta_gamma_m() const { return delta_gamma_m_; }
    const SectorAntennaParams& sector() const { return sector_; }
    const LosProbabilityTable& los_table() const { return pl_; }

    template <class Rng>
    bool run_trial(Rng& rng, TrialDetail* detail = nullptr,
                   McDiagnostics* diag = nullptr) const {
        std::uniform_real_distribution<double> u01(0.0, 1.0);

        std::vector<StationPos> stations = sample_deployment(density_, radius_m_, rng);
        while (stations.empty()) {
            if (diag)
                ++diag->resampled_empty;
            stations = sample_deployment(density_, radius_m_, rng);
        }

        // Blockage is a quasi-static property of the built environment, so
        // every station's LOS state is realized before association: a receiver
        // measuring signal strength sees the actual blockage, not its mean.
        std::vector<LosState> states(stations.size());
        for (std::size_t i = 0; i < stations.size(); ++i)
            states[i] = u01(rng) < pl_(stations[i].r()) ? LosState::Los : LosState::Nlos;

        const std::size_t serving = select_server(stations, states);
        const StationPos& sv = stations[serving];
        const double r1 = sv.r();
        const double boresight_az = sv.azimuth();

        // Serving link.
        const LosState t1 = states[serving];
        const double h1 = sample_fading(scn_.net.fading_order(t1), rng);
        const double phi1 = std::atan2(delta_gamma_m_, r1);
        const double mu1 = sector_gain(sector_, phi1);

        const auto region = illuminated_region(scn_.antenna, delta_gamma_m_, r1);

        // The fixed cone ends at v = dg*tan(w/2); the region clamps v up to r1
        // when the ring would invert, so "serving outside the lobe" shows up
        // as an empty ring, not as r1 exceeding the clamped outer radius.
        double serving_eta = eta_;
        if (scn_.antenna.kind == UavAntennaKind::FixedDirectional && region.empty()) {
            if (diag)
                ++diag->serving_outside_lobe;
            if (cfg_.serving_lobe_exclusion)
                serving_eta = 0.0;
        }

        const double signal =
            received_power(scn_.net, serving_eta, mu1, r1, delta_gamma_m_, t1, h1);

        // Interference from the illuminated ring sector.
        double interference = 0.0;
        int n_interferers = 0;
        double min_r = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < stations.size(); ++i) {
            if (i == serving)
                continue;
            const double r = stations[i].r();
            if (!region.contains(r, stations[i].azimuth() - boresight_az))
                continue;
            const LosState t = states[i];
            const double h = sample_fading(scn_.net.fading_order(t), rng);
            const double phi = std::atan2(delta_gamma_m_, r);
            interference +=
                received_power(scn_.net, eta_, sector_gain(sector_, phi), r,
                               delta_gamma_m_, t, h);
            ++n_interferers;
            min_r = std::min(min_r, r);
        }

        const bool covered =
            sinr(signal, interference, scn_.net.noise_w) >= scn_.threshold;
        if (detail)
            *detail = {r1, t1, signal, interference, n_interferers, min_r, covered};
        return covered;
    }

  private:
    std::size_t select_server(const std::vector<StationPos>& stations,
                              const std::vector<LosState>& states) const {
        std::size_t best = 0;
        if (dep_.association == Association::Nearest) {
            double best_r = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < stations.size(); ++i) {
                const double r = stations[i].r();
                if (r < best_r) {
                    best_r = r;
                    best = i;
                }
            }
        } else {
            // Fading-averaged received power given the realized blockage.
            double best_p = -1.0;
            for (std::size_t i = 0; i < stations.size(); ++i) {
                const double r = stations[i].r();
                const double d_sq = r * r + delta_gamma_m_ * delta_gamma_m_;
                const double path = std::pow(d_sq, -scn_.net.alpha(states[i]) / 2.0);
                const double p =
                    sector_gain(sector_, std::atan2(delta_gamma_m_, r)) * path;
                if (p > best_p) {
                    best_p = p;
                    best = i;
                }
            }
        }
        return best;
    }

    Scenario scn_;
    Deployment dep_;
    TrialConfig cfg_;
    bool bs_;
    double density_;
    double station_height_m_;
    SectorAntennaParams sector_;
    double delta_gamma_m_;
    double eta_;
    LosProbabilityTable pl_;
    double radius_m_;
};

/// One end-to-end trial with a caller-supplied RNG.
template <class Rng>
bool run_trial(const Scenario& scn, const Deployment& dep, const TrialConfig& cfg,
               Rng& rng, TrialDetail* detail = nullptr, McDiagnostics* diag = nullptr) {
    const TrialContext ctx(scn, dep, cfg);
    return ctx.run_trial(rng, detail, diag);
}

/// Coverage probability over cfg.n_trials independent trials. Trial i always
/// uses substream(seed, i), so the result is identical for any worker count.
inline CoverageResult estimate_coverage(const Scenario& scn, const Deployment& dep,
                                        const TrialConfig& cfg,
                                        McDiagnostics* diag_out = nullptr) {
    // Resolve the disc radius once; sizing it involves quadrature.
    TrialConfig resolved = cfg;
    {
        const TrialContext shared(scn, dep, cfg);
        resolved.sim_radius_m = shared.sim_radius_m();
    }

    int workers = cfg.n_workers > 0 ? cfg.n_workers
                                    : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, 64));
    const std::uint64_t n = cfg.n_trials;

    std::vector<std::uint64_t> covered(static_cast<std::size_t>(workers), 0);
    std::vector<McDiagnostics> diags(static_cast<std::size_t>(workers));

    auto work = [&](int w) {
        // Each worker carries its own context copy: the lazy LOS table is not
        // safe to grow from two threads.
        const TrialContext ctx(scn, dep, resolved);
        std::uint64_t local = 0;
        for (std::uint64_t i = static_cast<std::uint64_t>(w); i < n;
             i += static_cast<std::uint64_t>(workers)) {
            auto rng = substream(cfg.seed, i);
            if (ctx.run_trial(rng, nullptr, &diags[static_cast<std::size_t>(w)]))
                ++local;
        }
        covered[static_cast<std::size_t>(w)] = local;
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
        for (auto& t : pool)
            t.join();
    }

    std::uint64_t total_covered = 0;
    for (auto c : covered)
        total_covered += c;
    if (diag_out) {
        McDiagnostics agg;
        for (const auto& d : diags) {
            agg.resampled_empty += d.resampled_empty;
            agg.serving_outside_lobe += d.serving_outside_lobe;
        }
        *diag_out = agg;
    }

    const double p = static_cast<double>(total_covered) / static_cast<double>(n);
    CoverageResult out;
    out.probability = p;
    out.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    out.n_trials = n;
    out.method = Method::MonteCarlo;
    return out;
}

}  // namespace aerocov
