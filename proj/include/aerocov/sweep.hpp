#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "aerocov/analytic.hpp"
#include "aerocov/montecarlo.hpp"

namespace aerocov {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

struct SweepAxis {
    std::string parameter;
    std::vector<nlohmann::json> values;
};

/// Fully validated sweep description: base scenario, axes, engines and
/// deployments to run, MC and quadrature settings, output target.
struct SweepSpec {
    std::string preset_name;  // empty when not preset-based
    Scenario scenario_base;
    bool auto_uptilt = true;  // recompute GS uptilt per grid point
    TerrestrialBsParams terrestrial;
    Association association = Association::Nearest;
    std::vector<SweepAxis> axes;
    std::vector<Method> engines;
    std::vector<Deployment::Kind> deployments;
    TrialConfig trials;
    QuadratureConfig quadrature;
    std::string output_path = "results.csv";
    OutputFormat output_format = OutputFormat::Csv;
    bool timing = false;
};

namespace detail {

template <class T>
T require(const nlohmann::json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key))
        throw ConfigError("missing required field `" + (path.empty() ? key : path + "." + key) +
                          "`");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("field `" + path + "." + key + "`: " + e.what());
    }
}

template <class T>
T get_or(const nlohmann::json& j, const std::string& path, const std::string& key, T fallback) {
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("field `" + path + "." + key + "`: " + e.what());
    }
}

inline void check_range(bool ok, const std::string& field, const std::string& invariant) {
    if (!ok)
        throw ConfigError("field `" + field + "` violates " + invariant);
}

inline UavAntenna parse_antenna(const nlohmann::json& uav) {
    const std::string kind = get_or<std::string>(uav, "uav", "antenna", "omni");
    const double bw_deg = get_or<double>(uav, "uav", "beamwidth_deg", 60.0);
    if (kind == "omni")
        return UavAntenna::omni();
    check_range(bw_deg > 0.0 && bw_deg < 360.0, "uav.beamwidth_deg", "0 < beamwidth < 360 deg");
    if (kind == "fixed")
        return UavAntenna::fixed_directional(deg_to_rad(bw_deg));
    if (kind == "steerable")
        return UavAntenna::steerable(deg_to_rad(bw_deg));
    throw ConfigError("field `uav.antenna`: expected omni, fixed or steerable, got `" + kind +
                      "`");
}

}  // namespace detail

/// Parse and validate a config tree. dB- and degree-valued boundary fields are
/// converted to linear scale / radians here, exactly once.
inline SweepSpec load_config_json(const nlohmann::json& j) {
    using detail::check_range;
    using detail::get_or;
    using detail::require;

    SweepSpec spec;
    spec.preset_name = get_or<std::string>(j, "", "preset", "");

    // environment
    const auto env = j.value("environment", nlohmann::json::object());
    spec.scenario_base.env.beta_per_km2 = get_or<double>(env, "environment", "beta_per_km2", 300.0);
    spec.scenario_base.env.delta = get_or<double>(env, "environment", "delta", 0.5);
    spec.scenario_base.env.kappa_m = get_or<double>(env, "environment", "kappa_m", 20.0);
    check_range(spec.scenario_base.env.beta_per_km2 > 0, "environment.beta_per_km2", "beta > 0");
    check_range(spec.scenario_base.env.delta > 0 && spec.scenario_base.env.delta < 1,
                "environment.delta", "0 < delta < 1");
    check_range(spec.scenario_base.env.kappa_m > 0, "environment.kappa_m", "kappa > 0");

    // network
    const auto net = j.value("network", nlohmann::json::object());
    auto& n = spec.scenario_base.net;
    n.density_per_m2 = get_or<double>(net, "network", "density_per_km2", 1.0) * 1e-6;
    n.station_height_m = get_or<double>(net, "network", "station_height_m", 30.0);
    n.tx_power_w = get_or<double>(net, "network", "tx_power_w", 40.0);
    n.near_field_loss = db_to_linear(get_or<double>(net, "network", "near_field_loss_db", -38.4));
    n.noise_w = get_or<double>(net, "network", "noise_w", 8e-13);
    n.alpha_los = get_or<double>(net, "network", "alpha_los", 2.1);
    n.alpha_nlos = get_or<double>(net, "network", "alpha_nlos", 4.0);
    n.m_los = get_or<int>(net, "network", "m_los", 1);
    n.m_nlos = get_or<int>(net, "network", "m_nlos", 1);
    check_range(n.density_per_m2 > 0, "network.density_per_km2", "lambda > 0");
    check_range(n.tx_power_w > 0, "network.tx_power_w", "p > 0");
    check_range(n.noise_w >= 0, "network.noise_w", "sigma^2 >= 0");
    check_range(n.alpha_los > 0 && n.alpha_nlos > 0, "network.alpha_los/alpha_nlos",
                "alpha > 0");
    check_range(n.m_los >= 1 && n.m_nlos >= 1, "network.m_los/m_nlos", "m >= 1");

    const auto sector = net.value("sector", nlohmann::json::object());
    n.sector.horizontal_gain =
        db_to_linear(get_or<double>(sector, "network.sector", "horizontal_gain_db", -5.0));
    n.sector.vertical_3db_beamwidth_rad =
        deg_to_rad(get_or<double>(sector, "network.sector", "vertical_3db_beamwidth_deg", 10.0));
    n.sector.sidelobe_floor_db =
        get_or<double>(sector, "network.sector", "sidelobe_floor_db", 20.0);
    check_range(n.sector.vertical_3db_beamwidth_rad > 0,
                "network.sector.vertical_3db_beamwidth_deg", "beamwidth > 0");
    check_range(n.sector.sidelobe_floor_db > 0, "network.sector.sidelobe_floor_db", "SLA > 0");
    if (sector.contains("uptilt_deg") && sector.at("uptilt_deg").is_number()) {
        spec.auto_uptilt = false;
        n.sector.tilt_rad = deg_to_rad(sector.at("uptilt_deg").get<double>());
    } else {
        spec.auto_uptilt = true;  // "auto" or absent
    }

    // uav
    const auto uav = j.value("uav", nlohmann::json::object());
    spec.scenario_base.antenna = detail::parse_antenna(uav);
    spec.scenario_base.uav_height_m = get_or<double>(uav, "uav", "height_m", 120.0);
    check_range(spec.scenario_base.uav_height_m >= 0, "uav.height_m", "gamma >= 0");

    // threshold (required)
    const double threshold_db = require<double>(j, "", "threshold_db");
    spec.scenario_base.threshold = db_to_linear(threshold_db);

    // terrestrial comparison network
    const auto ter = j.value("terrestrial", nlohmann::json::object());
    spec.terrestrial.density_per_m2 =
        get_or<double>(ter, "terrestrial", "density_per_km2", 5.0) * 1e-6;
    spec.terrestrial.height_m = get_or<double>(ter, "terrestrial", "height_m", 30.0);
    spec.terrestrial.sector = n.sector;
    spec.terrestrial.sector.horizontal_gain =
        db_to_linear(get_or<double>(ter, "terrestrial", "horizontal_gain_db", -5.0));
    spec.terrestrial.sector.tilt_rad =
        -deg_to_rad(get_or<double>(ter, "terrestrial", "downtilt_deg", 6.0));
    check_range(spec.terrestrial.density_per_m2 > 0, "terrestrial.density_per_km2",
                "lambda > 0");
    const std::string assoc = get_or<std::string>(ter, "terrestrial", "association", "nearest");
    if (assoc == "nearest")
        spec.association = Association::Nearest;
    else if (assoc == "strongest")
        spec.association = Association::StrongestMeanPower;
    else
        throw ConfigError("field `terrestrial.association`: expected nearest or strongest");

    // sweep axes / engines / deployments
    const auto sweep = j.value("sweep", nlohmann::json::object());
    if (sweep.contains("axes")) {
        for (const auto& axis : sweep.at("axes")) {
            SweepAxis a;
            a.parameter = require<std::string>(axis, "sweep.axes[]", "parameter");
            const auto vals = require<nlohmann::json>(axis, "sweep.axes[]", "values");
            if (!vals.is_array() || vals.empty())
                throw ConfigError("field `sweep.axes[].values` must be a non-empty array");
            for (const auto& v : vals)
                a.values.push_back(v);
            static const char* known[] = {"density_per_km2", "uav_height_m", "threshold_db",
                                          "antenna_kind", "beamwidth_deg"};
            bool ok = false;
            for (const char* k : known)
                ok = ok || a.parameter == k;
            if (!ok)
                throw ConfigError("field `sweep.axes[].parameter`: unknown parameter `" +
                                  a.parameter + "`");
            spec.axes.push_back(std::move(a));
        }
    }
    if (spec.axes.empty()) {
        // Single-point run: one trivial axis keeps the grid machinery uniform.
        spec.axes.push_back({"uav_height_m", {spec.scenario_base.uav_height_m}});
    }

    for (const auto& e :
         get_or<std::vector<std::string>>(sweep, "sweep", "engines", {"analytic", "monte-carlo"})) {
        if (e == "analytic")
            spec.engines.push_back(Method::Analytic);
        else if (e == "monte-carlo" || e == "mc")
            spec.engines.push_back(Method::MonteCarlo);
        else
            throw ConfigError("field `sweep.engines`: expected analytic or monte-carlo");
    }
    for (const auto& d : get_or<std::vector<std::string>>(sweep, "sweep", "deployments", {"gs"})) {
        if (d == "gs")
            spec.deployments.push_back(Deployment::Kind::DedicatedGs);
        else if (d == "terrestrial")
            spec.deployments.push_back(Deployment::Kind::TerrestrialBs);
        else
            throw ConfigError("field `sweep.deployments`: expected gs or terrestrial");
    }
    if (spec.engines.empty() || spec.deployments.empty())
        throw ConfigError("sweep.engines and sweep.deployments must be non-empty");
    bool any_pair = false;
    for (auto e : spec.engines)
        for (auto d : spec.deployments)
            any_pair = any_pair ||
                       !(e == Method::Analytic && d == Deployment::Kind::TerrestrialBs);
    if (!any_pair)
        throw ConfigError(
            "the analytic engine does not support the terrestrial deployment; no runnable "
            "engine/deployment pair remains");

    // mc / quadrature / output
    const auto mc = j.value("mc", nlohmann::json::object());
    spec.trials.n_trials = get_or<std::uint64_t>(mc, "mc", "trials", 100000);
    spec.trials.seed = get_or<std::uint64_t>(mc, "mc", "seed", 1);
    spec.trials.sim_radius_m = get_or<double>(mc, "mc", "sim_radius_m", 0.0);
    spec.trials.n_workers = get_or<int>(mc, "mc", "workers", 0);
    spec.trials.serving_lobe_exclusion =
        get_or<bool>(mc, "mc", "serving_lobe_exclusion", false);
    check_range(spec.trials.n_trials >= 1, "mc.trials", "n_trials >= 1");

    const auto quad = j.value("quadrature", nlohmann::json::object());
    spec.quadrature.rel_tol = get_or<double>(quad, "quadrature", "rel_tol", 1e-6);
    spec.quadrature.abs_tol = get_or<double>(quad, "quadrature", "abs_tol", 1e-9);
    spec.quadrature.outer_rel_tol =
        get_or<double>(quad, "quadrature", "outer_rel_tol", 1e-4);
    spec.quadrature.outer_abs_tol =
        get_or<double>(quad, "quadrature", "outer_abs_tol", 1e-6);
    spec.quadrature.r_max_m = get_or<double>(quad, "quadrature", "r_max_m", 0.0);
    spec.quadrature.fd_step = get_or<double>(quad, "quadrature", "fd_step", 1e-3);
    check_range(spec.quadrature.rel_tol > 0 && spec.quadrature.abs_tol > 0,
                "quadrature.rel_tol/abs_tol", "tolerances > 0");

    const auto out = j.value("output", nlohmann::json::object());
    spec.output_path = get_or<std::string>(out, "output", "path", "results.csv");
    const std::string fmt = get_or<std::string>(out, "output", "format", "csv");
    if (fmt == "csv")
        spec.output_format = OutputFormat::Csv;
    else if (fmt == "json")
        spec.output_format = OutputFormat::Json;
    else
        throw ConfigError("field `output.format`: expected csv or json");
    spec.timing = get_or<bool>(out, "output", "timing", false);

    spec.scenario_base.validate();
    spec.terrestrial.validate();
    return spec;
}

inline SweepSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return load_config_json(j);
}

/// One evaluated grid point. Probability/std_error are valid only when
/// status == "ok".
struct SweepRow {
    std::string preset;
    std::string antenna_kind;
    std::string deployment;
    double density_per_km2 = 0.0;
    double uav_height_m = 0.0;
    double threshold_db = 0.0;
    Method method = Method::Analytic;
    double probability = 0.0;
    double std_error = 0.0;
    std::uint64_t n_trials = 0;
    std::string status = "ok";
    std::int64_t wall_ms = 0;
};

namespace detail {

struct GridPoint {
    Scenario scn;
    std::vector<std::size_t> axis_index;
};

inline void apply_axis_value(Scenario& scn, const std::string& parameter,
                             const nlohmann::json& value) {
    try {
        if (parameter == "density_per_km2")
            scn.net.density_per_m2 = value.get<double>() * 1e-6;
        else if (parameter == "uav_height_m")
            scn.uav_height_m = value.get<double>();
        else if (parameter == "threshold_db")
            scn.threshold = db_to_linear(value.get<double>());
        else if (parameter == "antenna_kind") {
            const std::string k = value.get<std::string>();
            const double bw = scn.antenna.beamwidth_rad > 0.0 ? scn.antenna.beamwidth_rad
                                                              : deg_to_rad(60.0);
            if (k == "omni")
                scn.antenna = UavAntenna::omni();
            else if (k == "fixed")
                scn.antenna = UavAntenna::fixed_directional(bw);
            else if (k == "steerable")
                scn.antenna = UavAntenna::steerable(bw);
            else
                throw ConfigError("axis antenna_kind: unknown value `" + k + "`");
        } else if (parameter == "beamwidth_deg") {
            scn.antenna.beamwidth_rad = deg_to_rad(value.get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("axis `" + parameter + "` value: " + e.what());
    }
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace detail

/// Evaluate the full axes cross-product for every requested engine/deployment
/// pair. Rows come back in a deterministic order regardless of how many
/// workers evaluated them. Per-point failures are recorded in the status
/// column and do not abort the sweep.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    // Expand the cross product in axis order.
    std::vector<detail::GridPoint> grid;
    std::vector<std::size_t> idx(spec.axes.size(), 0);
    for (;;) {
        detail::GridPoint gp;
        gp.scn = spec.scenario_base;
        gp.axis_index = idx;
        for (std::size_t a = 0; a < spec.axes.size(); ++a)
            detail::apply_axis_value(gp.scn, spec.axes[a].parameter,
                                     spec.axes[a].values[idx[a]]);
        grid.push_back(std::move(gp));
        std::size_t a = spec.axes.size();
        while (a > 0) {
            --a;
            if (++idx[a] < spec.axes[a].values.size())
                break;
            idx[a] = 0;
            if (a == 0)
                goto expanded;
        }
    }
expanded:;

    // Density axes apply to the GS network only; terrestrial rows collapse
    // them (the comparison network keeps its configured density).
    std::vector<std::size_t> density_axes;
    for (std::size_t a = 0; a < spec.axes.size(); ++a)
        if (spec.axes[a].parameter == "density_per_km2")
            density_axes.push_back(a);

    struct Job {
        const detail::GridPoint* point;
        Method engine;
        Deployment::Kind deployment;
    };
    std::vector<Job> jobs;
    for (const auto& gp : grid) {
        for (auto engine : spec.engines) {
            for (auto dep : spec.deployments) {
                if (engine == Method::Analytic && dep == Deployment::Kind::TerrestrialBs)
                    continue;
                if (dep == Deployment::Kind::TerrestrialBs) {
                    bool first_density = true;
                    for (auto a : density_axes)
                        first_density = first_density && gp.axis_index[a] == 0;
                    if (!first_density)
                        continue;
                }
                jobs.push_back({&gp, engine, dep});
            }
        }
    }

    std::vector<SweepRow> rows(jobs.size());

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned pool_size =
        static_cast<unsigned>(std::min<std::size_t>(jobs.size(), hw));
    TrialConfig trial_cfg = spec.trials;
    if (trial_cfg.n_workers == 0 && pool_size > 1)
        trial_cfg.n_workers = std::max(1u, hw / pool_size);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size())
                return;
            const Job& job = jobs[i];
            SweepRow row;
            row.preset = spec.preset_name;
            row.antenna_kind = to_string(job.point->scn.antenna.kind);
            row.deployment = to_string(job.deployment);
            row.uav_height_m = job.point->scn.uav_height_m;
            row.threshold_db = linear_to_db(job.point->scn.threshold);
            row.method = job.engine;
            row.density_per_km2 = job.deployment == Deployment::Kind::TerrestrialBs
                                      ? spec.terrestrial.density_per_m2 * 1e6
                                      : job.point->scn.net.density_per_m2 * 1e6;

            const auto t0 = std::chrono::steady_clock::now();
            try {
                Scenario scn = job.point->scn;
                if (spec.auto_uptilt)
                    scn = with_auto_uptilt(scn);
                CoverageResult res;
                if (job.engine == Method::Analytic) {
                    res = backhaul_probability(scn, spec.quadrature);
                } else {
                    Deployment dep;
                    dep.kind = job.deployment;
                    dep.bs = spec.terrestrial;
                    dep.association = spec.association;
                    res = estimate_coverage(scn, dep, trial_cfg);
                }
                row.probability = res.probability;
                row.std_error = res.std_error;
                row.n_trials = res.n_trials;
                row.status = "ok";
            } catch (const std::exception& e) {
                row.status = std::string("error: ") + e.what();
            }
            const auto t1 = std::chrono::steady_clock::now();
            row.wall_ms = spec.timing
                              ? std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                                    .count()
                              : 0;
            rows[i] = std::move(row);
        }
    };

    if (pool_size <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < pool_size; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    return rows;
}

inline const char* kCsvHeader =
    "preset,antenna_kind,deployment,density_per_km2,uav_height_m,threshold_db,method,"
    "probability,std_error,n_trials,status,wall_ms";

inline std::string to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << kCsvHeader << "\n";
    for (const auto& r : rows) {
        std::string status = r.status;
        for (auto& c : status)
            if (c == ',' || c == '\n')
                c = ';';
        os << r.preset << ',' << r.antenna_kind << ',' << r.deployment << ','
           << detail::format_double(r.density_per_km2) << ','
           << detail::format_double(r.uav_height_m) << ','
           << detail::format_double(r.threshold_db) << ',' << to_string(r.method) << ',';
        if (r.status == "ok")
            os << detail::format_double(r.probability) << ','
               << detail::format_double(r.std_error);
        else
            os << ',';
        os << ',' << r.n_trials << ',' << status << ',' << r.wall_ms << "\n";
    }
    return os.str();
}

inline std::string to_json(const std::vector<SweepRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json o{{"preset", r.preset},
                         {"antenna_kind", r.antenna_kind},
                         {"deployment", r.deployment},
                         {"density_per_km2", r.density_per_km2},
                         {"uav_height_m", r.uav_height_m},
                         {"threshold_db", r.threshold_db},
                         {"method", to_string(r.method)},
                         {"n_trials", r.n_trials},
                         {"status", r.status},
                         {"wall_ms", r.wall_ms}};
        if (r.status == "ok") {
            o["probability"] = r.probability;
            o["std_error"] = r.std_error;
        }
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

inline bool all_ok(const std::vector<SweepRow>& rows) {
    for (const auto& r : rows)
        if (r.status != "ok")
            return false;
    return true;
}

}  // namespace aerocov
