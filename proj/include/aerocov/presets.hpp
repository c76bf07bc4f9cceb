#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace aerocov {

/// Shared parameter set of the figure presets (urban environment, LTE-style
/// link budget, 10 dB SINR threshold). Axis grids are repo-chosen defaults,
/// not taken from any published figure.
inline nlohmann::json preset_base() {
    return nlohmann::json{
        {"environment", {{"beta_per_km2", 300.0}, {"delta", 0.5}, {"kappa_m", 20.0}}},
        {"network",
         {{"density_per_km2", 1.0},
          {"station_height_m", 30.0},
          {"tx_power_w", 40.0},
          {"near_field_loss_db", -38.4},
          {"noise_w", 8e-13},
          {"alpha_los", 2.1},
          {"alpha_nlos", 4.0},
          {"m_los", 1},
          {"m_nlos", 1},
          {"sector",
           {{"horizontal_gain_db", -5.0},
            {"uptilt_deg", "auto"},
            {"vertical_3db_beamwidth_deg", 10.0},
            {"sidelobe_floor_db", 20.0}}}}},
        {"uav", {{"antenna", "omni"}, {"beamwidth_deg", 60.0}, {"height_m", 120.0}}},
        {"threshold_db", 10.0},
        {"terrestrial",
         {{"density_per_km2", 5.0},
          {"height_m", 30.0},
          {"downtilt_deg", 6.0},
          {"horizontal_gain_db", -5.0},
          {"association", "nearest"}}},
        {"sweep",
         {{"axes",
           nlohmann::json::array(
               {{{"parameter", "density_per_km2"},
                 {"values", {0.1, 0.25, 0.5, 1.0, 2.5, 5.0}}},
                {{"parameter", "uav_height_m"}, {"values", {30.0, 60.0, 120.0, 240.0}}}})},
          {"engines", {"analytic", "monte-carlo"}},
          {"deployments", {"gs", "terrestrial"}}}},
        {"mc", {{"trials", 100000}, {"seed", 1}, {"sim_radius_m", 0.0}, {"workers", 0}}},
        {"quadrature", {{"rel_tol", 1e-6}, {"abs_tol", 1e-9}, {"r_max_m", 0.0}}},
        {"output", {{"path", "results.csv"}, {"format", "csv"}, {"timing", false}}},
    };
}

/// fig2: omnidirectional UAV antenna. fig3: fixed downtilted 165 deg antenna.
/// fig4: steerable 60 deg antenna.
inline nlohmann::json preset(const std::string& name) {
    nlohmann::json j = preset_base();
    j["preset"] = name;
    if (name == "fig2") {
        j["uav"]["antenna"] = "omni";
    } else if (name == "fig3") {
        j["uav"]["antenna"] = "fixed";
        j["uav"]["beamwidth_deg"] = 165.0;
    } else if (name == "fig4") {
        j["uav"]["antenna"] = "steerable";
        j["uav"]["beamwidth_deg"] = 60.0;
    } else {
        throw std::invalid_argument("unknown preset: " + name +
                                    " (expected fig2, fig3 or fig4)");
    }
    return j;
}

}  // namespace aerocov
