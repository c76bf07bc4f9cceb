#pragma once

#include "aerocov/aerocov.hpp"

namespace testutil {

/// Baseline urban GS scenario used across the suites (LTE-style link budget,
/// 10 dB threshold, auto uptilt).
inline aerocov::Scenario gs_scenario(const aerocov::UavAntenna& antenna,
                                     double density_per_km2, double uav_height_m,
                                     double threshold_db = 10.0) {
    aerocov::Scenario scn;
    scn.env = {300.0, 0.5, 20.0};
    scn.net.density_per_m2 = density_per_km2 * 1e-6;
    scn.net.station_height_m = 30.0;
    scn.net.tx_power_w = 40.0;
    scn.net.near_field_loss = aerocov::db_to_linear(-38.4);
    scn.net.noise_w = 8e-13;
    scn.net.alpha_los = 2.1;
    scn.net.alpha_nlos = 4.0;
    scn.net.m_los = 1;
    scn.net.m_nlos = 1;
    scn.net.sector.horizontal_gain = aerocov::db_to_linear(-5.0);
    scn.net.sector.vertical_3db_beamwidth_rad = aerocov::deg_to_rad(10.0);
    scn.net.sector.sidelobe_floor_db = 20.0;
    scn.antenna = antenna;
    scn.uav_height_m = uav_height_m;
    scn.threshold = aerocov::db_to_linear(threshold_db);
    return aerocov::with_auto_uptilt(scn);
}

inline aerocov::TerrestrialBsParams terrestrial_bs(double density_per_km2 = 5.0,
                                                   double downtilt_deg = 6.0) {
    aerocov::TerrestrialBsParams bs;
    bs.density_per_m2 = density_per_km2 * 1e-6;
    bs.height_m = 30.0;
    bs.sector.horizontal_gain = aerocov::db_to_linear(-5.0);
    bs.sector.tilt_rad = -aerocov::deg_to_rad(downtilt_deg);
    bs.sector.vertical_3db_beamwidth_rad = aerocov::deg_to_rad(10.0);
    bs.sector.sidelobe_floor_db = 20.0;
    return bs;
}

}  // namespace testutil
