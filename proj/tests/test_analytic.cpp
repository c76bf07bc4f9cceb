#include <catch_amalgamated.hpp>

#include "aerocov/analytic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace aerocov;

namespace {

/// m=1 closed form: single k=0 term, assembled from separate Laplace calls.
double closed_form_m1(const Scenario& scn, double r1, LosState serving,
                      const QuadratureConfig& q) {
    const double dg = scn.delta_gamma_m();
    const double mu1 = sector_gain(scn.net.sector, std::atan2(dg, r1));
    const double s = scn.threshold * std::pow(r1 * r1 + dg * dg,
                                              scn.net.alpha(serving) / 2.0) /
                     mu1;
    const double p_eta_c =
        scn.net.tx_power_w * uav_gain(scn.antenna) * scn.net.near_field_loss;
    return std::exp(-s * scn.net.noise_w / p_eta_c) *
           laplace_interference(scn, s, r1, LosState::Los, q) *
           laplace_interference(scn, s, r1, LosState::Nlos, q);
}

double serving_s(const Scenario& scn, double r1, LosState serving) {
    const double dg = scn.delta_gamma_m();
    const double mu1 = sector_gain(scn.net.sector, std::atan2(dg, r1));
    return scn.net.fading_order(serving) * scn.threshold *
           std::pow(r1 * r1 + dg * dg, scn.net.alpha(serving) / 2.0) / mu1;
}

}  // namespace

TEST_CASE("laplace transform is 1 at s = 0", "[analytic]") {
    const auto scn = testutil::gs_scenario(UavAntenna::omni(), 1.0, 100.0);
    CHECK(laplace_interference(scn, 0.0, 300.0, LosState::Los) == 1.0);
    CHECK(laplace_interference(scn, 0.0, 300.0, LosState::Nlos) == 1.0);
}

TEST_CASE("laplace transform is 1 for an empty region", "[analytic]") {
    // Fixed directional UAV below station height: nothing is illuminated.
    auto scn = testutil::gs_scenario(UavAntenna::fixed_directional(deg_to_rad(165.0)), 1.0,
                                     20.0);
    CHECK(laplace_interference(scn, 1e6, 300.0, LosState::Los) == 1.0);
}

TEST_CASE("laplace transform is non-increasing in s and in (0,1]", "[analytic]") {
    const auto scn = testutil::gs_scenario(UavAntenna::omni(), 1.0, 100.0);
    double prev = 1.0;
    for (double s = 1e2; s <= 1e10; s *= 10.0) {
        const double L = laplace_interference(scn, s, 300.0, LosState::Los);
        CHECK(L > 0.0);
        CHECK(L <= 1.0);
        CHECK(L <= prev + 1e-12);
        prev = L;
    }
}

TEST_CASE("laplace transform matches the empirical Laplace functional", "[analytic]") {
    // Quick version; the acceptance suite runs the full 1e5-realization grid.
    const auto scn = testutil::gs_scenario(UavAntenna::omni(), 1.0, 100.0);
    const double s = serving_s(scn, 300.0, LosState::Los);
    for (LosState cls : {LosState::Los, LosState::Nlos}) {
        const double analytic = laplace_interference(scn, s, 300.0, cls);
        const auto emp = oracle::empirical_laplace(scn, s, 300.0, cls, 20000, 5);
        INFO("class " << (cls == LosState::Los ? "los" : "nlos"));
        CHECK(std::abs(analytic - emp.mean) <= 3.0 * emp.std_error + 1e-4);
    }
}

TEST_CASE("conditional backhaul tends to 1 as the threshold vanishes", "[analytic]") {
    auto scn = testutil::gs_scenario(UavAntenna::omni(), 1.0, 100.0);
    scn.threshold = 1e-12;
    CHECK(conditional_backhaul(scn, 300.0, LosState::Los) ==
          Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("conditional backhaul is 1 with no noise and no interferers", "[analytic]") {
    // Zero noise, empty region: SINR is degenerate-infinite, probability 1.
    auto scn = testutil::gs_scenario(UavAntenna::fixed_directional(deg_to_rad(165.0)),
                                     0.001, 20.0);
    scn.net.noise_w = 0.0;
    const double p = conditional_backhaul(scn, 300.0, LosState::Los);
    CHECK(std::isfinite(p));
    CHECK(p == 1.0);
}

TEST_CASE("conditional backhaul matches conditioned simulation", "[analytic]") {
    const auto scn = testutil::gs_scenario(UavAntenna::omni(), 1.0, 100.0);
    for (LosState serving : {LosState::Los, LosState::Nlos}) {
        const double analytic = conditional_backhaul(scn, 300.0, serving);
        const auto mc = oracle::conditioned_coverage(scn, 300.0, serving, 20000, 17);
        INFO("serving " << (serving == LosState::Los ? "los" : "nlos"));
        CHECK(std::abs(analytic - mc.mean) <= 3.0 * mc.std_error + 1e-4);
    }
}

TEST_CASE("general-m evaluator collapses to the m=1 closed form", "[analytic]") {
    const QuadratureConfig q;
    for (const auto& antenna :
         {UavAntenna::omni(), UavAntenna::fixed_directional(deg_to_rad(165.0)),
          UavAntenna::steerable(deg_to_rad(60.0))}) {
        const auto scn = testutil::gs_scenario(antenna, 1.0, 120.0);
        for (double r1 : {100.0, 300.0, 800.0}) {
            for (LosState serving : {LosState::Los, LosState::Nlos}) {
                const double general = conditional_backhaul(scn, r1, serving, q);
                const double closed = closed_form_m1(scn, r1, serving, q);
                CHECK(general == Catch::Approx(closed).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("bell-recurrence derivatives agree with finite differences", "[analytic]") {
    for (int m : {2, 3}) {
        auto scn = testutil::gs_scenario(UavAntenna::omni(), 1.0, 100.0);
        scn.net.m_los = m;
        scn.net.m_nlos = m;
        QuadratureConfig exact;
        QuadratureConfig fd;
        fd.use_finite_differences = true;
        fd.fd_step = 1e-4;
        const double a = conditional_backhaul(scn, 300.0, LosState::Los, exact);
        const double b = conditional_backhaul(scn, 300.0, LosState::Los, fd);
        INFO("m = " << m);
        CHECK(a == Catch::Approx(b).epsilon(1e-4));
    }
}

TEST_CASE("fading order above the configured maximum is rejected", "[analytic]") {
    auto scn = testutil::gs_scenario(UavAntenna::omni(), 1.0, 100.0);
    scn.net.m_los = 6;
    CHECK_THROWS_AS(conditional_backhaul(scn, 300.0, LosState::Los),
                    std::invalid_argument);
}

TEST_CASE("serving-distance density has the Rayleigh mean", "[analytic]") {
    const double lambda = 1e-6;  // 1 per km^2
    auto integrand = [&](double r) { return r * serving_distance_pdf(lambda, r); };
    const double mean = integrate(integrand, 0.0, 20000.0, 1e-10, 1e-12).value;
    CHECK(mean == Catch::Approx(500.0).epsilon(1e-6));
    CHECK(mean_serving_distance_m(lambda) == Catch::Approx(500.0));
}

TEST_CASE("backhaul probability vanishes for extreme thresholds", "[analytic]") {
    auto scn = testutil::gs_scenario(UavAntenna::omni(), 1.0, 100.0);
    scn.threshold = 1e12;
    const auto res = backhaul_probability(scn);
    CHECK(res.probability <= 1e-6);
    CHECK(res.method == Method::Analytic);
    CHECK(res.n_trials == 0);
}

TEST_CASE("backhaul probability is non-increasing in the threshold", "[analytic]") {
    auto scn = testutil::gs_scenario(UavAntenna::steerable(deg_to_rad(60.0)), 1.0, 120.0);
    double prev = 1.0;
    double prev_tol = 0.0;
    for (double th_db : {-10.0, 0.0, 10.0, 20.0, 30.0}) {
        scn.threshold = db_to_linear(th_db);
        const auto res = backhaul_probability(scn);
        CHECK(res.probability >= 0.0);
        CHECK(res.probability <= 1.0);
        CHECK(res.probability <= prev + prev_tol + res.std_error);
        prev = res.probability;
        prev_tol = res.std_error;
    }
}

TEST_CASE("degenerate serving distance r1 = 0 is handled", "[analytic]") {
    const auto scn = testutil::gs_scenario(UavAntenna::omni(), 1.0, 100.0);
    const double p = conditional_backhaul(scn, 0.0, LosState::Los);
    CHECK(std::isfinite(p));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
}
