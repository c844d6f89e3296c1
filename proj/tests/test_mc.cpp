#include <doctest.h>

#include <cmath>

#include "roduq/mc.hpp"

using namespace roduq;

namespace {

EnsembleSetup small_setup() {
    EnsembleSetup setup;
    setup.section = with_mesh_moments(make_disc_meshed(0.696, 3));
    MaterialSpec m;
    m.mu0 = 30.8;
    m.lambda0 = 66.6;
    setup.material = m;
    setup.sigma1 = 0.3;
    setup.sigma2 = 0.3;
    setup.eps = 0.2;
    setup.clip = 0.5;
    setup.bc.L = 1.0;
    setup.bc.t(0) = 1.0;
    setup.n_elements = 20;
    setup.h = 0.2;
    setup.workers = 2;
    return setup;
}

}  // namespace

TEST_SUITE("mc") {

TEST_CASE("single-sample ensemble equals a direct call") {
    const EnsembleSetup setup = small_setup();
    const EnsembleTable table = run_ensemble(EnsembleModel::rod1d, 1, 99, setup);
    REQUIRE(table.records.size() == 1);
    CHECK_FALSE(table.records[0].failed);

    const FieldSampler sampler(midpoint_grid(setup.bc.L, setup.n_elements),
                               setup.sigma1, setup.sigma2, setup.eps, setup.material);
    const FieldSample s =
        enforce_smallness(sampler.sample(99, 0), setup.clip);
    const double direct =
        effective_modulus_1d(setup.section, s, setup.bc, setup.n_elements)
            .report.value;
    CHECK(table.records[0].report.value == direct);
}

TEST_CASE("reruns and worker counts do not change the table") {
    EnsembleSetup setup = small_setup();
    setup.workers = 1;
    const EnsembleTable a = run_ensemble(EnsembleModel::rod1d, 12, 5, setup);
    setup.workers = 4;
    const EnsembleTable b = run_ensemble(EnsembleModel::rod1d, 12, 5, setup);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].report.value == b.records[i].report.value);
        CHECK(a.records[i].phi_hash == b.records[i].phi_hash);
    }
}

TEST_CASE("seed isolation: growing M keeps the prefix") {
    const EnsembleSetup setup = small_setup();
    const EnsembleTable small = run_ensemble(EnsembleModel::rod1d, 4, 7, setup);
    const EnsembleTable big = run_ensemble(EnsembleModel::rod1d, 9, 7, setup);
    for (std::size_t i = 0; i < small.records.size(); ++i)
        CHECK(small.records[i].report.value == big.records[i].report.value);
}

TEST_CASE("coupled fidelities share the perturbation sample") {
    const EnsembleSetup setup = small_setup();
    const EnsembleTable table = run_ensemble(EnsembleModel::both_coupled, 4, 13, setup);
    REQUIRE(table.records.size() == 4);
    REQUIRE(table.records_3d.size() == 4);
    for (std::size_t i = 0; i < table.records.size(); ++i) {
        CHECK(table.records[i].phi_hash == table.records_3d[i].phi_hash);
        CHECK(table.records[i].fidelity == Fidelity::rod1d);
        CHECK(table.records_3d[i].fidelity == Fidelity::rod3d);
    }

    // Coupling requires matching grids.
    EnsembleSetup bad = setup;
    bad.n_layers = bad.n_elements + 4;
    CHECK_THROWS_AS(run_ensemble(EnsembleModel::both_coupled, 2, 1, bad), config_error);
}

TEST_CASE("fluctuation statistics") {
    const std::vector<double> constant{2.5, 2.5, 2.5};
    const McSummary c = fluctuation_stats(constant);
    CHECK(c.mean == 2.5);
    CHECK(c.variance == 0.0);
    CHECK(c.ecdf == constant);

    const std::vector<double> two{0.0, 2.0};
    const McSummary t = fluctuation_stats(two, 1.0);
    REQUIRE(t.l2_error_vs_ref.has_value());
    CHECK(*t.l2_error_vs_ref == doctest::Approx(1.0).epsilon(1e-15));

    const McSummary ref_zero = fluctuation_stats(constant, 2.5);
    CHECK(*ref_zero.l2_error_vs_ref == 0.0);

    // ECDF is sorted and spans (0, 1].
    const std::vector<double> vals{3.0, -1.0, 2.0, 0.5};
    const McSummary s = fluctuation_stats(vals);
    for (std::size_t i = 1; i < s.ecdf.size(); ++i) CHECK(s.ecdf[i] >= s.ecdf[i - 1]);
}

TEST_CASE("systematic error") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    CHECK(systematic_error(a, a) == 0.0);
    std::vector<double> shifted = a;
    for (double& v : shifted) v += 0.75;
    CHECK(systematic_error(shifted, a) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("multifidelity shift identities hold exactly") {
    const std::vector<double> table_1d{10.0, 11.5, 9.25, 10.75, 10.1};
    const std::vector<double> pairs_1d{10.2, 9.9};
    const std::vector<double> pairs_3d{10.9, 10.5};
    const MultiFidelityEstimate est = multifidelity(table_1d, pairs_3d, pairs_1d);

    const McSummary base = fluctuation_stats(table_1d);
    CHECK(est.delta == doctest::Approx(0.65).epsilon(1e-15));
    CHECK(est.mean() == base.mean + est.delta);       // exact identity
    CHECK(est.variance() == base.variance);           // exact identity
    CHECK(est.n_high == 2);

    const auto shifted = est.shifted_values();
    for (std::size_t i = 0; i < shifted.size(); ++i)
        CHECK(shifted[i] == table_1d[i] + est.delta);

    // Identical fidelities give a zero shift.
    const MultiFidelityEstimate zero = multifidelity(table_1d, pairs_1d, pairs_1d);
    CHECK(zero.delta == 0.0);

    CHECK_THROWS_AS(multifidelity(table_1d, {}, {}), std::invalid_argument);
}

TEST_CASE("coupled runs reduce the variance of the gap") {
    const EnsembleSetup setup = small_setup();
    const EnsembleTable table = run_ensemble(EnsembleModel::both_coupled, 8, 3, setup);
    const auto v1 = table.values(Fidelity::rod1d);
    const auto v3 = table.values(Fidelity::rod3d);
    REQUIRE(v1.size() == v3.size());
    std::vector<double> diff(v1.size());
    for (std::size_t i = 0; i < v1.size(); ++i) diff[i] = v3[i] - v1[i];
    const double var_diff = fluctuation_stats(diff).variance;
    const double var_sum =
        fluctuation_stats(v1).variance + fluctuation_stats(v3).variance;
    CHECK(var_diff <= var_sum);
}

TEST_CASE("h sweep fits the synthetic trends") {
    // Synthetic errors exercise only the fitting path.
    const std::vector<double> h{0.25, 0.1, 0.05, 0.025};
    std::vector<double> linear(h.begin(), h.end());
    const PowerFit t1 = fit_power_law(h, linear);
    CHECK(t1.exponent == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> sqrt_h;
    for (const double v : h) sqrt_h.push_back(std::sqrt(v));
    const PowerFit t2 = fit_power_law(h, sqrt_h);
    CHECK(t2.exponent == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(h_sweep(std::vector<double>{0.1, 0.05}, 2, 1, small_setup()),
                    config_error);
}

}  // TEST_SUITE
