#include <doctest.h>

#include <cmath>

#include "roduq/homog.hpp"

using namespace roduq;

namespace {

RodBC tension_bc(double t1, double L = 1.0) {
    RodBC bc;
    bc.L = L;
    bc.t(0) = t1;
    return bc;
}

MaterialSpec paper_constants() {
    MaterialSpec m;
    m.mu0 = 30.8;
    m.lambda0 = 66.6;
    return m;
}

}  // namespace

TEST_SUITE("homog") {

TEST_CASE("harmonic means") {
    const std::vector<double> constant{3.0, 3.0, 3.0};
    CHECK(harmonic_mean(constant) == doctest::Approx(3.0).epsilon(1e-15));

    // Two-value path: 1/<a^-1> = 1/(0.5 + 0.125) = 1.6.
    const std::vector<double> two{1.0, 4.0};
    CHECK(harmonic_mean(two) == doctest::Approx(1.6).epsilon(1e-15));

    const std::vector<double> varied{2.0, 5.0, 9.0, 3.5};
    double arith = 0.0;
    for (const double v : varied) arith += v / varied.size();
    CHECK(harmonic_mean(varied) < arith);

    CHECK_THROWS_AS(harmonic_mean(std::vector<double>{1.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("homogenized coefficients from paths") {
    const CrossSection section = make_disc(0.696);
    const std::vector<double> mu{30.8, 30.8};
    const std::vector<double> lambda{66.6, 66.6};
    const HomogenizedCoefficients c =
        homogenized_coefficients(section, mu, lambda, Eigen::Vector2d::Zero());
    CHECK(c.mu_hom == doctest::Approx(30.8).epsilon(1e-14));
    CHECK(c.a_hom == doctest::Approx(young_modulus(30.8, 66.6)).epsilon(1e-14));
    CHECK(c.A0(0, 0) == doctest::Approx(c.a_hom * section.area).epsilon(1e-14));
    CHECK(c.A0(1, 1) == doctest::Approx(c.mu_hom * section.J).epsilon(1e-14));
}

TEST_CASE("analytic harmonic mean of the lognormal model") {
    const CrossSection section = make_disc(0.696);
    MaterialSpec m = paper_constants();
    m.model = MaterialModel::lognormal_transform;
    m.sigma_mu = 0.05;
    const HomogenizedCoefficients analytic =
        homogenized_coefficients_for_model(section, m, 0.05, 123);
    CHECK(analytic.mu_hom ==
          doctest::Approx(30.8 * std::exp(-0.05 * 0.05)).epsilon(1e-12));

    // Long-path ergodic estimate agrees with the closed form.
    const int n = 4000;
    std::vector<double> grid(n);
    const double window = 20.0;
    for (int i = 0; i < n; ++i) grid[i] = (i + 0.5) * window / n;
    const FieldSampler sampler(grid, 0.0, 0.0, 0.05, m);
    std::vector<double> mu_all, a_all;
    for (int s_idx = 0; s_idx < 20; ++s_idx) {
        const FieldSample s = sampler.sample(9, static_cast<std::uint64_t>(s_idx));
        mu_all.insert(mu_all.end(), s.mu.begin(), s.mu.end());
        const auto a = s.young();
        a_all.insert(a_all.end(), a.begin(), a.end());
    }
    CHECK(std::abs(harmonic_mean(mu_all) - analytic.mu_hom) / analytic.mu_hom < 5e-3);
    CHECK(std::abs(harmonic_mean(a_all) - analytic.a_hom) / analytic.a_hom < 5e-3);
}

TEST_CASE("proxy ratios follow the quadratic boundary dependence") {
    const CrossSection section = make_disc(0.696);
    const HomogenizedCoefficients c = homogenized_coefficients_for_model(
        section, paper_constants(), 0.05, 1);
    const double base = e0_closed_form(section, c, tension_bc(1.0));
    CHECK(e0_closed_form(section, c, tension_bc(2.0)) / base ==
          doctest::Approx(4.0).epsilon(1e-13));
    CHECK(e0_closed_form(section, c, tension_bc(-0.5)) / base ==
          doctest::Approx(0.25).epsilon(1e-13));

    // Equal twist angles contribute nothing.
    RodBC twist = tension_bc(1.0);
    twist.k0 = twist.kL = 0.7;
    CHECK(e0_closed_form(section, c, twist) == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("deterministic system solve reproduces the closed form") {
    const CrossSection section = make_disc(0.696);
    const HomogenizedCoefficients c = homogenized_coefficients_for_model(
        section, paper_constants(), 0.05, 1);
    RodBC bc = tension_bc(1.0);
    bc.k0 = 0.1;
    bc.kL = 0.6;
    const double closed = e0_closed_form(section, c, bc);
    const EnergyReport sys = e0_system_solve(section, c, bc, 64);
    CHECK(std::abs(sys.value - closed) / closed < 1e-10);

    // Nonzero <Phi>: the affine state stays optimal (diagonal A0), and
    // refinement cannot increase the minimum.
    HomogenizedCoefficients shifted = c;
    shifted.mean_phi = {0.2, -0.1};
    const EnergyReport coarse = e0_system_solve(section, shifted, bc, 32);
    const EnergyReport fine = e0_system_solve(section, shifted, bc, 64);
    CHECK(coarse.value <= closed * (1 + 1e-12));
    CHECK(fine.value <= coarse.value * (1 + 1e-12));
}

TEST_CASE("rve coefficients") {
    const CrossSection section = make_disc(0.696);
    const int n = 32;

    SUBCASE("constant path reproduces itself") {
        const FieldSample s = constant_sample(midpoint_grid(1.0, n), 30.8, 66.6, 0.4, -0.2);
        const CoefficientPaths paths = coefficient_paths(section, s, 1.0);
        const RveCoefficients rve = rve_coefficients(paths);
        CHECK((rve.A - paths.A[0]).norm() < 1e-10 * paths.A[0].norm());
        CHECK(rve.B(2, 0) == doctest::Approx(-0.2).epsilon(1e-14));
        CHECK(rve.B(3, 0) == doctest::Approx(-0.4).epsilon(1e-14));
        CHECK(rve.B.col(1).norm() == 0.0);
    }

    SUBCASE("diagonal paths reduce to scalar harmonic means") {
        FieldSample s = constant_sample(midpoint_grid(1.0, n), 30.8, 66.6);
        for (int e = 0; e < n; ++e) s.mu[e] = (e % 2) ? 20.0 : 40.0;
        for (int e = 0; e < n; ++e) s.lambda[e] = 2.16 * s.mu[e];
        const CoefficientPaths paths = coefficient_paths(section, s, 1.0);
        const RveCoefficients rve = rve_coefficients(paths);
        CHECK(rve.A(1, 1) ==
              doctest::Approx(harmonic_mean(s.mu) * section.J).epsilon(1e-12));
        const auto a_path = s.young();
        CHECK(rve.A(0, 0) ==
              doctest::Approx(harmonic_mean(a_path) * section.area).epsilon(1e-12));
    }

    SUBCASE("matrix harmonic mean is dominated by the arithmetic mean") {
        FieldSample s = constant_sample(midpoint_grid(1.0, n), 30.8, 66.6);
        const NormalStream stream(41, 0);
        for (int e = 0; e < n; ++e) {
            s.mu[e] = 30.8 * std::exp(0.3 * stream.normal(static_cast<std::uint64_t>(e)));
            s.lambda[e] = 2.16 * s.mu[e];
        }
        const CoefficientPaths paths = coefficient_paths(section, s, 1.0);
        const RveCoefficients rve = rve_coefficients(paths);
        Eigen::Matrix4d arith = Eigen::Matrix4d::Zero();
        for (const auto& A : paths.A) arith += A / static_cast<double>(n);
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(arith - rve.A);
        CHECK(es.eigenvalues().minCoeff() > -1e-10 * arith.norm());
    }
}

TEST_CASE("correctors vanish for constant inputs and at the endpoints") {
    const CrossSection section = make_disc(0.696);
    const int n = 64;

    const FieldSample constant = constant_sample(midpoint_grid(1.0, n), 30.8, 66.6, 0.3, 0.1);
    const CorrectorPaths c0 = correctors(coefficient_paths(section, constant, 1.0));
    CHECK(c0.phi_l2() < 1e-14);
    CHECK(c0.psi_l2() < 1e-14);

    const FieldSampler sampler(midpoint_grid(1.0, n), 0.3, 0.3, 0.1,
                               MaterialSpec{.mu0 = 30.8, .lambda0 = 66.6});
    const FieldSample s = sampler.sample(2, 0);
    const CorrectorPaths c = correctors(coefficient_paths(section, s, 1.0));
    CHECK(c.Psi.back().norm() < 1e-12);
    CHECK(c.Phi.back().norm() < 1e-12 * c.rve.A.norm());
    // Random Phi makes the auxiliary corrector genuinely nonzero.
    CHECK(c.psi_l2() > 1e-4);
}

TEST_CASE("corrector and RVE scaling follow sqrt(eps) (smoke scale)") {
    RateSetup setup;
    setup.section = make_disc(0.696);
    MaterialSpec m = paper_constants();
    m.model = MaterialModel::lognormal_transform;
    m.sigma_mu = 0.05;
    setup.material = m;
    setup.bc = tension_bc(1.0);
    setup.n_elements = 400;
    const std::vector<double> eps{0.02, 0.04, 0.08, 0.16};
    const ScalingReport report = corrector_scaling(setup, eps, 48, 5, 2);
    CHECK(report.slope_psi == doctest::Approx(0.5).epsilon(0.5));
    CHECK(report.slope_rve == doctest::Approx(0.5).epsilon(0.5));
}

TEST_CASE("rate sweep on a smoke scale shows the linear trend") {
    RateSetup setup;
    setup.section = make_disc(0.696);
    setup.material = paper_constants();
    setup.bc = tension_bc(1.0);
    setup.n_elements = 500;
    const std::vector<double> eps{0.02, 0.04, 0.08, 0.16};
    const RateReport report = rate_sweep(setup, eps, 60, 11, 2);
    CHECK(report.slope == doctest::Approx(1.0).epsilon(0.4));
    for (const auto& p : report.points) CHECK_FALSE(p.excluded);

    // Under-resolved eps values are excluded with a diagnostic.
    setup.n_elements = 100;
    const std::vector<double> tight{0.005, 0.08, 0.16, 0.32};
    const RateReport excl = rate_sweep(setup, tight, 8, 11, 2);
    CHECK(excl.points[0].excluded);
    CHECK_FALSE(excl.points[1].excluded);
}

TEST_CASE("minimizer converges to the affine state at rate eps (smoke scale)") {
    const CrossSection section = make_disc(0.696);
    const RodBC bc = tension_bc(1.0);
    const int n = 500;
    std::vector<double> eps_grid{0.02, 0.04, 0.08, 0.16};
    std::vector<double> mean_sq;
    for (const double eps : eps_grid) {
        const FieldSampler sampler(midpoint_grid(bc.L, n), 0.3, 0.3, eps,
                                   MaterialSpec{.mu0 = 30.8, .lambda0 = 66.6});
        double acc = 0.0;
        const int m_samples = 40;
        for (int m = 0; m < m_samples; ++m) {
            const FieldSample s = sampler.sample(29, static_cast<std::uint64_t>(m));
            const Rod1DResult res = effective_modulus_1d(section, s, bc, n);
            double dev = 0.0;
            for (std::size_t i = 0; i < res.state.grid.size(); ++i) {
                const double du = res.state.u_bar[i] - bc.u_aff(res.state.grid[i]);
                const Eigen::Vector3d drv = res.state.r[i] - bc.r_aff(res.state.grid[i]);
                dev += (du * du + drv.squaredNorm()) / static_cast<double>(n + 1);
            }
            acc += dev;
        }
        mean_sq.push_back(acc / m_samples);
    }
    const PowerFit fit = fit_power_law(eps_grid, mean_sq);
    CHECK(fit.exponent == doctest::Approx(1.0).epsilon(0.4));
}

}  // TEST_SUITE
