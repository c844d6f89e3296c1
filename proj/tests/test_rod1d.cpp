#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "roduq/homog.hpp"
#include "roduq/rod1d.hpp"

using namespace roduq;

namespace {

RodBC tension_bc(double t1, double L = 1.0) {
    RodBC bc;
    bc.L = L;
    bc.t(0) = t1;
    return bc;
}

// Dense equality-constrained minimization of the discrete energy, built by
// finite differences of energy_1d only. Independent of the assembly and the
// banded solver; exact for quadratics up to roundoff.
RodState1D dense_oracle(const CrossSection& section, const FieldSample& sample,
                        const RodBC& bc, int n) {
    const int nd = 4 * (n - 1);
    auto to_state = [&](const Eigen::VectorXd& z) {
        RodState1D st;
        st.grid.resize(static_cast<std::size_t>(n) + 1);
        st.u_bar.resize(st.grid.size());
        st.r.resize(st.grid.size());
        for (int i = 0; i <= n; ++i) {
            st.grid[i] = bc.L * i / n;
            if (i == 0 || i == n) {
                st.u_bar[i] = bc.u_aff(st.grid[i]);
                st.r[i] = bc.r_aff(st.grid[i]);
            } else {
                st.u_bar[i] = z[4 * (i - 1)];
                st.r[i] = {z[4 * (i - 1) + 1], z[4 * (i - 1) + 2], z[4 * (i - 1) + 3]};
            }
        }
        return st;
    };
    auto E = [&](const Eigen::VectorXd& z) {
        return energy_1d(to_state(z), section, sample, bc).value;
    };

    // Quadratic reconstruction: E(z) = 1/2 z^T H z + g^T z + c.
    const double c0 = E(Eigen::VectorXd::Zero(nd));
    Eigen::VectorXd g(nd);
    Eigen::MatrixXd H(nd, nd);
    std::vector<double> e_i(static_cast<std::size_t>(nd));
    for (int i = 0; i < nd; ++i)
        e_i[i] = E(Eigen::VectorXd::Unit(nd, i));
    for (int i = 0; i < nd; ++i) {
        H(i, i) = e_i[i] + E(-Eigen::VectorXd::Unit(nd, i)) - 2.0 * c0;
        g[i] = e_i[i] - c0 - 0.5 * H(i, i);
    }
    for (int i = 0; i < nd; ++i)
        for (int j = i + 1; j < nd; ++j) {
            Eigen::VectorXd z = Eigen::VectorXd::Unit(nd, i) + Eigen::VectorXd::Unit(nd, j);
            const double hij = E(z) - e_i[i] - e_i[j] + c0;
            H(i, j) = hij;
            H(j, i) = hij;
        }

    // Constraints: trapezoid means of r2, r3 vanish.
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nd, 2);
    for (int i = 1; i < n; ++i) {
        C(4 * (i - 1) + 2, 0) = 1.0;
        C(4 * (i - 1) + 3, 1) = 1.0;
    }
    Eigen::MatrixXd KKT = Eigen::MatrixXd::Zero(nd + 2, nd + 2);
    KKT.topLeftCorner(nd, nd) = H;
    KKT.topRightCorner(nd, 2) = C;
    KKT.bottomLeftCorner(2, nd) = C.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nd + 2);
    rhs.head(nd) = -g;
    const Eigen::VectorXd sol = KKT.fullPivLu().solve(rhs);
    return to_state(sol.head(nd));
}

}  // namespace

TEST_SUITE("rod1d") {

TEST_CASE("unperturbed pure tension has the affine minimizer") {
    const CrossSection section = make_disc(0.696);
    const RodBC bc = tension_bc(1.0);
    const int n = 64;
    const FieldSample sample = constant_sample(midpoint_grid(bc.L, n), 30.8, 66.6);
    const Rod1DResult res = effective_modulus_1d(section, sample, bc, n);

    const double a = young_modulus(30.8, 66.6);
    CHECK(res.report.value == doctest::Approx(a * section.area).epsilon(1e-12));
    for (std::size_t i = 0; i < res.state.grid.size(); ++i) {
        CHECK(std::abs(res.state.u_bar[i] - bc.u_aff(res.state.grid[i])) < 1e-12);
        CHECK(res.state.r[i].norm() < 1e-12);
    }
    CHECK(res.report.residual < 1e-10);
}

TEST_CASE("twist solution is affine for deterministic material") {
    const CrossSection section = make_disc(0.696);
    RodBC bc = tension_bc(1.0);
    bc.k0 = 0.3;
    bc.kL = 0.9;
    const int n = 128;
    const FieldSampler sampler(midpoint_grid(bc.L, n), 0.3, 0.3, 0.05, MaterialSpec{.mu0 = 30.8, .lambda0 = 66.6});
    for (int m = 0; m < 3; ++m) {
        const FieldSample s = sampler.sample(17, static_cast<std::uint64_t>(m));
        const Rod1DResult res = effective_modulus_1d(section, s, bc, n);
        for (std::size_t i = 0; i < res.state.grid.size(); ++i) {
            const double affine = bc.k0 + (bc.kL - bc.k0) * res.state.grid[i] / bc.L;
            CHECK(std::abs(res.state.r[i](0) - affine) < 1e-10);
        }
    }
}

TEST_CASE("flexural mean constraints hold to solver tolerance") {
    const CrossSection section = make_disc(0.696);
    const RodBC bc = tension_bc(1.5);
    const int n = 100;
    const FieldSampler sampler(midpoint_grid(bc.L, n), 0.3, 0.3, 0.05,
                               MaterialSpec{.mu0 = 30.8, .lambda0 = 66.6});
    const FieldSample s = sampler.sample(3, 0);
    const Rod1DResult res = effective_modulus_1d(section, s, bc, n);
    double m2 = 0.0, m3 = 0.0;
    for (int e = 0; e < n; ++e) {
        m2 += 0.5 * (res.state.r[e](1) + res.state.r[e + 1](1)) / n;
        m3 += 0.5 * (res.state.r[e](2) + res.state.r[e + 1](2)) / n;
    }
    CHECK(std::abs(m2) < 1e-10);
    CHECK(std::abs(m3) < 1e-10);
    CHECK(res.report.residual < 1e-10);
}

TEST_CASE("energy report is consistent and non-negative") {
    const CrossSection section = make_disc(0.5);
    RodBC bc = tension_bc(0.7);
    bc.k0 = -0.2;
    bc.kL = 0.4;
    const int n = 32;
    const FieldSampler sampler(midpoint_grid(bc.L, n), 0.2, 0.2, 0.1,
                               MaterialSpec{.mu0 = 30.8, .lambda0 = 66.6});
    const FieldSample s = sampler.sample(5, 2);
    const Rod1DResult res = effective_modulus_1d(section, s, bc, n);
    CHECK(res.report.value >= 0.0);
    CHECK(res.report.value ==
          doctest::Approx(res.report.term_sum()).epsilon(1e-14));

    // Zero boundary data gives the zero state and zero energy.
    const Rod1DResult zero = effective_modulus_1d(section, s, tension_bc(0.0), n);
    CHECK(zero.report.value < 1e-20);
}

TEST_CASE("quadratic scaling in the boundary data") {
    const CrossSection section = make_disc(0.696);
    const int n = 50;
    const FieldSampler sampler(midpoint_grid(1.0, n), 0.3, 0.3, 0.08,
                               MaterialSpec{.mu0 = 30.8, .lambda0 = 66.6});
    const FieldSample s = sampler.sample(11, 4);

    RodBC bc = tension_bc(0.8);
    bc.k0 = 0.1;
    bc.kL = -0.3;
    RodBC scaled = bc;
    const double c = 2.5;
    scaled.t *= c;
    scaled.k0 *= c;
    scaled.kL *= c;

    const double e1 = effective_modulus_1d(section, s, bc, n).report.value;
    const double e2 = effective_modulus_1d(section, s, scaled, n).report.value;
    CHECK(e2 == doctest::Approx(c * c * e1).epsilon(1e-11));
}

TEST_CASE("solution minimizes the discrete energy") {
    const CrossSection section = make_disc(0.696);
    const RodBC bc = tension_bc(1.0);
    const int n = 24;
    const FieldSampler sampler(midpoint_grid(bc.L, n), 0.4, 0.4, 0.1,
                               MaterialSpec{.mu0 = 30.8, .lambda0 = 66.6});
    const FieldSample s = sampler.sample(13, 1);
    const Rod1DResult res = effective_modulus_1d(section, s, bc, n);

    const NormalStream noise(77, 0);
    std::uint64_t k = 0;
    for (int trial = 0; trial < 10; ++trial) {
        RodState1D perturbed = res.state;
        // Admissible perturbation: zero at the ends, zero trapezoid mean in
        // the flexural components.
        Eigen::Vector2d mean = Eigen::Vector2d::Zero();
        std::vector<Eigen::Vector4d> delta(perturbed.grid.size(), Eigen::Vector4d::Zero());
        for (std::size_t i = 1; i + 1 < perturbed.grid.size(); ++i) {
            for (int cmp = 0; cmp < 4; ++cmp) delta[i][cmp] = 0.01 * noise.normal(k++);
            mean(0) += delta[i][2];
            mean(1) += delta[i][3];
        }
        for (std::size_t i = 1; i + 1 < perturbed.grid.size(); ++i) {
            delta[i][2] -= mean(0) / (n - 1);
            delta[i][3] -= mean(1) / (n - 1);
        }
        for (std::size_t i = 1; i + 1 < perturbed.grid.size(); ++i) {
            perturbed.u_bar[i] += delta[i][0];
            perturbed.r[i] += delta[i].tail<3>();
        }
        const double e = energy_1d(perturbed, section, s, bc).value;
        CHECK(e >= res.report.value - 1e-12 * std::abs(res.report.value));
    }
}

TEST_CASE("refinement does not increase the minimum") {
    const CrossSection section = make_disc(0.696);
    const RodBC bc = tension_bc(1.0);
    const int n = 40;
    const FieldSampler sampler(midpoint_grid(bc.L, n), 0.3, 0.3, 0.2,
                               MaterialSpec{.mu0 = 30.8, .lambda0 = 66.6});
    const FieldSample coarse = sampler.sample(23, 0);

    // Same piecewise-constant field on the refined grid.
    FieldSample fine = coarse;
    fine.grid = midpoint_grid(bc.L, 2 * n);
    auto duplicate = [&](const std::vector<double>& src) {
        std::vector<double> out(2 * src.size());
        for (std::size_t e = 0; e < src.size(); ++e) out[2 * e] = out[2 * e + 1] = src[e];
        return out;
    };
    fine.phi1 = duplicate(coarse.phi1);
    fine.phi2 = duplicate(coarse.phi2);
    fine.mu = duplicate(coarse.mu);
    fine.lambda = duplicate(coarse.lambda);

    const double e_coarse = effective_modulus_1d(section, coarse, bc, n).report.value;
    const double e_fine = effective_modulus_1d(section, fine, bc, 2 * n).report.value;
    CHECK(e_fine <= e_coarse * (1 + 1e-6));
}

TEST_CASE("matches the dense constrained-minimization oracle on small grids") {
    const CrossSection section = make_disc(0.696);
    RodBC bc = tension_bc(1.0);
    bc.k0 = 0.0;
    bc.kL = 0.5;
    const int n = 8;
    const FieldSampler sampler(midpoint_grid(bc.L, n), 0.3, 0.3, 0.3,
                               MaterialSpec{.mu0 = 30.8, .lambda0 = 66.6});
    for (int m = 0; m < 4; ++m) {
        const FieldSample s = sampler.sample(31, static_cast<std::uint64_t>(m));
        const Rod1DResult res = effective_modulus_1d(section, s, bc, n);
        const RodState1D oracle = dense_oracle(section, s, bc, n);
        for (std::size_t i = 0; i < oracle.grid.size(); ++i) {
            CHECK(std::abs(res.state.u_bar[i] - oracle.u_bar[i]) < 1e-8);
            CHECK((res.state.r[i] - oracle.r[i]).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("assembly validates its inputs") {
    const CrossSection section = make_disc(1.0);
    const RodBC bc = tension_bc(1.0);
    const FieldSample s = constant_sample(midpoint_grid(1.0, 8), 1.0, 1.0);
    CHECK_THROWS_AS(assemble_1d(section, s, bc, 3), std::invalid_argument);
    CHECK_THROWS_AS(assemble_1d(section, s, bc, 16), std::invalid_argument);

    FieldSample shifted = s;
    for (double& t : shifted.grid) t += 0.01;
    CHECK_THROWS_AS(assemble_1d(section, shifted, bc, 8), std::invalid_argument);

    // Under-resolved correlation length raises the flag but still assembles.
    FieldSample with_eps = s;
    with_eps.eps = 0.01;
    CHECK(assemble_1d(section, with_eps, bc, 8).eps_under_resolved);
}

}  // TEST_SUITE
