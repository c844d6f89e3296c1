#include "roduq/homog.hpp"

#include <cmath>

namespace roduq {

double harmonic_mean(std::span<const double> path) {
    if (path.empty()) throw std::invalid_argument("harmonic_mean: empty path");
    double s = 0.0;
    for (const double v : path) {
        if (!(v > 0.0))
            throw std::invalid_argument("harmonic_mean: non-positive entry");
        s += 1.0 / v;
    }
    return static_cast<double>(path.size()) / s;
}

namespace {

Eigen::Matrix4d assemble_A0(const CrossSection& section, double a_hom,
                            double mu_hom) {
    Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
    A(0, 0) = a_hom * section.area;
    A(1, 1) = mu_hom * section.J;
    A(2, 2) = a_hom * section.I3;
    A(3, 3) = a_hom * section.I2;
    return A;
}

}  // namespace

HomogenizedCoefficients homogenized_coefficients(const CrossSection& section,
                                                 std::span<const double> mu_path,
                                                 std::span<const double> lambda_path,
                                                 const Eigen::Vector2d& mean_phi) {
    if (mu_path.size() != lambda_path.size())
        throw std::invalid_argument("homogenized_coefficients: path size mismatch");
    std::vector<double> a(mu_path.size());
    for (std::size_t i = 0; i < mu_path.size(); ++i) {
        if (!(mu_path[i] > 0.0) || lambda_path[i] < 0.0)
            throw std::invalid_argument("homogenized_coefficients: invalid material entry");
        a[i] = young_modulus(mu_path[i], lambda_path[i]);
    }
    HomogenizedCoefficients c;
    c.a_hom = harmonic_mean(a);
    c.mu_hom = harmonic_mean(mu_path);
    c.mean_phi = mean_phi;
    c.A0 = assemble_A0(section, c.a_hom, c.mu_hom);
    return c;
}

HomogenizedCoefficients homogenized_coefficients_for_model(
    const CrossSection& section, const MaterialSpec& material, double eps,
    std::uint64_t seed_aux, const Eigen::Vector2d& mean_phi) {
    HomogenizedCoefficients c;
    c.mean_phi = mean_phi;
    switch (material.model) {
        case MaterialModel::deterministic:
            c.a_hom = young_modulus(material.mu0, material.lambda0);
            c.mu_hom = material.mu0;
            break;
        case MaterialModel::lognormal_transform: {
            // mu = mu0 exp(G - s^2/2) with lambda tied by a fixed ratio gives
            // <mu^-1> = exp(s^2)/mu0 in closed form.
            const double s2 = material.sigma_mu * material.sigma_mu;
            c.mu_hom = material.mu0 * std::exp(-s2);
            const double ratio = material.lambda0 / material.mu0;
            c.a_hom = young_modulus(1.0, ratio) * c.mu_hom;
            break;
        }
        case MaterialModel::paper_literal: {
            // No closed form: ergodic averages over long auxiliary paths.
            const double window = std::max(100.0 * eps, 1.0);
            const int n = 800;
            std::vector<double> grid(n);
            for (int i = 0; i < n; ++i) grid[i] = (i + 0.5) * window / n;
            const FieldSampler sampler(grid, 0.0, 0.0, eps, material);
            const int n_paths = 256;
            double inv_a = 0.0, inv_mu = 0.0;
            for (int m = 0; m < n_paths; ++m) {
                const FieldSample s = sampler.sample(seed_aux, static_cast<std::uint64_t>(m));
                for (int i = 0; i < n; ++i) {
                    inv_mu += 1.0 / s.mu[i];
                    inv_a += 1.0 / young_modulus(s.mu[i], s.lambda[i]);
                }
            }
            const double count = static_cast<double>(n) * n_paths;
            c.mu_hom = count / inv_mu;
            c.a_hom = count / inv_a;
            break;
        }
    }
    c.A0 = assemble_A0(section, c.a_hom, c.mu_hom);
    return c;
}

double e0_closed_form(const CrossSection& section,
                      const HomogenizedCoefficients& coeffs, const RodBC& bc) {
    // Q0 at the affine strain under the mean-integral convention; the
    // flexural components of r_aff vanish, so <Phi> drops out.
    const double xi1 = bc.t(0) / bc.L;
    const double xi2 = (bc.kL - bc.k0) / bc.L;
    return coeffs.a_hom * section.area * xi1 * xi1 +
           coeffs.mu_hom * section.J * xi2 * xi2;
}

EnergyReport e0_system_solve(const CrossSection& section,
                             const HomogenizedCoefficients& coeffs,
                             const RodBC& bc, int n_elements) {
    // The deterministic system is the surrogate system with constant
    // coefficients and <Phi> in place of the sample path. An isotropic pair
    // reproducing (a_hom, mu_hom) feeds the shared assembly.
    const double lambda_star = lambda_from_young(coeffs.a_hom, coeffs.mu_hom);
    const FieldSample sample =
        constant_sample(midpoint_grid(bc.L, n_elements), coeffs.mu_hom, lambda_star,
                        coeffs.mean_phi(0), coeffs.mean_phi(1));
    return effective_modulus_1d(section, sample, bc, n_elements).report;
}

CoefficientPaths coefficient_paths(const CrossSection& section,
                                   const FieldSample& sample, double L) {
    CoefficientPaths p;
    p.L = L;
    const std::size_t n = sample.grid.size();
    p.A.resize(n);
    p.B.resize(n);
    for (std::size_t e = 0; e < n; ++e) {
        const double a = young_modulus(sample.mu[e], sample.lambda[e]);
        p.A[e] = Eigen::Matrix4d::Zero();
        p.A[e](0, 0) = a * section.area;
        p.A[e](1, 1) = sample.mu[e] * section.J;
        p.A[e](2, 2) = a * section.I3;
        p.A[e](3, 3) = a * section.I2;
        p.B[e] = Eigen::Matrix4d::Zero();
        p.B[e](2, 0) = sample.phi2[e];
        p.B[e](3, 0) = -sample.phi1[e];
    }
    return p;
}

RveCoefficients rve_coefficients(const CoefficientPaths& paths) {
    if (paths.A.empty()) throw std::invalid_argument("rve_coefficients: empty path");
    Eigen::Matrix4d inv_mean = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d b_mean = Eigen::Matrix4d::Zero();
    for (std::size_t e = 0; e < paths.A.size(); ++e) {
        const Eigen::FullPivLU<Eigen::Matrix4d> lu(paths.A[e]);
        if (!lu.isInvertible())
            throw std::invalid_argument("rve_coefficients: singular coefficient matrix");
        inv_mean += lu.inverse();
        b_mean += paths.B[e];
    }
    const double n = static_cast<double>(paths.A.size());
    inv_mean /= n;
    b_mean /= n;
    RveCoefficients rve;
    rve.A = inv_mean.inverse();
    rve.B = b_mean;
    return rve;
}

CorrectorPaths correctors(const CoefficientPaths& paths) {
    CorrectorPaths c;
    c.L = paths.L;
    c.rve = rve_coefficients(paths);
    const std::size_t n = paths.A.size();
    const double h = paths.L / static_cast<double>(n);
    c.Phi.resize(n + 1);
    c.Psi.resize(n + 1);
    c.Phi[0] = Eigen::Matrix4d::Zero();
    c.Psi[0] = Eigen::Vector4d::Zero();
    for (std::size_t e = 0; e < n; ++e) {
        c.Phi[e + 1] = c.Phi[e] + h * (paths.A[e].inverse() * c.rve.A -
                                       Eigen::Matrix4d::Identity());
        c.Psi[e + 1] = c.Psi[e] + h * (paths.B[e].col(0) - c.rve.B.col(0));
    }
    return c;
}

namespace {

// Exact integral of |v|^2 for a piecewise linear path given by nodal values.
template <typename T>
double l2sq_piecewise_linear(const std::vector<T>& nodes, double L) {
    const std::size_t n = nodes.size() - 1;
    const double h = L / static_cast<double>(n);
    double s = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
        const double a2 = nodes[e].squaredNorm();
        const double b2 = nodes[e + 1].squaredNorm();
        const double ab = (nodes[e].array() * nodes[e + 1].array()).sum();
        s += h / 3.0 * (a2 + ab + b2);
    }
    return s / L;  // mean-normalized
}

}  // namespace

double CorrectorPaths::phi_l2() const { return std::sqrt(l2sq_piecewise_linear(Phi, L)); }
double CorrectorPaths::psi_l2() const { return std::sqrt(l2sq_piecewise_linear(Psi, L)); }

RateReport rate_sweep(const RateSetup& setup, std::span<const double> eps_grid,
                      int n_samples, std::uint64_t seed_base, int workers) {
    if (eps_grid.empty()) throw config_error("rate_sweep: empty eps grid");
    RateReport report;
    const HomogenizedCoefficients coeffs = homogenized_coefficients_for_model(
        setup.section, setup.material, eps_grid[0], seed_base ^ 0xA0C0FFEEull);
    report.e0 = e0_closed_form(setup.section, coeffs, setup.bc);

    const auto grid = midpoint_grid(setup.bc.L, setup.n_elements);
    for (const double eps : eps_grid) {
        RatePoint point;
        point.eps = eps;
        point.n_samples = n_samples;
        if (eps < 4.0 * setup.bc.L / setup.n_elements) {
            point.excluded = true;
            report.points.push_back(point);
            continue;
        }
        const FieldSampler sampler(grid, setup.sigma1, setup.sigma2, eps,
                                   setup.material);
        std::vector<double> sq(static_cast<std::size_t>(n_samples));
        parallel_for(n_samples, workers, [&](int m) {
            FieldSample s = sampler.sample(seed_base, static_cast<std::uint64_t>(m));
            if (setup.clip > 0.0) s = enforce_smallness(std::move(s), setup.clip);
            const double E =
                effective_modulus_1d(setup.section, s, setup.bc, setup.n_elements)
                    .report.value;
            sq[static_cast<std::size_t>(m)] = (E - report.e0) * (E - report.e0);
        });
        double acc = 0.0;
        for (const double v : sq) acc += v;  // fixed order
        point.l2_error = std::sqrt(acc / n_samples);
        report.points.push_back(point);
    }

    std::vector<double> xs, ys;
    for (const auto& p : report.points)
        if (!p.excluded && p.l2_error > 0.0) {
            xs.push_back(p.eps);
            ys.push_back(p.l2_error);
        }
    if (xs.size() >= 2) {
        const PowerFit fit = fit_power_law(xs, ys);
        report.slope = fit.exponent;
        report.intercept = std::log(fit.prefactor);
        report.slope_stderr = fit.exponent_stderr;
    }
    return report;
}

ScalingReport corrector_scaling(const RateSetup& setup,
                                std::span<const double> eps_grid, int n_samples,
                                std::uint64_t seed_base, int workers) {
    ScalingReport report;
    const HomogenizedCoefficients coeffs = homogenized_coefficients_for_model(
        setup.section, setup.material, eps_grid.empty() ? 0.05 : eps_grid[0],
        seed_base ^ 0xA0C0FFEEull);
    const auto grid = midpoint_grid(setup.bc.L, setup.n_elements);
    for (const double eps : eps_grid) {
        const FieldSampler sampler(grid, setup.sigma1, setup.sigma2, eps,
                                   setup.material);
        std::vector<double> psi(static_cast<std::size_t>(n_samples));
        std::vector<double> rve_err(static_cast<std::size_t>(n_samples));
        parallel_for(n_samples, workers, [&](int m) {
            FieldSample s = sampler.sample(seed_base, static_cast<std::uint64_t>(m));
            if (setup.clip > 0.0) s = enforce_smallness(std::move(s), setup.clip);
            const CorrectorPaths c =
                correctors(coefficient_paths(setup.section, s, setup.bc.L));
            psi[static_cast<std::size_t>(m)] = c.psi_l2();
            const double err = (c.rve.A - coeffs.A0).norm();
            rve_err[static_cast<std::size_t>(m)] = err * err;
        });
        double psi_mean = 0.0, rve_ms = 0.0;
        for (int m = 0; m < n_samples; ++m) {
            psi_mean += psi[static_cast<std::size_t>(m)];
            rve_ms += rve_err[static_cast<std::size_t>(m)];
        }
        report.eps.push_back(eps);
        report.mean_psi_l2.push_back(psi_mean / n_samples);
        report.rms_rve_error.push_back(std::sqrt(rve_ms / n_samples));
    }
    report.slope_psi = fit_power_law(report.eps, report.mean_psi_l2).exponent;
    report.slope_rve = fit_power_law(report.eps, report.rms_rve_error).exponent;
    return report;
}

}  // namespace roduq
