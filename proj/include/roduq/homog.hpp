#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "roduq/rod1d.hpp"

namespace roduq {

// Deterministic-proxy coefficients: harmonic means of the material paths
// and the assembled 4x4 form of the homogenized rod energy.
struct HomogenizedCoefficients {
    double a_hom = 0.0;
    double mu_hom = 0.0;
    Eigen::Vector2d mean_phi = Eigen::Vector2d::Zero();
    Eigen::Matrix4d A0 = Eigen::Matrix4d::Zero();
};

// Harmonic means of given paths (weights uniform). Throws on non-positive
// entries.
double harmonic_mean(std::span<const double> path);

HomogenizedCoefficients homogenized_coefficients(const CrossSection& section,
                                                 std::span<const double> mu_path,
                                                 std::span<const double> lambda_path,
                                                 const Eigen::Vector2d& mean_phi);

// Analytic harmonic means where the sampling law admits them
// (deterministic and lognormal_transform with tied lambda); ergodic
// long-path averages otherwise. The auxiliary path length is >= 100 eps.
HomogenizedCoefficients homogenized_coefficients_for_model(
    const CrossSection& section, const MaterialSpec& material, double eps,
    std::uint64_t seed_aux, const Eigen::Vector2d& mean_phi = Eigen::Vector2d::Zero());

// E0 at the affine state: the flexural components of r_aff vanish, so the
// <Phi> coupling drops out and the value is the Q0 evaluation at
// (t1/L, (kL-k0)/L, 0, 0) under the mean-integral convention.
double e0_closed_form(const CrossSection& section,
                      const HomogenizedCoefficients& coeffs, const RodBC& bc);

// Deterministic weak system (constant coefficients, <Phi> in place of the
// sample path). Must reproduce e0_closed_form when <Phi> = 0.
EnergyReport e0_system_solve(const CrossSection& section,
                             const HomogenizedCoefficients& coeffs,
                             const RodBC& bc, int n_elements);

// ---------------------------------------------------------------------------
// RVE coefficients and correctors
// ---------------------------------------------------------------------------

// 4x4 coefficient path A_e = diag(a |S|, mu J, a I3, a I2) per element and
// the perturbation matrix B_e with first column (0, 0, phi2, -phi1).
struct CoefficientPaths {
    std::vector<Eigen::Matrix4d> A;
    std::vector<Eigen::Matrix4d> B;
    double L = 1.0;
};

CoefficientPaths coefficient_paths(const CrossSection& section,
                                   const FieldSample& sample, double L);

struct RveCoefficients {
    Eigen::Matrix4d A;  // matrix harmonic mean of the A path
    Eigen::Matrix4d B;  // arithmetic mean of the B path
};

RveCoefficients rve_coefficients(const CoefficientPaths& paths);

// Dirichlet corrector Phi(s) = int_0^s (A^-1 Abar - Id) and auxiliary
// corrector Psi(s) = int_0^s (B - Bbar); both vanish at s = L by
// construction. Nodal values on the N+1 grid.
struct CorrectorPaths {
    std::vector<Eigen::Matrix4d> Phi;
    std::vector<Eigen::Vector4d> Psi;  // first column of the B-corrector
    RveCoefficients rve;
    double L = 1.0;

    // Mean-normalized L2 norms, ((1/L) int |.|^2)^(1/2).
    double phi_l2() const;
    double psi_l2() const;
};

CorrectorPaths correctors(const CoefficientPaths& paths);

// ---------------------------------------------------------------------------
// Convergence-rate sweep
// ---------------------------------------------------------------------------

struct RateSetup {
    CrossSection section;
    MaterialSpec material;
    double sigma1 = 0.3;
    double sigma2 = 0.3;
    double clip = 0.0;  // c_S; <= 0 disables clipping
    RodBC bc;
    int n_elements = 2000;
};

struct RatePoint {
    double eps = 0.0;
    double l2_error = 0.0;
    int n_samples = 0;
    bool excluded = false;  // under-resolved on the grid
};

struct RateReport {
    std::vector<RatePoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double e0 = 0.0;
};

RateReport rate_sweep(const RateSetup& setup, std::span<const double> eps_grid,
                      int n_samples, std::uint64_t seed_base, int workers = 1);

// Monte Carlo scaling of corrector norms and RVE errors vs eps; used for
// the sqrt(eps) diagnostics.
struct ScalingReport {
    std::vector<double> eps;
    std::vector<double> mean_psi_l2;
    std::vector<double> rms_rve_error;   // RMS |Abar - A0|_F
    double slope_psi = 0.0;
    double slope_rve = 0.0;
};

ScalingReport corrector_scaling(const RateSetup& setup,
                                std::span<const double> eps_grid, int n_samples,
                                std::uint64_t seed_base, int workers = 1);

}  // namespace roduq
