#pragma once

#include <Eigen/Dense>
#include <vector>

#include "roduq/fields.hpp"
#include "roduq/geometry.hpp"

namespace roduq {

// Boundary data of the mechanical test. Only t1, k0, kL enter the 1D model;
// the full tensors are carried for the 3D model.
struct RodBC {
    Eigen::Vector3d t = Eigen::Vector3d::Zero();  // stretch/compression
    double k0 = 0.0;                              // twist angle at x1 = 0
    double kL = 0.0;                              // twist angle at x1 = L
    Eigen::Matrix2d A0 = Eigen::Matrix2d::Zero(); // linearized dilation (3D only)
    Eigen::Matrix2d AL = Eigen::Matrix2d::Zero();
    double L = 1.0;

    // K matrices are skew with K(1,0) = k.
    Eigen::Matrix2d K0() const;
    Eigen::Matrix2d KL() const;

    // Affine boundary data: u_aff = t1 x1 / L, r_aff = (k0 + (kL-k0) x1/L, 0, 0).
    double u_aff(double x1) const { return t(0) * x1 / L; }
    Eigen::Vector3d r_aff(double x1) const {
        return {k0 + (kL - k0) * x1 / L, 0.0, 0.0};
    }
};

// Nodal solution of the 1D system plus the two flexural-mean multipliers.
struct RodState1D {
    std::vector<double> grid;    // N+1 nodes on [0, L]
    std::vector<double> u_bar;
    std::vector<Eigen::Vector3d> r;
    double multiplier_r2 = 0.0;
    double multiplier_r3 = 0.0;
};

struct EnergyReport {
    double value = 0.0;
    double stretch = 0.0;
    double twist = 0.0;
    double bend2 = 0.0;
    double bend3 = 0.0;
    int solve_iters = 0;       // 0 for direct solves
    double residual = 0.0;     // relative residual of the linear solve

    double term_sum() const { return stretch + twist + bend2 + bend3; }
};

// Assembled saddle-point system for the P1 discretization of the surrogate
// energy. K is kept in banded storage (block-tridiagonal, 4 dofs per node)
// with a rank-2 constraint border.
struct Rod1DSystem {
    int n_elements = 0;
    double L = 0.0;
    // Banded symmetric matrix over interior dofs, bandwidth 7.
    Eigen::MatrixXd band;      // (bandwidth+1) x n_dofs, lower storage
    Eigen::MatrixXd border;    // n_dofs x 2 constraint columns
    Eigen::VectorXd rhs;       // -K_ib z_b
    Eigen::Vector2d rhs_border = Eigen::Vector2d::Zero();
    bool eps_under_resolved = false;

    int n_dofs() const { return static_cast<int>(rhs.size()); }
};

// Element data shared by assembly and energy evaluation: the per-element
// strain uses midpoint values of r and the piecewise-constant fields, so
// the assembled system is the exact Euler-Lagrange system of the discrete
// energy evaluated by energy_1d.
Rod1DSystem assemble_1d(const CrossSection& section, const FieldSample& sample,
                        const RodBC& bc, int n_elements);

// Direct banded LDL^T with the rank-2 border eliminated by a Schur
// complement; residual is checked against the assembled system.
RodState1D solve_1d(const Rod1DSystem& system, const RodBC& bc);

// Discrete surrogate energy of a state (element-midpoint quadrature),
// decomposed into stretch/twist/bending terms.
EnergyReport energy_1d(const RodState1D& state, const CrossSection& section,
                       const FieldSample& sample, const RodBC& bc);

// assemble -> solve -> energy. The returned value is the discrete minimum.
struct Rod1DResult {
    RodState1D state;
    EnergyReport report;
    bool eps_under_resolved = false;
};

Rod1DResult effective_modulus_1d(const CrossSection& section,
                                 const FieldSample& sample, const RodBC& bc,
                                 int n_elements);

// Field grid used by the 1D model: element midpoints of the uniform grid.
std::vector<double> midpoint_grid(double L, int n_elements);

}  // namespace roduq
