#include "roduq/rod1d.hpp"

#include <cmath>

namespace roduq {

namespace {

constexpr int kBand = 7;  // 4 dofs per node, nearest-neighbour stencil

// Local element data: the 4 strain components as linear maps of the 8
// local dofs (u, r1, r2, r3 at both element nodes), midpoint quadrature.
struct ElementMap {
    Eigen::Matrix<double, 4, 8> B;
    Eigen::Vector4d D;  // diag weights (a|S|, mu J, a I3, a I2)
    double w = 0.0;     // quadrature weight h/L
};

ElementMap element_map(const CrossSection& section, const FieldSample& sample,
                       double L, int n_elements, int e) {
    const double h = L / n_elements;
    const double a = young_modulus(sample.mu[e], sample.lambda[e]);
    ElementMap m;
    m.w = h / L;
    m.D = {a * section.area, sample.mu[e] * section.J, a * section.I3,
           a * section.I2};
    m.B.setZero();
    const double inv_h = 1.0 / h;
    // dofs: 0:u_l 1:r1_l 2:r2_l 3:r3_l 4:u_r 5:r1_r 6:r2_r 7:r3_r
    m.B(0, 0) = -inv_h;
    m.B(0, 4) = inv_h;
    const double c1 = sample.phi1[e] / (2.0 * L);   // r3 coupling
    const double c2 = -sample.phi2[e] / (2.0 * L);  // r2 coupling
    m.B(0, 3) += c1;
    m.B(0, 7) += c1;
    m.B(0, 2) += c2;
    m.B(0, 6) += c2;
    for (int c = 1; c < 4; ++c) {
        m.B(c, c) = -inv_h;
        m.B(c, c + 4) = inv_h;
    }
    return m;
}

// Boundary nodal values of the affine lift.
Eigen::Matrix<double, 8, 1> boundary_values(const RodBC& bc) {
    Eigen::Matrix<double, 8, 1> zb;
    zb << bc.u_aff(0.0), bc.r_aff(0.0)(0), 0.0, 0.0,  //
        bc.u_aff(bc.L), bc.r_aff(bc.L)(0), 0.0, 0.0;
    return zb;
}

// Banded LDL^T (lower storage, no pivoting; the reduced operator is SPD).
class BandedLDLT {
public:
    BandedLDLT(const Eigen::MatrixXd& band) : band_(band) {
        const int n = static_cast<int>(band.cols());
        for (int j = 0; j < n; ++j) {
            double d = band_(0, j);
            for (int k = std::max(0, j - kBand); k < j; ++k) {
                const double l = band_(j - k, k);
                d -= l * l * band_(0, k);
            }
            if (!(std::abs(d) > 0.0))
                throw solver_error("rod1d: singular pivot in banded factorization");
            band_(0, j) = d;
            for (int i = j + 1; i <= std::min(n - 1, j + kBand); ++i) {
                double v = band_(i - j, j);
                for (int k = std::max({0, i - kBand, j - kBand}); k < j; ++k)
                    v -= band_(i - k, k) * band_(j - k, k) * band_(0, k);
                band_(i - j, j) = v / d;
            }
        }
    }

    Eigen::VectorXd solve(Eigen::VectorXd b) const {
        const int n = static_cast<int>(band_.cols());
        for (int j = 0; j < n; ++j) {
            const double bj = b[j];
            for (int i = j + 1; i <= std::min(n - 1, j + kBand); ++i)
                b[i] -= band_(i - j, j) * bj;
        }
        for (int j = 0; j < n; ++j) b[j] /= band_(0, j);
        for (int j = n - 1; j >= 0; --j) {
            double s = b[j];
            for (int i = j + 1; i <= std::min(n - 1, j + kBand); ++i)
                s -= band_(i - j, j) * b[i];
            b[j] = s;
        }
        return b;
    }

private:
    Eigen::MatrixXd band_;  // factorized in place: D on row 0, L below
};

}  // namespace

Eigen::Matrix2d RodBC::K0() const {
    Eigen::Matrix2d k;
    k << 0.0, -k0, k0, 0.0;
    return k;
}

Eigen::Matrix2d RodBC::KL() const {
    Eigen::Matrix2d k;
    k << 0.0, -kL, kL, 0.0;
    return k;
}

std::vector<double> midpoint_grid(double L, int n_elements) {
    std::vector<double> g(static_cast<std::size_t>(n_elements));
    const double h = L / n_elements;
    for (int e = 0; e < n_elements; ++e) g[static_cast<std::size_t>(e)] = (e + 0.5) * h;
    return g;
}

Rod1DSystem assemble_1d(const CrossSection& section, const FieldSample& sample,
                        const RodBC& bc, int n_elements) {
    if (n_elements < 4) throw std::invalid_argument("assemble_1d: need N >= 4");
    if (sample.grid.size() != static_cast<std::size_t>(n_elements))
        throw std::invalid_argument("assemble_1d: field grid does not match N");
    const double L = bc.L;
    if (!(L > 0.0)) throw std::invalid_argument("assemble_1d: L must be > 0");
    const double h = L / n_elements;
    for (int e = 0; e < n_elements; ++e)
        if (std::abs(sample.grid[e] - (e + 0.5) * h) > 1e-9 * L)
            throw std::invalid_argument("assemble_1d: field grid is not the midpoint grid");

    Rod1DSystem sys;
    sys.n_elements = n_elements;
    sys.L = L;
    sys.eps_under_resolved = sample.eps > 0.0 && sample.eps < 4.0 * L / n_elements;

    const int nd = 4 * (n_elements - 1);
    sys.band = Eigen::MatrixXd::Zero(kBand + 1, nd);
    sys.border = Eigen::MatrixXd::Zero(nd, 2);
    sys.rhs = Eigen::VectorXd::Zero(nd);

    const auto zb = boundary_values(bc);
    // Interior dof index of (node, comp); -1 marks a boundary dof.
    auto dof = [&](int node, int comp) {
        return (node == 0 || node == n_elements) ? -1 : 4 * (node - 1) + comp;
    };
    auto boundary_value = [&](int node, int comp) {
        return node == 0 ? zb[comp] : zb[4 + comp];
    };

    for (int e = 0; e < n_elements; ++e) {
        const ElementMap m = element_map(section, sample, L, n_elements, e);
        const Eigen::Matrix<double, 8, 8> K_loc =
            m.w * m.B.transpose() * m.D.asDiagonal() * m.B;
        int gdof[8];
        for (int a = 0; a < 8; ++a) gdof[a] = dof(e + a / 4, a % 4);
        for (int a = 0; a < 8; ++a) {
            if (gdof[a] < 0) continue;
            for (int b = 0; b < 8; ++b) {
                if (gdof[b] < 0) {
                    sys.rhs[gdof[a]] -= K_loc(a, b) * boundary_value(e + b / 4, b % 4);
                } else if (gdof[b] <= gdof[a]) {
                    sys.band(gdof[a] - gdof[b], gdof[b]) += K_loc(a, b);
                }
            }
        }
    }

    // Mean-zero constraints on r2 and r3: trapezoid weights of the P1
    // interpolant (boundary values vanish), scaled by 1/L.
    for (int node = 1; node < n_elements; ++node) {
        sys.border(4 * (node - 1) + 2, 0) = h / L;
        sys.border(4 * (node - 1) + 3, 1) = h / L;
    }
    return sys;
}

RodState1D solve_1d(const Rod1DSystem& sys, const RodBC& bc) {
    const int nd = sys.n_dofs();
    BandedLDLT fact(sys.band);

    // Rank-2 border elimination (Schur complement).
    const Eigen::VectorXd y = fact.solve(sys.rhs);
    Eigen::MatrixXd W(nd, 2);
    W.col(0) = fact.solve(sys.border.col(0));
    W.col(1) = fact.solve(sys.border.col(1));
    const Eigen::Matrix2d S = sys.border.transpose() * W;
    const Eigen::Vector2d lambda =
        S.fullPivLu().solve(sys.border.transpose() * y - sys.rhs_border);
    const Eigen::VectorXd z = y - W * lambda;

    RodState1D state;
    const int n = sys.n_elements;
    state.grid.resize(static_cast<std::size_t>(n) + 1);
    state.u_bar.resize(state.grid.size());
    state.r.resize(state.grid.size());
    const double h = sys.L / n;
    for (int i = 0; i <= n; ++i) {
        state.grid[i] = i * h;
        if (i == 0 || i == n) {
            state.u_bar[i] = bc.u_aff(state.grid[i]);
            state.r[i] = bc.r_aff(state.grid[i]);
        } else {
            const int base = 4 * (i - 1);
            state.u_bar[i] = z[base];
            state.r[i] = {z[base + 1], z[base + 2], z[base + 3]};
        }
    }
    state.multiplier_r2 = lambda[0];
    state.multiplier_r3 = lambda[1];
    return state;
}

EnergyReport energy_1d(const RodState1D& state, const CrossSection& section,
                       const FieldSample& sample, const RodBC& bc) {
    const int n = static_cast<int>(state.grid.size()) - 1;
    if (sample.grid.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("energy_1d: field grid does not match state");
    const double L = bc.L;
    const double h = L / n;
    EnergyReport rep;
    for (int e = 0; e < n; ++e) {
        const double a = young_modulus(sample.mu[e], sample.lambda[e]);
        const double du = (state.u_bar[e + 1] - state.u_bar[e]) / h;
        const Eigen::Vector3d dr = (state.r[e + 1] - state.r[e]) / h;
        const Eigen::Vector3d rm = 0.5 * (state.r[e + 1] + state.r[e]);
        const double xi1 =
            du + (rm[2] * sample.phi1[e] - rm[1] * sample.phi2[e]) / L;
        const double w = h / L;
        rep.stretch += w * a * section.area * xi1 * xi1;
        rep.twist += w * sample.mu[e] * section.J * dr[0] * dr[0];
        rep.bend2 += w * a * section.I3 * dr[1] * dr[1];
        rep.bend3 += w * a * section.I2 * dr[2] * dr[2];
    }
    rep.value = rep.stretch + rep.twist + rep.bend2 + rep.bend3;
    return rep;
}

Rod1DResult effective_modulus_1d(const CrossSection& section,
                                 const FieldSample& sample, const RodBC& bc,
                                 int n_elements) {
    const Rod1DSystem sys = assemble_1d(section, sample, bc, n_elements);
    Rod1DResult out;
    out.state = solve_1d(sys, bc);
    out.report = energy_1d(out.state, section, sample, bc);
    out.eps_under_resolved = sys.eps_under_resolved;

    // Relative residual of the bordered system.
    const int nd = sys.n_dofs();
    Eigen::VectorXd z(nd);
    for (int i = 1; i < n_elements; ++i) {
        z[4 * (i - 1)] = out.state.u_bar[i];
        z.segment<3>(4 * (i - 1) + 1) = out.state.r[i];
    }
    Eigen::VectorXd Kz = Eigen::VectorXd::Zero(nd);
    for (int j = 0; j < nd; ++j) {
        Kz[j] += sys.band(0, j) * z[j];
        for (int b = 1; b <= kBand && j + b < nd; ++b) {
            Kz[j + b] += sys.band(b, j) * z[j];
            Kz[j] += sys.band(b, j) * z[j + b];
        }
    }
    const Eigen::Vector2d lam(out.state.multiplier_r2, out.state.multiplier_r3);
    const Eigen::VectorXd resid = Kz + sys.border * lam - sys.rhs;
    const double scale = std::max(sys.rhs.norm(), 1e-30);
    out.report.residual = resid.norm() / scale;
    return out;
}

}  // namespace roduq
