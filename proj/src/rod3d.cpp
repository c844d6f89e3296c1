#include "roduq/rod3d.hpp"

#include <cmath>

namespace roduq {

namespace {

// Two-point Gauss rule in the axial direction; the in-plane rule is the
// triangle centroid. The strain of a P1 wedge is affine in the axial
// coordinate, so the axial quadrature is exact.
constexpr double kGauss[2] = {0.5 - 0.28867513459481287, 0.5 + 0.28867513459481287};

struct WedgeBasis {
    // Transformed gradient row (d1, d2/h, d3/h) * (Id + (h/L) B) per local
    // shape function at one quadrature point.
    Eigen::Vector3d g[6];
    double weight = 0.0;
};

// Basis data for one quadrature point of a wedge over triangle (p0,p1,p2)
// with axial extent dx1.
WedgeBasis wedge_basis(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                       const Eigen::Vector2d& p2, double dx1, double h, double L,
                       double phi1, double phi2, double zeta, double gauss_w) {
    const double a2 = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                      (p2.x() - p0.x()) * (p1.y() - p0.y());
    if (a2 <= 0.0) throw mesh_error("prism mesh: degenerate or inverted triangle");
    const double area = 0.5 * a2;
    Eigen::Vector2d grad[3];
    grad[0] = Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) / a2;
    grad[1] = Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x()) / a2;
    grad[2] = Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x()) / a2;

    WedgeBasis b;
    b.weight = gauss_w * area * dx1 / L;  // includes the 1/L energy prefactor
    const double lam_c = 1.0 / 3.0;       // barycentric value at the centroid
    for (int i = 0; i < 6; ++i) {
        const int v = i % 3;
        const bool top = i >= 3;
        const double axial = (top ? lam_c : -lam_c) / dx1;
        const double inplane = (top ? zeta : 1.0 - zeta) / h;
        Eigen::Vector3d g(axial, inplane * grad[v].x(), inplane * grad[v].y());
        // Right-multiply by Id + (h/L) B; B has -(phi1, phi2) in rows 2,3 of
        // the first column.
        g(0) -= (h / L) * (phi1 * g(1) + phi2 * g(2));
        b.g[i] = g;
    }
    return b;
}

// Polarization of Q for rank-one fields: A = e_c (x) u, B = e_d (x) v gives
// mu (delta_cd u.v + u_d v_c) + lambda u_c v_d.
inline double rank_one_bilinear(double mu, double lambda, int c,
                                const Eigen::Vector3d& u, int d,
                                const Eigen::Vector3d& v) {
    double s = mu * u(d) * v(c) + lambda * u(c) * v(d);
    if (c == d) s += mu * u.dot(v);
    return s;
}

void accumulate_wedge(Eigen::Matrix<double, 18, 18>& K, const WedgeBasis& b,
                      double mu, double lambda) {
    for (int i = 0; i < 6; ++i)
        for (int c = 0; c < 3; ++c)
            for (int j = 0; j < 6; ++j)
                for (int d = 0; d < 3; ++d)
                    K(3 * i + c, 3 * j + d) +=
                        b.weight * rank_one_bilinear(mu, lambda, c, b.g[i], d, b.g[j]);
}

Eigen::Vector2d phi_mean(const FieldSample& sample) {
    Eigen::Vector2d m = Eigen::Vector2d::Zero();
    for (std::size_t e = 0; e < sample.phi1.size(); ++e) {
        m(0) += sample.phi1[e];
        m(1) += sample.phi2[e];
    }
    return sample.phi1.empty() ? m : Eigen::Vector2d(m / sample.phi1.size());
}

// Nodal Dirichlet values on the end faces, the transformed-domain form of
// the mechanical test.
Eigen::Vector3d face_value(const RodBC& bc, double h, const Eigen::Vector2d& xbar,
                           bool top, const Eigen::Vector2d& c) {
    if (!top) {
        const Eigen::Vector2d w = (h * bc.A0 + bc.K0()) * xbar;
        return {0.0, w(0), w(1)};
    }
    const Eigen::Vector2d w = (h * bc.AL + bc.KL()) * (xbar + c);
    return {bc.t(0), bc.t(1) + w(0), bc.t(2) + w(1)};
}

void check_sample_grid(const PrismMesh& mesh, const FieldSample& sample) {
    if (sample.grid.size() != static_cast<std::size_t>(mesh.n_layers))
        throw std::invalid_argument("rod3d: field grid does not match the layers");
    const double dx1 = mesh.L / mesh.n_layers;
    for (int k = 0; k < mesh.n_layers; ++k)
        if (std::abs(sample.grid[k] - (k + 0.5) * dx1) > 1e-9 * mesh.L)
            throw std::invalid_argument("rod3d: field grid is not the layer-midpoint grid");
}

}  // namespace

PrismMesh build_prism_mesh(const TriMesh& section, int n_layers, double L) {
    if (n_layers < 1) throw std::invalid_argument("build_prism_mesh: n_layers >= 1");
    if (!(L > 0.0)) throw std::invalid_argument("build_prism_mesh: L must be > 0");
    for (const auto& t : section.triangles) {
        const auto& a = section.nodes[t[0]];
        const auto& b = section.nodes[t[1]];
        const auto& c = section.nodes[t[2]];
        const double a2 = (b.x() - a.x()) * (c.y() - a.y()) -
                          (c.x() - a.x()) * (b.y() - a.y());
        if (a2 <= 0.0) throw mesh_error("build_prism_mesh: degenerate triangle");
    }
    PrismMesh mesh;
    mesh.section = section;
    mesh.n_layers = n_layers;
    mesh.L = L;
    return mesh;
}

Eigen::Matrix<double, 18, 18> wedge_element_matrix(
    const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
    const Eigen::Vector2d& p2, double dx1, double h, double L, double mu,
    double lambda, double phi1, double phi2) {
    Eigen::Matrix<double, 18, 18> K = Eigen::Matrix<double, 18, 18>::Zero();
    for (const double zeta : kGauss) {
        const WedgeBasis b = wedge_basis(p0, p1, p2, dx1, h, L, phi1, phi2, zeta, 0.5);
        accumulate_wedge(K, b, mu, lambda);
    }
    return K;
}

Rod3DSystem assemble_3d(const PrismMesh& mesh, const FieldSample& sample,
                        const RodBC& bc, double h) {
    if (!(h > 0.0) || h > 1.0)
        throw std::invalid_argument("assemble_3d: h must lie in (0, 1]");
    check_sample_grid(mesh, sample);

    const int ns = mesh.n_section_nodes();
    const int nn = mesh.n_nodes();
    const Eigen::Vector2d c = phi_mean(sample);

    Rod3DSystem sys;
    sys.dof_of_node.assign(static_cast<std::size_t>(nn), -1);
    sys.lift.assign(static_cast<std::size_t>(nn), Eigen::Vector3d::Zero());
    int free = 0;
    for (int layer = 0; layer <= mesh.n_layers; ++layer)
        for (int s = 0; s < ns; ++s) {
            const int node = mesh.node_index(layer, s);
            if (layer == 0 || layer == mesh.n_layers) {
                sys.lift[node] =
                    face_value(bc, h, mesh.section.nodes[s], layer != 0, c);
            } else {
                sys.dof_of_node[node] = free++;
            }
        }
    sys.n_free = 3 * free;
    sys.rhs = Eigen::VectorXd::Zero(sys.n_free);

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(mesh.section.triangles.size()) *
                  mesh.n_layers * 190);
    const double dx1 = mesh.L / mesh.n_layers;

    for (int layer = 0; layer < mesh.n_layers; ++layer) {
        const double mu = sample.mu[layer];
        const double lambda = sample.lambda[layer];
        const double p1v = sample.phi1[layer];
        const double p2v = sample.phi2[layer];
        for (const auto& t : mesh.section.triangles) {
            const Eigen::Matrix<double, 18, 18> K_loc = wedge_element_matrix(
                mesh.section.nodes[t[0]], mesh.section.nodes[t[1]],
                mesh.section.nodes[t[2]], dx1, h, mesh.L, mu, lambda, p1v, p2v);
            int nodes[6];
            for (int v = 0; v < 3; ++v) {
                nodes[v] = mesh.node_index(layer, t[v]);
                nodes[3 + v] = mesh.node_index(layer + 1, t[v]);
            }
            for (int i = 0; i < 6; ++i) {
                const int di = sys.dof_of_node[nodes[i]];
                for (int ci = 0; ci < 3; ++ci) {
                    if (di < 0) continue;
                    const int gi = 3 * di + ci;
                    for (int j = 0; j < 6; ++j) {
                        const int dj = sys.dof_of_node[nodes[j]];
                        for (int cj = 0; cj < 3; ++cj) {
                            const double v = K_loc(3 * i + ci, 3 * j + cj);
                            if (v == 0.0) continue;
                            if (dj < 0) {
                                sys.rhs[gi] -= v * sys.lift[nodes[j]](cj);
                            } else {
                                const int gj = 3 * dj + cj;
                                if (gj <= gi) trips.emplace_back(gi, gj, v);
                            }
                        }
                    }
                }
            }
        }
    }
    sys.K.resize(sys.n_free, sys.n_free);
    sys.K.setFromTriplets(trips.begin(), trips.end());
    return sys;
}

Solve3DResult solve_3d(const Rod3DSystem& sys, const PrismMesh& mesh, double tol,
                       int max_iters) {
    const int n = sys.n_free;
    Eigen::VectorXd diag(n);
    for (int i = 0; i < n; ++i) {
        const double d = sys.K.coeff(i, i);
        if (!(d > 0.0)) throw solver_error("rod3d: system not positive definite");
        diag[i] = d;
    }
    const auto A = sys.K.selfadjointView<Eigen::Lower>();

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = sys.rhs;
    const double rhs_norm = r.norm();
    Solve3DResult out;
    if (rhs_norm > 0.0) {
        Eigen::VectorXd z = r.cwiseQuotient(diag);
        Eigen::VectorXd p = z;
        double rz = r.dot(z);
        int it = 0;
        for (; it < max_iters; ++it) {
            if (r.norm() <= tol * rhs_norm) break;
            const Eigen::VectorXd Ap = A * p;
            const double alpha = rz / p.dot(Ap);
            x += alpha * p;
            r -= alpha * Ap;
            z = r.cwiseQuotient(diag);
            const double rz_new = r.dot(z);
            p = z + (rz_new / rz) * p;
            rz = rz_new;
        }
        out.iterations = it;
        out.residual = r.norm() / rhs_norm;
        if (out.residual > tol)
            throw solver_error("rod3d: CG did not converge (residual " +
                               std::to_string(out.residual) + ")");
    }

    out.displacement.u.assign(static_cast<std::size_t>(mesh.n_nodes()),
                              Eigen::Vector3d::Zero());
    for (int node = 0; node < mesh.n_nodes(); ++node) {
        const int d = sys.dof_of_node[node];
        out.displacement.u[node] = d < 0 ? sys.lift[node] : Eigen::Vector3d(x.segment<3>(3 * d));
    }
    return out;
}

double energy_3d(const PrismMesh& mesh, const FieldSample& sample,
                 const RodBC& bc, double h, const Displacement3D& u) {
    (void)bc;
    if (!(h > 0.0)) throw std::invalid_argument("energy_3d: h must be > 0");
    check_sample_grid(mesh, sample);
    const double dx1 = mesh.L / mesh.n_layers;
    double energy = 0.0;
    for (int layer = 0; layer < mesh.n_layers; ++layer) {
        const double mu = sample.mu[layer];
        const double lambda = sample.lambda[layer];
        for (const auto& t : mesh.section.triangles) {
            int nodes[6];
            for (int v = 0; v < 3; ++v) {
                nodes[v] = mesh.node_index(layer, t[v]);
                nodes[3 + v] = mesh.node_index(layer + 1, t[v]);
            }
            for (const double zeta : kGauss) {
                const WedgeBasis b = wedge_basis(
                    mesh.section.nodes[t[0]], mesh.section.nodes[t[1]],
                    mesh.section.nodes[t[2]], dx1, h, mesh.L,
                    sample.phi1[layer], sample.phi2[layer], zeta, 0.5);
                Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
                for (int i = 0; i < 6; ++i) G += u.u[nodes[i]] * b.g[i].transpose();
                const Eigen::Matrix3d S = 0.5 * (G + G.transpose());
                energy += b.weight *
                          (2.0 * mu * S.squaredNorm() + lambda * S.trace() * S.trace());
            }
        }
    }
    return energy;
}

Rod3DResult effective_modulus_3d(const PrismMesh& mesh, const FieldSample& sample,
                                 const RodBC& bc, double h, double tol,
                                 int max_iters) {
    const Rod3DSystem sys = assemble_3d(mesh, sample, bc, h);
    const Solve3DResult sol = solve_3d(sys, mesh, tol, max_iters);
    Rod3DResult out;
    out.displacement = sol.displacement;
    out.report.value = energy_3d(mesh, sample, bc, h, sol.displacement);
    out.report.solve_iters = sol.iterations;
    out.report.residual = sol.residual;
    return out;
}

Displacement3D recovery_ansatz(const PrismMesh& mesh, const RodState1D& state,
                               const FieldSample& sample, const RodBC& bc,
                               double h) {
    if (state.grid.size() != static_cast<std::size_t>(mesh.n_layers) + 1)
        throw std::invalid_argument("recovery_ansatz: 1D grid must match the layers");
    const Eigen::Vector2d c = phi_mean(sample);
    const int ns = mesh.n_section_nodes();

    // Trapezoid antiderivatives of r2, r3 (exact for the P1 solution).
    std::vector<double> int_r2(state.grid.size(), 0.0), int_r3(state.grid.size(), 0.0);
    for (std::size_t k = 1; k < state.grid.size(); ++k) {
        const double dx = state.grid[k] - state.grid[k - 1];
        int_r2[k] = int_r2[k - 1] + 0.5 * dx * (state.r[k - 1](1) + state.r[k](1));
        int_r3[k] = int_r3[k - 1] + 0.5 * dx * (state.r[k - 1](2) + state.r[k](2));
    }

    Displacement3D out;
    out.u.assign(static_cast<std::size_t>(mesh.n_nodes()), Eigen::Vector3d::Zero());
    for (int layer = 0; layer <= mesh.n_layers; ++layer) {
        const double x1 = mesh.layer_x1(layer);
        const double ub = state.u_bar[layer];
        const Eigen::Vector3d r = state.r[layer];
        for (int s = 0; s < ns; ++s) {
            const Eigen::Vector2d xb = mesh.section.nodes[s];
            Eigen::Vector3d v;
            v(0) = ub + r(1) * xb.y() - r(2) * xb.x();
            v(1) = int_r3[layer] / h - r(0) * xb.y();
            v(2) = -int_r2[layer] / h + r(0) * xb.x();
            // Affine correction recovering the dilation part of the data.
            const double ratio = x1 / mesh.L;
            const Eigen::Vector2d w = (1.0 - ratio) * (h * bc.A0 * xb) +
                                      ratio * (Eigen::Vector2d(bc.t(1), bc.t(2)) +
                                               h * bc.AL * (xb + c) + bc.KL() * c);
            v(1) += w(0);
            v(2) += w(1);
            const int node = mesh.node_index(layer, s);
            if (layer == 0 || layer == mesh.n_layers)
                v = face_value(bc, h, xb, layer != 0, c);
            out.u[node] = v;
        }
    }
    return out;
}

}  // namespace roduq
