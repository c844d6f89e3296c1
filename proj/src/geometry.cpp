#include "roduq/geometry.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <map>
#include <numbers>

namespace roduq {

namespace {

double tri_area2(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                 const Eigen::Vector2d& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
}

// Degree-2 exact rule: the three edge midpoints with equal weights.
template <typename F>
double integrate_p2(const TriMesh& mesh, F&& f) {
    double total = 0.0;
    for (const auto& t : mesh.triangles) {
        const auto& a = mesh.nodes[t[0]];
        const auto& b = mesh.nodes[t[1]];
        const auto& c = mesh.nodes[t[2]];
        const double area = 0.5 * tri_area2(a, b, c);
        const Eigen::Vector2d m0 = 0.5 * (a + b);
        const Eigen::Vector2d m1 = 0.5 * (b + c);
        const Eigen::Vector2d m2 = 0.5 * (c + a);
        total += area / 3.0 * (f(m0) + f(m1) + f(m2));
    }
    return total;
}

struct Moments {
    double area = 0, cx = 0, cy = 0;  // centroid
    double I2 = 0, I3 = 0, Ixy = 0;   // about the origin
};

Moments compute_moments(const TriMesh& mesh) {
    Moments m;
    m.area = mesh.area();
    const double sx = integrate_p2(mesh, [](const Eigen::Vector2d& p) { return p.x(); });
    const double sy = integrate_p2(mesh, [](const Eigen::Vector2d& p) { return p.y(); });
    m.cx = sx / m.area;
    m.cy = sy / m.area;
    m.I2 = integrate_p2(mesh, [](const Eigen::Vector2d& p) { return p.x() * p.x(); });
    m.I3 = integrate_p2(mesh, [](const Eigen::Vector2d& p) { return p.y() * p.y(); });
    m.Ixy = integrate_p2(mesh, [](const Eigen::Vector2d& p) { return p.x() * p.y(); });
    return m;
}

double bbox_diameter(const TriMesh& mesh) {
    Eigen::Vector2d lo = mesh.nodes.front(), hi = mesh.nodes.front();
    for (const auto& p : mesh.nodes) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

// Proper segment intersection including touching interiors.
bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                        const Eigen::Vector2d& q1, const Eigen::Vector2d& q2) {
    auto orient = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     const Eigen::Vector2d& c) {
        const double v = tri_area2(a, b, c);
        const double scale = (b - a).norm() * (c - a).norm();
        if (std::abs(v) <= 1e-14 * std::max(scale, 1e-300)) return 0;
        return v > 0 ? 1 : -1;
    };
    const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    auto on_segment = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                         const Eigen::Vector2d& p) {
        return p.x() <= std::max(a.x(), b.x()) + 1e-14 &&
               p.x() >= std::min(a.x(), b.x()) - 1e-14 &&
               p.y() <= std::max(a.y(), b.y()) + 1e-14 &&
               p.y() >= std::min(a.y(), b.y()) - 1e-14;
    };
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

bool polygon_is_simple(const std::vector<Eigen::Vector2d>& v) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // Skip adjacent edges (they share a vertex).
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

bool point_in_triangle(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                       const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    const double d = tri_area2(a, b, c);
    const double b0 = tri_area2(p, b, c) / d;
    const double b1 = tri_area2(a, p, c) / d;
    const double b2 = tri_area2(a, b, p) / d;
    return b0 > 1e-12 && b1 > 1e-12 && b2 > 1e-12;
}

TriMesh ear_clip(std::vector<Eigen::Vector2d> poly) {
    // Normalize to counter-clockwise orientation.
    double area2 = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        area2 += poly[i].x() * poly[(i + 1) % n].y() - poly[(i + 1) % n].x() * poly[i].y();
    if (area2 < 0.0) std::reverse(poly.begin(), poly.end());

    TriMesh mesh;
    mesh.nodes = poly;
    std::vector<int> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);

    while (idx.size() > 3) {
        bool clipped = false;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const std::size_t m = idx.size();
            const int ia = idx[(i + m - 1) % m], ib = idx[i], ic = idx[(i + 1) % m];
            const auto &a = mesh.nodes[ia], &b = mesh.nodes[ib], &c = mesh.nodes[ic];
            if (tri_area2(a, b, c) <= 1e-14 * bbox_diameter(mesh) * bbox_diameter(mesh))
                continue;  // reflex or degenerate corner
            bool contains = false;
            for (const int other : idx) {
                if (other == ia || other == ib || other == ic) continue;
                if (point_in_triangle(mesh.nodes[other], a, b, c)) {
                    contains = true;
                    break;
                }
            }
            if (contains) continue;
            mesh.triangles.push_back({ia, ib, ic});
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped) throw mesh_error("ear clipping failed; polygon may be degenerate");
    }
    mesh.triangles.push_back({idx[0], idx[1], idx[2]});
    return mesh;
}

}  // namespace

double TriMesh::area() const {
    double a = 0.0;
    for (const auto& t : triangles)
        a += 0.5 * tri_area2(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
    return a;
}

double TriMesh::max_edge() const {
    double h = 0.0;
    for (const auto& t : triangles)
        for (int e = 0; e < 3; ++e)
            h = std::max(h, (nodes[t[e]] - nodes[t[(e + 1) % 3]]).norm());
    return h;
}

std::vector<std::array<int, 2>> TriMesh::boundary_edges() const {
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : triangles)
        for (int e = 0; e < 3; ++e) {
            const int a = t[e], b = t[(e + 1) % 3];
            count[{std::min(a, b), std::max(a, b)}]++;
        }
    std::vector<std::array<int, 2>> edges;
    for (const auto& t : triangles)
        for (int e = 0; e < 3; ++e) {
            const int a = t[e], b = t[(e + 1) % 3];
            if (count[{std::min(a, b), std::max(a, b)}] == 1) edges.push_back({a, b});
        }
    return edges;
}

TriMesh refine_uniform(const TriMesh& mesh) {
    TriMesh out;
    out.nodes = mesh.nodes;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto key = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int id = static_cast<int>(out.nodes.size());
        out.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
        midpoint[key] = id;
        return id;
    };
    for (const auto& t : mesh.triangles) {
        const int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
        out.triangles.push_back({t[0], m01, m20});
        out.triangles.push_back({t[1], m12, m01});
        out.triangles.push_back({t[2], m20, m12});
        out.triangles.push_back({m01, m12, m20});
    }
    return out;
}

TriMesh disc_mesh(double radius, int rings) {
    if (!(radius > 0.0)) throw std::invalid_argument("disc_mesh: radius must be > 0");
    if (rings < 1) throw std::invalid_argument("disc_mesh: rings must be >= 1");
    TriMesh mesh;
    mesh.nodes.push_back({0.0, 0.0});
    std::vector<int> ring_start{0};  // index of first node of ring j (j >= 1)
    for (int j = 1; j <= rings; ++j) {
        ring_start.push_back(static_cast<int>(mesh.nodes.size()));
        const double r = radius * j / rings;
        const int nj = 6 * j;
        for (int k = 0; k < nj; ++k) {
            const double ang = 2.0 * std::numbers::pi * k / nj;
            mesh.nodes.push_back({r * std::cos(ang), r * std::sin(ang)});
        }
    }
    // ring 1: fan around the center
    for (int k = 0; k < 6; ++k)
        mesh.triangles.push_back({ring_start[1] + k, ring_start[1] + (k + 1) % 6, 0});
    for (int j = 2; j <= rings; ++j) {
        const int n_in = 6 * (j - 1), n_out = 6 * j;
        const int in0 = ring_start[j - 1], out0 = ring_start[j];
        for (int s = 0; s < 6; ++s) {
            for (int p = 0; p < j; ++p) {
                const int op = out0 + (s * j + p) % n_out;
                const int oq = out0 + (s * j + p + 1) % n_out;
                const int ip = in0 + (s * (j - 1) + p) % n_in;
                mesh.triangles.push_back({op, oq, ip});
                if (p + 1 < j) {
                    const int iq = in0 + (s * (j - 1) + p + 1) % n_in;
                    mesh.triangles.push_back({oq, iq, ip});
                }
            }
        }
    }
    return mesh;
}

void CrossSection::validate(double tol_geom) const {
    if (!(area > 0.0 && I2 > 0.0 && I3 > 0.0 && J > 0.0))
        throw geometry_error("cross-section moments must be strictly positive");
    if (mesh) {
        const double diam = bbox_diameter(*mesh);
        const double tol = tol_geom * area * diam * diam;
        const Moments m = compute_moments(*mesh);
        if (std::abs(m.cx * m.area) > tol || std::abs(m.cy * m.area) > tol ||
            std::abs(m.Ixy) > tol)
            throw geometry_error("cross-section violates the centering conditions");
    }
}

CrossSection make_disc(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("make_disc: radius must be > 0");
    CrossSection s;
    s.kind = SectionKind::disc;
    s.radius = radius;
    const double r2 = radius * radius;
    s.area = std::numbers::pi * r2;
    s.I2 = std::numbers::pi * r2 * r2 / 4.0;
    s.I3 = s.I2;
    s.J = s.I2 + s.I3;  // phi_aff vanishes on a disc
    return s;
}

CrossSection make_disc_meshed(double radius, int rings) {
    CrossSection s = make_disc(radius);
    s.mesh = disc_mesh(radius, rings);
    return s;
}

CrossSection with_mesh_moments(const CrossSection& section) {
    if (!section.mesh) throw geometry_error("with_mesh_moments: section has no mesh");
    CrossSection s = section;
    const Moments m = compute_moments(*s.mesh);
    s.area = m.area;
    s.I2 = m.I2;
    s.I3 = m.I3;
    const TorsionSolution torsion = solve_torsion_function(*s.mesh);
    s.phi_aff = torsion.phi_aff;
    s.J = torsion.J;
    return s;
}

CrossSection make_polygon_section(const std::vector<Eigen::Vector2d>& vertices,
                                  double target_h) {
    if (vertices.size() < 3)
        throw std::invalid_argument("polygon needs at least three vertices");
    if (!(target_h > 0.0)) throw std::invalid_argument("target_h must be > 0");
    if (!polygon_is_simple(vertices))
        throw std::invalid_argument("polygon is self-intersecting");

    TriMesh mesh = ear_clip(vertices);

    // Recenter to the centroid, then rotate onto the principal axes so the
    // centering conditions hold.
    Moments m = compute_moments(mesh);
    for (auto& p : mesh.nodes) p -= Eigen::Vector2d(m.cx, m.cy);
    m = compute_moments(mesh);
    const double theta = 0.5 * std::atan2(2.0 * m.Ixy, m.I2 - m.I3);
    const Eigen::Rotation2Dd rot(-theta);
    for (auto& p : mesh.nodes) p = rot * p;

    while (mesh.max_edge() > target_h) mesh = refine_uniform(mesh);

    CrossSection s;
    s.kind = SectionKind::polygon;
    s.mesh = std::move(mesh);
    const Moments mm = compute_moments(*s.mesh);
    s.area = mm.area;
    s.I2 = mm.I2;
    s.I3 = mm.I3;
    const TorsionSolution torsion = solve_torsion_function(*s.mesh);
    s.phi_aff = torsion.phi_aff;
    s.J = torsion.J;
    s.validate(tol_geom_meshed);
    return s;
}

TorsionSolution solve_torsion_function(const TriMesh& mesh) {
    const int n = static_cast<int>(mesh.nodes.size());
    if (n == 0 || mesh.triangles.empty()) throw mesh_error("empty mesh");

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    std::vector<double> lumped(n, 0.0);

    for (const auto& t : mesh.triangles) {
        const auto& a = mesh.nodes[t[0]];
        const auto& b = mesh.nodes[t[1]];
        const auto& c = mesh.nodes[t[2]];
        const double a2 = tri_area2(a, b, c);
        if (a2 <= 0.0) throw mesh_error("inverted or degenerate triangle");
        const double area = 0.5 * a2;
        // Constant P1 gradients.
        Eigen::Matrix<double, 2, 3> grad;
        grad.col(0) = Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / a2;
        grad.col(1) = Eigen::Vector2d(c.y() - a.y(), a.x() - c.x()) / a2;
        grad.col(2) = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / a2;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j)
                trips.emplace_back(t[i], t[j], area * grad.col(i).dot(grad.col(j)));
            lumped[t[i]] += area / 3.0;  // int N_i, exact for P1
        }
    }
    // Neumann data g = (x3, -x2) . nu on boundary edges; g is linear along
    // each straight edge, integrated exactly.
    for (const auto& e : mesh.boundary_edges()) {
        const auto& a = mesh.nodes[e[0]];
        const auto& b = mesh.nodes[e[1]];
        const Eigen::Vector2d tang = b - a;
        const double len = tang.norm();
        const Eigen::Vector2d nu(tang.y() / len, -tang.x() / len);  // outward
        const double ga = a.y() * nu.x() - a.x() * nu.y();
        const double gb = b.y() * nu.x() - b.x() * nu.y();
        rhs[e[0]] += len * (ga / 3.0 + gb / 6.0);
        rhs[e[1]] += len * (ga / 6.0 + gb / 3.0);
    }
    // Zero-mean constraint closes the Neumann nullspace.
    for (int i = 0; i < n; ++i) {
        trips.emplace_back(i, n, lumped[i]);
        trips.emplace_back(n, i, lumped[i]);
    }

    Eigen::SparseMatrix<double> K(n + 1, n + 1);
    K.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success)
        throw mesh_error("torsion solve failed; mesh quality insufficient");
    const Eigen::VectorXd sol = lu.solve(rhs);

    TorsionSolution out;
    out.phi_aff.assign(sol.data(), sol.data() + n);

    // J = int (x3 - d2 phi)^2 + (x2 + d3 phi)^2, quadratic per triangle.
    double J = 0.0;
    for (const auto& t : mesh.triangles) {
        const auto& a = mesh.nodes[t[0]];
        const auto& b = mesh.nodes[t[1]];
        const auto& c = mesh.nodes[t[2]];
        const double a2 = tri_area2(a, b, c);
        const double area = 0.5 * a2;
        Eigen::Matrix<double, 2, 3> grad;
        grad.col(0) = Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / a2;
        grad.col(1) = Eigen::Vector2d(c.y() - a.y(), a.x() - c.x()) / a2;
        grad.col(2) = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / a2;
        Eigen::Vector2d gphi = Eigen::Vector2d::Zero();
        for (int i = 0; i < 3; ++i) gphi += sol[t[i]] * grad.col(i);
        const Eigen::Vector2d mids[3] = {0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)};
        for (const auto& p : mids) {
            const double f2 = p.y() - gphi.x();  // x3 - d2 phi
            const double f3 = p.x() + gphi.y();  // x2 + d3 phi
            J += area / 3.0 * (f2 * f2 + f3 * f3);
        }
    }
    out.J = J;
    return out;
}

ElasticityTensor ElasticityTensor::isotropic(double mu, double lambda) {
    if (!(mu > 0.0) || lambda < 0.0)
        throw std::invalid_argument("isotropic material requires mu > 0, lambda >= 0");
    ElasticityTensor t;
    t.isotropic_ = true;
    t.mu_ = mu;
    t.lambda_ = lambda;
    t.C_.setZero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) t.C_(i, j) = lambda;
        t.C_(i, i) += 2.0 * mu;
        t.C_(3 + i, 3 + i) = mu;
    }
    return t;
}

ElasticityTensor ElasticityTensor::from_voigt(const Eigen::Matrix<double, 6, 6>& C) {
    if (!C.isApprox(C.transpose(), 1e-12))
        throw std::invalid_argument("elasticity tensor must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(C);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("elasticity tensor must be positive definite");
    ElasticityTensor t;
    t.C_ = C;
    return t;
}

double ElasticityTensor::energy_density(const Eigen::Matrix3d& F) const {
    const Eigen::Matrix3d S = 0.5 * (F + F.transpose());
    if (isotropic_)
        return 2.0 * mu_ * S.squaredNorm() + lambda_ * S.trace() * S.trace();
    Eigen::Matrix<double, 6, 1> e;
    e << S(0, 0), S(1, 1), S(2, 2), 2.0 * S(1, 2), 2.0 * S(0, 2), 2.0 * S(0, 1);
    return e.dot(C_ * e);
}

double q_rod_closed_form(const CrossSection& section, double mu, double lambda,
                         const RodStrain& xi) {
    const double a = young_modulus(mu, lambda);
    return a * (section.area * xi[0] * xi[0] + section.I3 * xi[2] * xi[2] +
                section.I2 * xi[3] * xi[3]) +
           mu * section.J * xi[1] * xi[1];
}

QRodRelaxation q_rod_relaxation(const TriMesh& mesh, const ElasticityTensor& L,
                                const RodStrain& xi) {
    const int n = static_cast<int>(mesh.nodes.size());
    const int nd = 3 * n;

    auto bilinear = [&](const Eigen::Matrix3d& A, const Eigen::Matrix3d& B) {
        // Polarization of the quadratic form.
        return 0.5 * (L.energy_density(A + B) - L.energy_density(A) -
                      L.energy_density(B));
    };

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(nd + 4);
    double c0 = 0.0;
    std::vector<double> lumped(n, 0.0), wx2(n, 0.0), wx3(n, 0.0);

    for (const auto& t : mesh.triangles) {
        const auto& a = mesh.nodes[t[0]];
        const auto& b = mesh.nodes[t[1]];
        const auto& c = mesh.nodes[t[2]];
        const double a2 = tri_area2(a, b, c);
        const double area = 0.5 * a2;
        Eigen::Matrix<double, 2, 3> grad;
        grad.col(0) = Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / a2;
        grad.col(1) = Eigen::Vector2d(c.y() - a.y(), a.x() - c.x()) / a2;
        grad.col(2) = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / a2;

        // Basis matrices: dof (node i, comp c) contributes e_c otimes (0, grad N_i).
        Eigen::Matrix3d G[3][3];
        for (int i = 0; i < 3; ++i)
            for (int comp = 0; comp < 3; ++comp) {
                G[i][comp].setZero();
                G[i][comp](comp, 1) = grad(0, i);
                G[i][comp](comp, 2) = grad(1, i);
            }

        const Eigen::Vector2d mids[3] = {0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)};
        const double w = area / 3.0;

        // Stiffness block is quadrature-point independent (gradients are
        // constant); the xi-coupling is evaluated at the midpoints.
        for (int i = 0; i < 3; ++i)
            for (int ci = 0; ci < 3; ++ci)
                for (int j = 0; j < 3; ++j)
                    for (int cj = 0; cj < 3; ++cj) {
                        const double v = area * bilinear(G[i][ci], G[j][cj]);
                        if (v != 0.0)
                            trips.emplace_back(3 * t[i] + ci, 3 * t[j] + cj, v);
                    }

        for (const auto& p : mids) {
            Eigen::Matrix3d F0 = Eigen::Matrix3d::Zero();
            F0(0, 0) = xi[0] + xi[2] * p.y() - xi[3] * p.x();
            F0(1, 0) = -xi[1] * p.y();
            F0(2, 0) = xi[1] * p.x();
            c0 += w * L.energy_density(F0);
            for (int i = 0; i < 3; ++i)
                for (int ci = 0; ci < 3; ++ci)
                    f[3 * t[i] + ci] += w * bilinear(F0, G[i][ci]);
        }

        // Constraint weights: int N_i, int N_i x2, int N_i x3 (all degree <= 2).
        for (int i = 0; i < 3; ++i) {
            lumped[t[i]] += area / 3.0;
            double sx2 = 0.0, sx3 = 0.0;
            for (int q = 0; q < 3; ++q) {
                // N_i at edge midpoint q: 1/2 where the edge touches node i.
                double N = 0.0;
                if (q == i || (q + 1) % 3 == i) N = 0.5;
                sx2 += w * N * mids[q].x();
                sx3 += w * N * mids[q].y();
            }
            wx2[t[i]] += sx2;
            wx3[t[i]] += sx3;
        }
    }

    // Nullspace constraints: three zero means and one zero net rotation of
    // (phi_2, phi_3).
    for (int i = 0; i < n; ++i) {
        for (int comp = 0; comp < 3; ++comp) {
            trips.emplace_back(3 * i + comp, nd + comp, lumped[i]);
            trips.emplace_back(nd + comp, 3 * i + comp, lumped[i]);
        }
        trips.emplace_back(3 * i + 1, nd + 3, -wx3[i]);
        trips.emplace_back(nd + 3, 3 * i + 1, -wx3[i]);
        trips.emplace_back(3 * i + 2, nd + 3, wx2[i]);
        trips.emplace_back(nd + 3, 3 * i + 2, wx2[i]);
    }

    Eigen::SparseMatrix<double> K(nd + 4, nd + 4);
    K.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success)
        throw solver_error("q_rod_relaxation: singular system beyond nullspace");
    // Stationarity: 2K phi + 2f + C lambda = 0; we absorb the factor 2 into
    // the multipliers and solve K phi + C mu = -f.
    const Eigen::VectorXd sol = lu.solve(-f);

    QRodRelaxation out;
    out.value = c0 + f.head(nd).dot(sol.head(nd));
    out.warping.resize(n, 3);
    for (int i = 0; i < n; ++i)
        for (int comp = 0; comp < 3; ++comp) out.warping(i, comp) = sol[3 * i + comp];
    return out;
}

}  // namespace roduq
