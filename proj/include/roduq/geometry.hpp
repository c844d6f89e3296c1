#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "roduq/common.hpp"

namespace roduq {

// 2D triangulation of the cross-section. Coordinates are (x2, x3).
struct TriMesh {
    std::vector<Eigen::Vector2d> nodes;
    std::vector<std::array<int, 3>> triangles;  // counter-clockwise

    double area() const;
    double max_edge() const;
    // Boundary edges (a,b) with the domain on the left, i.e. outer normal
    // pointing right of a->b.
    std::vector<std::array<int, 2>> boundary_edges() const;
};

// Uniform 4-split refinement; conforming since every triangle splits.
TriMesh refine_uniform(const TriMesh& mesh);

// Structured disc triangulation: rings of 6j nodes, 6*rings^2 triangles.
TriMesh disc_mesh(double radius, int rings);

enum class SectionKind { disc, polygon };

// Geometric and elastic cross-section data. Moments use the axes
// convention I2 = int x2^2, I3 = int x3^2; J is the torsion constant.
struct CrossSection {
    SectionKind kind = SectionKind::disc;
    double radius = 0.0;  // disc only
    double area = 0.0;
    double I2 = 0.0;
    double I3 = 0.0;
    double J = 0.0;
    std::optional<TriMesh> mesh;
    std::optional<std::vector<double>> phi_aff;  // nodal torsion function

    void validate(double tol_geom) const;
};

// Analytic disc: area = pi R^2, I2 = I3 = pi R^4 / 4, J = I2 + I3.
// The torsion function vanishes, so no mesh is required.
CrossSection make_disc(double radius);

// Attaches a structured triangulation to a disc section (for the relaxation
// solver and the 3D model); analytic moments are kept.
CrossSection make_disc_meshed(double radius, int rings);

// Triangulates a simple polygon, recenters to the centroid, rotates to
// principal axes, computes moments exactly per triangle, and solves for the
// torsion function. target_h bounds the maximal edge length.
CrossSection make_polygon_section(const std::vector<Eigen::Vector2d>& vertices,
                                  double target_h);

// Replaces area/I2/I3/J of a section by values integrated over its mesh.
// Used when a 1D/3D comparison must share the discrete geometry.
CrossSection with_mesh_moments(const CrossSection& section);

// P1 solve of -Laplace(phi) = 0 with Neumann data (x3,-x2).nu, nullspace
// fixed by a zero-mean constraint. Returns the nodal field and J.
struct TorsionSolution {
    std::vector<double> phi_aff;
    double J = 0.0;
};

TorsionSolution solve_torsion_function(const TriMesh& mesh);

// Strain of the rod model: (stretch, twist rate, two bending curvatures).
using RodStrain = Eigen::Vector4d;

// Isotropic elasticity tensor in Voigt form plus a general-tensor escape
// hatch. Q(F) = 2 mu |sym F|^2 + lambda (tr F)^2 in the isotropic case.
class ElasticityTensor {
public:
    static ElasticityTensor isotropic(double mu, double lambda);
    // Voigt 6x6 (order 11,22,33,23,13,12 with engineering shear strains),
    // must be symmetric positive definite.
    static ElasticityTensor from_voigt(const Eigen::Matrix<double, 6, 6>& C);

    double energy_density(const Eigen::Matrix3d& F) const;  // Q(sym F)
    bool is_isotropic() const { return isotropic_; }
    double mu() const { return mu_; }
    double lambda() const { return lambda_; }
    const Eigen::Matrix<double, 6, 6>& voigt() const { return C_; }

private:
    ElasticityTensor() = default;
    Eigen::Matrix<double, 6, 6> C_ = Eigen::Matrix<double, 6, 6>::Zero();
    bool isotropic_ = false;
    double mu_ = 0.0, lambda_ = 0.0;
};

// Closed-form rod quadratic form for isotropic material (Prop.-style
// formula): a (|S| xi1^2 + I3 xi3^2 + I2 xi4^2) + mu J xi2^2.
double q_rod_closed_form(const CrossSection& section, double mu, double lambda,
                         const RodStrain& xi);

// Relaxation over P1 warping fields on the section mesh. The 4-dimensional
// nullspace (3 constants + in-plane rotation) is removed by Lagrange
// multipliers.
struct QRodRelaxation {
    double value = 0.0;
    Eigen::MatrixXd warping;  // nodes x 3, the minimizing field
};

QRodRelaxation q_rod_relaxation(const TriMesh& mesh, const ElasticityTensor& L,
                                const RodStrain& xi);

// Default geometric tolerance for the centering invariant.
inline constexpr double tol_geom_analytic = 1e-10;
inline constexpr double tol_geom_meshed = 1e-6;

}  // namespace roduq
