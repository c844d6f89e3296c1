#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "roduq/rod1d.hpp"

namespace roduq {

// Extruded wedge mesh of the reference domain O = (0,L) x S. The section
// triangulation is identical in every layer.
struct PrismMesh {
    TriMesh section;
    int n_layers = 0;
    double L = 1.0;

    int n_section_nodes() const { return static_cast<int>(section.nodes.size()); }
    int n_nodes() const { return n_section_nodes() * (n_layers + 1); }
    int node_index(int layer, int section_node) const {
        return layer * n_section_nodes() + section_node;
    }
    double layer_x1(int layer) const { return L * layer / n_layers; }
    double volume() const { return section.area() * L; }
};

PrismMesh build_prism_mesh(const TriMesh& section, int n_layers, double L);

struct Displacement3D {
    std::vector<Eigen::Vector3d> u;  // nodal, on the PrismMesh
};

// Assembled system for the transformed energy
//   (1/L) int_O Q(sym(grad_h u (Id + (h/L) B)))
// with grad_h = (d1, d2/h, d3/h) and B the axial perturbation matrix built
// from (phi1, phi2). Material and perturbation are piecewise constant per
// axial layer (the sample lives on the layer midpoints). Dirichlet faces
// x1 in {0,L} are eliminated with the affine lift built from the sample's
// spatial mean of Phi.
struct Rod3DSystem {
    Eigen::SparseMatrix<double> K;      // free dofs, lower triangle stored
    Eigen::VectorXd rhs;
    std::vector<int> dof_of_node;       // -1 for Dirichlet nodes
    std::vector<Eigen::Vector3d> lift;  // nodal values on the Dirichlet faces
    int n_free = 0;
};

Rod3DSystem assemble_3d(const PrismMesh& mesh, const FieldSample& sample,
                        const RodBC& bc, double h);

// Local 18x18 wedge matrix (bottom nodes then top nodes, 3 components
// each); exposed for the slab cache-consistency checks.
Eigen::Matrix<double, 18, 18> wedge_element_matrix(
    const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
    const Eigen::Vector2d& p2, double dx1, double h, double L, double mu,
    double lambda, double phi1, double phi2);

struct Solve3DResult {
    Displacement3D displacement;
    int iterations = 0;
    double residual = 0.0;
};

// Jacobi-preconditioned CG with deterministic iteration order.
Solve3DResult solve_3d(const Rod3DSystem& system, const PrismMesh& mesh,
                       double tol = 1e-8, int max_iters = 20000);

// Transformed energy of a displacement (same quadrature as assembly).
double energy_3d(const PrismMesh& mesh, const FieldSample& sample,
                 const RodBC& bc, double h, const Displacement3D& u);

struct Rod3DResult {
    EnergyReport report;   // term decomposition is not available in 3D;
                           // only value/iters/residual are populated
    Displacement3D displacement;
};

Rod3DResult effective_modulus_3d(const PrismMesh& mesh, const FieldSample& sample,
                                 const RodBC& bc, double h, double tol = 1e-8,
                                 int max_iters = 20000);

// Discrete recovery-type ansatz built from a 1D solution; admissible for
// the 3D system, so its energy is an upper bound for the 3D minimum.
Displacement3D recovery_ansatz(const PrismMesh& mesh, const RodState1D& state,
                               const FieldSample& sample, const RodBC& bc,
                               double h);

}  // namespace roduq
