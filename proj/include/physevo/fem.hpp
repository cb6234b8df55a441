#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <string>
#include <vector>

#include "physevo/types.hpp"

namespace physevo::fem {

/// Conforming linear-triangle mesh in 2D. Triangles are positively oriented;
/// boundary_nodes walk the outer boundary counterclockwise.
struct Mesh {
    std::vector<std::array<double, 2>> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> boundary_nodes;
    std::vector<double> element_area;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t element_count() const { return triangles.size(); }

    std::array<double, 2> centroid(std::size_t e) const {
        const auto& t = triangles[e];
        return {(nodes[t[0]][0] + nodes[t[1]][0] + nodes[t[2]][0]) / 3.0,
                (nodes[t[0]][1] + nodes[t[1]][1] + nodes[t[2]][1]) / 3.0};
    }

    /// Plain-text node/element dump for debugging.
    void dump(const std::string& path) const;
};

Mesh build_rectangle_mesh(int nx, int ny, double w, double h);
Mesh build_disk_mesh(int rings, int sectors, double radius);

struct DirichletBc {
    int node;
    int component;  // 0 or 1 (ignored for scalar systems)
    double value;
};

struct NeumannEdge {
    int n1;
    int n2;
    double tx;  // traction (N/m), constant along the edge
    double ty;
};

struct ElasticBc {
    std::vector<DirichletBc> dirichlet;
    std::vector<NeumannEdge> neumann;
};

/// Assembled SPD linear system (after boundary conditions / grounding).
struct SpdSystem {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
};

/// Scalar conduction stiffness for div(sigma grad V) = 0. The raw operator is
/// singular (pure Neumann); grounding ground_node pins the gauge. Pass
/// ground_node < 0 to get the ungrounded singular operator with b = 0.
SpdSystem assemble_scalar(const Mesh& mesh, const std::vector<double>& sigma_per_element, int ground_node);

/// Plane-stress constant-strain-triangle assembly. C_per_element are 3x3
/// Voigt stiffness matrices (may include a thickness factor); Neumann
/// tractions are lumped to edge nodes, Dirichlet handled by row/column
/// elimination. Dofs are interleaved (2*node + component).
SpdSystem assemble_elastic(const Mesh& mesh, const std::vector<Eigen::Matrix3d>& C_per_element,
                           const ElasticBc& bc);

/// Sparse Cholesky solve with residual check ||Ax-b||/||b|| <= 1e-10.
Eigen::VectorXd solve_spd(const SpdSystem& sys);

/// Per-element derived fields of an elastic solution.
struct FemSolution {
    Eigen::VectorXd primary_field;                    // nodal u (interleaved) or V
    std::vector<std::array<double, 3>> element_strain;  // Voigt (exx, eyy, gxy)
    std::vector<std::array<double, 3>> element_stress;  // Voigt (sxx, syy, sxy)
    double compliance = 0.0;                            // sum_e area_e * (sigma_e : eps_e)
};

FemSolution element_fields(const Mesh& mesh, const Eigen::VectorXd& u,
                           const std::vector<Eigen::Matrix3d>& C_per_element);

/// Frobenius norm of the deviatoric stress, plane stress (sigma_33 = 0),
/// deviator taken on the 3D tensor.
double deviatoric_norm(const std::array<double, 3>& stress_voigt);

/// Voigt strain at an element from the nodal displacement vector.
std::array<double, 3> element_strain_voigt(const Mesh& mesh, std::size_t e, const Eigen::VectorXd& u);

/// Isotropic plane-stress stiffness from Young's modulus and Poisson ratio.
Eigen::Matrix3d isotropic_plane_stress(double E, double nu);

/// Isotropic plane-stress stiffness from Lamé parameters.
Eigen::Matrix3d isotropic_plane_stress_lame(double lambda, double mu);

/// Orthotropic plane-stress stiffness from engineering constants.
Eigen::Matrix3d orthotropic_plane_stress(double E1, double E2, double nu12, double G12);

/// Rotate a Voigt plane-stress stiffness by angle theta (standard 4th-order
/// tensor transformation expressed in Voigt form).
Eigen::Matrix3d rotate_voigt_stiffness(const Eigen::Matrix3d& C, double theta);

/// Element adjacency: pairs of elements sharing an edge, with the edge length.
struct ElementEdge {
    int a;
    int b;
    double length;
};
std::vector<ElementEdge> interior_edges(const Mesh& mesh);

}  // namespace physevo::fem
