#include "physevo/fem.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <fstream>
#include <map>

#include "physevo/errors.hpp"

namespace physevo::fem {

namespace {

double signed_area(const Mesh& m, const std::array<int, 3>& t) {
    const auto& a = m.nodes[t[0]];
    const auto& b = m.nodes[t[1]];
    const auto& c = m.nodes[t[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

void finalize_mesh(Mesh& m) {
    m.element_area.resize(m.triangles.size());
    for (std::size_t e = 0; e < m.triangles.size(); ++e) {
        auto& t = m.triangles[e];
        double a = signed_area(m, t);
        if (a < 0.0) {
            std::swap(t[1], t[2]);
            a = -a;
        }
        if (a <= 0.0) throw DegenerateGeometry("zero-area triangle");
        m.element_area[e] = a;
    }
}

/// Shape-function gradient matrix B (3x6) and area for a CST element.
void element_B(const Mesh& m, std::size_t e, Eigen::Matrix<double, 3, 6>& B, double& area) {
    const auto& t = m.triangles[e];
    const double x1 = m.nodes[t[0]][0], y1 = m.nodes[t[0]][1];
    const double x2 = m.nodes[t[1]][0], y2 = m.nodes[t[1]][1];
    const double x3 = m.nodes[t[2]][0], y3 = m.nodes[t[2]][1];
    area = m.element_area[e];
    const double f = 1.0 / (2.0 * area);
    const double b1 = (y2 - y3) * f, b2 = (y3 - y1) * f, b3 = (y1 - y2) * f;
    const double c1 = (x3 - x2) * f, c2 = (x1 - x3) * f, c3 = (x2 - x1) * f;
    B.setZero();
    B(0, 0) = b1; B(0, 2) = b2; B(0, 4) = b3;
    B(1, 1) = c1; B(1, 3) = c2; B(1, 5) = c3;
    B(2, 0) = c1; B(2, 1) = b1;
    B(2, 2) = c2; B(2, 3) = b2;
    B(2, 4) = c3; B(2, 5) = b3;
}

void apply_dirichlet(Eigen::SparseMatrix<double>& A, Eigen::VectorXd& b, const std::vector<int>& dofs,
                     const std::vector<double>& values) {
    // move known values to the rhs, then write identity rows/columns
    for (std::size_t k = 0; k < dofs.size(); ++k) {
        const int d = dofs[k];
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, d); it; ++it)
            b[it.row()] -= it.value() * values[k];
    }
    std::vector<char> fixed(A.rows(), 0);
    for (int d : dofs) fixed[d] = 1;
    for (int col = 0; col < A.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it)
            if (fixed[it.row()] || fixed[col]) it.valueRef() = (it.row() == col) ? 1.0 : 0.0;
    A.prune(0.0);
    for (std::size_t k = 0; k < dofs.size(); ++k) b[dofs[k]] = values[k];
}

}  // namespace

void Mesh::dump(const std::string& path) const {
    std::ofstream out(path);
    out << "# nodes " << nodes.size() << "\n";
    for (const auto& n : nodes) out << n[0] << " " << n[1] << "\n";
    out << "# triangles " << triangles.size() << "\n";
    for (const auto& t : triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "# boundary " << boundary_nodes.size() << "\n";
    for (int n : boundary_nodes) out << n << "\n";
}

Mesh build_rectangle_mesh(int nx, int ny, double w, double h) {
    if (nx < 1 || ny < 1 || w <= 0.0 || h <= 0.0) throw DegenerateGeometry("rectangle mesh parameters");
    Mesh m;
    const auto node_id = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.nodes.push_back({w * i / nx, h * j / ny});
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int a = node_id(i, j), b = node_id(i + 1, j), c = node_id(i + 1, j + 1), d = node_id(i, j + 1);
            m.triangles.push_back({a, b, c});
            m.triangles.push_back({a, c, d});
        }
    for (int i = 0; i <= nx; ++i) m.boundary_nodes.push_back(node_id(i, 0));
    for (int j = 1; j <= ny; ++j) m.boundary_nodes.push_back(node_id(nx, j));
    for (int i = nx - 1; i >= 0; --i) m.boundary_nodes.push_back(node_id(i, ny));
    for (int j = ny - 1; j >= 1; --j) m.boundary_nodes.push_back(node_id(0, j));
    finalize_mesh(m);
    return m;
}

Mesh build_disk_mesh(int rings, int sectors, double radius) {
    if (rings < 1 || sectors < 3 || radius <= 0.0) throw DegenerateGeometry("disk mesh parameters");
    Mesh m;
    m.nodes.push_back({0.0, 0.0});
    const auto node_id = [&](int ring, int s) {  // ring >= 1
        return 1 + (ring - 1) * sectors + (s % sectors);
    };
    for (int r = 1; r <= rings; ++r) {
        const double rr = radius * r / rings;
        for (int s = 0; s < sectors; ++s) {
            const double a = 2.0 * M_PI * s / sectors;
            m.nodes.push_back({rr * std::cos(a), rr * std::sin(a)});
        }
    }
    for (int s = 0; s < sectors; ++s)
        m.triangles.push_back({0, node_id(1, s), node_id(1, s + 1)});
    for (int r = 1; r < rings; ++r)
        for (int s = 0; s < sectors; ++s) {
            const int a = node_id(r, s), b = node_id(r, s + 1);
            const int c = node_id(r + 1, s), d = node_id(r + 1, s + 1);
            m.triangles.push_back({a, c, d});
            m.triangles.push_back({a, d, b});
        }
    for (int s = 0; s < sectors; ++s) m.boundary_nodes.push_back(node_id(rings, s));
    finalize_mesh(m);
    return m;
}

SpdSystem assemble_scalar(const Mesh& mesh, const std::vector<double>& sigma_per_element, int ground_node) {
    if (sigma_per_element.size() != mesh.element_count())
        throw DimensionMismatch("assemble_scalar: sigma size");
    for (double s : sigma_per_element)
        if (!(s > 0.0)) throw NonPositiveConductivity("assemble_scalar: sigma must be positive");

    const int n = static_cast<int>(mesh.node_count());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.element_count() * 9);
    Eigen::Matrix<double, 3, 6> B;
    double area;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        element_B(mesh, e, B, area);
        // scalar gradients are the (b_i, c_i) rows of B
        const auto& t = mesh.triangles[e];
        const double g[3][2] = {{B(0, 0), B(1, 1)}, {B(0, 2), B(1, 3)}, {B(0, 4), B(1, 5)}};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double k = sigma_per_element[e] * area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                trip.emplace_back(t[i], t[j], k);
            }
    }
    SpdSystem sys;
    sys.A.resize(n, n);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.b = Eigen::VectorXd::Zero(n);
    if (ground_node >= 0) apply_dirichlet(sys.A, sys.b, {ground_node}, {0.0});
    return sys;
}

SpdSystem assemble_elastic(const Mesh& mesh, const std::vector<Eigen::Matrix3d>& C_per_element,
                           const ElasticBc& bc) {
    if (C_per_element.size() != mesh.element_count())
        throw DimensionMismatch("assemble_elastic: stiffness list size");
    const int ndof = 2 * static_cast<int>(mesh.node_count());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.element_count() * 36);
    Eigen::Matrix<double, 3, 6> B;
    double area;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        element_B(mesh, e, B, area);
        const Eigen::Matrix<double, 6, 6> Ke = area * B.transpose() * C_per_element[e] * B;
        const auto& t = mesh.triangles[e];
        const int dof[6] = {2 * t[0], 2 * t[0] + 1, 2 * t[1], 2 * t[1] + 1, 2 * t[2], 2 * t[2] + 1};
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) trip.emplace_back(dof[i], dof[j], Ke(i, j));
    }
    SpdSystem sys;
    sys.A.resize(ndof, ndof);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.b = Eigen::VectorXd::Zero(ndof);

    for (const auto& ne : bc.neumann) {
        const double dx = mesh.nodes[ne.n2][0] - mesh.nodes[ne.n1][0];
        const double dy = mesh.nodes[ne.n2][1] - mesh.nodes[ne.n1][1];
        const double len = std::sqrt(dx * dx + dy * dy);
        sys.b[2 * ne.n1] += 0.5 * len * ne.tx;
        sys.b[2 * ne.n1 + 1] += 0.5 * len * ne.ty;
        sys.b[2 * ne.n2] += 0.5 * len * ne.tx;
        sys.b[2 * ne.n2 + 1] += 0.5 * len * ne.ty;
    }

    if (bc.dirichlet.empty()) throw SingularAfterBc("assemble_elastic: no Dirichlet data");
    std::vector<int> dofs;
    std::vector<double> values;
    for (const auto& d : bc.dirichlet) {
        dofs.push_back(2 * d.node + d.component);
        values.push_back(d.value);
    }
    apply_dirichlet(sys.A, sys.b, dofs, values);
    return sys;
}

Eigen::VectorXd solve_spd(const SpdSystem& sys) {
    // Symmetric Jacobi scaling keeps high-contrast coefficient fields (void
    // floors vs stiff patches) well within the direct solver's reach.
    const Eigen::Index n = sys.A.rows();
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double diag = sys.A.coeff(i, i);
        if (!(diag > 0.0)) throw NotPositiveDefinite("solve_spd: non-positive diagonal");
        d[i] = 1.0 / std::sqrt(diag);
    }
    const Eigen::SparseMatrix<double> As = d.asDiagonal() * sys.A * d.asDiagonal();

    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(As);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("solve_spd: factorization failed");
    auto scaled_solve = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
        return d.asDiagonal() * llt.solve(Eigen::VectorXd(d.asDiagonal() * rhs));
    };
    Eigen::VectorXd x = scaled_solve(sys.b);
    const double bn = sys.b.norm();
    if (bn > 0.0) {
        double res = (sys.A * x - sys.b).norm() / bn;
        // Iterative refinement; high-contrast coefficient fields need a few
        // sweeps to reach the fixed tolerance.
        for (int sweep = 0; sweep < 30 && res > 1e-10; ++sweep) {
            x += scaled_solve(sys.b - sys.A * x);
            res = (sys.A * x - sys.b).norm() / bn;
        }
        if (res > 1e-10) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3e", res);
            throw NoConvergence(std::string("solve_spd: residual ") + buf);
        }
    }
    return x;
}

std::array<double, 3> element_strain_voigt(const Mesh& mesh, std::size_t e, const Eigen::VectorXd& u) {
    Eigen::Matrix<double, 3, 6> B;
    double area;
    element_B(mesh, e, B, area);
    const auto& t = mesh.triangles[e];
    Eigen::Matrix<double, 6, 1> ue;
    for (int i = 0; i < 3; ++i) {
        ue[2 * i] = u[2 * t[i]];
        ue[2 * i + 1] = u[2 * t[i] + 1];
    }
    const Eigen::Vector3d eps = B * ue;
    return {eps[0], eps[1], eps[2]};
}

FemSolution element_fields(const Mesh& mesh, const Eigen::VectorXd& u,
                           const std::vector<Eigen::Matrix3d>& C_per_element) {
    FemSolution sol;
    sol.primary_field = u;
    sol.element_strain.resize(mesh.element_count());
    sol.element_stress.resize(mesh.element_count());
    double compliance = 0.0;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto eps = element_strain_voigt(mesh, e, u);
        const Eigen::Vector3d ev(eps[0], eps[1], eps[2]);
        const Eigen::Vector3d sv = C_per_element[e] * ev;
        sol.element_strain[e] = eps;
        sol.element_stress[e] = {sv[0], sv[1], sv[2]};
        // sigma:eps with Voigt engineering shear equals the tensor contraction
        compliance += mesh.element_area[e] * sv.dot(ev);
    }
    sol.compliance = compliance;
    return sol;
}

double deviatoric_norm(const std::array<double, 3>& s) {
    const double tr = s[0] + s[1];  // sigma_33 = 0 in plane stress
    const double m = tr / 3.0;
    const double d11 = s[0] - m, d22 = s[1] - m, d33 = -m;
    return std::sqrt(d11 * d11 + d22 * d22 + d33 * d33 + 2.0 * s[2] * s[2]);
}

Eigen::Matrix3d isotropic_plane_stress(double E, double nu) {
    Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
    const double f = E / (1.0 - nu * nu);
    C(0, 0) = C(1, 1) = f;
    C(0, 1) = C(1, 0) = f * nu;
    C(2, 2) = E / (2.0 * (1.0 + nu));
    return C;
}

Eigen::Matrix3d isotropic_plane_stress_lame(double lambda, double mu) {
    // plane-stress reduction: lambda* = 2 lambda mu / (lambda + 2 mu)
    const double ls = 2.0 * lambda * mu / (lambda + 2.0 * mu);
    Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
    C(0, 0) = C(1, 1) = ls + 2.0 * mu;
    C(0, 1) = C(1, 0) = ls;
    C(2, 2) = mu;
    return C;
}

Eigen::Matrix3d orthotropic_plane_stress(double E1, double E2, double nu12, double G12) {
    const double nu21 = nu12 * E2 / E1;
    const double d = 1.0 - nu12 * nu21;
    Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
    C(0, 0) = E1 / d;
    C(1, 1) = E2 / d;
    C(0, 1) = C(1, 0) = nu12 * E2 / d;
    C(2, 2) = G12;
    return C;
}

Eigen::Matrix3d rotate_voigt_stiffness(const Eigen::Matrix3d& C, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    // stress transformation matrix; with engineering shear the strain
    // transformation for -theta is its transpose, so C_global = T C T^T
    Eigen::Matrix3d T;
    T << c * c, s * s, -2.0 * c * s,
         s * s, c * c, 2.0 * c * s,
         c * s, -c * s, c * c - s * s;
    return T * C * T.transpose();
}

std::vector<ElementEdge> interior_edges(const Mesh& mesh) {
    std::map<std::pair<int, int>, int> first_owner;
    std::vector<ElementEdge> out;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto& t = mesh.triangles[e];
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            auto key = std::make_pair(a, b);
            auto it = first_owner.find(key);
            if (it == first_owner.end()) {
                first_owner.emplace(key, static_cast<int>(e));
            } else {
                const double dx = mesh.nodes[b][0] - mesh.nodes[a][0];
                const double dy = mesh.nodes[b][1] - mesh.nodes[a][1];
                out.push_back({it->second, static_cast<int>(e), std::sqrt(dx * dx + dy * dy)});
            }
        }
    }
    return out;
}

}  // namespace physevo::fem
