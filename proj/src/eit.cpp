#include "physevo/eit.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <fstream>
#include <sstream>

#include "physevo/errors.hpp"

namespace physevo::eit {

ElectrodeLayout make_layout(const fem::Mesh& mesh, int electrode_count, double current) {
    if (electrode_count < 4 || electrode_count % 2 != 0)
        throw InvalidParams("electrode count must be even and >= 4");
    const int nb = static_cast<int>(mesh.boundary_nodes.size());
    if (nb % electrode_count != 0)
        throw InvalidParams("boundary node count must be a multiple of the electrode count");
    ElectrodeLayout layout;
    layout.count = electrode_count;
    layout.current = current;
    const int stride = nb / electrode_count;
    for (int e = 0; e < electrode_count; ++e) layout.nodes.push_back(mesh.boundary_nodes[e * stride]);
    return layout;
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "adjacent") return Strategy::Adjacent;
    if (s == "cross") return Strategy::Cross;
    if (s == "opposite") return Strategy::Opposite;
    if (s == "trigonometric") return Strategy::Trigonometric;
    throw UnsupportedStrategy("unknown measurement strategy: " + s);
}

MeasurementSchedule measurement_schedule(const ElectrodeLayout& layout, Strategy strategy) {
    if (strategy != Strategy::Adjacent)
        throw UnsupportedStrategy("only the adjacent strategy is implemented");
    MeasurementSchedule sched;
    sched.strategy = strategy;
    const int L = layout.count;
    for (int e = 0; e < L; ++e) {
        const int d1 = e, d2 = (e + 1) % L;
        for (int m = 0; m < L; ++m) {
            const int m1 = m, m2 = (m + 1) % L;
            if (m1 == d1 || m1 == d2 || m2 == d1 || m2 == d2) continue;
            sched.entries.push_back({d1, d2, m1, m2});
        }
    }
    return sched;  // L(L-3) entries by construction
}

std::vector<double> forward_voltages(const fem::Mesh& mesh, const ElectrodeLayout& layout,
                                     const MeasurementSchedule& schedule,
                                     const std::vector<double>& sigma_per_element) {
    const fem::SpdSystem sys = fem::assemble_scalar(mesh, sigma_per_element, layout.nodes.back());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.A);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("eit forward: factorization failed");

    // one solve per distinct drive pair, shared across that drive's measurements
    std::vector<Eigen::VectorXd> fields;
    std::vector<std::pair<int, int>> drives;
    auto field_for = [&](int a, int b) -> const Eigen::VectorXd& {
        for (std::size_t k = 0; k < drives.size(); ++k)
            if (drives[k] == std::make_pair(a, b)) return fields[k];
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.A.rows());
        rhs[layout.nodes[a]] = layout.current;
        rhs[layout.nodes[b]] = -layout.current;
        rhs[layout.nodes.back()] = 0.0;  // grounded gauge node
        drives.emplace_back(a, b);
        fields.push_back(llt.solve(rhs));
        return fields.back();
    };

    std::vector<double> out;
    out.reserve(schedule.count());
    for (const auto& e : schedule.entries) {
        const Eigen::VectorXd& v = field_for(e.drive_a, e.drive_b);
        out.push_back(v[layout.nodes[e.meas_a]] - v[layout.nodes[e.meas_b]]);
    }
    return out;
}

double misfit(const std::vector<double>& predicted, const std::vector<double>& measured,
              const std::vector<double>& sigma, double tikhonov_weight, double sigma_ref) {
    if (predicted.size() != measured.size()) throw DimensionMismatch("eit misfit: vector lengths");
    double s = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - measured[i];
        s += d * d;
    }
    if (tikhonov_weight > 0.0)
        for (double v : sigma) s += tikhonov_weight * (v - sigma_ref) * (v - sigma_ref);
    return s;
}

std::vector<double> phantom_sigma(const fem::Mesh& mesh, double background,
                                  const std::vector<Inclusion>& inclusions) {
    double mesh_radius = 0.0;
    for (int n : mesh.boundary_nodes)
        mesh_radius = std::max(mesh_radius, std::hypot(mesh.nodes[n][0], mesh.nodes[n][1]));
    for (const auto& inc : inclusions)
        if (std::hypot(inc.cx, inc.cy) + inc.radius > mesh_radius + 1e-9)
            throw InclusionOutsideDomain("phantom inclusion exceeds the domain");

    std::vector<double> sigma(mesh.element_count(), background);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto c = mesh.centroid(e);
        for (const auto& inc : inclusions)
            if (std::hypot(c[0] - inc.cx, c[1] - inc.cy) <= inc.radius) sigma[e] = inc.value;
    }
    return sigma;
}

int InverseGrid::cell_of(double x, double y) const {
    const double r = std::hypot(x, y);
    int ri = static_cast<int>(r / radius * radial);
    if (ri >= radial) ri = radial - 1;
    double a = std::atan2(y, x);
    if (a < 0.0) a += 2.0 * M_PI;
    int ai = static_cast<int>(a / (2.0 * M_PI) * angular);
    if (ai >= angular) ai = angular - 1;
    return ri * angular + ai;
}

EitProblem::EitProblem(fem::Mesh forward_mesh, ElectrodeLayout layout, MeasurementSchedule schedule,
                       InverseGrid inverse, std::vector<double> measured, double log_sigma_lo,
                       double log_sigma_hi, double tikhonov_weight, double sigma_ref)
    : mesh_(std::move(forward_mesh)), layout_(std::move(layout)), schedule_(std::move(schedule)),
      inverse_(inverse), measured_(std::move(measured)), lo_(log_sigma_lo), hi_(log_sigma_hi),
      tikhonov_weight_(tikhonov_weight), sigma_ref_(sigma_ref) {
    if (measured_.size() != schedule_.count()) throw DimensionMismatch("eit: measured vector length");
    element_cell_.resize(mesh_.element_count());
    for (std::size_t e = 0; e < mesh_.element_count(); ++e) {
        const auto c = mesh_.centroid(e);
        element_cell_[e] = inverse_.cell_of(c[0], c[1]);
    }
}

std::vector<double> EitProblem::sigma_field(const SolutionVector& x) const {
    std::vector<double> sigma(mesh_.element_count());
    for (std::size_t e = 0; e < mesh_.element_count(); ++e)
        sigma[e] = std::pow(10.0, x[element_cell_[e]]);
    return sigma;
}

EvalResult EitProblem::evaluate_impl(const SolutionVector& x, int) const {
    const std::vector<double> sigma = sigma_field(x);
    const std::vector<double> predicted = forward_voltages(mesh_, layout_, schedule_, sigma);
    std::vector<double> cell_sigma(dim());
    for (std::size_t c = 0; c < dim(); ++c) cell_sigma[c] = std::pow(10.0, x[c]);
    return EvalResult{misfit(predicted, measured_, cell_sigma, tikhonov_weight_, sigma_ref_), {}, {}, 0, 0};
}

void write_measurement_csv(const std::vector<double>& voltages, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "index,voltage\n";
    out.precision(17);
    for (std::size_t i = 0; i < voltages.size(); ++i) out << i << "," << voltages[i] << "\n";
}

std::vector<double> read_measurement_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::vector<double> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        out.push_back(std::stod(line.substr(comma + 1)));
    }
    return out;
}

}  // namespace physevo::eit
