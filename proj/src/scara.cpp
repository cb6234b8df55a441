#include "physevo/scara.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "physevo/errors.hpp"

namespace physevo::scara {

namespace {

double interp_table(const std::vector<double>& ts, const std::vector<double>& vs, double t) {
    if (ts.empty()) return 0.0;
    if (t <= ts.front()) return vs.front();
    if (t >= ts.back()) return vs.back();
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    const std::size_t lo = hi - 1;
    const double f = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return vs[lo] + f * (vs[hi] - vs[lo]);
}

/// Pen-load factor: torque demand grows with reach, kept smooth and positive.
double friction_load(double alpha1, double alpha2) {
    return 1.0 + 0.5 * std::pow(std::cos(0.5 * (alpha1 + alpha2)), 2);
}

double stick_slip_torque(const FrictionParams& fr, double dalpha, double load) {
    const double s = std::tanh(dalpha / fr.v_eps);
    return -(fr.c_static * s - fr.c_drop * s * s * s) * load;
}

void axis_rhs(const AxisParams& ax, double v, double i, double dalpha, double extra_torque, double& di,
              double& ddalpha) {
    di = (v - ax.resistance * i) / (ax.resistance * ax.time_constant);
    ddalpha = (ax.motor_constant * i - ax.damping * dalpha + extra_torque) / ax.inertia;
}

std::vector<double> uniform_times(double t0, double tf, int n) {
    std::vector<double> ts(n);
    for (int i = 0; i < n; ++i) ts[i] = t0 + (tf - t0) * (i + 1) / n;
    return ts;
}

}  // namespace

double PhysParams::v_ref(int axis, double t) const {
    return interp_table(voltage_times, axis == 0 ? voltage_axis1 : voltage_axis2, t);
}

PhysParams default_phys_params(double tf) {
    PhysParams p;
    const int n = 101;
    p.voltage_times.resize(n);
    p.voltage_axis1.resize(n);
    p.voltage_axis2.resize(n);
    for (int i = 0; i < n; ++i) {
        const double t = tf * i / (n - 1);
        p.voltage_times[i] = t;
        p.voltage_axis1[i] = 6.0 * std::sin(2.0 * M_PI * 0.5 * t);
        p.voltage_axis2[i] = 4.0 * std::sin(2.0 * M_PI * 0.8 * t + 1.0);
    }
    return p;
}

void physical_rhs(const PhysParams& phys, double t, const std::vector<double>& x, std::vector<double>& dx) {
    dx.resize(kStateDim);
    double di, dda;
    axis_rhs(phys.axis1, phys.v_ref(0, t), x[0], x[2], 0.0, di, dda);
    dx[0] = di;
    dx[1] = x[2];
    dx[2] = dda;
    axis_rhs(phys.axis2, phys.v_ref(1, t), x[3], x[5], 0.0, di, dda);
    dx[3] = di;
    dx[4] = x[5];
    dx[5] = dda;
}

void ann_forward(const AnnParams& ann, const std::vector<double>& state,
                 const std::vector<double>& phys_derivative, std::vector<double>& out) {
    const int H = ann.hidden;
    if (ann.theta.size() != AnnParams::parameter_count(H))
        throw DimensionMismatch("ann_forward: parameter vector length");
    if (state.size() != kStateDim || phys_derivative.size() != kStateDim)
        throw DimensionMismatch("ann_forward: state dimension");
    const double* W1 = ann.theta.data();           // H x 12
    const double* b1 = W1 + 12 * H;                // H
    const double* W2 = b1 + H;                     // 6 x H
    const double* b2 = W2 + 6 * H;                 // 6
    double hidden[64];
    for (int h = 0; h < H; ++h) {
        double a = b1[h];
        for (int j = 0; j < 6; ++j) a += W1[h * 12 + j] * state[j];
        for (int j = 0; j < 6; ++j) a += W1[h * 12 + 6 + j] * phys_derivative[j];
        hidden[h] = std::tanh(a);
    }
    out.resize(kStateDim);
    for (int o = 0; o < 6; ++o) {
        double a = b2[o];
        for (int h = 0; h < H; ++h) a += W2[o * H + h] * hidden[h];
        out[o] = phys_derivative[o] + a;
    }
}

Trajectory simulate_physical(const PhysParams& phys, const std::vector<double>& x0, double t0, double tf,
                             const std::vector<double>& sample_times, int steps_per_interval) {
    const int steps = steps_per_interval * static_cast<int>(sample_times.size());
    return integrate_fixed_rk4(
        [&phys](double t, const std::vector<double>& x, std::vector<double>& dx) { physical_rhs(phys, t, x, dx); },
        x0, t0, tf, steps, sample_times);
}

Trajectory simulate_hybrid(const std::vector<double>& x0, const PhysParams& phys, const AnnParams& ann,
                           double t0, double tf, const std::vector<double>& sample_times,
                           int steps_per_interval) {
    const int steps = steps_per_interval * static_cast<int>(sample_times.size());
    std::vector<double> phys_dx(kStateDim);
    return integrate_fixed_rk4(
        [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
            physical_rhs(phys, t, x, phys_dx);
            ann_forward(ann, x, phys_dx, dx);
        },
        x0, t0, tf, steps, sample_times);
}

double trajectory_loss(const Trajectory& traj, const MeasuredData& data) {
    if (traj.times.size() != data.times.size()) throw SampleMismatch("trajectory_loss: sample count");
    const std::size_t n = data.times.size();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(traj.times[i] - data.times[i]) > 1e-12)
            throw SampleMismatch("trajectory_loss: sample times differ");
        for (std::size_t j = 0; j < kMeasuredIdx.size(); ++j) {
            const double d = traj.states[i][kMeasuredIdx[j]] - data.angles[i][j];
            loss += d * d;
        }
    }
    return loss / static_cast<double>(n);
}

MeasuredData synthesize_measurements(const PhysParams& phys, const FrictionParams& friction,
                                     const std::vector<double>& x0, const std::vector<double>& times,
                                     double noise_sd, RngStream& rng, int steps_per_interval) {
    const double t0 = 0.0;
    const double tf = times.back();
    const int steps = steps_per_interval * static_cast<int>(times.size());
    auto rhs = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
        physical_rhs(phys, t, x, dx);
        const double load = friction_load(x[1], x[4]);
        dx[2] += stick_slip_torque(friction, x[2], load) / phys.axis1.inertia;
        dx[5] += stick_slip_torque(friction, x[5], load) / phys.axis2.inertia;
    };
    const Trajectory traj = integrate_fixed_rk4(rhs, x0, t0, tf, steps, times);
    MeasuredData data;
    data.times = times;
    data.angles.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        data.angles[i][0] = traj.states[i][kMeasuredIdx[0]] + noise_sd * rng.normal();
        data.angles[i][1] = traj.states[i][kMeasuredIdx[1]] + noise_sd * rng.normal();
    }
    return data;
}

ScaraProblem::ScaraProblem(PhysParams phys, MeasuredData data, int hidden, int steps_per_interval)
    : phys_(std::move(phys)), data_(std::move(data)), hidden_(hidden),
      steps_per_interval_(steps_per_interval), x0_(kStateDim, 0.0) {
    if (hidden_ < 1 || hidden_ > 64) throw InvalidParams("scara: hidden width out of range");
}

EvalResult ScaraProblem::evaluate_impl(const SolutionVector& x, int) const {
    AnnParams ann{hidden_, x};
    double loss;
    try {
        const Trajectory traj =
            simulate_hybrid(x0_, phys_, ann, 0.0, data_.times.back(), data_.times, steps_per_interval_);
        loss = trajectory_loss(traj, data_);
        if (!std::isfinite(loss)) loss = kPenaltyCap;
    } catch (const NonFiniteState&) {
        loss = kPenaltyCap;
    }
    return EvalResult{loss, {}, {}, 0, 0};
}

double ScaraProblem::baseline_loss() const {
    return evaluate(SolutionVector(dim(), 0.0)).objective;
}

ScaraProblem default_problem(int hidden) {
    const double tf = 2.0;
    PhysParams phys = default_phys_params(tf);
    FrictionParams friction{0.3, 0.1, 0.05};
    std::vector<double> times = uniform_times(0.0, tf, 50);
    RngStream rng(0, 0);
    MeasuredData data = synthesize_measurements(phys, friction, std::vector<double>(kStateDim, 0.0), times,
                                                0.0, rng);
    return ScaraProblem(std::move(phys), std::move(data), hidden);
}

void write_csv(const MeasuredData& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "time,alpha1,alpha2\n";
    out.precision(17);
    for (std::size_t i = 0; i < data.times.size(); ++i)
        out << data.times[i] << "," << data.angles[i][0] << "," << data.angles[i][1] << "\n";
}

MeasuredData read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    MeasuredData data;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::array<double, 3> v{};
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(ss, tok, ',')) throw Error("malformed measurement row: " + line);
            v[k] = std::stod(tok);
        }
        data.times.push_back(v[0]);
        data.angles.push_back({v[1], v[2]});
    }
    return data;
}

}  // namespace physevo::scara
