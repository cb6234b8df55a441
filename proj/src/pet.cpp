#include "physevo/pet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "physevo/errors.hpp"

namespace physevo::pet {

namespace {

/// E1(h) = int_0^h exp(-lambda tau) dtau, E2(h) = int_0^h tau exp(-lambda tau) dtau.
void exp_moments(double lambda, double h, double& E1, double& E2) {
    const double lh = lambda * h;
    if (lh < 1e-5) {
        E1 = h * (1.0 - lh / 2.0 + lh * lh / 6.0);
        E2 = h * h * (0.5 - lh / 3.0 + lh * lh / 8.0);
    } else {
        const double em = std::exp(-lh);
        E1 = (1.0 - em) / lambda;
        E2 = (1.0 - em * (1.0 + lh)) / (lambda * lambda);
    }
}

/// Exact integrals of a piecewise-linear input against the model kernel on a
/// merged grid of input samples and frame boundaries.
struct TacIntegrator {
    std::vector<double> t;      // merged grid
    std::vector<double> a;      // A at grid points
    std::vector<double> cumA;   // int_{t0}^{t_k} A
    std::vector<double> I0;     // int_{t0}^{t_k} exp(-lambda (t_k - s)) A(s) ds
    double lambda;

    TacIntegrator(const InputFunction& A, const FrameSchedule& sched, double lam) : lambda(lam) {
        std::vector<double> pts = A.times;
        for (const auto& f : sched.frames) {
            pts.push_back(f.first);
            pts.push_back(f.second);
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end(),
                              [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                  pts.end());
        const double lo = A.times.front(), hi = A.times.back();
        for (const auto& f : sched.frames)
            if (f.first < lo - 1e-12 || f.second > hi + 1e-12)
                throw InvalidParams("frame schedule outside input-function support");
        t.clear();
        for (double p : pts)
            if (p >= lo - 1e-12 && p <= hi + 1e-12) t.push_back(p);

        const std::size_t n = t.size();
        a.resize(n);
        for (std::size_t k = 0; k < n; ++k) a[k] = A.at(t[k]);
        cumA.assign(n, 0.0);
        I0.assign(n, 0.0);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double h = t[k + 1] - t[k];
            const double a0 = a[k];
            const double slope = (a[k + 1] - a[k]) / h;
            cumA[k + 1] = cumA[k] + h * (a0 + 0.5 * slope * h);
            if (lambda > 0.0) {
                double E1, E2;
                exp_moments(lambda, h, E1, E2);
                // A(s) = a0 + slope (s - t_k); kernel integral in tau = t_{k+1} - s
                I0[k + 1] = std::exp(-lambda * h) * I0[k] + (a0 + slope * h) * E1 - slope * E2;
            } else {
                I0[k + 1] = cumA[k + 1];
            }
        }
    }

    std::size_t index_of(double time) const {
        for (std::size_t k = 0; k < t.size(); ++k)
            if (std::abs(t[k] - time) < 1e-9) return k;
        throw InvalidParams("frame boundary not on integration grid");
    }

    double segment_A(std::size_t i, std::size_t j) const { return cumA[j] - cumA[i]; }

    /// int I0 over [t_i, t_j], via the ODE identity I0' = A - lambda I0.
    double segment_I0(std::size_t i, std::size_t j) const {
        if (lambda > 0.0) return (segment_A(i, j) - (I0[j] - I0[i])) / lambda;
        return segment_cumA(i, j);
    }

    /// int cumA over [t_i, t_j]; cumA is piecewise quadratic.
    double segment_cumA(std::size_t i, std::size_t j) const {
        double acc = 0.0;
        for (std::size_t k = i; k < j; ++k) {
            const double h = t[k + 1] - t[k];
            const double a0 = a[k];
            const double slope = (a[k + 1] - a[k]) / h;
            acc += cumA[k] * h + a0 * h * h / 2.0 + slope * h * h * h / 6.0;
        }
        return acc;
    }
};

}  // namespace

void Microparams::validate() const {
    if (K1 < 0.0 || k2 < 0.0 || k3 < 0.0 || k4 < 0.0) throw InvalidParams("rate constants must be >= 0");
    if (VB < 0.0 || VB > 1.0) throw InvalidParams("VB must be in [0,1]");
    if (k4 != 0.0) throw InvalidParams("only irreversible models supported (k4 = 0)");
}

void InputFunction::validate() const {
    if (times.size() < 2 || times.size() != activities.size())
        throw InvalidParams("input function needs >= 2 samples");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1]) throw InvalidParams("input times must increase strictly");
    for (double v : activities)
        if (v < 0.0 || !std::isfinite(v)) throw InvalidParams("input activities must be >= 0");
}

double InputFunction::at(double t) const {
    if (t <= times.front()) return activities.front();
    if (t >= times.back()) return activities.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    const double f = (t - times[lo]) / (times[hi] - times[lo]);
    return activities[lo] + f * (activities[hi] - activities[lo]);
}

InputFunction gamma_variate_input(double a, double b, double t_end) {
    InputFunction A;
    for (double t = 0.0; t < 5.0 && t < t_end; t += 0.05) A.times.push_back(t);
    for (double t = 5.0; t < t_end; t += 0.25) A.times.push_back(t);
    A.times.push_back(t_end);
    A.activities.resize(A.times.size());
    for (std::size_t i = 0; i < A.times.size(); ++i)
        A.activities[i] = a * A.times[i] * std::exp(-A.times[i] / b);
    A.validate();
    return A;
}

void FrameSchedule::validate() const {
    if (frames.empty()) throw InvalidParams("frame schedule empty");
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].second <= frames[i].first) throw InvalidParams("frame duration must be positive");
        if (i > 0 && std::abs(frames[i].first - frames[i - 1].second) > 1e-12)
            throw InvalidParams("frames must be contiguous");
    }
}

FrameSchedule default_schedule() {
    FrameSchedule s;
    double t = 0.0;
    auto add = [&](int n, double dur) {
        for (int i = 0; i < n; ++i) {
            s.frames.emplace_back(t, t + dur);
            t += dur;
        }
    };
    add(6, 1.0 / 12.0);  // 5 s
    add(6, 0.25);        // 15 s
    add(8, 1.0);
    add(6, 5.0);
    return s;
}

VoxelTac model_tac(const Microparams& p, const InputFunction& A, const FrameSchedule& schedule) {
    p.validate();
    A.validate();
    schedule.validate();
    double lambda = p.k2 + p.k3;
    if (lambda < 1e-8) lambda = 0.0;  // degenerate limit: C1 = K1 cumA
    const TacIntegrator grid(A, schedule, lambda);

    VoxelTac tac(schedule.count());
    for (std::size_t f = 0; f < schedule.count(); ++f) {
        const auto [t1, t2] = schedule.frames[f];
        const std::size_t i = grid.index_of(t1);
        const std::size_t j = grid.index_of(t2);
        const double dur = t2 - t1;
        const double intA = grid.segment_A(i, j);
        const double intI0 = grid.segment_I0(i, j);
        const double c1_avg = p.K1 * intI0 / dur;
        double c2_avg = 0.0;
        if (p.k3 > 0.0 && lambda > 0.0) {
            // C2 = k3 int C1 = (k3 K1 / lambda)(cumA - I0)
            const double int_cumA = grid.segment_cumA(i, j);
            c2_avg = p.k3 * p.K1 / lambda * (int_cumA - intI0) / dur;
        }
        const double a_avg = intA / dur;
        tac[f] = (1.0 - p.VB) * (c1_avg + c2_avg) + p.VB * a_avg;
    }
    return tac;
}

double objective(const Microparams& p, const InputFunction& A, const FrameSchedule& schedule,
                 const VoxelTac& measured, const ObjectiveOptions& opts) {
    if (measured.size() != schedule.count()) throw DimensionMismatch("measured TAC length");
    const VoxelTac model = model_tac(p, A, schedule);
    double loss = 0.0;
    for (std::size_t f = 0; f < schedule.count(); ++f) {
        const double dur = schedule.frames[f].second - schedule.frames[f].first;
        const double d = model[f] - measured[f];
        loss += dur * d * d;
    }
    if (opts.exponent_regularization) loss += opts.regularization_weight * (p.k2 + p.k3);
    return loss;
}

VoxelTac synthesize_frames(const Microparams& p, const InputFunction& A, const FrameSchedule& schedule,
                           double sigma0, RngStream& rng) {
    VoxelTac tac = model_tac(p, A, schedule);
    if (sigma0 > 0.0) {
        for (std::size_t f = 0; f < tac.size(); ++f) {
            const double dur = schedule.frames[f].second - schedule.frames[f].first;
            const double sd = sigma0 * std::sqrt(std::max(tac[f], 1e-3) / dur);
            tac[f] += sd * rng.normal();
        }
    }
    return tac;
}

PetProblem::PetProblem(InputFunction input, FrameSchedule schedule, VoxelTac measured, ObjectiveOptions opts)
    : input_(std::move(input)), schedule_(std::move(schedule)), measured_(std::move(measured)),
      opts_(opts) {
    input_.validate();
    schedule_.validate();
    if (measured_.size() != schedule_.count()) throw DimensionMismatch("measured TAC length");
}

EvalResult PetProblem::evaluate_impl(const SolutionVector& x, int) const {
    const Microparams p = decode(x);
    return EvalResult{objective(p, input_, schedule_, measured_, opts_), {}, {}, 0, 0};
}

VoxelBatch read_voxel_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    VoxelBatch batch;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("voxel", 0) == 0) continue;
        std::stringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ',');
        batch.ids.push_back(std::stoi(tok));
        VoxelTac tac;
        while (std::getline(ss, tok, ',')) tac.push_back(std::stod(tok));
        batch.tacs.push_back(std::move(tac));
    }
    return batch;
}

void write_voxel_csv(const VoxelBatch& batch, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out.precision(17);
    for (std::size_t i = 0; i < batch.ids.size(); ++i) {
        out << batch.ids[i];
        for (double v : batch.tacs[i]) out << "," << v;
        out << "\n";
    }
}

void write_fit_csv(const std::vector<FitRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "voxel,K1,k2,k3,VB,loss\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.id << "," << r.params.K1 << "," << r.params.k2 << "," << r.params.k3 << ","
            << r.params.VB << "," << r.loss << "\n";
}

}  // namespace physevo::pet
