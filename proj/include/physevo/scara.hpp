#pragma once

#include <array>
#include <string>
#include <vector>

#include "physevo/ode.hpp"
#include "physevo/problem.hpp"
#include "physevo/rng.hpp"

namespace physevo::scara {

/// State layout: (i1, alpha1, dalpha1, i2, alpha2, dalpha2). The measured
/// subset is (alpha1, alpha2).
constexpr int kStateDim = 6;
constexpr std::array<int, 2> kMeasuredIdx = {1, 4};

struct AxisParams {
    double inertia = 0.05;        // kg m^2
    double damping = 0.1;         // N m s / rad
    double motor_constant = 0.5;  // N m / A
    double time_constant = 0.05;  // s (electrical, L/R)
    double resistance = 2.0;      // ohm
};

/// Surrogate 2-axis physical model driven by a sampled reference-voltage
/// table (piecewise linear in time, one column per axis).
struct PhysParams {
    AxisParams axis1;
    AxisParams axis2;
    std::vector<double> voltage_times;
    std::vector<double> voltage_axis1;
    std::vector<double> voltage_axis2;

    double v_ref(int axis, double t) const;
};

PhysParams default_phys_params(double tf);

/// Feedforward correction net: input (state 6 + physical derivative 6),
/// one tanh hidden layer of width H, linear output 6, residual form.
struct AnnParams {
    int hidden = 8;
    SolutionVector theta;  // flattened W1 (H x 12), b1 (H), W2 (6 x H), b2 (6)

    static std::size_t parameter_count(int hidden) {
        return static_cast<std::size_t>(12 * hidden + hidden + hidden * 6 + 6);
    }
};

struct MeasuredData {
    std::vector<double> times;
    std::vector<std::array<double, 2>> angles;  // (alpha1, alpha2) per sample
};

/// Smooth stick-slip torque used only by the data generator.
struct FrictionParams {
    double c_static = 0.0;
    double c_drop = 0.0;
    double v_eps = 0.05;
};

void physical_rhs(const PhysParams& phys, double t, const std::vector<double>& x, std::vector<double>& dx);

/// Hybrid right-hand side: physical derivative plus the net's residual
/// correction. With all-zero weights the output equals the physical rhs.
void ann_forward(const AnnParams& ann, const std::vector<double>& state,
                 const std::vector<double>& phys_derivative, std::vector<double>& out);

Trajectory simulate_physical(const PhysParams& phys, const std::vector<double>& x0, double t0, double tf,
                             const std::vector<double>& sample_times, int steps_per_interval = 10);

Trajectory simulate_hybrid(const std::vector<double>& x0, const PhysParams& phys, const AnnParams& ann,
                           double t0, double tf, const std::vector<double>& sample_times,
                           int steps_per_interval = 10);

/// Mean over samples of the summed squared deviation of the measured angles.
double trajectory_loss(const Trajectory& traj, const MeasuredData& data);

/// Ground truth generator: physical model plus stick-slip friction torque,
/// optionally with Gaussian noise on the angles.
MeasuredData synthesize_measurements(const PhysParams& phys, const FrictionParams& friction,
                                     const std::vector<double>& x0, const std::vector<double>& times,
                                     double noise_sd, RngStream& rng, int steps_per_interval = 10);

/// Genotype = flattened ANN parameters, bounds [-5, 5]; objective = Eq.-style
/// discretized loss of the hybrid simulation against the measured data.
/// Simulation blow-ups map to a fixed penalty cap (1e9).
class ScaraProblem final : public Problem {
  public:
    ScaraProblem(PhysParams phys, MeasuredData data, int hidden = 8, int steps_per_interval = 10);

    std::string name() const override { return "scara"; }
    std::size_t dim() const override { return AnnParams::parameter_count(hidden_); }
    Bounds bounds() const override { return Bounds::uniform(dim(), -5.0, 5.0); }

    const PhysParams& phys() const { return phys_; }
    const MeasuredData& data() const { return data_; }
    int hidden() const { return hidden_; }

    /// Loss of the physical-only model (zero-weight net).
    double baseline_loss() const;

    static constexpr double kPenaltyCap = 1e9;

  protected:
    EvalResult evaluate_impl(const SolutionVector& x, int fidelity) const override;

  private:
    PhysParams phys_;
    MeasuredData data_;
    int hidden_;
    int steps_per_interval_;
    std::vector<double> x0_;
};

/// Desk-scale default dataset: noiseless stick-slip ground truth on a 2 s
/// horizon with 50 samples.
ScaraProblem default_problem(int hidden = 8);

void write_csv(const MeasuredData& data, const std::string& path);
MeasuredData read_csv(const std::string& path);

}  // namespace physevo::scara
