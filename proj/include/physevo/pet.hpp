#pragma once

#include <string>
#include <vector>

#include "physevo/problem.hpp"
#include "physevo/rng.hpp"

namespace physevo::pet {

/// Rate constants in 1/min, VB a dimensionless fraction. Only the 1C and the
/// irreversible 2C model are supported (k4 = 0 always; 1C also has k3 = 0).
struct Microparams {
    double K1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;
    double k4 = 0.0;
    double VB = 0.0;

    void validate() const;
};

/// Plasma tracer concentration A(t), piecewise linear between samples (min, Bq/ml).
struct InputFunction {
    std::vector<double> times;
    std::vector<double> activities;

    void validate() const;
    double at(double t) const;
};

InputFunction gamma_variate_input(double a, double b, double t_end);

/// Contiguous non-overlapping frames, short frames first by convention.
struct FrameSchedule {
    std::vector<std::pair<double, double>> frames;

    void validate() const;
    std::size_t count() const { return frames.size(); }
};

FrameSchedule default_schedule();

/// Frame-averaged activities, one per frame.
using VoxelTac = std::vector<double>;

/// Analytic time-activity curve: closed-form convolution of the piecewise
/// linear input with the model's exponential impulse response, frame values
/// time-averaged exactly.
VoxelTac model_tac(const Microparams& p, const InputFunction& A, const FrameSchedule& schedule);

struct ObjectiveOptions {
    bool exponent_regularization = false;
    double regularization_weight = 0.0;
};

/// Duration-weighted squared error, optionally plus an infinity-norm
/// regularization on the decay exponents.
double objective(const Microparams& p, const InputFunction& A, const FrameSchedule& schedule,
                 const VoxelTac& measured, const ObjectiveOptions& opts = {});

/// Gaussian noise with sd = sigma0 * sqrt(max(value, eps) / duration),
/// approximating Poisson counting statistics.
VoxelTac synthesize_frames(const Microparams& p, const InputFunction& A, const FrameSchedule& schedule,
                           double sigma0, RngStream& rng);

/// Genotype (K1, k2, k3, VB); k4 fixed to 0.
class PetProblem final : public Problem {
  public:
    PetProblem(InputFunction input, FrameSchedule schedule, VoxelTac measured,
               ObjectiveOptions opts = {});

    std::string name() const override { return "pet"; }
    std::size_t dim() const override { return 4; }
    Bounds bounds() const override {
        return Bounds{{0.0, 0.0, 0.0, 0.0}, {2.0, 2.0, 2.0, 0.5}};
    }

    const InputFunction& input() const { return input_; }
    const FrameSchedule& schedule() const { return schedule_; }
    const VoxelTac& measured() const { return measured_; }

    static Microparams decode(const SolutionVector& x) {
        return Microparams{x[0], x[1], x[2], 0.0, x[3]};
    }

  protected:
    EvalResult evaluate_impl(const SolutionVector& x, int fidelity) const override;

  private:
    InputFunction input_;
    FrameSchedule schedule_;
    VoxelTac measured_;
    ObjectiveOptions opts_;
};

/// Voxel batch I/O: one row per voxel (id, frame values...).
struct VoxelBatch {
    std::vector<int> ids;
    std::vector<VoxelTac> tacs;
};
VoxelBatch read_voxel_csv(const std::string& path);
void write_voxel_csv(const VoxelBatch& batch, const std::string& path);

struct FitRow {
    int id;
    Microparams params;
    double loss;
};
void write_fit_csv(const std::vector<FitRow>& rows, const std::string& path);

}  // namespace physevo::pet
