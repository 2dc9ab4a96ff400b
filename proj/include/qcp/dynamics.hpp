#pragma once

// Fixed-step RK4 integration of the master equation for open chains and for
// clusters with a boundary field, plus steady-state and plateau detection.

#include <optional>
#include <vector>

#include "qcp/model.hpp"
#include "qcp/phase_frame.hpp"
#include "qcp/steady_state.hpp"

namespace qcp {

struct IntegratorConfig {
    double dt = 5e-3;
    double t_max = 100.0;
    double convergence_window = 10.0;
    double convergence_tol = 1e-9;  ///< max-norm change of r over one window
    double record_interval = 0.1;
    bool stop_when_converged = false;
    bool record_sites = false;

    void validate() const;
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> n_bar;
    std::vector<std::vector<double>> sites;  ///< per record, <n_j> for each site (optional)
    std::vector<double> field;               ///< boundary field per record (cluster runs)
};

/// Boundary-field mode of a run. Self-consistent runs set the field to the
/// current <n_1> at every stage evaluation.
struct FieldSpec {
    double value = 0.0;
    bool self_consistent = false;
};

struct EvolveResult {
    TimeSeries series;
    DensityMatrix final_state;
    double final_field = 0.0;
    bool converged = false;
    double t_converged = 0.0;
    double max_trace_drift = 0.0;  ///< largest per-step |tr - 1| before renormalization
    double min_eigenvalue = 0.0;   ///< spot check of the final state (dim <= 2048), else 0
    long steps = 0;
};

EvolveResult evolve(const ModelParams& p, const DensityMatrix& rho0, const IntegratorConfig& cfg,
                    std::optional<FieldSpec> field = std::nullopt);

/// Real-frame RK4 stepper; exposed for tests and for long CMF runs.
class FrameStepper {
public:
    FrameStepper(const ModelParams& p, std::optional<FieldSpec> field);

    void set_state(const RowMatrixXd& r_sym, const RowMatrixXd& r_anti);
    /// One RK4 step; returns |tr - 1| before renormalization.
    double step(double dt);

    const RowMatrixXd& sym() const { return r_; }
    const RowMatrixXd& anti() const { return a_; }
    bool has_anti() const { return a_.size() > 0; }
    const PhaseFrame& frame() const { return frame_; }
    double field() const { return frame_.boundary_field(); }

private:
    void rhs(const RowMatrixXd& r, const RowMatrixXd* a, RowMatrixXd& dr, RowMatrixXd* da);
    void update_field(const RowMatrixXd& r);

    PhaseFrame frame_;
    bool self_consistent_ = false;
    RowMatrixXd r_, a_;
    RowMatrixXd k_r_, acc_r_, tmp_r_;
    RowMatrixXd k_a_, acc_a_, tmp_a_;
};

/// Bordered solve of the steady state with a frozen boundary field.
DensityMatrix steady_state_direct(const ModelParams& p, double boundary_field = 0.0);

struct Plateau {
    double t_enter = 0.0;
    double t_exit = 0.0;
    double value = 0.0;  ///< mean n_bar over the interval
    double duration() const { return t_exit - t_enter; }
};

/// Longest run with |d n_bar/dt| < slope_tol and n_bar > floor; none unless it
/// lasts longer than min_duration.
std::optional<Plateau> detect_plateau(const TimeSeries& ts, double slope_tol = 1e-3, double floor = 1e-2,
                                      double min_duration = 10.0);

} // namespace qcp
