#include "qcp/dynamics.hpp"

#include <cmath>

namespace qcp {

void IntegratorConfig::validate() const
{
    if (!(dt > 0.0) || dt > 0.1) throw std::invalid_argument("dt must lie in (0, 0.1]");
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
    if (!(convergence_window > 0.0)) throw std::invalid_argument("convergence_window must be positive");
    if (!(record_interval > 0.0)) throw std::invalid_argument("record_interval must be positive");
}

FrameStepper::FrameStepper(const ModelParams& p, std::optional<FieldSpec> field)
    : frame_(p, field ? field->value : 0.0), self_consistent_(field && field->self_consistent)
{
}

void FrameStepper::set_state(const RowMatrixXd& r_sym, const RowMatrixXd& r_anti)
{
    r_ = r_sym;
    a_ = r_anti;
    if (self_consistent_) update_field(r_);
}

void FrameStepper::update_field(const RowMatrixXd& r) { frame_.set_boundary_field(frame_.population(r, 0)); }

void FrameStepper::rhs(const RowMatrixXd& r, const RowMatrixXd* a, RowMatrixXd& dr, RowMatrixXd* da)
{
    if (self_consistent_) update_field(r);
    frame_.apply(r, dr, 1);
    if (a) frame_.apply(*a, *da, -1);
}

double FrameStepper::step(double dt)
{
    const bool anti = has_anti();
    RowMatrixXd* a_tmp = anti ? &tmp_a_ : nullptr;
    RowMatrixXd* a_k = anti ? &k_a_ : nullptr;

    rhs(r_, anti ? &a_ : nullptr, k_r_, a_k);
    acc_r_ = k_r_;
    tmp_r_ = r_ + (0.5 * dt) * k_r_;
    if (anti) {
        acc_a_ = k_a_;
        tmp_a_ = a_ + (0.5 * dt) * k_a_;
    }

    rhs(tmp_r_, a_tmp, k_r_, a_k);
    acc_r_ += 2.0 * k_r_;
    tmp_r_ = r_ + (0.5 * dt) * k_r_;
    if (anti) {
        acc_a_ += 2.0 * k_a_;
        tmp_a_ = a_ + (0.5 * dt) * k_a_;
    }

    rhs(tmp_r_, a_tmp, k_r_, a_k);
    acc_r_ += 2.0 * k_r_;
    tmp_r_ = r_ + dt * k_r_;
    if (anti) {
        acc_a_ += 2.0 * k_a_;
        tmp_a_ = a_ + dt * k_a_;
    }

    rhs(tmp_r_, a_tmp, k_r_, a_k);
    acc_r_ += k_r_;
    r_ += (dt / 6.0) * acc_r_;
    if (anti) {
        acc_a_ += k_a_;
        a_ += (dt / 6.0) * acc_a_;
    }

    const double tr = frame_.trace(r_);
    r_ /= tr;
    if (anti) a_ /= tr;
    if (self_consistent_) update_field(r_);
    return std::abs(tr - 1.0);
}

namespace {

void record(TimeSeries& ts, double t, const FrameStepper& st, bool sites)
{
    const PhaseFrame& f = st.frame();
    const double n = f.mean_population(st.sym());
    if (n < -1e-9 || n > 1.0 + 1e-9) throw NumericalError("evolve: mean population left [0, 1] at t = " + std::to_string(t));
    ts.times.push_back(t);
    ts.n_bar.push_back(n);
    ts.field.push_back(st.field());
    if (sites) {
        std::vector<double> row;
        for (int j = 0; j < f.params().L; ++j) row.push_back(f.population(st.sym(), j));
        ts.sites.push_back(std::move(row));
    }
}

} // namespace

EvolveResult evolve(const ModelParams& p, const DensityMatrix& rho0, const IntegratorConfig& cfg,
                    std::optional<FieldSpec> field)
{
    p.validate();
    cfg.validate();
    if (rho0.dim() != p.dim()) throw std::invalid_argument("evolve: initial state has the wrong dimension");
    rho0.check(1e-8);
    if (field && !(field->value >= 0.0 && field->value <= 1.2))
        throw std::invalid_argument("evolve: boundary field must lie in [0, 1.2]");

    FrameStepper st(p, field);
    RowMatrixXd rs, ra;
    st.frame().from_density(rho0.matrix(), rs, ra);
    if (ra.cwiseAbs().maxCoeff() == 0.0) ra.resize(0, 0);
    st.set_state(rs, ra);

    const long steps = std::max(1L, std::lround(cfg.t_max / cfg.dt));
    const long every = std::max(1L, std::lround(cfg.record_interval / cfg.dt));
    const long window = std::max(1L, std::lround(cfg.convergence_window / cfg.dt));

    EvolveResult res;
    record(res.series, 0.0, st, cfg.record_sites);
    RowMatrixXd snap_r = st.sym(), snap_a = st.anti();
    long i = 0;
    while (i < steps) {
        const double drift = st.step(cfg.dt);
        ++i;
        res.max_trace_drift = std::max(res.max_trace_drift, drift);
        if (drift > 1e-6)
            throw NumericalError("evolve: trace drift " + std::to_string(drift) + " in one step at t = " +
                                 std::to_string(i * cfg.dt) + "; reduce dt");
        const bool last = i == steps;
        bool stop = false;
        if (i % window == 0) {
            double change = (st.sym() - snap_r).cwiseAbs().maxCoeff();
            if (st.has_anti()) change = std::max(change, (st.anti() - snap_a).cwiseAbs().maxCoeff());
            if (change < cfg.convergence_tol && !res.converged) {
                res.converged = true;
                res.t_converged = i * cfg.dt;
                stop = cfg.stop_when_converged;
            }
            snap_r = st.sym();
            if (st.has_anti()) snap_a = st.anti();
        }
        if (i % every == 0 || last || stop) record(res.series, i * cfg.dt, st, cfg.record_sites);
        if (stop) break;
    }
    res.steps = i;
    res.final_field = st.field();
    res.final_state = DensityMatrix(st.frame().to_density(st.sym(), st.anti()));
    if (res.final_state.dim() <= 2048) {
        res.min_eigenvalue = res.final_state.min_eigenvalue();
        if (res.min_eigenvalue < -1e-5)
            throw NumericalError("evolve: final state has eigenvalue " + std::to_string(res.min_eigenvalue));
    }
    return res;
}

DensityMatrix steady_state_direct(const ModelParams& p, double boundary_field)
{
    p.validate();
    if (p.L > 12) throw std::invalid_argument("steady_state_direct: L must not exceed 12");
    const PhaseFrame frame(p, boundary_field);
    const Eigen::VectorXd x = solve_steady_state(frame);
    DensityMatrix rho(frame.to_density(frame.unpack(x, Sector::symmetric), RowMatrixXd()));
    rho.check(1e-8);
    return rho;
}

std::optional<Plateau> detect_plateau(const TimeSeries& ts, double slope_tol, double floor, double min_duration)
{
    const std::size_t n = ts.times.size();
    if (n < 10 || ts.n_bar.size() != n) throw std::invalid_argument("detect_plateau: need at least 10 samples");
    std::vector<bool> flat(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1, hi = i + 1 == n ? i : i + 1;
        const double slope = (ts.n_bar[hi] - ts.n_bar[lo]) / (ts.times[hi] - ts.times[lo]);
        flat[i] = std::abs(slope) < slope_tol && ts.n_bar[i] > floor;
    }
    std::optional<Plateau> best;
    std::size_t i = 0;
    while (i < n) {
        if (!flat[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        double sum = 0.0;
        while (j < n && flat[j]) sum += ts.n_bar[j++];
        const Plateau pl{ts.times[i], ts.times[j - 1], sum / static_cast<double>(j - i)};
        if (pl.duration() > min_duration && (!best || pl.duration() > best->duration())) best = pl;
        i = j;
    }
    return best;
}

} // namespace qcp
