#include "qcp/lce.hpp"

#include <cmath>

#include <Eigen/SparseLU>

#include "qcp/parallel.hpp"
#include "qcp/phase_frame.hpp"

namespace qcp {

namespace {

ModelParams chain(double omega, double gamma, int ell)
{
    ModelParams p;
    p.L = ell;
    p.omega = omega;
    p.gamma = gamma;
    p.validate();
    return p;
}

} // namespace

ChainSusceptibility chain_susceptibility_extensive(double omega, double gamma, int ell, double h_step,
                                                   const SteadyStateOptions& opt)
{
    if (ell < 1 || ell > 12) throw std::invalid_argument("chain_susceptibility: ell must lie in [1, 12]");
    if (!(h_step > 0.0) || h_step > 1e-2) throw std::invalid_argument("chain_susceptibility: h_step must lie in (0, 1e-2]");
    PhaseFrame frame(chain(omega, gamma, ell));
    SteadyStateSolver solver(opt);
    const auto S = [&](double h) {
        frame.set_probe(h);
        return frame.packed_sigma_y_total(solver.solve(frame));
    };
    ChainSusceptibility r;
    r.value = (S(h_step) - S(-h_step)) / (2.0 * h_step);
    r.value_half = (S(0.5 * h_step) - S(-0.5 * h_step)) / h_step;
    r.relative_change = std::abs(r.value - r.value_half) / std::max(std::abs(r.value_half), 1e-300);
    r.linear = r.relative_change <= 1e-4;
    return r;
}

double chain_susceptibility_linear(double omega, double gamma, int ell)
{
    const ModelParams p = chain(omega, gamma, ell);
    const SparseOperator H = build_hamiltonian(p);
    const Index n = p.dim() - 1;  // basis states 1 .. 2^ell - 1
    const cplx I(0.0, 1.0);
    std::vector<Eigen::Triplet<cplx>> t;
    const auto& h = H.matrix();
    for (Index a = 1; a <= n; ++a) {
        t.emplace_back(a - 1, a - 1, -0.5 * gamma * popcount(static_cast<std::uint64_t>(a)));
        for (RowSparseXcd::InnerIterator it(h, a); it; ++it)
            if (it.col() != 0) t.emplace_back(a - 1, it.col() - 1, -I * it.value());
    }
    Eigen::SparseMatrix<cplx> A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < ell; ++j) rhs[static_cast<Index>(site_bit(ell, j)) - 1] = I;
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu(A);
    if (lu.info() != Eigen::Success) throw NumericalError("chain_susceptibility_linear: singular system");
    const Eigen::VectorXcd psi = lu.solve(rhs);
    double s = 0.0;
    for (int j = 0; j < ell; ++j) s += psi[static_cast<Index>(site_bit(ell, j)) - 1].imag();
    return -2.0 * s;
}

std::vector<double> weights_inclusion_exclusion(const std::vector<double>& p)
{
    std::vector<double> w(p.size());
    for (std::size_t L = 1; L <= p.size(); ++L) {
        double v = p[L - 1];
        for (std::size_t l = 1; l < L; ++l) v -= static_cast<double>(L - l + 1) * w[l - 1];
        w[L - 1] = v;
    }
    return w;
}

std::vector<double> weights_second_difference(const std::vector<double>& p)
{
    std::vector<double> w(p.size());
    for (std::size_t L = 1; L <= p.size(); ++L) {
        const double p1 = L >= 2 ? p[L - 2] : 0.0;
        const double p2 = L >= 3 ? p[L - 3] : 0.0;
        w[L - 1] = p[L - 1] - 2.0 * p1 + p2;
    }
    return w;
}

WeightSeries weights_from_values(double omega, double gamma, const std::vector<double>& p_values)
{
    WeightSeries ws;
    ws.omega = omega;
    ws.gamma = gamma;
    ws.p_values = p_values;
    ws.weights = weights_inclusion_exclusion(p_values);
    const auto closed = weights_second_difference(p_values);
    double sum = 0.0;
    for (std::size_t i = 0; i < ws.weights.size(); ++i) {
        ws.recursion_mismatch = std::max(ws.recursion_mismatch, std::abs(ws.weights[i] - closed[i]));
        sum += ws.weights[i];
        ws.partial_sums.push_back(sum);
    }
    return ws;
}

WeightSeries compute_weights(double omega, double gamma, int r_max, double h_step, SusceptibilityMethod method,
                             int threads)
{
    if (r_max < 1 || r_max > 12) throw std::invalid_argument("compute_weights: r_max must lie in [1, 12]");
    std::vector<double> p(static_cast<std::size_t>(r_max));
    std::vector<char> ok(static_cast<std::size_t>(r_max), 1);
    // Largest chains first so the long solves start early.
    parallel_for(r_max, threads, [&](long k) {
        const int ell = r_max - static_cast<int>(k);
        if (method == SusceptibilityMethod::linear_response) {
            p[ell - 1] = chain_susceptibility_linear(omega, gamma, ell);
        } else {
            const ChainSusceptibility c = chain_susceptibility_extensive(omega, gamma, ell, h_step);
            p[ell - 1] = c.value;
            ok[ell - 1] = c.linear;
        }
    });
    WeightSeries ws = weights_from_values(omega, gamma, p);
    ws.h_step = h_step;
    ws.method = method;
    ws.linear_ok.assign(ok.begin(), ok.end());
    return ws;
}

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::automatic: return "auto";
    case Regime::exponential: return "exponential";
    case Regime::power_law: return "power_law";
    }
    return "unknown";
}

double tail_exponential(const ExpFit& f, int R)
{
    double head = 0.0;
    for (int L = 1; L <= R; ++L) head += (L % 2 == 1 ? 1.0 : -1.0) * f.a * std::exp(-f.b * L);
    return f.a / (1.0 + std::exp(f.b)) - head;
}

double tail_power(const PowerFit& f, int R)
{
    double head = 0.0;
    for (int L = 1; L <= R; ++L) head += (L % 2 == 1 ? 1.0 : -1.0) * f.c * std::pow(L, -f.n);
    return f.c * eta(f.n) - head;
}

ChiExtrapolation extrapolate_chi(const WeightSeries& ws, const ExtrapolationOptions& opt)
{
    const int R = ws.r_max();
    if (R < 2) throw std::invalid_argument("extrapolate_chi: need at least two weights");
    ChiExtrapolation e;
    e.r_max = R;
    e.partial_sum = ws.partial_sums.back();
    e.alternating = true;
    for (int L = 1; L <= R; ++L)
        if ((ws.weights[L - 1] > 0.0) != (L % 2 == 1)) e.alternating = false;

    if (opt.method == FitMethod::two_point) {
        e.exp_fit = two_point_exp_fit(R - 1, ws.weights[R - 2], R, ws.weights[R - 1]);
        e.power_fit = two_point_power_fit(R - 1, ws.weights[R - 2], R, ws.weights[R - 1]);
    } else {
        std::vector<double> Ls, wv;
        for (int L = std::max(1, std::min(opt.lsq_min_L, R - 1)); L <= R; ++L) {
            Ls.push_back(L);
            wv.push_back(ws.weights[L - 1]);
        }
        e.exp_fit = lsq_exp_fit(Ls, wv);
        e.power_fit = lsq_power_fit(Ls, wv);
    }
    e.exp_feasible = e.exp_fit.b > 0.0;
    e.power_feasible = e.power_fit.n > 1.0;
    if (e.exp_feasible) e.tail_exp = tail_exponential(e.exp_fit, R);
    if (e.power_feasible) e.tail_power = tail_power(e.power_fit, R);

    e.regime = opt.regime;
    if (e.regime == Regime::automatic)
        e.regime = ws.omega < opt.transition * ws.gamma ? Regime::exponential : Regime::power_law;
    const bool feasible = e.regime == Regime::exponential ? e.exp_feasible : e.power_feasible;
    e.extrapolable = feasible && e.alternating;
    e.chi_tdl = e.partial_sum;
    if (e.extrapolable) e.chi_tdl += e.regime == Regime::exponential ? e.tail_exp : e.tail_power;
    return e;
}

} // namespace qcp
