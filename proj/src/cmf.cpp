#include "qcp/cmf.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <tuple>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "qcp/parallel.hpp"

namespace qcp {

namespace {

ModelParams cluster_params(double omega, double gamma, int L)
{
    ModelParams p;
    p.L = L;
    p.omega = omega;
    p.gamma = gamma;
    p.validate();
    if (L > 12) throw std::invalid_argument("cluster size must not exceed 12");
    return p;
}

} // namespace

CmfMap::CmfMap(double omega, double gamma, int L_cluster, SteadyStateOptions opt)
    : p_(cluster_params(omega, gamma, L_cluster)), frame_(p_), solver_(opt)
{
}

Eigen::VectorXd CmfMap::solve(double f)
{
    frame_.set_boundary_field(f);
    ++evaluations_;
    return solver_.solve(frame_);
}

void CmfMap::set_omega(double omega)
{
    if (omega == p_.omega) return;
    p_.omega = omega;
    p_.validate();
    frame_ = PhaseFrame(p_, frame_.boundary_field());
}

double CmfMap::n_1(double f) { return frame_.packed_population(solve(f), 0); }

BoundaryResponse CmfMap::response(double f)
{
    const Eigen::VectorXd x = solve(f);
    BoundaryResponse r;
    r.n_1 = frame_.packed_population(x, 0);
    const double n_L = frame_.packed_population(x, p_.L - 1);
    if (std::abs(r.n_1 - n_L) > 1e-9)
        throw NumericalError("cmf: reflection symmetry broken, <n_1> - <n_L> = " + std::to_string(r.n_1 - n_L));
    r.n_bar = frame_.packed_mean_population(x);
    r.rho_ss = DensityMatrix(frame_.to_density(frame_.unpack(x, Sector::symmetric), RowMatrixXd()));
    return r;
}

BoundaryResponse boundary_response(const ModelParams& p, int L_cluster, double f_n)
{
    if (!(f_n >= 0.0 && f_n <= 1.2)) throw std::invalid_argument("boundary_response: field must lie in [0, 1.2]");
    CmfMap map(p.omega, p.gamma, L_cluster);
    return map.response(f_n);
}

double single_site_response(double omega, double gamma, double f)
{
    const double d = 16.0 * omega * omega * f * f;
    return d / (gamma * gamma + 2.0 * d);
}

std::vector<CmfFixedPoint> find_fixed_points(const std::function<std::function<double(double)>()>& map_factory,
                                             const FixedPointOptions& opt)
{
    if (opt.grid_points < 2) throw std::invalid_argument("find_fixed_points: need at least two grid points");
    const int n = opt.grid_points;
    // An extra point just above zero resolves roots close to the absorbing one.
    std::vector<double> F(n + 1), g(n + 1);
    F[1] = 1e-4 * opt.f_max / (n - 1);
    for (int i = 1; i < n; ++i) F[i + 1] = opt.f_max * i / (n - 1);
    parallel_for(n + 1, opt.threads, [&](long i) {
        auto map = map_factory();
        g[i] = map(F[i]) - F[i];
    });

    const auto slope_at = [&](const std::function<double(double)>& map, double f) {
        return (map(f + opt.slope_step) - map(f - opt.slope_step)) / (2.0 * opt.slope_step);
    };

    std::vector<CmfFixedPoint> out;
    {
        auto map = map_factory();
        CmfFixedPoint p;
        p.n_boundary = map(0.0);
        p.slope = slope_at(map, 0.0);
        p.stable = p.slope < 1.0;
        out.push_back(p);
    }

    std::vector<std::pair<double, double>> brackets;
    for (int i = 1; i < n; ++i) {
        if (g[i + 1] == 0.0) {
            brackets.emplace_back(F[i + 1], F[i + 1]);
        } else if (g[i] != 0.0 && (g[i] < 0.0) != (g[i + 1] < 0.0)) {
            brackets.emplace_back(F[i], F[i + 1]);
        }
    }
    std::vector<CmfFixedPoint> roots(brackets.size());
    parallel_for(static_cast<long>(brackets.size()), opt.threads, [&](long k) {
        auto map = map_factory();
        auto [lo, hi] = brackets[k];
        if (lo < hi) {
            const auto gfun = [&](double f) { return map(f) - f; };
            std::uintmax_t iters = 100;
            std::tie(lo, hi) = boost::math::tools::toms748_solve(
                gfun, lo, hi, [&](double x, double y) { return std::abs(y - x) <= opt.root_tol; }, iters);
        }
        CmfFixedPoint p;
        p.f_n_star = 0.5 * (lo + hi);
        p.n_boundary = map(p.f_n_star);
        p.slope = slope_at(map, p.f_n_star);
        p.stable = p.slope < 1.0;
        roots[k] = p;
    });
    out.insert(out.end(), roots.begin(), roots.end());
    return out;
}

std::vector<CmfFixedPoint> find_fixed_points(const ModelParams& p, int L_cluster, const FixedPointOptions& opt)
{
    const auto factory = [&]() -> std::function<double(double)> {
        auto map = std::make_shared<CmfMap>(p.omega, p.gamma, L_cluster);
        return [map](double f) { return map->n_1(f); };
    };
    std::vector<CmfFixedPoint> pts = find_fixed_points(factory, opt);
    parallel_for(static_cast<long>(pts.size()), opt.threads, [&](long i) {
        CmfMap map(p.omega, p.gamma, L_cluster);
        const BoundaryResponse r = map.response(pts[i].f_n_star);
        pts[i].n_bar = r.n_bar;
        if (opt.keep_states) pts[i].rho_ss = r.rho_ss;
    });
    return pts;
}

std::string to_string(CmfBranchLabel l)
{
    switch (l) {
    case CmfBranchLabel::absorbing: return "absorbing";
    case CmfBranchLabel::active_stable: return "active_stable";
    case CmfBranchLabel::active_unstable: return "active_unstable";
    }
    return "unknown";
}

Branch trace_branches(const std::vector<double>& omegas, double gamma, int L_cluster, const FixedPointOptions& opt,
                      double omega_tol)
{
    if (!std::is_sorted(omegas.begin(), omegas.end())) throw std::invalid_argument("trace_branches: grid must ascend");
    FixedPointOptions o = opt;
    o.keep_states = false;
    const auto active_count = [&](double w) {
        ModelParams p;
        p.omega = w;
        p.gamma = gamma;
        return static_cast<int>(find_fixed_points(p, L_cluster, o).size()) - 1;
    };

    Branch b;
    b.L_cluster = L_cluster;
    std::optional<double> last_absorbing_only;
    for (double w : omegas) {
        ModelParams p;
        p.omega = w;
        p.gamma = gamma;
        const auto pts = find_fixed_points(p, L_cluster, o);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            BranchRow r;
            r.omega = w;
            r.f_star = pts[i].f_n_star;
            r.n_bar_ss = pts[i].n_bar;
            r.slope = pts[i].slope;
            r.label = i == 0 ? CmfBranchLabel::absorbing
                             : (pts[i].stable ? CmfBranchLabel::active_stable : CmfBranchLabel::active_unstable);
            b.rows.push_back(r);
        }
        if (pts.size() == 1) {
            last_absorbing_only = w;
        } else if (last_absorbing_only && !b.omega_c) {
            double lo = *last_absorbing_only, hi = w;
            while (hi - lo > omega_tol) {
                const double mid = 0.5 * (lo + hi);
                (active_count(mid) > 0 ? hi : lo) = mid;
            }
            b.omega_c = hi;
        }
    }
    return b;
}

namespace {

std::pair<double, double> hump_in(const std::function<double(double)>& neg_g, double lo, double hi, int scan)
{
    double best = std::numeric_limits<double>::infinity();
    int ib = 1;
    std::vector<double> fs(scan + 2);
    for (int i = 0; i <= scan + 1; ++i) fs[i] = lo + (hi - lo) * i / (scan + 1);
    for (int i = 1; i <= scan; ++i) {
        const double v = neg_g(fs[i]);
        if (v < best) {
            best = v;
            ib = i;
        }
    }
    std::uintmax_t iters = 60;
    return boost::math::tools::brent_find_minima(neg_g, fs[ib - 1], fs[ib + 1], 24, iters);
}

struct HumpMaximizer {
    int L;
    double gamma;
    int evaluations = 0;
    double f_prev = -1.0;
    std::unique_ptr<CmfMap> map_;

    /// max over F of n_1(F) - F and its location.
    std::pair<double, double> operator()(double omega)
    {
        if (!map_) map_ = std::make_unique<CmfMap>(omega, gamma, L);
        map_->set_omega(omega);
        CmfMap& map = *map_;
        const long before = map.evaluations();
        const auto neg_g = [&](double f) { return -(map.n_1(f) - f); };
        double a = 0.0, b = 0.0;
        if (f_prev > 0.0) {
            a = std::max(1e-3, f_prev - 0.04);
            b = std::min(1.0, f_prev + 0.04);
        } else {
            const auto [f, v] = hump_in(neg_g, 0.0, 0.7, 16);
            f_prev = f;
            evaluations += static_cast<int>(map.evaluations() - before);
            return {-v, f};
        }
        std::uintmax_t iters = 60;
        auto [f, v] = boost::math::tools::brent_find_minima(neg_g, a, b, 24, iters);
        const double edge = 1e-3 * (b - a);
        if (f_prev > 0.0 && (f - a < edge || b - f < edge)) {
            f_prev = -1.0;
            evaluations += static_cast<int>(map.evaluations() - before);
            return (*this)(omega);
        }
        f_prev = f;
        evaluations += static_cast<int>(map.evaluations() - before);
        return {-v, f};
    }
};

} // namespace

HumpResult cmf_hump(int L_cluster, double gamma, double omega, double f_lo, double f_hi, int scan_points)
{
    if (!(f_lo >= 0.0 && f_lo < f_hi && f_hi <= 1.2) || scan_points < 1)
        throw std::invalid_argument("cmf_hump: bad bracket");
    CmfMap map(omega, gamma, L_cluster);
    const auto [f, v] = hump_in([&](double x) { return -(map.n_1(x) - x); }, f_lo, f_hi, scan_points);
    return {-v, f, static_cast<int>(map.evaluations())};
}

OmegaCResult locate_omega_c(int L_cluster, double gamma, double lo, double hi, double omega_tol)
{
    if (!(lo < hi)) throw std::invalid_argument("locate_omega_c: empty bracket");
    HumpMaximizer hump{L_cluster, gamma, 0, -1.0, nullptr};
    const double m_lo = hump(lo).first;
    const double m_hi = hump(hi).first;
    if (!(m_lo < 0.0) || !(m_hi > 0.0))
        throw NumericalError("locate_omega_c: bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                             "] does not enclose the saddle node");
    double f_at = 0.0;
    const auto m = [&](double w) {
        const auto [val, f] = hump(w);
        f_at = f;
        return val;
    };
    std::uintmax_t iters = 60;
    const auto [a, b] = boost::math::tools::toms748_solve(
        m, lo, hi, m_lo, m_hi, [&](double x, double y) { return std::abs(y - x) <= omega_tol; }, iters);
    OmegaCResult r;
    r.omega_c = 0.5 * (a + b);
    r.f_at_omega_c = f_at;
    r.map_evaluations = hump.evaluations;
    return r;
}

} // namespace qcp
