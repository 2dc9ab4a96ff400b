// qcp: command-line front end.
//
//   qcp [--threads N] [--config FILE] <command> [options]
//
// Every command writes a CSV (--out) and a JSON manifest next to it. Exit
// codes: 0 success, 2 usage error, 3 numerical failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcp/cmf.hpp"
#include "qcp/dynamics.hpp"
#include "qcp/io.hpp"
#include "qcp/lce.hpp"
#include "qcp/meanfield.hpp"
#include "qcp/parallel.hpp"
#include "qcp/spectrum.hpp"

namespace {

using namespace qcp;
using nlohmann::json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// "a:b:step" (inclusive) or "x,y,z".
std::vector<double> parse_grid(const std::string& spec)
{
    std::vector<double> out;
    try {
        if (spec.find(':') != std::string::npos) {
            std::vector<double> v;
            std::stringstream ss(spec);
            for (std::string tok; std::getline(ss, tok, ':');) v.push_back(std::stod(tok));
            if (v.size() != 3 || !(v[2] > 0.0) || v[1] < v[0]) throw UsageError("bad grid '" + spec + "'");
            const long n = std::lround(std::floor((v[1] - v[0]) / v[2] + 1e-9)) + 1;
            for (long i = 0; i < n; ++i) out.push_back(v[0] + static_cast<double>(i) * v[2]);
        } else {
            std::stringstream ss(spec);
            for (std::string tok; std::getline(ss, tok, ',');) out.push_back(std::stod(tok));
        }
    } catch (const std::logic_error&) {
        throw UsageError("cannot parse grid '" + spec + "'");
    }
    if (out.empty()) throw UsageError("empty grid '" + spec + "'");
    return out;
}

std::vector<int> parse_sizes(const std::string& spec)
{
    std::vector<int> out;
    for (double v : parse_grid(spec)) {
        if (v != std::floor(v)) throw UsageError("sizes must be integers: '" + spec + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::string manifest_path(const std::string& csv)
{
    std::filesystem::path p(csv);
    return p.replace_extension(".manifest.json").string();
}

std::string sibling(const std::string& csv, const std::string& suffix)
{
    std::filesystem::path p(csv);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

struct Run {
    RunManifest m;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Run(const std::string& command, int threads, bool env_threads)
    {
        m.command = command;
        m.threads = threads;
        m.version = QCP_VERSION;
        m.parameters["threads_from_env"] = env_threads;
    }

    void finish(const std::string& csv, const std::vector<std::string>& extra = {})
    {
        m.add_output(csv);
        for (const auto& e : extra) m.add_output(e);
        m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        m.write(manifest_path(csv));
        std::cout << "wrote " << csv << " and " << manifest_path(csv) << '\n';
    }
};

struct Common {
    int threads = default_threads();
    bool env_threads = std::getenv("QCP_THREADS") != nullptr;
};

// ---------------------------------------------------------------- mf-scan

struct MfScanArgs {
    double omega_min = 0.1, omega_max = 3.0, gamma = 1.0;
    int steps = 300;
    std::string out = "mf_scan.csv";
};

void cmd_mf_scan(const MfScanArgs& a, const Common& c)
{
    if (a.steps < 1) throw UsageError("--steps must be at least 1");
    if (!(a.omega_min >= 0.0) || a.omega_max < a.omega_min) throw UsageError("bad omega range");
    std::vector<double> grid;
    for (int i = 0; i < a.steps; ++i)
        grid.push_back(a.steps == 1 ? a.omega_min : a.omega_min + (a.omega_max - a.omega_min) * i / (a.steps - 1));
    Run run("mf-scan", c.threads, c.env_threads);
    run.m.parameters.update({{"omega_min", a.omega_min}, {"omega_max", a.omega_max}, {"steps", a.steps}, {"gamma", a.gamma}});
    run.m.tolerances = {{"marginal", kMarginalTol}};
    CsvWriter w(a.out, {"omega", "branch", "sx", "sy", "sz", "n", "max_re_lambda", "stable"});
    for (const auto& r : mf_branch_scan(grid, a.gamma)) {
        w << r.omega << to_string(r.point.branch) << r.point.state.x() << r.point.state.y() << r.point.state.z()
          << bloch_population(r.point.state) << r.point.max_re_lambda << (r.point.stable ? 1 : 0);
        w.end_row();
    }
    w.close();
    run.m.results["omega_saddle_node"] = a.gamma / std::sqrt(2.0);
    run.finish(a.out);
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
    int L = 4;
    double omega = 1.0, gamma = 1.0;
    std::string method = "dense";
    int k = 20;
    std::string out = "spectrum.csv";
};

SpectrumResult run_spectrum(const ModelParams& p, const std::string& method, int k)
{
    if (method == "dense") {
        if (p.L > kMaxDenseSpectrumSites)
            throw UsageError("dense spectrum limited to L <= " + std::to_string(kMaxDenseSpectrumSites));
        return full_spectrum(p);
    }
    if (method == "krylov") {
        if (p.L > kMaxKrylovSpectrumSites)
            throw UsageError("krylov spectrum limited to L <= " + std::to_string(kMaxKrylovSpectrumSites));
        return leading_spectrum(p, k);
    }
    throw UsageError("unknown method '" + method + "'");
}

void cmd_spectrum(const SpectrumArgs& a, const Common& c)
{
    ModelParams p;
    p.L = a.L;
    p.omega = a.omega;
    p.gamma = a.gamma;
    p.validate();
    Run run("spectrum", c.threads, c.env_threads);
    run.m.parameters.update({{"L", a.L}, {"omega", a.omega}, {"gamma", a.gamma}, {"method", a.method}, {"k", a.k}});
    run.m.tolerances = {{"zero_mode", kZeroModeTol}, {"degeneracy", kDegeneracyTol}};
    const SpectrumResult r = run_spectrum(p, a.method, a.k);
    CsvWriter w(a.out, {"L", "omega", "re_mu", "im_mu"});
    for (Index i = 0; i < r.eigenvalues.size(); ++i) {
        w << a.L << a.omega << r.eigenvalues[i].real() << r.eigenvalues[i].imag();
        w.end_row();
    }
    w.close();
    const auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    run.m.results = {{"zero_modes", r.zero_modes}, {"gap", r.gap},          {"mu_half", num(r.mu_half)},
                     {"mu_one", num(r.mu_one)},    {"complete", r.complete}, {"steady_residual", r.steady_residual}};
    run.finish(a.out);
}

// ---------------------------------------------------------------- gap-extrapolate

struct GapArgs {
    std::string sizes = "4,5,6";
    std::string omega_grid = "0.5:9:0.5";
    double gamma = 1.0;
    std::string method = "auto";
    int k = 20;
    std::string out = "gap.csv";
};

void cmd_gap_extrapolate(const GapArgs& a, const Common& c)
{
    const std::vector<int> sizes = parse_sizes(a.sizes);
    std::vector<double> grid = parse_grid(a.omega_grid);
    if (sizes.size() < 3) throw UsageError("--sizes needs at least three cluster sizes");
    if (!std::is_sorted(grid.begin(), grid.end())) throw UsageError("--omega-grid must ascend");
    for (int L : sizes)
        if (L < 1 || L > kMaxKrylovSpectrumSites) throw UsageError("size " + std::to_string(L) + " out of range");
    // mu_1 is continued from Omega = 0, so the sweep always starts there.
    std::vector<double> full = grid;
    if (full.front() != 0.0) full.insert(full.begin(), 0.0);

    Run run("gap-extrapolate", c.threads, c.env_threads);
    run.m.parameters.update({{"sizes", sizes}, {"omega_grid", grid}, {"gamma", a.gamma}, {"method", a.method}, {"k", a.k}});
    run.m.tolerances = {{"zero_mode", kZeroModeTol}, {"degeneracy", kDegeneracyTol}};

    std::vector<std::vector<double>> mu(sizes.size());
    parallel_for(static_cast<long>(sizes.size()), c.threads, [&](long i) {
        ModelParams base;
        base.L = sizes[i];
        base.gamma = a.gamma;
        std::string method = a.method;
        if (method == "auto") method = base.L <= kMaxDenseSpectrumSites ? "dense" : "krylov";
        mu[i] = track_mu1(base, full, [&](const ModelParams& q) { return run_spectrum(q, method, a.k); });
    });

    CsvWriter w(a.out, {"L", "omega", "mu1"});
    for (std::size_t i = 0; i < sizes.size(); ++i)
        for (std::size_t j = 0; j < full.size(); ++j) {
            w << sizes[i] << full[j] << mu[i][j];
            w.end_row();
        }
    w.close();

    json summary = json::array();
    for (std::size_t j = 0; j < full.size(); ++j) {
        if (full[j] != grid.front() && j == 0) continue;
        std::map<int, double> g;
        for (std::size_t i = 0; i < sizes.size(); ++i) g[sizes[i]] = std::abs(mu[i][j]);
        const GapExtrapolation e = extrapolate_gap(g, a.gamma);
        summary.push_back({{"omega", full[j]},
                           {"sizes", sizes},
                           {"slope", e.slope},
                           {"intercept", e.intercept},
                           {"gap_tdl", e.gap_tdl},
                           {"closed", e.closed}});
    }
    const std::string js = sibling(a.out, "_extrapolation.json");
    write_json(js, summary);
    run.m.results["extrapolation_file"] = js;
    run.finish(a.out, {js});
}

// ---------------------------------------------------------------- evolve

struct EvolveArgs {
    int L = 0;
    int cluster = 0;
    double omega = 1.0, gamma = 1.0;
    bool self_consistent = false;
    double field = 0.0;
    std::string initial = "all-up";
    double t_max = 100.0, dt = 0.01, record = 0.1;
    bool sites = false;
    bool stop_converged = false;
    double plateau_slope = 1e-3, plateau_floor = 1e-2, plateau_min = 10.0;
    std::string out = "evolve.csv";
};

void cmd_evolve(const EvolveArgs& a, const Common& c)
{
    if ((a.L > 0) == (a.cluster > 0)) throw UsageError("give exactly one of --L and --cluster");
    if (a.self_consistent && a.cluster == 0) throw UsageError("--f-self-consistent needs --cluster");
    ModelParams p;
    p.L = a.L > 0 ? a.L : a.cluster;
    p.omega = a.omega;
    p.gamma = a.gamma;
    p.validate();
    if (p.L > 12) throw UsageError("evolution limited to 12 sites");
    DensityMatrix rho0;
    if (a.initial == "all-up") rho0 = DensityMatrix::all_up(p.L);
    else if (a.initial == "all-down") rho0 = DensityMatrix::all_down(p.L);
    else throw UsageError("--initial must be all-up or all-down");

    IntegratorConfig cfg;
    cfg.dt = a.dt;
    cfg.t_max = a.t_max;
    cfg.record_interval = a.record;
    cfg.record_sites = a.sites;
    cfg.stop_when_converged = a.stop_converged;
    std::optional<FieldSpec> field;
    if (a.cluster > 0) field = FieldSpec{a.self_consistent ? 1.0 : a.field, a.self_consistent};
    if (field && a.self_consistent) field->value = a.initial == "all-up" ? 1.0 : 0.0;

    Run run("evolve", c.threads, c.env_threads);
    run.m.parameters.update({{"L", p.L},
                             {"cluster", a.cluster > 0},
                             {"omega", a.omega},
                             {"gamma", a.gamma},
                             {"f_self_consistent", a.self_consistent},
                             {"field", a.field},
                             {"initial", a.initial},
                             {"t_max", a.t_max},
                             {"dt", a.dt},
                             {"record_interval", a.record},
                             {"sites", a.sites},
                             {"stop_when_converged", a.stop_converged}});
    run.m.tolerances = {{"convergence_window", cfg.convergence_window},
                        {"convergence_tol", cfg.convergence_tol},
                        {"trace_drift_abort", 1e-6},
                        {"plateau_slope", a.plateau_slope},
                        {"plateau_floor", a.plateau_floor},
                        {"plateau_min_duration", a.plateau_min}};
    const EvolveResult r = evolve(p, rho0, cfg, field);

    std::vector<std::string> header{"t", "n_bar"};
    if (a.sites)
        for (int j = 1; j <= p.L; ++j) header.push_back("n_" + std::to_string(j));
    CsvWriter w(a.out, header);
    for (std::size_t i = 0; i < r.series.times.size(); ++i) {
        w << r.series.times[i] << r.series.n_bar[i];
        if (a.sites)
            for (double v : r.series.sites[i]) w << v;
        w.end_row();
    }
    w.close();

    run.m.results = {{"n_bar_final", r.series.n_bar.back()},
                     {"final_field", r.final_field},
                     {"converged", r.converged},
                     {"t_converged", r.t_converged},
                     {"steps", r.steps},
                     {"max_trace_drift", r.max_trace_drift},
                     {"min_eigenvalue", r.min_eigenvalue}};
    if (r.series.times.size() >= 10) {
        if (const auto pl = detect_plateau(r.series, a.plateau_slope, a.plateau_floor, a.plateau_min))
            run.m.results["plateau"] = {{"t_enter", pl->t_enter}, {"t_exit", pl->t_exit}, {"duration", pl->duration()}, {"value", pl->value}};
        else
            run.m.results["plateau"] = nullptr;
    }
    run.finish(a.out);
}

// ---------------------------------------------------------------- cmf

struct CmfArgs {
    int cluster = 7;
    double omega = -1.0;
    std::string omega_grid;
    double gamma = 1.0;
    int grid_points = 200;
    double f_max = 1.05;
    double root_tol = 1e-6;
    std::string omega_c;
    double omega_tol = 1e-4;
    std::string out = "cmf.csv";
};

void cmd_cmf(const CmfArgs& a, const Common& c)
{
    if ((a.omega >= 0.0) == !a.omega_grid.empty()) throw UsageError("give exactly one of --omega and --omega-grid");
    if (a.cluster < 1 || a.cluster > 12) throw UsageError("--cluster must lie in [1, 12]");
    const std::vector<double> grid = a.omega >= 0.0 ? std::vector<double>{a.omega} : parse_grid(a.omega_grid);
    if (!std::is_sorted(grid.begin(), grid.end())) throw UsageError("--omega-grid must ascend");

    FixedPointOptions opt;
    opt.grid_points = a.grid_points;
    opt.f_max = a.f_max;
    opt.root_tol = a.root_tol;
    opt.threads = c.threads;
    opt.keep_states = false;

    Run run("cmf", c.threads, c.env_threads);
    run.m.parameters.update({{"cluster", a.cluster},
                             {"omega_grid", grid},
                             {"gamma", a.gamma},
                             {"grid_points", a.grid_points},
                             {"f_max", a.f_max},
                             {"omega_c_bracket", a.omega_c}});
    run.m.tolerances = {{"root", a.root_tol}, {"slope_step", opt.slope_step}, {"omega_c", a.omega_tol}};

    CsvWriter w(a.out, {"omega", "f_star", "n_bar", "slope", "stable", "label"});
    for (double om : grid) {
        ModelParams p;
        p.omega = om;
        p.gamma = a.gamma;
        const auto pts = find_fixed_points(p, a.cluster, opt);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const CmfBranchLabel label = i == 0 ? CmfBranchLabel::absorbing
                                                : (pts[i].stable ? CmfBranchLabel::active_stable
                                                                 : CmfBranchLabel::active_unstable);
            w << om << pts[i].f_n_star << pts[i].n_bar << pts[i].slope << (pts[i].stable ? 1 : 0) << to_string(label);
            w.end_row();
        }
    }
    w.close();

    std::vector<std::string> extra;
    if (!a.omega_c.empty()) {
        const std::vector<double> br = parse_grid(a.omega_c);
        if (br.size() != 2) throw UsageError("--omega-c takes lo,hi");
        const OmegaCResult r = locate_omega_c(a.cluster, a.gamma, br[0], br[1], a.omega_tol);
        const std::string js = sibling(a.out, "_omega_c.json");
        write_json(js, {{"L", a.cluster},
                        {"gamma", a.gamma},
                        {"omega_c", r.omega_c},
                        {"f_at_omega_c", r.f_at_omega_c},
                        {"map_evaluations", r.map_evaluations}});
        run.m.results["omega_c"] = r.omega_c;
        extra.push_back(js);
    }
    run.finish(a.out, extra);
}

// ---------------------------------------------------------------- lce

struct LceArgs {
    int r_max = 6;
    std::string omega_grid = "0.5:9:0.5";
    double gamma = 1.0;
    double h_step = 1e-3;
    std::string method = "finite-difference";
    std::string regime = "auto";
    std::string fit = "two-point";
    double transition = 5.83;
    std::string out = "lce.csv";
};

void cmd_lce(const LceArgs& a, const Common& c)
{
    if (a.r_max < 1 || a.r_max > 12) throw UsageError("--r-max must lie in [1, 12]");
    const std::vector<double> grid = parse_grid(a.omega_grid);
    SusceptibilityMethod method;
    if (a.method == "finite-difference") method = SusceptibilityMethod::finite_difference;
    else if (a.method == "linear") method = SusceptibilityMethod::linear_response;
    else throw UsageError("--method must be finite-difference or linear");
    ExtrapolationOptions xo;
    xo.transition = a.transition;
    if (a.regime == "auto") xo.regime = Regime::automatic;
    else if (a.regime == "exponential") xo.regime = Regime::exponential;
    else if (a.regime == "power-law") xo.regime = Regime::power_law;
    else throw UsageError("--regime must be auto, exponential or power-law");
    if (a.fit == "two-point") xo.method = FitMethod::two_point;
    else if (a.fit == "least-squares") xo.method = FitMethod::least_squares;
    else throw UsageError("--fit must be two-point or least-squares");

    Run run("lce", c.threads, c.env_threads);
    run.m.parameters.update({{"r_max", a.r_max},
                             {"omega_grid", grid},
                             {"gamma", a.gamma},
                             {"h_step", a.h_step},
                             {"method", a.method},
                             {"regime", a.regime},
                             {"fit", a.fit},
                             {"transition", a.transition}});
    run.m.tolerances = {{"richardson_linearity", 1e-4}, {"steady_residual", SteadyStateOptions{}.residual_tol}};

    // Parallel over (omega, ell) pairs; each chain solve is independent.
    const long per = a.r_max;
    std::vector<double> P(grid.size() * per);
    std::vector<char> lin(P.size(), 1);
    parallel_for(static_cast<long>(P.size()), c.threads, [&](long t) {
        // Longest chains first.
        const long oi = t % static_cast<long>(grid.size());
        const int ell = a.r_max - static_cast<int>(t / static_cast<long>(grid.size()));
        const std::size_t idx = static_cast<std::size_t>(oi * per + ell - 1);
        if (method == SusceptibilityMethod::linear_response) {
            P[idx] = chain_susceptibility_linear(grid[oi], a.gamma, ell);
        } else {
            const ChainSusceptibility s = chain_susceptibility_extensive(grid[oi], a.gamma, ell, a.h_step);
            P[idx] = s.value;
            lin[idx] = s.linear;
        }
    });

    CsvWriter w(a.out, {"omega", "L", "P", "w_chi", "partial_sum"});
    json summary = json::array();
    bool all_linear = true;
    for (std::size_t oi = 0; oi < grid.size(); ++oi) {
        const std::vector<double> p(P.begin() + oi * per, P.begin() + (oi + 1) * per);
        const WeightSeries ws = weights_from_values(grid[oi], a.gamma, p);
        for (int L = 1; L <= a.r_max; ++L) {
            w << grid[oi] << L << p[L - 1] << ws.weights[L - 1] << ws.partial_sums[L - 1];
            w.end_row();
            all_linear = all_linear && lin[oi * per + L - 1];
        }
        json row = {{"omega", grid[oi]}, {"r_max", a.r_max}, {"partial_sum", ws.partial_sums.back()},
                    {"recursion_mismatch", ws.recursion_mismatch}};
        if (a.r_max >= 2) {
            const ChiExtrapolation x = extrapolate_chi(ws, xo);
            const bool expo = x.regime == Regime::exponential;
            row["regime"] = to_string(x.regime);
            row["params"] = expo ? json{{"a", x.exp_fit.a}, {"b", x.exp_fit.b}} : json{{"c", x.power_fit.c}, {"n", x.power_fit.n}};
            row["tail"] = expo ? x.tail_exp : x.tail_power;
            row["alternating"] = x.alternating;
            row["extrapolable"] = x.extrapolable;
            row["chi_tdl"] = x.chi_tdl;
        } else {
            row["regime"] = nullptr;
            row["chi_tdl"] = ws.partial_sums.back();
        }
        summary.push_back(row);
    }
    w.close();
    const std::string js = sibling(a.out, "_fit.json");
    write_json(js, summary);
    run.m.results = {{"fit_file", js}, {"all_linear", all_linear}};
    run.finish(a.out, {js});
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantum contact process: mean field, Liouvillian spectrum, dynamics, cluster mean field and "
                 "linked-cluster expansion."};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML or INI file with option defaults; flags on the command line win");
    Common common;
    app.add_option("--threads", common.threads, "worker threads (default QCP_THREADS or 1)")
        ->check(CLI::PositiveNumber);

    MfScanArgs mf;
    auto* s_mf = app.add_subcommand("mf-scan", "single-site mean-field branches");
    s_mf->add_option("--omega-min", mf.omega_min);
    s_mf->add_option("--omega-max", mf.omega_max);
    s_mf->add_option("--steps", mf.steps);
    s_mf->add_option("--gamma", mf.gamma)->check(CLI::PositiveNumber);
    s_mf->add_option("--out", mf.out);

    SpectrumArgs sp;
    auto* s_sp = app.add_subcommand("spectrum", "Liouvillian eigenvalues of an open chain");
    s_sp->add_option("--L", sp.L)->required();
    s_sp->add_option("--omega", sp.omega)->required();
    s_sp->add_option("--gamma", sp.gamma)->check(CLI::PositiveNumber);
    s_sp->add_option("--method", sp.method)->check(CLI::IsMember({"dense", "krylov"}));
    s_sp->add_option("--k", sp.k, "eigenvalues kept by the krylov method");
    s_sp->add_option("--out", sp.out);

    GapArgs gp;
    auto* s_gp = app.add_subcommand("gap-extrapolate", "mu_1 against 1/L and its intercept");
    s_gp->add_option("--sizes", gp.sizes);
    s_gp->add_option("--omega-grid", gp.omega_grid);
    s_gp->add_option("--gamma", gp.gamma)->check(CLI::PositiveNumber);
    s_gp->add_option("--method", gp.method)->check(CLI::IsMember({"auto", "dense", "krylov"}));
    s_gp->add_option("--k", gp.k);
    s_gp->add_option("--out", gp.out);

    EvolveArgs ev;
    auto* s_ev = app.add_subcommand("evolve", "master-equation dynamics of a chain or a self-consistent cluster");
    s_ev->add_option("--L", ev.L, "open chain length");
    s_ev->add_option("--cluster", ev.cluster, "cluster length (boundary field on both ends)");
    s_ev->add_option("--omega", ev.omega)->required();
    s_ev->add_option("--gamma", ev.gamma)->check(CLI::PositiveNumber);
    s_ev->add_flag("--f-self-consistent", ev.self_consistent, "boundary field follows <n_1>");
    s_ev->add_option("--field", ev.field, "frozen boundary field");
    s_ev->add_option("--initial", ev.initial)->check(CLI::IsMember({"all-up", "all-down"}));
    s_ev->add_option("--t-max", ev.t_max);
    s_ev->add_option("--dt", ev.dt);
    s_ev->add_option("--record-interval", ev.record);
    s_ev->add_flag("--sites", ev.sites, "add per-site populations");
    s_ev->add_flag("--stop-when-converged", ev.stop_converged);
    s_ev->add_option("--plateau-slope", ev.plateau_slope);
    s_ev->add_option("--plateau-floor", ev.plateau_floor);
    s_ev->add_option("--plateau-min", ev.plateau_min);
    s_ev->add_option("--out", ev.out);

    CmfArgs cm;
    auto* s_cm = app.add_subcommand("cmf", "cluster mean-field fixed points of <n_1>(F) = F");
    s_cm->add_option("--cluster", cm.cluster);
    s_cm->add_option("--omega", cm.omega);
    s_cm->add_option("--omega-grid", cm.omega_grid);
    s_cm->add_option("--gamma", cm.gamma)->check(CLI::PositiveNumber);
    s_cm->add_option("--grid-points", cm.grid_points);
    s_cm->add_option("--f-max", cm.f_max);
    s_cm->add_option("--root-tol", cm.root_tol);
    s_cm->add_option("--omega-c", cm.omega_c, "bracket lo,hi: also locate the saddle node");
    s_cm->add_option("--omega-tol", cm.omega_tol);
    s_cm->add_option("--out", cm.out);

    LceArgs lc;
    auto* s_lc = app.add_subcommand("lce", "linked-cluster weights and extrapolated susceptibility");
    s_lc->add_option("--r-max", lc.r_max);
    s_lc->add_option("--omega-grid", lc.omega_grid);
    s_lc->add_option("--gamma", lc.gamma)->check(CLI::PositiveNumber);
    s_lc->add_option("--h-step", lc.h_step);
    s_lc->add_option("--method", lc.method)->check(CLI::IsMember({"finite-difference", "linear"}));
    s_lc->add_option("--regime", lc.regime)->check(CLI::IsMember({"auto", "exponential", "power-law"}));
    s_lc->add_option("--fit", lc.fit)->check(CLI::IsMember({"two-point", "least-squares"}));
    s_lc->add_option("--transition", lc.transition);
    s_lc->add_option("--out", lc.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (app.get_option("--threads")->count() > 0) common.env_threads = false;

    try {
        if (*s_mf) cmd_mf_scan(mf, common);
        else if (*s_sp) cmd_spectrum(sp, common);
        else if (*s_gp) cmd_gap_extrapolate(gp, common);
        else if (*s_ev) cmd_evolve(ev, common);
        else if (*s_cm) cmd_cmf(cm, common);
        else if (*s_lc) cmd_lce(lc, common);
    } catch (const NumericalError& e) {
        std::cerr << "qcp: numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "qcp: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "qcp: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "qcp: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
