// Command-line front end: index, analyze, simulate, exact, channel, scan, fit, sweep, fixture.
#include "wipmf/channels.hpp"
#include "wipmf/exact.hpp"
#include "wipmf/experiments.hpp"
#include "wipmf/fixtures.hpp"
#include "wipmf/meanfield.hpp"
#include "wipmf/model_io.hpp"
#include "wipmf/simulate.hpp"
#include "wipmf/whittle.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace wipmf;
using nlohmann::json;

namespace {

struct Sorted {
    BanditModel model;      // states in decreasing index order
    std::vector<int> order; // sorted position k holds original state order[k]
    IndexResult indices;
    double tau = 1.0; // uniformization rate when the file held an async model
};

// Sorted synchronous view of a model file; async models are uniformized.
Sorted sorted_sync(const ModelFile& f, bool tie_break) {
    Sorted s;
    BanditModel m;
    if (f.is_async()) {
        const auto u = uniformize(std::get<AsyncBanditModel>(f.model));
        m = u.model;
        s.tau = u.tau;
    } else {
        m = std::get<BanditModel>(f.model);
    }
    s.indices = compute_indices(m);
    if (!s.indices.indexable) throw Error("model is not indexable: " + s.indices.diagnosis);
    if (!s.indices.strict && !tie_break)
        throw Error("two states share a Whittle index; pass --tie-break to break ties by state id");
    s.order = s.indices.order;
    s.model = permute_states(m, s.order);
    return s;
}

double resolve_alpha(const ModelFile& f, const std::optional<double>& cli) {
    if (cli) return *cli;
    if (f.alpha) return *f.alpha;
    throw Error("no activation ratio: pass --alpha or set \"alpha\" in the model file");
}

Vector unsort(const Vector& v, const std::vector<int>& order) {
    Vector out(v.size());
    for (std::size_t k = 0; k < order.size(); ++k) out(order[k]) = v(k);
    return out;
}

Vector sort_vec(const Vector& v, const std::vector<int>& order) {
    Vector out(v.size());
    for (std::size_t k = 0; k < order.size(); ++k) out(k) = v(order[k]);
    return out;
}

json one_based(const std::vector<int>& v) {
    json j = json::array();
    for (int x : v) j.push_back(x + 1);
    return j;
}

json complex_json(const std::vector<std::complex<double>>& ev) {
    json j = json::array();
    for (const auto& e : ev) j.push_back({e.real(), e.imag()});
    return j;
}

std::vector<std::int64_t> parse_n_list(const std::string& s) {
    std::vector<std::int64_t> out;
    if (s.find(':') != std::string::npos) {
        std::int64_t a = 0, b = 0, step = 1;
        char c1 = 0, c2 = 0;
        std::istringstream in(s);
        in >> a >> c1 >> b >> c2 >> step;
        if (!in || c1 != ':' || c2 != ':' || step <= 0 || a <= 0 || b < a) throw Error("bad range '" + s + "', want a:b:step");
        for (std::int64_t n = a; n <= b; n += step) out.push_back(n);
        return out;
    }
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoll(tok));
    if (out.empty()) throw Error("empty N list");
    return out;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

Exec exec_of(bool serial) { return serial ? Exec::serial : Exec::parallel; }

int cmd_index(const std::string& path, bool grid_check, double tol, bool serial) {
    const auto f = load_model(path);
    IndexResult r;
    BanditModel sync;
    if (f.is_async()) {
        r = async_indices(std::get<AsyncBanditModel>(f.model));
        sync = uniformize(std::get<AsyncBanditModel>(f.model)).model;
    } else {
        sync = std::get<BanditModel>(f.model);
        r = compute_indices(sync, tol);
    }
    json j{{"indexable", r.indexable}, {"strict", r.strict}, {"method", r.method}};
    if (r.indexable) {
        j["indices"] = vector_json(r.indices);
        j["order"] = one_based(r.order);
    } else {
        j["diagnosis"] = r.diagnosis;
    }
    if (grid_check) {
        const auto grid = default_oracle_grid(sync);
        const auto o = oracle_indices(sync, grid, exec_of(serial));
        json b = json::array();
        bool agree = o.indexable == r.indexable;
        const double scale = f.is_async() ? uniformize(std::get<AsyncBanditModel>(f.model)).tau : 1.0;
        for (std::size_t i = 0; i < o.brackets.size(); ++i) {
            b.push_back({o.brackets[i].lower / scale, o.brackets[i].upper / scale});
            if (r.indexable && o.indexable) agree &= o.brackets[i].contains(r.indices(i) * scale);
        }
        j["grid_check"] = {{"indexable", o.indexable}, {"brackets", b}, {"agrees", agree}, {"points", grid.size()}};
        if (!o.indexable) j["grid_check"]["diagnosis"] = o.diagnosis;
    }
    print_json(j);
    return 0;
}

int cmd_analyze(const std::string& path, std::optional<double> alpha_opt, std::size_t starts, std::size_t tmax,
                std::uint64_t seed, const std::string& trace, const std::string& trace_out, std::size_t trace_steps,
                bool tie_break, bool serial) {
    const auto f = load_model(path);
    const double alpha = resolve_alpha(f, alpha_opt);
    const auto s = sorted_sync(f, tie_break);
    const Instance inst{s.model, alpha};
    const auto map = build_map(inst);
    auto fp = fixed_point(map);
    AttractorOptions opt;
    opt.n_starts = starts;
    opt.t_max = tmax;
    opt.seed = seed;
    const auto v = detect_attractor(map, fp.m_star, opt, exec_of(serial));
    const double rel = relaxed_bound_lp(inst).rel1;
    json cyc = json::array();
    for (const auto& p : v.cycle_points) cyc.push_back(vector_json(unsort(p, s.order)));
    json j{{"alpha", alpha},
           {"m_star", vector_json(unsort(fp.m_star, s.order))},
           {"zone_state", s.order[fp.zone] + 1},
           {"zone_rank", fp.zone + 1},
           {"theta", fp.theta},
           {"singular", fp.singular},
           {"boundary_gap", fp.boundary_gap},
           {"eigenvalues", complex_json(fp.eigenvalues)},
           {"locally_stable", fp.locally_stable},
           {"rho_m_star", fp.rho / s.tau},
           {"rel1", rel / s.tau},
           {"lipschitz", lipschitz_constant(map)},
           {"attractor",
            {{"kind", to_string(v.kind)},
             {"period", v.period},
             {"cycle_points", cyc},
             {"max_hitting_time", v.max_hitting_time},
             {"n_starts", v.n_starts},
             {"n_converged", v.n_converged}}}};
    if (f.is_async()) j["tau"] = s.tau;
    print_json(j);
    if (!trace.empty()) {
        std::ifstream in(trace);
        if (!in) throw Error("cannot open " + trace);
        const json m0j = json::parse(in);
        Vector m0(m0j.size());
        for (std::size_t i = 0; i < m0j.size(); ++i) m0(i) = m0j[i].get<double>();
        if (m0.size() != s.model.d() || !is_configuration(m0)) throw Error("trace start is not a point of the simplex");
        const Vector start = sort_vec(m0, s.order);
        const Trajectory tr = f.is_async() ? ode_trajectory(map, s.tau, start, double(trace_steps), 0.01)
                                           : iterate_map(map, start, trace_steps);
        std::ofstream out(trace_out);
        if (!out) throw Error("cannot write " + trace_out);
        out << "t";
        for (int i = 0; i < s.model.d(); ++i) out << ",m_" << i + 1;
        out << ",rho\n";
        for (std::size_t k = 0; k < tr.points.size(); ++k) {
            const Vector m = unsort(tr.points[k], s.order);
            out << tr.times[k];
            for (int i = 0; i < m.size(); ++i) out << fmt::format(",{:.12g}", m(i));
            out << fmt::format(",{:.12g}\n", reward_rate(map, tr.points[k]) / s.tau);
        }
    }
    return 0;
}

int cmd_simulate(const std::string& path, std::optional<double> alpha_opt, const std::string& Ns,
                 std::size_t horizon, std::size_t burnin, std::uint64_t seed, const std::string& mode_s, bool async,
                 bool tie_break) {
    const auto f = load_model(path);
    const double alpha = resolve_alpha(f, alpha_opt);
    const auto mode = parse_mode(mode_s);
    std::cout << "N,mode,mean,half_width,seed\n";
    if (async) {
        if (mode != ActivationMode::exact) throw Error("the asynchronous simulator needs an integer budget (mode exact)");
        const AsyncBanditModel q =
            f.is_async() ? std::get<AsyncBanditModel>(f.model) : to_rates(std::get<BanditModel>(f.model));
        const auto r = async_indices(q);
        if (!r.indexable) throw Error("model is not indexable: " + r.diagnosis);
        if (!r.strict && !tie_break) throw Error("two states share a Whittle index; pass --tie-break");
        const auto qs = permute_states(q, r.order);
        for (auto N : parse_n_list(Ns)) {
            const auto e = estimate_wip_async(qs, alpha, N, double(horizon), double(burnin), seed);
            std::cout << fmt::format("{},{},{:.10g},{:.6g},{}\n", N, "async", e.mean, e.half_width, seed);
        }
        return 0;
    }
    if (f.is_async()) throw Error("model file is asynchronous; pass --async");
    const auto s = sorted_sync(f, tie_break);
    for (auto N : parse_n_list(Ns)) {
        const auto e = estimate_wip_sync({s.model, alpha}, N, horizon, burnin, seed, mode);
        std::cout << fmt::format("{},{},{:.10g},{:.6g},{}\n", N, to_string(mode), e.mean, e.half_width, seed);
    }
    return 0;
}

int cmd_exact(const std::string& path, std::optional<double> alpha_opt, int N, const std::string& mode_s,
              const std::string& diff_map, bool tie_break, bool serial) {
    const auto f = load_model(path);
    const double alpha = resolve_alpha(f, alpha_opt);
    const auto mode = parse_mode(mode_s);
    const auto s = sorted_sync(f, tie_break);
    const Instance inst{s.model, alpha};
    const auto sol = solve_exact(inst, N, mode, exec_of(serial));
    const auto w = wip_value_exact(inst, N, mode, exec_of(serial));
    const double rel = relaxed_bound_lp(inst).rel1;
    const auto diffs = action_difference_map(sol);
    std::size_t differ = 0;
    for (const auto& a : diffs) differ += a.distance > 0;
    print_json({{"N", N},
                {"budget", sol.budget},
                {"mode", to_string(mode)},
                {"configurations", sol.space.size()},
                {"gain_opt", sol.gain / N},
                {"gain_wip", w.gain / N},
                {"rel1", rel},
                {"configurations_where_wip_differs", differ},
                {"sweeps", sol.sweeps}});
    if (!diff_map.empty()) {
        std::ofstream out(diff_map);
        if (!out) throw Error("cannot write " + diff_map);
        for (int i = 0; i < s.model.d(); ++i) out << "x_" << i + 1 << ",";
        out << "distance\n";
        for (const auto& a : diffs) {
            std::vector<int> x(a.x.size());
            for (std::size_t k = 0; k < a.x.size(); ++k) x[s.order[k]] = a.x[k];
            for (int v : x) out << v << ",";
            out << a.distance << "\n";
        }
    }
    return 0;
}

int cmd_channel(const ChannelInstance& inst, const std::string& emit) {
    const auto cm = build_channel_model(inst);
    const auto fp = channel_fixed_point(inst, cm);
    print_json({{"states", cm.model.d()},
                {"threshold", {{"class", fp.threshold.k + 1}, {"s", fp.threshold.s}, {"t", fp.threshold.t}}},
                {"theta", fp.theta},
                {"singular", fp.singular},
                {"boundary_gap", fp.boundary_gap},
                {"rel1", fp.rel1},
                {"residual", fp.residual},
                {"index_top", cm.indices(cm.order.front())},
                {"index_threshold", cm.indices(cm.state_id(fp.threshold.k, fp.threshold.s, fp.threshold.t))}});
    if (!emit.empty()) {
        std::ofstream out(emit);
        if (!out) throw Error("cannot write " + emit);
        out << to_json(cm.model, inst.alpha).dump() << "\n";
    }
    return 0;
}

int cmd_scan(int d, std::size_t n, std::uint64_t seed, const std::string& rows, const std::string& out_path,
             bool serial) {
    const auto r = scan(d, n, seed, exec_of(serial), parse_row_sampling(rows));
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw Error("cannot write " + out_path);
        out << "kind,instance,zone,eig_re,eig_im\n";
        for (auto i : r.nonindexable) out << "nonindexable," << i << ",,,\n";
        for (const auto& w : r.unstable)
            out << fmt::format("unstable,{},{},{:.10g},{:.10g}\n", w.instance, w.zone + 1, w.eigenvalue.real(),
                               w.eigenvalue.imag());
    }
    print_json({{"d", r.d},
                {"n_instances", r.n_instances},
                {"seed", r.seed},
                {"rows", to_string(r.rows)},
                {"n_nonindexable", r.n_nonindexable},
                {"n_unstable", r.n_unstable},
                {"n_oracle_fallbacks", r.n_oracle_fallbacks},
                {"violation_rate", r.violation_rate()}});
    return 0;
}

int cmd_fit(const std::string& in_path) {
    std::ifstream in(in_path);
    if (!in) throw Error("cannot open " + in_path);
    std::string line;
    std::getline(in, line);
    std::istringstream hs(line);
    std::vector<std::string> header;
    for (std::string h; std::getline(hs, h, ',');) header.push_back(h);
    const auto col = [&](const std::string& name) {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return static_cast<int>(k);
        throw Error("column '" + name + "' missing from " + in_path);
    };
    const int cN = col("N"), cg = col("subgap");
    std::vector<SubgapPoint> pts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        for (std::string v; std::getline(ls, v, ',');) f.push_back(v);
        if (static_cast<int>(f.size()) <= std::max(cN, cg)) throw Error("short row: " + line);
        pts.push_back({std::stod(f[cN]), std::stod(f[cg])});
    }
    const auto r = fit_rate(pts);
    const auto fj = [](const RateFit& x, const char* coef, const char* rate) {
        json j{{coef, x.coef}, {"r_squared", x.r_squared}, {"points", x.n_points}};
        if (x.rate_reported()) j[rate] = x.rate;
        else j[std::string(rate) + "_unreliable"] = x.rate;
        return j;
    };
    print_json({{"exponential", fj(r.exponential, "b", "c")}, {"power", fj(r.power, "a", "beta")}, {"dropped", r.dropped}});
    return 0;
}

int cmd_sweep(const std::string& path, const std::string& alphas, const std::string& Ns, std::size_t horizon,
              std::size_t burnin, std::uint64_t seed, const std::string& mode_s, const std::string& out_path,
              bool tie_break, bool serial) {
    const auto f = load_model(path);
    if (f.is_async()) throw Error("sweep takes a synchronous model");
    const auto& m = std::get<BanditModel>(f.model);
    const auto r = compute_indices(m);
    if (!r.indexable) throw Error("model is not indexable: " + r.diagnosis);
    if (!r.strict && !tie_break) throw Error("two states share a Whittle index; pass --tie-break");
    SweepOptions opt;
    opt.horizon = horizon;
    opt.burn_in = burnin;
    opt.seed = seed;
    opt.mode = parse_mode(mode_s);
    const auto rows = sweep_alpha(m, parse_doubles(alphas), parse_n_list(Ns), opt, exec_of(serial));
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw Error("cannot write " + out_path);
    }
    std::ostream& out = out_path.empty() ? std::cout : file;
    out << "alpha,N,mean,half_width,rel1,normalized,normalized_half_width,seed\n";
    double worst = 0.0;
    for (const auto& row : rows) {
        out << fmt::format("{},{},{:.10g},{:.6g},{:.10g},{:.10g},{:.6g},{}\n", row.alpha, row.N, row.mean,
                           row.half_width, row.rel1, row.normalized(), row.normalized_hw(), row.seed);
        worst = std::max(worst, row.normalized() - 1.0 - 3.0 * row.normalized_hw());
    }
    if (!out_path.empty())
        print_json({{"rows", rows.size()}, {"out", out_path}, {"max_excess_over_relaxation", std::max(worst, 0.0)}});
    return 0;
}

int cmd_fixture(const std::string& name, std::optional<double> alpha) {
    BanditModel m;
    if (name == "reference") m = fixtures::reference3();
    else if (name == "cycle1") m = fixtures::cycle_example(1);
    else if (name == "cycle2") m = fixtures::cycle_example(2);
    else if (name == "cycle3") m = fixtures::cycle_example(3);
    else if (name == "singular") m = fixtures::singular2();
    else throw Error("unknown fixture '" + name + "' (reference, cycle1, cycle2, cycle3, singular)");
    std::cout << to_json(m, alpha).dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Whittle index policy analysis for restless bandits"};
    app.require_subcommand(1);

    std::string model, trace, trace_out = "trace.csv", Ns = "100", mode = "exact", diff_map, emit, in, out,
                                     alphas = "0.2,0.3,0.4,0.5", fixture, rows = "simplex";
    std::optional<double> alpha;
    bool grid_check = false, tie_break = false, async = false, serial = false;
    double tol = 1e-9;
    std::size_t starts = 1000, tmax = 10000, horizon = 100000, burnin = 1000, trace_steps = 100, n_inst = 100000;
    std::uint64_t seed = 1;
    int N = 10, d = 3;
    ChannelInstance ch;
    ch.classes = {{0.75, 0.2}, {0.8, 0.3}};
    ch.beta = 0.6;

    auto* idx = app.add_subcommand("index", "Whittle indices and indexability");
    idx->add_option("model", model, "model JSON")->required()->check(CLI::ExistingFile);
    idx->add_flag("--grid-check", grid_check, "cross-check against the subsidy-grid oracle");
    idx->add_option("--tol", tol, "index tie tolerance");
    idx->add_flag("--serial", serial, "disable OpenMP");

    auto* an = app.add_subcommand("analyze", "fixed point, spectrum and attractor of the mean-field map");
    an->add_option("model", model)->required()->check(CLI::ExistingFile);
    an->add_option("--alpha", alpha, "activation ratio");
    an->add_option("--starts", starts, "random starts for the attractor test");
    an->add_option("--tmax", tmax, "iterations per start");
    an->add_option("--seed", seed);
    an->add_option("--trace", trace, "JSON array m0; writes a trajectory CSV")->check(CLI::ExistingFile);
    an->add_option("--trace-out", trace_out, "trajectory CSV path");
    an->add_option("--trace-steps", trace_steps, "map iterations (or ODE time for async models)");
    an->add_flag("--tie-break", tie_break, "break index ties by state id");
    an->add_flag("--serial", serial);

    auto* sim = app.add_subcommand("simulate", "simulate N bandits under WIP");
    sim->add_option("model", model)->required()->check(CLI::ExistingFile);
    sim->add_option("--alpha", alpha);
    sim->add_option("--N", Ns, "list n1,n2,... or range a:b:step");
    sim->add_option("--horizon", horizon, "steps (time for --async)");
    sim->add_option("--burnin", burnin, "discarded steps (time for --async)");
    sim->add_option("--seed", seed);
    sim->add_option("--mode", mode, "exact|floor|ceil|continue");
    sim->add_flag("--async", async, "continuous-time simulation");
    sim->add_flag("--tie-break", tie_break);

    auto* ex = app.add_subcommand("exact", "exact optimal and WIP values for small N");
    ex->add_option("model", model)->required()->check(CLI::ExistingFile);
    ex->add_option("--alpha", alpha);
    ex->add_option("--N", N)->required();
    ex->add_option("--mode", mode, "exact|floor|ceil");
    ex->add_option("--diff-map", diff_map, "per-configuration CSV of optimal-vs-WIP distance");
    ex->add_flag("--tie-break", tie_break);
    ex->add_flag("--serial", serial);

    auto* chn = app.add_subcommand("channel", "two-class Gilbert-Elliott channel model");
    chn->add_option("--p1", ch.classes[0].p);
    chn->add_option("--r1", ch.classes[0].r);
    chn->add_option("--p2", ch.classes[1].p);
    chn->add_option("--r2", ch.classes[1].r);
    chn->add_option("--beta", ch.beta);
    chn->add_option("--alpha", ch.alpha);
    chn->add_option("--tstar", ch.t_star);
    chn->add_option("--emit", emit, "write the product model as JSON");

    auto* sc = app.add_subcommand("scan", "random-instance indexability and stability scan");
    sc->add_option("--d", d);
    sc->add_option("--n", n_inst);
    sc->add_option("--seed", seed);
    sc->add_option("--rows", rows, "transition-row sampling: simplex|normalized-uniform");
    sc->add_option("--out", out, "CSV of violating instances");
    sc->add_flag("--serial", serial);

    auto* ft = app.add_subcommand("fit", "exponential and power fits of subgap(N)");
    ft->add_option("--in", in, "CSV with columns N and subgap")->required()->check(CLI::ExistingFile);

    auto* sw = app.add_subcommand("sweep", "normalized WIP performance over alpha and N");
    sw->add_option("model", model)->required()->check(CLI::ExistingFile);
    sw->add_option("--alphas", alphas);
    sw->add_option("--N", Ns);
    sw->add_option("--horizon", horizon);
    sw->add_option("--burnin", burnin);
    sw->add_option("--seed", seed);
    sw->add_option("--mode", mode);
    sw->add_option("--out", out, "CSV path (default stdout)");
    sw->add_flag("--tie-break", tie_break);
    sw->add_flag("--serial", serial);

    auto* fx = app.add_subcommand("fixture", "print a built-in model");
    fx->add_option("name", fixture, "reference|cycle1|cycle2|cycle3|singular")->required();
    fx->add_option("--alpha", alpha);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*idx) return cmd_index(model, grid_check, tol, serial);
        if (*an) return cmd_analyze(model, alpha, starts, tmax, seed, trace, trace_out, trace_steps, tie_break, serial);
        if (*sim) return cmd_simulate(model, alpha, Ns, horizon, burnin, seed, mode, async, tie_break);
        if (*ex) return cmd_exact(model, alpha, N, mode, diff_map, tie_break, serial);
        if (*chn) return cmd_channel(ch, emit);
        if (*sc) return cmd_scan(d, n_inst, seed, rows, out, serial);
        if (*ft) return cmd_fit(in);
        if (*sw) return cmd_sweep(model, alphas, Ns, horizon, burnin, seed, mode, out, tie_break, serial);
        if (*fx) return cmd_fixture(fixture, alpha);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
