#include "wipmf/experiments.hpp"
#include "wipmf/exact.hpp"
#include "wipmf/meanfield.hpp"
#include "wipmf/whittle.hpp"

#include <fmt/format.h>

#include <cmath>

namespace wipmf {

RowSampling parse_row_sampling(std::string_view s) {
    if (s == "simplex") return RowSampling::simplex;
    if (s == "normalized-uniform") return RowSampling::normalized_uniform;
    throw Error(fmt::format("unknown row sampling '{}' (simplex, normalized-uniform)", s));
}

std::string to_string(RowSampling r) {
    return r == RowSampling::simplex ? "simplex" : "normalized-uniform";
}

BanditModel random_instance(int d, Rng& rng, RowSampling rows) {
    if (d < 2) throw Error("random_instance: d must be >= 2");
    std::exponential_distribution<double> e(1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BanditModel m;
    m.P0.resize(d, d);
    m.P1.resize(d, d);
    for (int a = 0; a < 2; ++a) {
        Matrix& P = a ? m.P1 : m.P0;
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) P(i, j) = rows == RowSampling::simplex ? e(rng) : u(rng);
            P.row(i) /= P.row(i).sum();
        }
    }
    m.R0 = Vector::Zero(d);
    m.R1.resize(d);
    for (int i = 0; i < d; ++i) m.R1(i) = u(rng);
    return m;
}

InstanceVerdict classify_instance(const BanditModel& m) {
    InstanceVerdict v;
    IndexResult idx = compute_indices(m);
    v.indexable = idx.indexable;
    if (!idx.strict) {
        // Near-tie: the greedy verdict is fragile, let the grid scan decide.
        v.used_oracle = true;
        v.indexable = oracle_indices(m, default_oracle_grid(m), Exec::serial).indexable;
    }
    if (!v.indexable) return v;
    const BanditModel sorted = permute_states(m, idx.order);
    const PiecewiseMap map = build_map_presorted(sorted, 0.5);
    for (int s = 0; s < map.d(); ++s) {
        const auto ev = spectrum(map.pieces[s].K);
        if (!stable_spectrum(ev)) {
            v.unstable = true;
            v.witness.zone = s;
            v.witness.eigenvalue = dominant_nonunit(ev);
            break;
        }
    }
    return v;
}

ScanReport scan(int d, std::size_t n_instances, std::uint64_t seed, Exec exec, RowSampling rows) {
    std::vector<InstanceVerdict> verdicts(n_instances);
    const long n = static_cast<long>(n_instances);
    auto one = [&](long k) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(k));
        verdicts[k] = classify_instance(random_instance(d, rng, rows));
        verdicts[k].witness.instance = static_cast<std::size_t>(k);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (long k = 0; k < n; ++k) one(k);
    } else {
        for (long k = 0; k < n; ++k) one(k);
    }
    ScanReport rep;
    rep.d = d;
    rep.n_instances = n_instances;
    rep.seed = seed;
    rep.rows = rows;
    for (long k = 0; k < n; ++k) {
        const auto& v = verdicts[k];
        if (v.used_oracle) ++rep.n_oracle_fallbacks;
        if (!v.indexable) {
            ++rep.n_nonindexable;
            rep.nonindexable.push_back(static_cast<std::size_t>(k));
        } else if (v.unstable) {
            ++rep.n_unstable;
            rep.unstable.push_back(v.witness);
        }
    }
    return rep;
}

namespace {

RateFit least_squares(const std::vector<double>& x, const std::vector<double>& y, const char* name) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    const double ybar = sy / n;
    double ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = icpt + slope * x[i];
        ss_res += (y[i] - f) * (y[i] - f);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    RateFit fit;
    fit.model = name;
    fit.coef = std::exp(icpt);
    fit.rate = -slope;
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.n_points = x.size();
    return fit;
}

} // namespace

RateFits fit_rate(const std::vector<SubgapPoint>& points) {
    std::vector<double> N, logN, logy;
    RateFits out;
    for (const auto& p : points) {
        if (!(p.subgap > 0.0) || !(p.N > 0.0)) {
            ++out.dropped;
            continue;
        }
        N.push_back(p.N);
        logN.push_back(std::log(p.N));
        logy.push_back(std::log(p.subgap));
    }
    if (N.size() < 4) throw Error(fmt::format("fit_rate needs at least 4 positive points, got {}", N.size()));
    out.exponential = least_squares(N, logy, "exponential");
    out.power = least_squares(logN, logy, "power");
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
    Rng rng = make_rng(seed, k);
    return rng();
}

std::vector<SweepRow> sweep_alpha(const BanditModel& model, const std::vector<double>& alphas,
                                  const std::vector<std::int64_t>& Ns, const SweepOptions& opt, Exec exec) {
    const IndexResult idx = compute_indices(model);
    if (!idx.indexable) throw Error("sweep_alpha: model is not indexable: " + idx.diagnosis);
    const BanditModel sorted = permute_states(model, idx.order);
    std::vector<double> rel(alphas.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) rel[a] = relaxed_bound_lp({sorted, alphas[a]}).rel1;
    std::vector<SweepRow> rows(alphas.size() * Ns.size());
    const long n = static_cast<long>(rows.size());
    auto one = [&](long k) {
        const std::size_t a = static_cast<std::size_t>(k) / Ns.size(), j = static_cast<std::size_t>(k) % Ns.size();
        SweepRow& row = rows[k];
        row.alpha = alphas[a];
        row.N = Ns[j];
        row.rel1 = rel[a];
        row.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(k));
        const SimEstimate est =
            estimate_wip_sync({sorted, alphas[a]}, Ns[j], opt.horizon, opt.burn_in, row.seed, opt.mode);
        row.mean = est.mean;
        row.half_width = est.half_width;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long k = 0; k < n; ++k) one(k);
    } else {
        for (long k = 0; k < n; ++k) one(k);
    }
    return rows;
}

} // namespace wipmf
