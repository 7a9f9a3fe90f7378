#include "wipmf/simulate.hpp"
#include "wipmf/meanfield.hpp"
#include "wipmf/whittle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wipmf {

ActivationMode parse_mode(std::string_view s) {
    if (s == "exact") return ActivationMode::exact;
    if (s == "floor") return ActivationMode::floor;
    if (s == "ceil") return ActivationMode::ceil;
    if (s == "continue") return ActivationMode::continue_;
    throw Error(fmt::format("unknown activation mode '{}'", s));
}

std::string to_string(ActivationMode m) {
    switch (m) {
    case ActivationMode::exact: return "exact";
    case ActivationMode::floor: return "floor";
    case ActivationMode::ceil: return "ceil";
    default: return "continue";
    }
}

Counts round_configuration(const Vector& m, std::int64_t N) {
    const int d = static_cast<int>(m.size());
    Counts x(d);
    std::vector<std::pair<double, int>> rem(d);
    std::int64_t used = 0;
    for (int i = 0; i < d; ++i) {
        const double v = std::max(m(i), 0.0) * static_cast<double>(N);
        x[i] = static_cast<std::int64_t>(std::floor(v));
        used += x[i];
        rem[i] = {v - static_cast<double>(x[i]), i};
    }
    std::stable_sort(rem.begin(), rem.end(), [](auto a, auto b) { return a.first > b.first; });
    for (int k = 0; used < N; k = (k + 1) % d, ++used) x[rem[k].second] += 1;
    return x;
}

std::int64_t resolve_budget(double alpha, std::int64_t N, ActivationMode mode, Rng* rng) {
    const double target = alpha * static_cast<double>(N);
    const double r = std::round(target);
    const bool integral = std::abs(target - r) <= 1e-9 * std::max(1.0, target);
    std::int64_t B = 0;
    switch (mode) {
    case ActivationMode::exact:
        if (!integral) throw Error(fmt::format("mode=exact needs integer alpha*N (alpha*N = {:g})", target));
        B = static_cast<std::int64_t>(r);
        break;
    case ActivationMode::floor: B = integral ? static_cast<std::int64_t>(r) : static_cast<std::int64_t>(std::floor(target)); break;
    case ActivationMode::ceil: B = integral ? static_cast<std::int64_t>(r) : static_cast<std::int64_t>(std::ceil(target)); break;
    case ActivationMode::continue_: {
        if (integral) {
            B = static_cast<std::int64_t>(r);
            break;
        }
        if (!rng) throw Error("mode=continue needs a random source");
        const double fl = std::floor(target);
        std::bernoulli_distribution coin(target - fl);
        B = static_cast<std::int64_t>(fl) + (coin(*rng) ? 1 : 0);
        break;
    }
    }
    if (B > N || B < 0) throw Error("activation budget exceeds N");
    return B;
}

Counts wip_activation(const Counts& x, std::int64_t budget) {
    Counts a(x.size(), 0);
    for (std::size_t i = 0; i < x.size() && budget > 0; ++i) {
        a[i] = std::min(x[i], budget);
        budget -= a[i];
    }
    if (budget > 0) throw Error("activation budget exceeds N");
    return a;
}

SyncSystem::SyncSystem(const BanditModel& sorted, double alpha, std::int64_t N, ActivationMode mode)
    : model_(sorted), alpha_(alpha), N_(N), mode_(mode), rows0_(sparse_rows(sorted.P0)), rows1_(sparse_rows(sorted.P1)) {
    check_alpha(alpha);
    if (N < 1) throw Error("N must be positive");
    if (mode != ActivationMode::continue_) resolve_budget(alpha, N, mode);
}

double SyncSystem::step(Counts& x, Rng& rng) const {
    const int d = model_.d();
    const std::int64_t B = resolve_budget(alpha_, N_, mode_, &rng);
    Counts next(d, 0);
    double reward = 0.0;
    std::int64_t left = B;
    for (int i = 0; i < d; ++i) {
        const std::int64_t on = std::min(x[i], left);
        const std::int64_t off = x[i] - on;
        left -= on;
        if (on > 0) {
            reward += static_cast<double>(on) * model_.R1(i);
            add_multinomial(rng, on, rows1_[i], next);
        }
        if (off > 0) {
            reward += static_cast<double>(off) * model_.R0(i);
            add_multinomial(rng, off, rows0_[i], next);
        }
    }
    x.swap(next);
    return reward;
}

StepResult step_sync(const Instance& sorted, const Counts& x, ActivationMode mode, Rng& rng) {
    const std::int64_t N = std::accumulate(x.begin(), x.end(), std::int64_t{0});
    SyncSystem sys(sorted.model, sorted.alpha, N, mode);
    StepResult r;
    r.next = x;
    r.reward = sys.step(r.next, rng);
    return r;
}

namespace {

struct BatchMeans {
    double mean = 0.0, half_width = 0.0;
};

BatchMeans batch_means(const std::vector<double>& batch, double overall) {
    const double k = static_cast<double>(batch.size());
    double ss = 0.0;
    for (double b : batch) ss += (b - overall) * (b - overall);
    const double sd = std::sqrt(ss / (k - 1.0));
    return {overall, kStudent975_19 * sd / std::sqrt(k)};
}

Counts initial_counts(int d, std::int64_t N) {
    return round_configuration(Vector::Constant(d, 1.0 / d), N);
}

} // namespace

SimEstimate estimate_wip_sync(const Instance& sorted, std::int64_t N, std::size_t horizon, std::size_t burn_in,
                              std::uint64_t seed, ActivationMode mode) {
    return estimate_wip_sync(sorted, initial_counts(sorted.model.d(), N), horizon, burn_in, seed, mode);
}

SimEstimate estimate_wip_sync(const Instance& sorted, const Counts& x0, std::size_t horizon, std::size_t burn_in,
                              std::uint64_t seed, ActivationMode mode) {
    const std::int64_t N = std::accumulate(x0.begin(), x0.end(), std::int64_t{0});
    if (static_cast<int>(x0.size()) != sorted.model.d() || N <= 0 ||
        std::any_of(x0.begin(), x0.end(), [](std::int64_t v) { return v < 0; }))
        throw Error("initial configuration is invalid");
    if (horizon <= burn_in) throw Error("horizon must exceed burn-in");
    const std::size_t n = horizon - burn_in;
    const std::size_t per = n / kBatches;
    if (per == 0) throw Error("horizon - burn_in must be at least the number of batches");
    SyncSystem sys(sorted.model, sorted.alpha, N, mode);
    Rng rng = make_rng(seed);
    Counts x = x0;
    for (std::size_t t = 0; t < burn_in; ++t) sys.step(x, rng);
    std::vector<double> batch(kBatches, 0.0);
    double total = 0.0;
    const double invN = 1.0 / static_cast<double>(N);
    for (std::size_t t = 0; t < n; ++t) {
        const double r = sys.step(x, rng) * invN;
        total += r;
        const std::size_t b = t / per;
        if (b < kBatches) batch[b] += r;
    }
    for (double& b : batch) b /= static_cast<double>(per);
    const double used = std::accumulate(batch.begin(), batch.end(), 0.0) / kBatches;
    SimEstimate est;
    est.half_width = batch_means(batch, used).half_width;
    est.mean = total / static_cast<double>(n);
    est.n_steps = horizon;
    est.burn_in = burn_in;
    est.seed = seed;
    est.mode = mode;
    est.N = N;
    return est;
}

std::vector<SimEstimate> replicate_wip_sync(const Instance& sorted, std::int64_t N, std::size_t horizon,
                                            std::size_t burn_in, const std::vector<std::uint64_t>& seeds,
                                            ActivationMode mode, Exec exec) {
    std::vector<SimEstimate> out(seeds.size());
    const long n = static_cast<long>(seeds.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long k = 0; k < n; ++k) out[k] = estimate_wip_sync(sorted, N, horizon, burn_in, seeds[k], mode);
    } else {
        for (long k = 0; k < n; ++k) out[k] = estimate_wip_sync(sorted, N, horizon, burn_in, seeds[k], mode);
    }
    return out;
}

AsyncSystem::AsyncSystem(const AsyncBanditModel& sorted, double alpha, std::int64_t N)
    : model_(sorted), N_(N), budget_(resolve_budget(alpha, N, ActivationMode::exact)) {
    const auto rep = validate(sorted);
    if (!rep.ok()) throw Error("invalid async model: " + rep.violations.front());
}

double AsyncSystem::total_rate(const Counts& x) const {
    const Counts a = wip_activation(x, budget_);
    double L = 0.0;
    for (int i = 0; i < model_.d(); ++i)
        L += static_cast<double>(a[i]) * -model_.Q1(i, i) + static_cast<double>(x[i] - a[i]) * -model_.Q0(i, i);
    return L;
}

double AsyncSystem::reward_rate(const Counts& x) const {
    const Counts a = wip_activation(x, budget_);
    double r = 0.0;
    for (int i = 0; i < model_.d(); ++i)
        r += static_cast<double>(a[i]) * model_.R1(i) + static_cast<double>(x[i] - a[i]) * model_.R0(i);
    return r;
}

double AsyncSystem::step(Counts& x, Rng& rng) const {
    const int d = model_.d();
    const Counts a = wip_activation(x, budget_);
    // Group weights: (state, action) pairs in a fixed order.
    std::vector<double> w(2 * d);
    double L = 0.0;
    for (int i = 0; i < d; ++i) {
        w[2 * i] = static_cast<double>(x[i] - a[i]) * -model_.Q0(i, i);
        w[2 * i + 1] = static_cast<double>(a[i]) * -model_.Q1(i, i);
        L += w[2 * i] + w[2 * i + 1];
    }
    if (!(L > 0.0)) throw Error("degenerate rate matrix (no event can occur)");
    std::exponential_distribution<double> hold(L);
    const double dt = hold(rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double pick = u(rng) * L;
    int g = 0;
    for (; g < 2 * d - 1; ++g) {
        if (pick < w[g]) break;
        pick -= w[g];
    }
    while (w[g] <= 0.0) --g; // guards rounding at the top end
    const int i = g / 2;
    const Matrix& Q = model_.Q(g % 2);
    double out = -Q(i, i);
    double pj = u(rng) * out;
    int j = 0;
    int last = -1;
    for (; j < d; ++j) {
        if (j == i || Q(i, j) <= 0.0) continue;
        last = j;
        if (pj < Q(i, j)) break;
        pj -= Q(i, j);
    }
    if (j == d) j = last;
    x[i] -= 1;
    x[j] += 1;
    return dt;
}

SimEstimate estimate_wip_async(const AsyncBanditModel& sorted, double alpha, std::int64_t N, double t_end,
                               double burn_in, std::uint64_t seed) {
    if (!(t_end > burn_in)) throw Error("t_end must exceed burn-in");
    AsyncSystem sys(sorted, alpha, N);
    Rng rng = make_rng(seed);
    Counts x = initial_counts(sorted.d(), N);
    const double width = (t_end - burn_in) / kBatches;
    std::vector<double> batch(kBatches, 0.0);
    double t = 0.0;
    std::size_t events = 0;
    while (t < t_end) {
        const double rate = sys.reward_rate(x) / static_cast<double>(N);
        const double dt = sys.step(x, rng);
        ++events;
        // Spread the constant reward rate of [t, t+dt) over the batch windows.
        double a = std::max(t, burn_in), b = std::min(t + dt, t_end);
        while (a < b) {
            const int k = std::min(kBatches - 1, static_cast<int>((a - burn_in) / width));
            const double edge = std::min(b, burn_in + (k + 1) * width);
            batch[k] += rate * (edge - a);
            if (edge <= a) break;
            a = edge;
        }
        t += dt;
    }
    for (double& v : batch) v /= width;
    const double overall = std::accumulate(batch.begin(), batch.end(), 0.0) / kBatches;
    SimEstimate est;
    est.mean = overall;
    est.half_width = batch_means(batch, overall).half_width;
    est.n_steps = events;
    est.burn_in = static_cast<std::size_t>(burn_in);
    est.seed = seed;
    est.mode = ActivationMode::exact;
    est.N = N;
    return est;
}

IndexResult async_indices(const AsyncBanditModel& q) {
    const Uniformized u = uniformize(q);
    IndexResult r = compute_indices(u.model);
    r.indices /= u.tau;
    return r;
}

HoeffdingReport hoeffding_diagnostic(const Instance& sorted, std::int64_t N, double delta, std::size_t n_trials,
                                     std::uint64_t seed) {
    const PiecewiseMap map = build_map_presorted(sorted.model, sorted.alpha);
    const FixedPointReport fp = fixed_point(map);
    const Counts x0 = round_configuration(fp.m_star, N);
    Vector m0(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) m0(i) = static_cast<double>(x0[i]) / static_cast<double>(N);
    const Vector mean = evaluate(map, m0);
    SyncSystem sys(sorted.model, sorted.alpha, N, ActivationMode::exact);
    Rng rng = make_rng(seed);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n_trials; ++k) {
        Counts x = x0;
        sys.step(x, rng);
        double dev = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            dev = std::max(dev, std::abs(static_cast<double>(x[i]) / static_cast<double>(N) - mean(i)));
        if (dev >= delta) ++hits;
    }
    HoeffdingReport rep;
    rep.trials = n_trials;
    rep.exceedance = static_cast<double>(hits) / static_cast<double>(n_trials);
    rep.bound = std::exp(-2.0 * static_cast<double>(N) * delta * delta);
    rep.standard_error = std::sqrt(std::max(rep.bound * (1.0 - rep.bound), 1e-300) / static_cast<double>(n_trials));
    rep.respected = rep.exceedance <= rep.bound + 3.0 * rep.standard_error;
    return rep;
}

} // namespace wipmf
