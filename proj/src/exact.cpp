#include "wipmf/exact.hpp"
#include "wipmf/lp.hpp"
#include "wipmf/meanfield.hpp"
#include "wipmf/whittle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace wipmf {

RelaxedBound relaxed_bound_lp(const Instance& inst) {
    check_alpha(inst.alpha);
    const BanditModel& m = inst.model;
    const int d = m.d();
    const int nv = 2 * d;
    // d-1 balance rows (one is redundant), activation equality, normalization.
    Matrix A = Matrix::Zero(d + 1, nv);
    Vector b = Vector::Zero(d + 1);
    Vector c(nv);
    for (int i = 0; i < d; ++i)
        for (int a = 0; a < 2; ++a) {
            const int col = 2 * i + a;
            c(col) = m.R(a)(i);
            for (int j = 0; j + 1 < d; ++j) A(j, col) = (i == j ? 1.0 : 0.0) - m.P(a)(i, j);
            if (a == 1) A(d - 1, col) = 1.0;
            A(d, col) = 1.0;
        }
    b(d - 1) = inst.alpha;
    b(d) = 1.0;
    const LpResult lp = lp_maximize(c, A, b);
    if (lp.status != LpStatus::optimal) throw Error("relaxation LP has no optimal solution");
    RelaxedBound rb;
    rb.rel1 = lp.value;
    rb.occupation.resize(d, 2);
    for (int i = 0; i < d; ++i)
        for (int a = 0; a < 2; ++a) rb.occupation(i, a) = lp.x(2 * i + a);
    return rb;
}

RelaxedBound relaxed_bound(const Instance& inst) {
    RelaxedBound rb = relaxed_bound_lp(inst);
    const IndexResult idx = compute_indices(inst.model);
    if (!idx.indexable) return rb;
    const BanditModel sorted = permute_states(inst.model, idx.order);
    const FixedPointReport fp = fixed_point(build_map_presorted(sorted, inst.alpha));
    rb.rho_star = fp.rho;
    if (std::abs(fp.rho - rb.rel1) > 1e-6)
        throw Error(fmt::format("relaxed bound disagreement: LP {:.12g} vs rho(m*) {:.12g}", rb.rel1, fp.rho));
    return rb;
}

double singular_wip_value(int N, double alpha) {
    const double B = std::round(alpha * N);
    double acc = 0.0;
    const double lN = std::lgamma(N + 1.0) - N * std::log(2.0);
    for (int k = 0; k <= N; ++k) {
        const double p = std::exp(lN - std::lgamma(k + 1.0) - std::lgamma(N - k + 1.0));
        acc += p * std::min<double>(k, B);
    }
    return acc / N;
}

namespace {

struct Action {
    std::uint32_t u, w;
    double r;
};

double log_multinomial_pmf(std::span<const int> y, int n, const Matrix& P, int row) {
    double lp = std::lgamma(n + 1.0);
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (y[j] == 0) continue;
        const double p = P(row, static_cast<int>(j));
        if (p <= 0.0) return -std::numeric_limits<double>::infinity();
        lp += y[j] * std::log(p) - std::lgamma(y[j] + 1.0);
    }
    return lp;
}

// Row u: law of sum_i Mult(u_i, P_i) over compositions of |u|.
Matrix group_kernel(const ConfigSpace& S, const Matrix& P, Exec exec) {
    const int n = S.N(), d = S.d();
    std::vector<ConfigSpace> spaces;
    spaces.reserve(n + 1);
    for (int k = 0; k <= n; ++k) spaces.emplace_back(k, d);
    // pmf[i][c] over spaces[c]
    std::vector<std::vector<Vector>> pmf(d, std::vector<Vector>(n + 1));
    for (int i = 0; i < d; ++i)
        for (int c = 0; c <= n; ++c) {
            Vector v(spaces[c].size());
            for (std::size_t k = 0; k < spaces[c].size(); ++k) v(k) = std::exp(log_multinomial_pmf(spaces[c][k], c, P, i));
            pmf[i][c] = std::move(v);
        }
    Matrix K = Matrix::Zero(S.size(), S.size());
    auto row = [&](long u) {
        const auto x = S[u];
        Vector cur = Vector::Ones(1);
        int tot = 0;
        std::vector<int> tmp(d);
        for (int i = 0; i < d; ++i) {
            const int c = x[i];
            if (c == 0) continue;
            const ConfigSpace& from = spaces[tot];
            const ConfigSpace& part = spaces[c];
            const ConfigSpace& to = spaces[tot + c];
            Vector next = Vector::Zero(to.size());
            for (std::size_t a = 0; a < from.size(); ++a) {
                if (cur(a) == 0.0) continue;
                const auto ya = from[a];
                for (std::size_t b = 0; b < part.size(); ++b) {
                    const double q = pmf[i][c](b);
                    if (q == 0.0) continue;
                    const auto yb = part[b];
                    for (int j = 0; j < d; ++j) tmp[j] = ya[j] + yb[j];
                    next(to.index_of(tmp)) += cur(a) * q;
                }
            }
            cur = std::move(next);
            tot += c;
        }
        K.row(u) = cur.transpose();
    };
    const long m = static_cast<long>(S.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
        for (long u = 0; u < m; ++u) row(u);
    } else {
        for (long u = 0; u < m; ++u) row(u);
    }
    return K;
}

struct Kernel {
    ConfigSpace X, U, W;
    std::int64_t budget = 0;
    Matrix A, Bm;
    std::vector<std::uint32_t> sum_idx; // y * |W| + z -> x
    std::vector<std::size_t> act_begin;
    std::vector<Action> acts;
    std::vector<Action> wip;
    std::vector<std::vector<int>> act_u; // active counts per action, aligned with acts
};

Kernel build_kernel(const Instance& inst, int N, ActivationMode mode, Exec exec) {
    if (mode == ActivationMode::continue_)
        throw Error("mode=continue is a randomized-action MDP and is not supported by the exact solver");
    const BanditModel& m = inst.model;
    const int d = m.d();
    const std::size_t need = ConfigSpace::count(N, d);
    if (need > kExactGuard)
        throw Error(fmt::format("configuration space has {} states, above the guard of {} (reduce N or d)", need,
                                kExactGuard));
    Kernel k;
    k.budget = resolve_budget(inst.alpha, N, mode);
    const int B = static_cast<int>(k.budget);
    k.X = ConfigSpace(N, d);
    k.U = ConfigSpace(B, d);
    k.W = ConfigSpace(N - B, d);
    k.A = group_kernel(k.U, m.P1, exec);
    k.Bm = group_kernel(k.W, m.P0, exec);
    const std::size_t nu = k.U.size(), nw = k.W.size();
    k.sum_idx.resize(nu * nw);
    std::vector<int> tmp(d);
    for (std::size_t y = 0; y < nu; ++y)
        for (std::size_t z = 0; z < nw; ++z) {
            for (int j = 0; j < d; ++j) tmp[j] = k.U[y][j] + k.W[z][j];
            k.sum_idx[y * nw + z] = static_cast<std::uint32_t>(k.X.index_of(tmp));
        }
    k.act_begin.resize(k.X.size() + 1);
    std::vector<int> u(d), w(d);
    for (std::size_t xi = 0; xi < k.X.size(); ++xi) {
        k.act_begin[xi] = k.acts.size();
        const auto x = k.X[xi];
        auto rec = [&](auto&& self, int pos, int left) -> void {
            if (pos == d - 1) {
                if (left > x[pos]) return;
                u[pos] = left;
                double r = 0.0;
                for (int j = 0; j < d; ++j) {
                    w[j] = x[j] - u[j];
                    r += u[j] * m.R1(j) + w[j] * m.R0(j);
                }
                k.acts.push_back({static_cast<std::uint32_t>(k.U.index_of(u)),
                                  static_cast<std::uint32_t>(k.W.index_of(w)), r});
                k.act_u.emplace_back(u);
                return;
            }
            for (int v = 0; v <= std::min(left, x[pos]); ++v) {
                u[pos] = v;
                self(self, pos + 1, left - v);
            }
        };
        rec(rec, 0, B);
        Counts xc(x.begin(), x.end());
        const Counts a = wip_activation(xc, k.budget);
        double r = 0.0;
        for (int j = 0; j < d; ++j) {
            u[j] = static_cast<int>(a[j]);
            w[j] = x[j] - u[j];
            r += u[j] * m.R1(j) + w[j] * m.R0(j);
        }
        k.wip.push_back({static_cast<std::uint32_t>(k.U.index_of(u)), static_cast<std::uint32_t>(k.W.index_of(w)), r});
    }
    k.act_begin[k.X.size()] = k.acts.size();
    return k;
}

// EV(u, w) = sum_y A(u,y) sum_z Bm(w,z) h(y+z)
Matrix post_decision_values(const Kernel& k, const Vector& h, Exec exec) {
    const std::size_t nu = k.U.size(), nw = k.W.size();
    Matrix H(nu, nw);
    for (std::size_t y = 0; y < nu; ++y)
        for (std::size_t z = 0; z < nw; ++z) H(y, z) = h(k.sum_idx[y * nw + z]);
    if (exec == Exec::parallel) {
        const Matrix T = H * k.Bm.transpose();
        return k.A * T;
    }
    Matrix T = Matrix::Zero(nu, nw);
    for (std::size_t y = 0; y < nu; ++y)
        for (std::size_t w = 0; w < nw; ++w) {
            double s = 0.0;
            for (std::size_t z = 0; z < nw; ++z) s += k.Bm(w, z) * H(y, z);
            T(y, w) = s;
        }
    Matrix EV = Matrix::Zero(nu, nw);
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t y = 0; y < nu; ++y) {
            const double a = k.A(u, y);
            if (a == 0.0) continue;
            for (std::size_t w = 0; w < nw; ++w) EV(u, w) += a * T(y, w);
        }
    return EV;
}

} // namespace

ExactSolution solve_exact(const Instance& sorted, int N, ActivationMode mode, Exec exec) {
    const Kernel k = build_kernel(sorted, N, mode, exec);
    const long nx = static_cast<long>(k.X.size());
    Vector h = Vector::Zero(nx), next(nx);
    ExactSolution sol;
    sol.N = N;
    sol.budget = k.budget;
    double lo = 0.0, hi = 0.0;
    std::size_t sweep = 0;
    const std::size_t max_sweeps = 100000;
    for (; sweep < max_sweeps; ++sweep) {
        const Matrix EV = post_decision_values(k, h, exec);
        auto update = [&](long x) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = k.act_begin[x]; a < k.act_begin[x + 1]; ++a)
                best = std::max(best, k.acts[a].r + 0.5 * EV(k.acts[a].u, k.acts[a].w));
            next(x) = 0.5 * h(x) + best;
        };
        if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
            for (long x = 0; x < nx; ++x) update(x);
        } else {
            for (long x = 0; x < nx; ++x) update(x);
        }
        const Vector diff = next - h;
        lo = diff.minCoeff();
        hi = diff.maxCoeff();
        h = next.array() - next(0);
        if (hi - lo < 1e-8) break;
    }
    if (sweep == max_sweeps) throw Error("exact value iteration did not converge");
    sol.sweeps = sweep + 1;
    sol.gain = 0.5 * (lo + hi);
    sol.bias = 0.5 * h;
    const Matrix EV = post_decision_values(k, h, exec);
    sol.policy.resize(nx);
    sol.wip_regret.resize(nx);
    for (long x = 0; x < nx; ++x) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = k.act_begin[x];
        for (std::size_t a = k.act_begin[x]; a < k.act_begin[x + 1]; ++a) {
            const double q = k.acts[a].r + 0.5 * EV(k.acts[a].u, k.acts[a].w);
            if (q > best) {
                best = q;
                arg = a;
            }
        }
        sol.policy[x] = k.act_u[arg];
        sol.wip_regret[x] = best - (k.wip[x].r + 0.5 * EV(k.wip[x].u, k.wip[x].w));
    }
    sol.space = k.X;
    return sol;
}

ExactWip wip_value_exact(const Instance& sorted, int N, ActivationMode mode, Exec exec) {
    const Kernel k = build_kernel(sorted, N, mode, exec);
    const std::size_t nx = k.X.size(), nu = k.U.size(), nw = k.W.size();
    Vector mu = Vector::Constant(nx, 1.0 / nx), next(nx);
    ExactWip out;
    const std::size_t max_iter = 1000000;
    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        Matrix Pi = Matrix::Zero(nu, nw);
        for (std::size_t x = 0; x < nx; ++x) Pi(k.wip[x].u, k.wip[x].w) += mu(x);
        Matrix R;
        if (exec == Exec::parallel) {
            R = (k.A.transpose() * Pi) * k.Bm;
        } else {
            Matrix S = Matrix::Zero(nu, nw);
            for (std::size_t u = 0; u < nu; ++u)
                for (std::size_t w = 0; w < nw; ++w) {
                    const double p = Pi(u, w);
                    if (p == 0.0) continue;
                    for (std::size_t y = 0; y < nu; ++y) S(y, w) += k.A(u, y) * p;
                }
            R = Matrix::Zero(nu, nw);
            for (std::size_t y = 0; y < nu; ++y)
                for (std::size_t w = 0; w < nw; ++w) {
                    const double s = S(y, w);
                    if (s == 0.0) continue;
                    for (std::size_t z = 0; z < nw; ++z) R(y, z) += s * k.Bm(w, z);
                }
        }
        next.setZero();
        for (std::size_t y = 0; y < nu; ++y)
            for (std::size_t z = 0; z < nw; ++z) next(k.sum_idx[y * nw + z]) += R(y, z);
        next /= next.sum();
        const double change = (next - mu).cwiseAbs().sum();
        mu.swap(next);
        if (change < 1e-13) break;
    }
    if (it == max_iter) throw Error("WIP chain power iteration did not converge (periodic chain?)");
    out.iterations = it + 1;
    out.stationary = mu;
    for (std::size_t x = 0; x < nx; ++x) out.gain += mu(x) * k.wip[x].r;
    return out;
}

std::vector<ActionDifference> action_difference_map(const ExactSolution& sol) {
    std::vector<ActionDifference> out;
    out.reserve(sol.space.size());
    for (std::size_t x = 0; x < sol.space.size(); ++x) {
        const auto xs = sol.space[x];
        ActionDifference ad;
        ad.x.assign(xs.begin(), xs.end());
        if (sol.wip_regret[x] > 1e-7) {
            const Counts a = wip_activation(Counts(xs.begin(), xs.end()), sol.budget);
            int dist = 0;
            for (std::size_t j = 0; j < xs.size(); ++j) dist += std::abs(sol.policy[x][j] - static_cast<int>(a[j]));
            ad.distance = dist / 2;
        }
        out.push_back(std::move(ad));
    }
    return out;
}

std::vector<ActionDifference> action_difference_map(const Instance& sorted, int N, Exec exec) {
    return action_difference_map(solve_exact(sorted, N, ActivationMode::exact, exec));
}

} // namespace wipmf
