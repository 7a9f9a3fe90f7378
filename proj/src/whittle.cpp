#include "wipmf/whittle.hpp"
#include "wipmf/markov.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wipmf {

SubsidySolution solve_subsidized(const BanditModel& m, double nu, const SubsidyOptions& opt) {
    const int d = m.d();
    // h2 is the bias of the lazy chain, equal to twice the original bias.
    Vector h2 = opt.warm_start ? Vector(2.0 * *opt.warm_start) : Vector::Zero(d);
    Vector next(d);
    SubsidySolution sol;
    double lo = 0.0, hi = 0.0;
    std::size_t it = 0;
    for (; it < opt.max_iter; ++it) {
        const Vector e1 = m.P1 * h2;
        const Vector e0 = m.P0 * h2;
        for (int i = 0; i < d; ++i) {
            const double q1 = m.R1(i) + 0.5 * e1(i);
            const double q0 = m.R0(i) + nu + 0.5 * e0(i);
            next(i) = 0.5 * h2(i) + std::max(q0, q1);
        }
        const Vector diff = next - h2;
        lo = diff.minCoeff();
        hi = diff.maxCoeff();
        h2 = next.array() - next(0);
        if (hi - lo < opt.span_tol) break;
    }
    if (it == opt.max_iter) throw Error("periodic or ill-conditioned model (relative value iteration did not converge)");
    sol.iterations = it + 1;
    sol.gain = 0.5 * (lo + hi);
    sol.bias = 0.5 * h2;
    const Vector e1 = m.P1 * sol.bias;
    const Vector e0 = m.P0 * sol.bias;
    for (int i = 0; i < d; ++i) {
        const double q1 = m.R1(i) + e1(i);
        const double q0 = m.R0(i) + nu + e0(i);
        if (q0 >= q1 - opt.tie_tol) sol.passive_set.push_back(i);
    }
    return sol;
}

double bellman_residual(const BanditModel& m, double nu, double gain, const Vector& bias) {
    const Vector e1 = m.R1 + m.P1 * bias;
    const Vector e0 = (m.R0.array() + nu).matrix() + m.P0 * bias;
    return (e1.cwiseMax(e0) - bias - Vector::Constant(m.d(), gain)).cwiseAbs().maxCoeff();
}

std::vector<int> order_by_index(const Vector& nu) {
    std::vector<int> order(nu.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return nu(a) > nu(b); });
    return order;
}

bool is_sorted_by_index(const Vector& nu, double tol) {
    for (int i = 1; i < nu.size(); ++i)
        if (nu(i) > nu(i - 1) + tol) return false;
    return true;
}

PolicyValue evaluate_active_set(const BanditModel& m, const std::vector<char>& active) {
    const int d = m.d();
    Matrix P(d, d);
    Vector r(d);
    for (int i = 0; i < d; ++i) {
        P.row(i) = active[i] ? m.P1.row(i) : m.P0.row(i);
        r(i) = active[i] ? m.R1(i) : m.R0(i);
    }
    PolicyValue v;
    v.stationary = stationary_distribution(P);
    v.gain = v.stationary.dot(r);
    for (int i = 0; i < d; ++i)
        if (active[i]) v.abar += v.stationary(i);
    return v;
}

ThresholdPolicyStat threshold_stat(const BanditModel& m, int s, double theta) {
    const int d = m.d();
    if (s < 0 || s >= d) throw Error("threshold_stat: s out of range");
    if (!(theta >= 0.0 && theta < 1.0)) throw Error("threshold_stat: theta must lie in [0,1)");
    Matrix P(d, d);
    for (int i = 0; i < d; ++i) {
        if (i < s) P.row(i) = m.P1.row(i);
        else if (i > s) P.row(i) = m.P0.row(i);
        else P.row(i) = theta * m.P1.row(i) + (1.0 - theta) * m.P0.row(i);
    }
    ThresholdPolicyStat st;
    st.s = s;
    st.theta = theta;
    st.stationary = stationary_distribution(P);
    st.abar = st.stationary.head(s).sum() + theta * st.stationary(s);
    return st;
}

bool is_restful(const BanditModel& m) {
    return m.P0 == Matrix::Identity(m.d(), m.d());
}

Vector restful_indices(const BanditModel& m) {
    const int d = m.d();
    const double c = m.R0(0);
    for (int i = 1; i < d; ++i)
        if (m.R0(i) != c) throw Error("restful arm with state-dependent passive reward is not supported");
    Vector G = Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
    std::vector<int> cont; // continuation set: states already ranked
    std::vector<char> ranked(d, 0);
    for (int step = 0; step < d; ++step) {
        const int k = static_cast<int>(cont.size());
        Vector v = Vector::Zero(k), w = Vector::Zero(k);
        if (k > 0) {
            Matrix A(k, k);
            Vector rc(k);
            for (int a = 0; a < k; ++a) {
                rc(a) = m.R1(cont[a]);
                for (int b = 0; b < k; ++b) A(a, b) = (a == b ? 1.0 : 0.0) - m.P1(cont[a], cont[b]);
            }
            Eigen::PartialPivLU<Matrix> lu(A);
            v = lu.solve(rc);
            w = lu.solve(Vector::Ones(k));
        }
        int best = -1;
        double best_ratio = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < d; ++j) {
            if (ranked[j]) continue;
            double num = m.R1(j), den = 1.0;
            for (int a = 0; a < k; ++a) {
                num += m.P1(j, cont[a]) * v(a);
                den += m.P1(j, cont[a]) * w(a);
            }
            const double ratio = num / den;
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best = j;
            }
        }
        G(best) = best_ratio;
        ranked[best] = 1;
        cont.push_back(best);
    }
    return (G.array() - c).matrix();
}

namespace {

void finish(IndexResult& res, double tol) {
    res.order = order_by_index(res.indices);
    res.strict = true;
    for (std::size_t k = 1; k < res.order.size(); ++k)
        if (res.indices(res.order[k - 1]) - res.indices(res.order[k]) <= tol) res.strict = false;
}

// Is "activate exactly the states in `active`" optimal for the subsidy-nu problem?
bool policy_optimal(const BanditModel& m, const std::vector<char>& active, double nu, double tol) {
    const int d = m.d();
    Matrix P(d, d);
    Vector r(d);
    for (int i = 0; i < d; ++i) {
        P.row(i) = active[i] ? m.P1.row(i) : m.P0.row(i);
        r(i) = active[i] ? m.R1(i) : m.R0(i) + nu;
    }
    const MarkovReward mr = evaluate_chain(P, r);
    const double scale = 1.0 + std::max(m.R0.cwiseAbs().maxCoeff(), m.R1.cwiseAbs().maxCoeff()) + std::abs(nu);
    return bellman_residual(m, nu, mr.gain, mr.bias) <= tol * scale;
}

} // namespace

IndexResult compute_indices(const BanditModel& m, double tol) {
    const auto rep = validate(m);
    if (!rep.ok()) throw Error("invalid model: " + rep.violations.front());
    const int d = m.d();
    IndexResult res;
    if (is_restful(m)) {
        res.method = "gittins";
        res.indices = restful_indices(m);
        res.indexable = true;
        finish(res, tol);
        return res;
    }
    res.method = "greedy";
    res.indices = Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> active(d, 0);
    std::vector<int> seq;
    try {
        PolicyValue cur = evaluate_active_set(m, active);
        for (int k = 0; k < d; ++k) {
            int best = -1;
            double best_rate = -std::numeric_limits<double>::infinity();
            PolicyValue best_val;
            bool degenerate = false;
            for (int j = 0; j < d; ++j) {
                if (active[j]) continue;
                active[j] = 1;
                PolicyValue v = evaluate_active_set(m, active);
                active[j] = 0;
                const double gap = v.abar - cur.abar;
                if (!(gap > 1e-12)) {
                    degenerate = true;
                    continue;
                }
                const double rate = (v.gain - cur.gain) / gap;
                if (rate > best_rate) {
                    best_rate = rate;
                    best = j;
                    best_val = std::move(v);
                }
            }
            if (best < 0) {
                res.diagnosis = degenerate ? "degenerate activation fraction" : "no admissible candidate";
                finish(res, tol);
                return res;
            }
            res.indices(best) = best_rate;
            active[best] = 1;
            seq.push_back(best);
            cur = std::move(best_val);
        }
    } catch (const Error& e) {
        res.diagnosis = std::string("threshold policy is multichain: ") + e.what();
        res.indices = res.indices.unaryExpr([](double x) { return std::isnan(x) ? 0.0 : x; });
        finish(res, tol);
        return res;
    }
    finish(res, tol);
    for (int k = 1; k < d; ++k) {
        if (res.indices(seq[k]) > res.indices(seq[k - 1]) + tol) {
            res.diagnosis = fmt::format("index sequence increases at step {} ({:.12g} after {:.12g})", k + 1,
                                        res.indices(seq[k]), res.indices(seq[k - 1]));
            return res;
        }
    }
    // Top-k activation must be optimal on [nu_{k+1}, nu_k]; gamma is convex and
    // piecewise affine, so checking both endpoints covers the interval.
    std::vector<char> top(d, 0);
    try {
        for (int k = 0; k <= d; ++k) {
            if (k > 0) top[seq[k - 1]] = 1;
            const bool ok_hi = k == 0 || policy_optimal(m, top, res.indices(seq[k - 1]), tol);
            const bool ok_lo = k == d || policy_optimal(m, top, res.indices(seq[k]), tol);
            if (!ok_hi || !ok_lo) {
                res.diagnosis = fmt::format("activating the top {} states is not optimal at subsidy {:.12g}", k,
                                            ok_hi ? res.indices(seq[k]) : res.indices(seq[k - 1]));
                return res;
            }
        }
    } catch (const Error& e) {
        res.diagnosis = std::string("certification failed: ") + e.what();
        return res;
    }
    res.indexable = true;
    return res;
}

std::vector<double> default_oracle_grid(const BanditModel& m) {
    const double lo = std::min(m.R0.minCoeff(), m.R1.minCoeff());
    const double hi = std::max(m.R0.maxCoeff(), m.R1.maxCoeff());
    const double step = hi > lo ? (hi - lo) / 1e4 : 1e-4;
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo + 2.0) / step));
    grid.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) grid.push_back(lo - 1.0 + static_cast<double>(k) * step);
    return grid;
}

OracleResult oracle_indices(const BanditModel& m, const std::vector<double>& grid, Exec exec) {
    const int d = m.d();
    const long n = static_cast<long>(grid.size());
    std::vector<std::vector<char>> passive(n, std::vector<char>(d, 0));
    auto solve_one = [&](long k) {
        const auto sol = solve_subsidized(m, grid[k]);
        for (int i : sol.passive_set) passive[k][i] = 1;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long k = 0; k < n; ++k) solve_one(k);
    } else {
        for (long k = 0; k < n; ++k) solve_one(k);
    }
    OracleResult res;
    res.brackets.assign(d, IndexBracket{});
    for (long k = 0; k < n; ++k) {
        for (int i = 0; i < d; ++i) {
            if (k > 0 && passive[k - 1][i] && !passive[k][i] && res.indexable) {
                res.indexable = false;
                res.diagnosis = fmt::format("passive set not nested: state {} leaves it between nu={:.12g} and nu={:.12g}",
                                            i + 1, grid[k - 1], grid[k]);
            }
            if (passive[k][i]) res.brackets[i].upper = std::min(res.brackets[i].upper, grid[k]);
            else res.brackets[i].lower = std::max(res.brackets[i].lower, grid[k]);
        }
    }
    return res;
}

} // namespace wipmf
