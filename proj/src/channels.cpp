#include "wipmf/channels.hpp"
#include "wipmf/markov.hpp"
#include "wipmf/meanfield.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace wipmf {

void check_channel_class(const ChannelClass& c) {
    if (!(0.0 < c.r && c.r < c.p && c.p < 1.0))
        throw Error(fmt::format("channel class needs 0 < r < p < 1 (p = {:g}, r = {:g})", c.p, c.r));
}

double belief(const ChannelClass& c, int s, int t) {
    if (t < 1) throw Error("belief: t must be >= 1");
    const double rho = std::pow(c.p - c.r, t);
    const double den = 1.0 + c.r - c.p;
    return s == 0 ? (c.r - rho * c.r) / den : (c.r + (1.0 - c.p) * rho) / den;
}

double channel_index(const ChannelClass& c, int s, int t) {
    if (t < 1) throw Error("channel_index: t must be >= 1");
    if (s == 1) return c.r / ((1.0 - c.p) * (1.0 + c.r - c.p) + c.r);
    const double b0 = belief(c, 0, t), b1 = belief(c, 0, t + 1);
    const double g = b0 - b1;
    return (g * (t + 1) + b1) / (1.0 - c.p + g * t + b1);
}

std::vector<double> ChannelInstance::class_weights() const {
    if (classes.size() == 1) return {1.0};
    if (classes.size() == 2) return {beta, 1.0 - beta};
    throw Error("channel instance needs one or two classes");
}

int ChannelModel::state_id(int k, int s, int t) const {
    return k * 2 * t_star + s * t_star + (t - 1);
}

ChannelModel build_channel_model(const ChannelInstance& inst) {
    if (inst.t_star < 1) throw Error("t_star must be >= 1");
    if (inst.classes.size() == 2 && !(inst.beta > 0.0 && inst.beta < 1.0)) throw Error("beta must lie in (0,1)");
    for (const auto& c : inst.classes) check_channel_class(c);
    const int K = static_cast<int>(inst.classes.size());
    const int T = inst.t_star;
    const int n = 2 * K * T;
    ChannelModel cm;
    cm.t_star = T;
    cm.model.P0 = Matrix::Zero(n, n);
    cm.model.P1 = Matrix::Zero(n, n);
    cm.model.R0 = Vector::Zero(n);
    cm.model.R1 = Vector::Zero(n);
    cm.indices.resize(n);
    cm.states.resize(n);
    for (int k = 0; k < K; ++k)
        for (int s = 0; s < 2; ++s)
            for (int t = 1; t <= T; ++t) {
                const int id = cm.state_id(k, s, t);
                const double b = belief(inst.classes[k], s, t);
                cm.states[id] = {k, s, t};
                cm.model.P0(id, cm.state_id(k, s, std::min(t + 1, T))) = 1.0;
                cm.model.P1(id, cm.state_id(k, 1, 1)) += b;
                cm.model.P1(id, cm.state_id(k, 0, 1)) += 1.0 - b;
                cm.model.R1(id) = b;
                cm.indices(id) = channel_index(inst.classes[k], s, t);
            }
    cm.order.resize(n);
    std::iota(cm.order.begin(), cm.order.end(), 0);
    std::stable_sort(cm.order.begin(), cm.order.end(), [&](int a, int b) { return cm.indices(a) > cm.indices(b); });
    return cm;
}

namespace {

struct ClassStat {
    double abar = 0.0;
    Vector m; // over the class block, zero off the recurrent part
};

// Stationary law of one class block under per-state activation probabilities,
// on the states reachable from the two freshly observed states. If that part
// is multichain no active state is recurrent, so the activation rate is 0.
std::optional<ClassStat> class_stat(const ChannelModel& cm, int k, const Vector& act) {
    const int T = cm.t_star, n = 2 * T, base = cm.state_id(k, 0, 1);
    Matrix P(n, n);
    for (int i = 0; i < n; ++i)
        P.row(i) = act(base + i) * cm.model.P1.block(base + i, base, 1, n) +
                   (1.0 - act(base + i)) * cm.model.P0.block(base + i, base, 1, n);
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0, T}, reach;
    seen[0] = seen[T] = 1;
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        reach.push_back(i);
        for (int j = 0; j < n; ++j)
            if (P(i, j) > 0.0 && !seen[j]) {
                seen[j] = 1;
                stack.push_back(j);
            }
    }
    std::sort(reach.begin(), reach.end());
    const int r = static_cast<int>(reach.size());
    Matrix Pr(r, r);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) Pr(a, b) = P(reach[a], reach[b]);
    ClassStat st;
    st.m = Vector::Zero(n);
    try {
        const Vector pi = stationary_distribution(Pr);
        for (int a = 0; a < r; ++a) {
            st.m(reach[a]) = pi(a);
            st.abar += pi(a) * act(base + reach[a]);
        }
    } catch (const Error&) {
        return std::nullopt;
    }
    return st;
}

Vector activation(const ChannelModel& cm, int q, double theta) {
    Vector act = Vector::Zero(cm.model.d());
    for (int j = 0; j < q; ++j) act(cm.order[j]) = 1.0;
    if (q < cm.model.d()) act(cm.order[q]) = theta;
    return act;
}

double total_abar(const ChannelModel& cm, const std::vector<double>& w, int q, double theta, Vector* m = nullptr) {
    double a = 0.0;
    const int n = 2 * cm.t_star;
    if (m) *m = Vector::Zero(cm.model.d());
    const Vector act = activation(cm, q, theta);
    for (std::size_t k = 0; k < w.size(); ++k) {
        const auto st = class_stat(cm, static_cast<int>(k), act);
        if (!st) {
            if (m) throw Error("channel fixed point: multichain class at the threshold");
            continue;
        }
        a += w[k] * st->abar;
        if (m) m->segment(static_cast<int>(k) * n, n) = w[k] * st->m;
    }
    return a;
}

} // namespace

ChannelFixedPoint channel_fixed_point(const ChannelInstance& inst, const ChannelModel& cm) {
    check_alpha(inst.alpha);
    const auto w = inst.class_weights();
    const int n = cm.model.d();
    int q = -1;
    for (int j = 0; j < n; ++j) {
        if (total_abar(cm, w, j + 1, 0.0) > inst.alpha) {
            q = j;
            break;
        }
    }
    if (q < 0) throw Error("activation budget exceeds the activation rate of the all-active policy");
    // abar(q, theta) increases from abar(q, 0) <= alpha to abar(q+1, 0) > alpha.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (total_abar(cm, w, q, mid) <= inst.alpha ? lo : hi) = mid;
    }
    ChannelFixedPoint fp;
    fp.theta = 0.5 * (lo + hi);
    fp.threshold = cm.states[cm.order[q]];
    total_abar(cm, w, q, fp.theta, &fp.m_star);
    const BanditModel sorted = permute_states(cm.model, cm.order);
    Vector ms(n);
    for (int j = 0; j < n; ++j) ms(j) = fp.m_star(cm.order[j]);
    const PiecewiseMap map = build_map_presorted(sorted, inst.alpha);
    fp.residual = (evaluate(map, ms) - ms).cwiseAbs().maxCoeff();
    fp.boundary_gap = boundary_gap(ms, inst.alpha);
    fp.singular = fp.boundary_gap < kSingularTol;
    fp.rel1 = reward_rate(map, ms);
    return fp;
}

} // namespace wipmf
