#include "wipmf/meanfield.hpp"
#include "wipmf/whittle.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>

namespace wipmf {

PiecewiseMap build_map_presorted(const BanditModel& m, double alpha) {
    check_alpha(alpha);
    const int d = m.d();
    PiecewiseMap map;
    map.alpha = alpha;
    map.pieces.resize(d);
    for (int s = 0; s < d; ++s) {
        AffinePiece& p = map.pieces[s];
        p.K.resize(d, d);
        p.c.resize(d);
        for (int j = 0; j < d; ++j) {
            if (j < s) {
                p.K.row(j) = m.P1.row(j) - m.P1.row(s) + m.P0.row(s);
                p.c(j) = m.R1(j) - m.R1(s) + m.R0(s);
            } else {
                p.K.row(j) = m.P0.row(j);
                p.c(j) = m.R0(j);
            }
        }
        p.b = alpha * (m.P1.row(s) - m.P0.row(s)).transpose();
        p.e = alpha * (m.R1(s) - m.R0(s));
    }
    return map;
}

PiecewiseMap build_map(const Instance& inst) {
    const IndexResult idx = compute_indices(inst.model);
    if (!idx.indexable) throw Error("model is not indexable: " + idx.diagnosis);
    if (!is_sorted_by_index(idx.indices, 1e-9))
        throw Error("states are not sorted by decreasing Whittle index; permute the model first");
    return build_map_presorted(inst.model, inst.alpha);
}

Vector evaluate_piece(const PiecewiseMap& map, int zone, const Vector& m) {
    const AffinePiece& p = map.pieces[zone];
    return p.K.transpose() * m + p.b;
}

Vector evaluate(const PiecewiseMap& map, const Vector& m) {
    return evaluate_piece(map, zone_of(m, map.alpha), m);
}

Vector drift(const PiecewiseMap& map, double tau, const Vector& m) {
    return tau * (evaluate(map, m) - m);
}

double reward_rate(const PiecewiseMap& map, const Vector& m) {
    const AffinePiece& p = map.pieces[zone_of(m, map.alpha)];
    return p.c.dot(m) + p.e;
}

double reward_rate(const Instance& sorted, const Vector& m) {
    const BanditModel& b = sorted.model;
    const int s = zone_of(m, sorted.alpha);
    const double below = m.head(s).sum();
    double rho = b.R1.head(s).dot(m.head(s)) + (sorted.alpha - below) * b.R1(s) +
                 (below + m(s) - sorted.alpha) * b.R0(s);
    for (int j = s + 1; j < b.d(); ++j) rho += m(j) * b.R0(j);
    return rho;
}

double lipschitz_constant(const PiecewiseMap& map) {
    double L = 0.0;
    for (const auto& p : map.pieces) L = std::max(L, p.K.cwiseAbs().colwise().sum().maxCoeff());
    return L;
}

double boundary_gap(const Vector& m, double alpha) {
    double acc = 0.0, gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < m.size(); ++i) {
        acc += m(i);
        gap = std::min(gap, std::abs(acc - alpha));
    }
    return gap;
}

std::string to_string(AttractorKind k) {
    switch (k) {
    case AttractorKind::fixed_point: return "fixed_point";
    case AttractorKind::cycle: return "cycle";
    default: return "inconclusive";
    }
}

std::vector<std::complex<double>> spectrum(const Matrix& K) {
    Eigen::EigenSolver<Matrix> es(K, false);
    std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + K.rows());
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return ev;
}

namespace {

std::size_t unit_position(const std::vector<std::complex<double>>& ev) {
    std::size_t u = 0;
    for (std::size_t k = 1; k < ev.size(); ++k)
        if (std::abs(ev[k] - 1.0) < std::abs(ev[u] - 1.0)) u = k;
    return u;
}

} // namespace

bool stable_spectrum(const std::vector<std::complex<double>>& ev, double margin) {
    const std::size_t u = unit_position(ev);
    for (std::size_t k = 0; k < ev.size(); ++k)
        if (k != u && !(std::abs(ev[k]) < 1.0 - margin)) return false;
    return true;
}

std::complex<double> dominant_nonunit(const std::vector<std::complex<double>>& ev) {
    const std::size_t u = unit_position(ev);
    std::complex<double> best = 0.0;
    for (std::size_t k = 0; k < ev.size(); ++k)
        if (k != u && std::abs(ev[k]) > std::abs(best)) best = ev[k];
    return best;
}

FixedPointReport fixed_point(const PiecewiseMap& map) {
    const int d = map.d();
    const double alpha = map.alpha;
    std::vector<Vector> found;
    for (int s = 0; s < d; ++s) {
        // m (I - K_s) = b_s, transposed, last equation replaced by sum(m) = 1.
        Matrix A = Matrix::Identity(d, d) - map.pieces[s].K.transpose();
        Vector rhs = map.pieces[s].b;
        A.row(d - 1).setOnes();
        rhs(d - 1) = 1.0;
        Eigen::FullPivLU<Matrix> lu(A);
        lu.setThreshold(1e-12);
        if (!lu.isInvertible()) continue;
        const Vector m = lu.solve(rhs);
        if (m.minCoeff() < -1e-9) continue;
        const double below = m.head(s).sum();
        if (below > alpha + 1e-9 || below + m(s) < alpha - 1e-9) continue;
        const Vector mc = clamp_configuration(m) / clamp_configuration(m).sum();
        if ((evaluate(map, mc) - mc).cwiseAbs().maxCoeff() > 1e-9) continue;
        bool dup = false;
        for (const auto& f : found) dup = dup || (f - mc).cwiseAbs().maxCoeff() <= 1e-9;
        if (!dup) found.push_back(mc);
    }
    if (found.size() != 1)
        throw Error(fmt::format("fixed-point uniqueness violated ({} self-consistent zones)", found.size()));
    FixedPointReport rep;
    rep.m_star = found.front();
    rep.zone = zone_of(rep.m_star, alpha);
    const double below = rep.m_star.head(rep.zone).sum();
    rep.theta = rep.m_star(rep.zone) > 0.0 ? (alpha - below) / rep.m_star(rep.zone) : 0.0;
    rep.boundary_gap = boundary_gap(rep.m_star, alpha);
    rep.singular = rep.boundary_gap < kSingularTol;
    rep.eigenvalues = spectrum(map.pieces[rep.zone].K);
    rep.locally_stable = stable_spectrum(rep.eigenvalues);
    rep.rho = reward_rate(map, rep.m_star);
    return rep;
}

namespace {

struct StartOutcome {
    bool converged = false;
    std::size_t hitting_time = 0;
    int period = 0; // 0: none found
    std::vector<Vector> cycle;
};

StartOutcome run_start(const PiecewiseMap& map, const Vector& m_star, const AttractorOptions& opt, std::size_t k) {
    Rng rng = make_rng(opt.seed, k);
    Vector x = random_simplex_point(map.d(), rng);
    StartOutcome out;
    std::size_t streak = 0, entered = 0;
    const std::size_t keep = 2 * static_cast<std::size_t>(opt.max_period) + 1;
    std::deque<Vector> tail;
    for (std::size_t t = 0; t <= opt.t_max; ++t) {
        if ((x - m_star).cwiseAbs().maxCoeff() <= opt.eps) {
            if (streak == 0) entered = t;
            if (++streak >= opt.stay) {
                out.converged = true;
                out.hitting_time = entered;
                return out;
            }
        } else {
            streak = 0;
        }
        tail.push_back(x);
        if (tail.size() > keep) tail.pop_front();
        if (t < opt.t_max) x = evaluate(map, x);
    }
    const std::size_t n = tail.size();
    for (int p = 1; p <= opt.max_period && 2 * static_cast<std::size_t>(p) <= n; ++p) {
        bool ok = true;
        for (int j = 0; j < p && ok; ++j)
            ok = (tail[n - 1 - j] - tail[n - 1 - j - p]).cwiseAbs().maxCoeff() <= opt.eps;
        if (ok) {
            out.period = p;
            for (int j = p - 1; j >= 0; --j) out.cycle.push_back(tail[n - 1 - j]);
            break;
        }
    }
    return out;
}

} // namespace

AttractorVerdict detect_attractor(const PiecewiseMap& map, const Vector& m_star, const AttractorOptions& opt,
                                  Exec exec) {
    const long n = static_cast<long>(opt.n_starts);
    std::vector<StartOutcome> outcomes(n);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (long k = 0; k < n; ++k) outcomes[k] = run_start(map, m_star, opt, k);
    } else {
        for (long k = 0; k < n; ++k) outcomes[k] = run_start(map, m_star, opt, k);
    }
    AttractorVerdict v;
    v.n_starts = opt.n_starts;
    v.kind = AttractorKind::fixed_point;
    bool failed = false;
    for (long k = 0; k < n; ++k) {
        const auto& o = outcomes[k];
        if (o.converged) {
            ++v.n_converged;
            v.max_hitting_time = std::max(v.max_hitting_time, o.hitting_time);
        } else if (!failed) {
            failed = true;
            v.witness_start = static_cast<std::size_t>(k);
            if (o.period >= 2) {
                v.kind = AttractorKind::cycle;
                v.period = o.period;
                v.cycle_points = o.cycle;
            } else {
                v.kind = AttractorKind::inconclusive;
            }
        }
    }
    return v;
}

Trajectory iterate_map(const PiecewiseMap& map, const Vector& m0, std::size_t steps) {
    Trajectory tr;
    Vector x = m0;
    tr.points.push_back(x);
    tr.times.push_back(0.0);
    for (std::size_t t = 1; t <= steps; ++t) {
        x = clamp_configuration(evaluate(map, x));
        x /= x.sum();
        tr.points.push_back(x);
        tr.times.push_back(static_cast<double>(t));
    }
    return tr;
}

Trajectory ode_trajectory(const PiecewiseMap& map, double tau, const Vector& m0, double t_end, double h) {
    if (!(h > 0.0)) throw Error("ode_trajectory: step must be positive");
    Trajectory tr;
    Vector x = m0;
    double t = 0.0;
    tr.points.push_back(x);
    tr.times.push_back(t);
    auto f = [&](const Vector& y) { return drift(map, tau, y); };
    while (t < t_end - 1e-12) {
        double step = std::min(h, t_end - t);
        Vector y;
        int halvings = 0;
        for (;; ++halvings) {
            const Vector k1 = f(x);
            const Vector k2 = f(clamp_configuration(x + 0.5 * step * k1));
            const Vector k3 = f(clamp_configuration(x + 0.5 * step * k2));
            const Vector k4 = f(clamp_configuration(x + step * k3));
            y = x + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const bool inside = y.minCoeff() >= -1e-6 && std::abs(y.sum() - 1.0) <= 1e-6;
            if (inside) break;
            if (halvings == 20) throw Error("ode_trajectory: step leaves the simplex after 20 halvings");
            step *= 0.5;
        }
        x = clamp_configuration(y);
        x /= x.sum();
        t += step;
        tr.points.push_back(x);
        tr.times.push_back(t);
    }
    return tr;
}

} // namespace wipmf
