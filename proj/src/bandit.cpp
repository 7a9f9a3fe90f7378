#include "wipmf/bandit.hpp"
#include "wipmf/markov.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace wipmf {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

namespace {

void check_shape(const Matrix& A, int d, const char* name, ValidationReport& rep) {
    if (A.rows() != d || A.cols() != d)
        rep.violations.push_back(fmt::format("{} is {}x{}, expected {}x{}", name, A.rows(), A.cols(), d, d));
}

void check_rewards(const Vector& R, int d, const char* name, ValidationReport& rep) {
    if (R.size() != d) {
        rep.violations.push_back(fmt::format("{} has length {}, expected {}", name, R.size(), d));
        return;
    }
    for (int i = 0; i < d; ++i)
        if (!std::isfinite(R(i))) rep.violations.push_back(fmt::format("{}[{}] is not finite", name, i));
}

} // namespace

ValidationReport validate(const BanditModel& m) {
    ValidationReport rep;
    const int d = m.d();
    if (d < 2) {
        rep.violations.push_back(fmt::format("d = {} < 2", d));
        return rep;
    }
    check_shape(m.P0, d, "P0", rep);
    check_shape(m.P1, d, "P1", rep);
    check_rewards(m.R1, d, "R1", rep);
    if (!rep.ok()) return rep;
    check_rewards(m.R0, d, "R0", rep);
    for (int a = 0; a < 2; ++a) {
        const Matrix& P = m.P(a);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j)
                if (!(P(i, j) >= 0.0 && P(i, j) <= 1.0))
                    rep.violations.push_back(fmt::format("P{}[{}][{}] = {:g} outside [0,1]", a, i, j, P(i, j)));
            const double s = P.row(i).sum();
            if (!(std::abs(s - 1.0) <= 1e-12))
                rep.violations.push_back(fmt::format("row {} of P{} sums to {:g}", i, a, s));
        }
    }
    if (rep.ok() && !is_irreducible(0.5 * (m.P0 + m.P1)))
        rep.warnings.push_back("possibly multichain: 0.5*(P0+P1) is reducible");
    return rep;
}

ValidationReport validate(const AsyncBanditModel& m) {
    ValidationReport rep;
    const int d = m.d();
    if (d < 2) {
        rep.violations.push_back(fmt::format("d = {} < 2", d));
        return rep;
    }
    check_shape(m.Q0, d, "Q0", rep);
    check_shape(m.Q1, d, "Q1", rep);
    check_rewards(m.R1, d, "R1", rep);
    if (!rep.ok()) return rep;
    check_rewards(m.R0, d, "R0", rep);
    for (int a = 0; a < 2; ++a) {
        const Matrix& Q = m.Q(a);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                if (!std::isfinite(Q(i, j)))
                    rep.violations.push_back(fmt::format("Q{}[{}][{}] is not finite", a, i, j));
                else if (i != j && Q(i, j) < 0.0)
                    rep.violations.push_back(fmt::format("Q{}[{}][{}] = {:g} is a negative rate", a, i, j, Q(i, j)));
            }
            const double s = Q.row(i).sum();
            if (!(std::abs(s) <= 1e-12 * std::max(1.0, Q.row(i).cwiseAbs().maxCoeff())))
                rep.violations.push_back(fmt::format("row {} of Q{} sums to {:g}", i, a, s));
        }
    }
    if (rep.ok()) {
        Matrix A = m.Q0.cwiseAbs() + m.Q1.cwiseAbs();
        if (!is_irreducible(A)) rep.warnings.push_back("possibly multichain: Q0+Q1 is reducible");
    }
    return rep;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(fmt::format("alpha = {:g} must lie in (0,1)", alpha));
}

Uniformized uniformize(const AsyncBanditModel& q) {
    const auto rep = validate(q);
    if (!rep.ok()) throw Error("invalid async model: " + rep.violations.front());
    const int d = q.d();
    double tau = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < d; ++i) tau = std::max(tau, std::abs(q.Q(a)(i, i)));
    if (tau == 0.0) throw Error("uniformization rate is zero (all rates vanish)");
    Uniformized u;
    u.tau = tau;
    for (int a = 0; a < 2; ++a) {
        Matrix P(d, d);
        for (int i = 0; i < d; ++i) {
            double off = 0.0;
            for (int j = 0; j < d; ++j) {
                if (i == j) continue;
                P(i, j) = q.Q(a)(i, j) / tau;
                off += P(i, j);
            }
            P(i, i) = 1.0 - off;
        }
        (a ? u.model.P1 : u.model.P0) = std::move(P);
    }
    u.model.R0 = tau * q.R0;
    u.model.R1 = tau * q.R1;
    return u;
}

AsyncBanditModel to_rates(const BanditModel& m, double tau) {
    const int d = m.d();
    const Matrix I = Matrix::Identity(d, d);
    AsyncBanditModel q;
    q.Q0 = tau * (m.P0 - I);
    q.Q1 = tau * (m.P1 - I);
    for (int a = 0; a < 2; ++a) {
        Matrix& Q = a ? q.Q1 : q.Q0;
        for (int i = 0; i < d; ++i) Q(i, i) = -(Q.row(i).sum() - Q(i, i));
    }
    q.R0 = m.R0;
    q.R1 = m.R1;
    return q;
}

namespace {

Matrix permute_matrix(const Matrix& A, std::span<const int> order) {
    const int d = static_cast<int>(order.size());
    Matrix B(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) B(i, j) = A(order[i], order[j]);
    return B;
}

Vector permute_vector(const Vector& v, std::span<const int> order) {
    Vector w(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) w(i) = v(order[i]);
    return w;
}

void check_permutation(std::span<const int> order, int d) {
    if (static_cast<int>(order.size()) != d) throw Error("permutation has wrong length");
    std::vector<char> seen(d, 0);
    for (int k : order) {
        if (k < 0 || k >= d || seen[k]) throw Error("not a permutation");
        seen[k] = 1;
    }
}

} // namespace

BanditModel permute_states(const BanditModel& m, std::span<const int> order) {
    check_permutation(order, m.d());
    return {permute_matrix(m.P0, order), permute_matrix(m.P1, order), permute_vector(m.R0, order),
            permute_vector(m.R1, order)};
}

AsyncBanditModel permute_states(const AsyncBanditModel& m, std::span<const int> order) {
    check_permutation(order, m.d());
    return {permute_matrix(m.Q0, order), permute_matrix(m.Q1, order), permute_vector(m.R0, order),
            permute_vector(m.R1, order)};
}

bool is_configuration(const Vector& m, double tol) {
    if (m.size() == 0) return false;
    for (int i = 0; i < m.size(); ++i)
        if (!(m(i) >= -kClampTol)) return false;
    return std::abs(m.sum() - 1.0) <= tol;
}

Vector clamp_configuration(Vector m) {
    for (int i = 0; i < m.size(); ++i)
        if (m(i) < 0.0) m(i) = 0.0;
    return m;
}

int zone_of(const Vector& m, double alpha) {
    const int d = static_cast<int>(m.size());
    double acc = 0.0;
    for (int s = 0; s < d; ++s) {
        acc += std::max(m(s), 0.0);
        if (alpha < acc) return s;
    }
    return d - 1;
}

Vector random_simplex_point(int d, Rng& rng) {
    std::exponential_distribution<double> e(1.0);
    Vector m(d);
    for (int i = 0; i < d; ++i) m(i) = e(rng);
    return m / m.sum();
}

} // namespace wipmf
