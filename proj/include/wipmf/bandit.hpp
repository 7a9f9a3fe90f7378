#pragma once

#include "wipmf/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace wipmf {

struct BanditModel {
    Matrix P0, P1;
    Vector R0, R1;

    int d() const { return static_cast<int>(R0.size()); }
    const Matrix& P(int a) const { return a ? P1 : P0; }
    const Vector& R(int a) const { return a ? R1 : R0; }
};

struct AsyncBanditModel {
    Matrix Q0, Q1;
    Vector R0, R1;

    int d() const { return static_cast<int>(R0.size()); }
    const Matrix& Q(int a) const { return a ? Q1 : Q0; }
};

struct Instance {
    BanditModel model;
    double alpha = 0.5;
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate(const BanditModel& m);
ValidationReport validate(const AsyncBanditModel& m);
void check_alpha(double alpha);

struct Uniformized {
    BanditModel model;
    double tau = 0.0;
};

Uniformized uniformize(const AsyncBanditModel& q);
// Q = tau (P - I); rewards are kept as rates.
AsyncBanditModel to_rates(const BanditModel& m, double tau = 1.0);

// New state k is old state order[k].
BanditModel permute_states(const BanditModel& m, std::span<const int> order);
AsyncBanditModel permute_states(const AsyncBanditModel& m, std::span<const int> order);

// Simplex helpers. Configurations are column vectors of state fractions.
constexpr double kSimplexTol = 1e-10;
constexpr double kClampTol = 1e-12;

bool is_configuration(const Vector& m, double tol = kSimplexTol);
Vector clamp_configuration(Vector m);
// 0-based zone: smallest s with alpha < sum_{i<=s} m_i (clamped to d-1).
int zone_of(const Vector& m, double alpha);
Vector random_simplex_point(int d, Rng& rng);

} // namespace wipmf
