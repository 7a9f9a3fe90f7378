#pragma once

#include "wipmf/bandit.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wipmf {

// Zone s (0-based): phi(m) = m K + b, reward rho(m) = m . c + e.
struct AffinePiece {
    Matrix K;
    Vector b;
    Vector c;
    double e = 0.0;
};

struct PiecewiseMap {
    std::vector<AffinePiece> pieces;
    double alpha = 0.5;
    int d() const { return static_cast<int>(pieces.size()); }
};

// Computes indices and refuses models whose states are not sorted by
// decreasing index.
PiecewiseMap build_map(const Instance& inst);
// Trusts the caller's order (used by the channel product model).
PiecewiseMap build_map_presorted(const BanditModel& m, double alpha);

Vector evaluate_piece(const PiecewiseMap& map, int zone, const Vector& m);
Vector evaluate(const PiecewiseMap& map, const Vector& m);
Vector drift(const PiecewiseMap& map, double tau, const Vector& m);
double reward_rate(const PiecewiseMap& map, const Vector& m);
double reward_rate(const Instance& sorted, const Vector& m);
double lipschitz_constant(const PiecewiseMap& map);
double boundary_gap(const Vector& m, double alpha);

enum class AttractorKind { fixed_point, cycle, inconclusive };
std::string to_string(AttractorKind k);

struct AttractorOptions {
    std::size_t n_starts = 1000;
    std::size_t t_max = 10000;
    double eps = 1e-6;
    std::size_t stay = 50;
    int max_period = 64;
    std::uint64_t seed = 1;
};

struct AttractorVerdict {
    AttractorKind kind = AttractorKind::inconclusive;
    int period = 0;
    std::vector<Vector> cycle_points;
    std::size_t max_hitting_time = 0; // empirical T(eps) over converging starts
    std::size_t n_starts = 0;
    std::size_t n_converged = 0;
    std::size_t witness_start = 0; // first start that did not converge
};

AttractorVerdict detect_attractor(const PiecewiseMap& map, const Vector& m_star, const AttractorOptions& opt = {},
                                  Exec exec = Exec::parallel);

struct FixedPointReport {
    Vector m_star;
    int zone = 0; // 0-based
    double theta = 0.0;
    bool singular = false;
    double boundary_gap = 0.0;
    std::vector<std::complex<double>> eigenvalues;
    bool locally_stable = false;
    double rho = 0.0;
    std::optional<AttractorVerdict> attractor;
};

constexpr double kSingularTol = 1e-7;

FixedPointReport fixed_point(const PiecewiseMap& map);
std::vector<std::complex<double>> spectrum(const Matrix& K);
// All eigenvalues except the one closest to 1 have modulus < 1 - margin.
bool stable_spectrum(const std::vector<std::complex<double>>& ev, double margin = 1e-9);
// Largest-modulus eigenvalue after removing the one closest to 1.
std::complex<double> dominant_nonunit(const std::vector<std::complex<double>>& ev);

struct Trajectory {
    std::vector<Vector> points;
    std::vector<double> times;
};

Trajectory iterate_map(const PiecewiseMap& map, const Vector& m0, std::size_t steps);
Trajectory ode_trajectory(const PiecewiseMap& map, double tau, const Vector& m0, double t_end, double h);

} // namespace wipmf
