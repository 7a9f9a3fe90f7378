#pragma once

#include "wipmf/bandit.hpp"
#include "wipmf/compositions.hpp"
#include "wipmf/simulate.hpp"

#include <optional>
#include <vector>

namespace wipmf {

constexpr std::size_t kExactGuard = 200000;

struct RelaxedBound {
    double rel1 = 0.0;
    Matrix occupation;          // d x 2, x_{i,a}
    std::optional<double> rho_star; // rho(m*) when the model is indexable
};

RelaxedBound relaxed_bound(const Instance& inst);
// LP alone, no cross-check.
RelaxedBound relaxed_bound_lp(const Instance& inst);

struct ExactSolution {
    int N = 0;
    std::int64_t budget = 0;
    double gain = 0.0; // total reward per step
    Vector bias;
    std::vector<std::vector<int>> policy; // optimal active counts per configuration
    std::vector<double> wip_regret;       // max_a Q - Q(WIP action), per configuration
    std::size_t sweeps = 0;
    ConfigSpace space;
};

// Instance must be sorted by index (only WIP-related outputs depend on it).
ExactSolution solve_exact(const Instance& sorted, int N, ActivationMode mode = ActivationMode::exact,
                          Exec exec = Exec::parallel);

struct ExactWip {
    double gain = 0.0; // total reward per step
    Vector stationary;
    std::size_t iterations = 0;
};

ExactWip wip_value_exact(const Instance& sorted, int N, ActivationMode mode = ActivationMode::exact,
                         Exec exec = Exec::parallel);

struct ActionDifference {
    std::vector<int> x;
    int distance = 0;
};

std::vector<ActionDifference> action_difference_map(const ExactSolution& sol);
std::vector<ActionDifference> action_difference_map(const Instance& sorted, int N, Exec exec = Exec::parallel);

// E[min(Bin(N, 1/2), B)] / N for the two-state singular model: the exact
// per-bandit WIP value with budget B = alpha N.
double singular_wip_value(int N, double alpha);

} // namespace wipmf
