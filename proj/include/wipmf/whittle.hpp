#pragma once

#include "wipmf/bandit.hpp"

#include <limits>
#include <string>
#include <vector>

namespace wipmf {

struct SubsidyOptions {
    double span_tol = 1e-10;
    std::size_t max_iter = 1'000'000;
    double tie_tol = 1e-9;
    const Vector* warm_start = nullptr; // bias guess, original scale
};

struct SubsidySolution {
    double gain = 0.0;
    Vector bias;                  // bias(0) = 0
    std::vector<int> passive_set; // 0-based, ascending
    std::size_t iterations = 0;
};

// Average-reward MDP with passive reward R0 + nu and active reward R1,
// solved by relative value iteration on the lazy chain (I + P) / 2.
SubsidySolution solve_subsidized(const BanditModel& m, double nu, const SubsidyOptions& opt = {});

// sup-norm residual of the average-reward Bellman equation at subsidy nu.
double bellman_residual(const BanditModel& m, double nu, double gain, const Vector& bias);

struct IndexResult {
    bool indexable = false;
    bool strict = false;
    Vector indices;
    std::vector<int> order; // 0-based, decreasing index, ties by ascending id
    std::string method;     // "greedy" or "gittins"
    std::string diagnosis;  // empty when indexable
};

IndexResult compute_indices(const BanditModel& m, double tol = 1e-9);

// Largest-remaining-index computation of the undiscounted Gittins index for
// a restful arm (P0 = I, constant R0). Returns R1-based indices minus R0.
Vector restful_indices(const BanditModel& m);
bool is_restful(const BanditModel& m);

std::vector<int> order_by_index(const Vector& nu);
bool is_sorted_by_index(const Vector& nu, double tol = 0.0);

struct IndexBracket {
    double lower = -std::numeric_limits<double>::infinity(); // last grid nu with the state active
    double upper = std::numeric_limits<double>::infinity();  // first grid nu with the state passive
    bool contains(double nu, double slack = 1e-7) const { return nu >= lower - slack && nu <= upper + slack; }
};

struct OracleResult {
    bool indexable = true;
    std::vector<IndexBracket> brackets;
    std::string diagnosis;
};

std::vector<double> default_oracle_grid(const BanditModel& m);
OracleResult oracle_indices(const BanditModel& m, const std::vector<double>& grid, Exec exec = Exec::parallel);

struct ThresholdPolicyStat {
    int s = 0; // 0-based rank in the model's current state order
    double theta = 0.0;
    Vector stationary;
    double abar = 0.0;
};

// Activate states before s, randomize with theta at s, idle the rest.
ThresholdPolicyStat threshold_stat(const BanditModel& m, int s, double theta);

struct PolicyValue {
    double gain = 0.0;
    double abar = 0.0;
    Vector stationary;
};

PolicyValue evaluate_active_set(const BanditModel& m, const std::vector<char>& active);

} // namespace wipmf
