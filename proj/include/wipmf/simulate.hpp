#pragma once

#include "wipmf/bandit.hpp"
#include "wipmf/multinomial.hpp"
#include "wipmf/whittle.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wipmf {

enum class ActivationMode { exact, floor, ceil, continue_ };
ActivationMode parse_mode(std::string_view s);
std::string to_string(ActivationMode m);

using Counts = std::vector<std::int64_t>;

// Largest-remainder rounding of N*m to integer counts summing to N.
Counts round_configuration(const Vector& m, std::int64_t N);

// Integer budget for alpha*N under the given mode; continue draws a coin on
// the fractional part, so it needs rng.
std::int64_t resolve_budget(double alpha, std::int64_t N, ActivationMode mode, Rng* rng = nullptr);

// Active counts per state: fill states in order until the budget is spent.
Counts wip_activation(const Counts& x, std::int64_t budget);

// Synchronous N-bandit system under WIP; the model must be sorted by index.
class SyncSystem {
public:
    SyncSystem(const BanditModel& sorted, double alpha, std::int64_t N, ActivationMode mode);
    // Advances x in place and returns the total reward of the step.
    double step(Counts& x, Rng& rng) const;
    std::int64_t N() const { return N_; }
    int d() const { return model_.d(); }
    const BanditModel& model() const { return model_; }

private:
    BanditModel model_;
    double alpha_;
    std::int64_t N_;
    ActivationMode mode_;
    std::vector<SparseRow> rows0_, rows1_;
};

struct StepResult {
    Counts next;
    double reward = 0.0;
};

StepResult step_sync(const Instance& sorted, const Counts& x, ActivationMode mode, Rng& rng);

struct SimEstimate {
    double mean = 0.0;
    double half_width = 0.0;
    std::size_t n_steps = 0;
    std::size_t burn_in = 0;
    std::uint64_t seed = 0;
    ActivationMode mode = ActivationMode::exact;
    std::int64_t N = 0;
};

constexpr int kBatches = 20;
constexpr double kStudent975_19 = 2.093;

SimEstimate estimate_wip_sync(const Instance& sorted, std::int64_t N, std::size_t horizon, std::size_t burn_in,
                              std::uint64_t seed, ActivationMode mode);
// Started from the given counts instead of the rounded uniform configuration.
SimEstimate estimate_wip_sync(const Instance& sorted, const Counts& x0, std::size_t horizon, std::size_t burn_in,
                              std::uint64_t seed, ActivationMode mode);

// Same as estimate_wip_sync over a list of seeds, one chain per seed.
std::vector<SimEstimate> replicate_wip_sync(const Instance& sorted, std::int64_t N, std::size_t horizon,
                                            std::size_t burn_in, const std::vector<std::uint64_t>& seeds,
                                            ActivationMode mode, Exec exec = Exec::parallel);

// Asynchronous system: each bandit in state i under action a jumps to j at
// rate Q^a_ij; WIP is re-evaluated after every jump.
class AsyncSystem {
public:
    AsyncSystem(const AsyncBanditModel& sorted, double alpha, std::int64_t N);
    double total_rate(const Counts& x) const;
    double reward_rate(const Counts& x) const; // total over bandits
    // One jump; returns the holding time spent in x before it.
    double step(Counts& x, Rng& rng) const;

private:
    AsyncBanditModel model_;
    std::int64_t N_, budget_;
};

SimEstimate estimate_wip_async(const AsyncBanditModel& sorted, double alpha, std::int64_t N, double t_end,
                               double burn_in, std::uint64_t seed);

// Async Whittle indices in reward-rate units (uniformized indices / tau).
IndexResult async_indices(const AsyncBanditModel& q);

struct HoeffdingReport {
    double exceedance = 0.0;
    double bound = 0.0;
    double standard_error = 0.0;
    std::size_t trials = 0;
    bool respected = true;
};

// One-step deviations of x'/N from phi(x/N) started at round(N m*).
HoeffdingReport hoeffding_diagnostic(const Instance& sorted, std::int64_t N, double delta, std::size_t n_trials,
                                     std::uint64_t seed);

} // namespace wipmf
