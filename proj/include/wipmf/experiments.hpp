#pragma once

#include "wipmf/bandit.hpp"
#include "wipmf/simulate.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wipmf {

// How transition rows are drawn: uniform on the simplex (Dirichlet(1,...,1)),
// or i.i.d. uniform entries divided by their sum.
enum class RowSampling { simplex, normalized_uniform };
RowSampling parse_row_sampling(std::string_view s);
std::string to_string(RowSampling r);

// Rows drawn per `rows`, R1 uniform on [0,1], R0 = 0.
BanditModel random_instance(int d, Rng& rng, RowSampling rows = RowSampling::simplex);

struct UnstableWitness {
    std::size_t instance = 0;
    int zone = 0; // 0-based
    std::complex<double> eigenvalue;
};

struct ScanReport {
    int d = 0;
    std::size_t n_instances = 0;
    std::uint64_t seed = 0;
    RowSampling rows = RowSampling::simplex;
    std::size_t n_nonindexable = 0;
    std::size_t n_unstable = 0;
    std::size_t n_oracle_fallbacks = 0;
    std::vector<std::size_t> nonindexable;
    std::vector<UnstableWitness> unstable;
    double violation_rate() const {
        return n_instances ? static_cast<double>(n_nonindexable + n_unstable) / static_cast<double>(n_instances) : 0.0;
    }
};

struct InstanceVerdict {
    bool indexable = false;
    bool used_oracle = false;
    bool unstable = false;
    UnstableWitness witness;
};

// Indexability and the all-zones stability test for one model.
InstanceVerdict classify_instance(const BanditModel& m);

ScanReport scan(int d, std::size_t n_instances, std::uint64_t seed, Exec exec = Exec::parallel,
                RowSampling rows = RowSampling::simplex);

struct RateFit {
    std::string model; // "exponential" or "power"
    double coef = 0.0;  // b (exponential) or a (power)
    double rate = 0.0;  // c (exponential) or beta (power)
    double r_squared = 0.0;
    std::size_t n_points = 0;
    bool rate_reported() const { return r_squared > 0.9 && rate > 0.0; }
};

struct RateFits {
    RateFit exponential, power;
    std::size_t dropped = 0;
};

struct SubgapPoint {
    double N = 0.0;
    double subgap = 0.0;
};

RateFits fit_rate(const std::vector<SubgapPoint>& points);

struct SweepRow {
    double alpha = 0.0;
    std::int64_t N = 0;
    double mean = 0.0;
    double half_width = 0.0;
    double rel1 = 0.0;
    std::uint64_t seed = 0;
    double normalized() const { return mean / rel1; }
    double normalized_hw() const { return half_width / rel1; }
};

struct SweepOptions {
    std::size_t horizon = 100000;
    std::size_t burn_in = 1000;
    std::uint64_t seed = 1;
    ActivationMode mode = ActivationMode::exact;
};

// Model need not be sorted; indices are computed once (they do not depend on alpha).
std::vector<SweepRow> sweep_alpha(const BanditModel& model, const std::vector<double>& alphas,
                                  const std::vector<std::int64_t>& Ns, const SweepOptions& opt,
                                  Exec exec = Exec::parallel);

// Seed for grid cell k of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

} // namespace wipmf
