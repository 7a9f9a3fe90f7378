#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace wipmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Serial reference vs OpenMP kernel. Both must produce identical results.
enum class Exec { serial, parallel };

// Independent stream for (seed, index): used wherever work is split across
// starts, replications or instances so results do not depend on thread count.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

} // namespace wipmf
