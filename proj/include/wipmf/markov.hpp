#pragma once

#include "wipmf/types.hpp"

#include <vector>

namespace wipmf {

// Stationary law of a unichain stochastic matrix. Throws Error if the
// normalized balance system is singular (multichain).
Vector stationary_distribution(const Matrix& P);

// Gain and bias of a fixed Markov reward process (bias(0) = 0).
struct MarkovReward {
    double gain = 0.0;
    Vector bias;
};
MarkovReward evaluate_chain(const Matrix& P, const Vector& r);

bool is_irreducible(const Matrix& P, double tol = 0.0);

} // namespace wipmf
