#pragma once

#include "wipmf/types.hpp"

#include <cstdint>
#include <vector>

namespace wipmf {

// Non-zero entries of one probability row.
struct SparseRow {
    std::vector<int> idx;
    std::vector<double> p;
};

std::vector<SparseRow> sparse_rows(const Matrix& P);

std::int64_t sample_binomial(Rng& rng, std::int64_t n, double p);

// Adds a Mult(n, row) draw to out, by sequential conditional binomials.
void add_multinomial(Rng& rng, std::int64_t n, const SparseRow& row, std::vector<std::int64_t>& out);

} // namespace wipmf
