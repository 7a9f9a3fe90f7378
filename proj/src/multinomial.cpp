#include "wipmf/multinomial.hpp"

#include <algorithm>

namespace wipmf {

std::vector<SparseRow> sparse_rows(const Matrix& P) {
    std::vector<SparseRow> rows(P.rows());
    for (int i = 0; i < P.rows(); ++i)
        for (int j = 0; j < P.cols(); ++j)
            if (P(i, j) > 0.0) {
                rows[i].idx.push_back(j);
                rows[i].p.push_back(P(i, j));
            }
    return rows;
}

std::int64_t sample_binomial(Rng& rng, std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::binomial_distribution<std::int64_t> b(n, p);
    return b(rng);
}

void add_multinomial(Rng& rng, std::int64_t n, const SparseRow& row, std::vector<std::int64_t>& out) {
    double rest = 1.0;
    const std::size_t k = row.idx.size();
    for (std::size_t j = 0; j < k && n > 0; ++j) {
        if (j + 1 == k) {
            out[row.idx[j]] += n;
            return;
        }
        const double q = std::clamp(row.p[j] / rest, 0.0, 1.0);
        const std::int64_t y = sample_binomial(rng, n, q);
        out[row.idx[j]] += y;
        n -= y;
        rest -= row.p[j];
        if (rest <= 0.0) rest = 0.0;
    }
}

} // namespace wipmf
