#include "wipmf/compositions.hpp"
#include "wipmf/types.hpp"

#include <fmt/format.h>

#include <limits>

namespace wipmf {

std::size_t ConfigSpace::count(int N, int d) {
    // C(N+d-1, d-1) with overflow detection.
    long double c = 1.0L;
    std::size_t exact = 1;
    for (int k = 1; k <= d - 1; ++k) {
        c = c * static_cast<long double>(N + k) / k;
        if (c > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 4))
            return std::numeric_limits<std::size_t>::max();
        exact = exact * static_cast<std::size_t>(N + k) / static_cast<std::size_t>(k);
    }
    return exact;
}

ConfigSpace::ConfigSpace(int N, int d) : N_(N), d_(d) {
    if (N < 0 || d < 1) throw Error("ConfigSpace: need N >= 0 and d >= 1");
    cnt_.assign(static_cast<std::size_t>(N + 1) * (d + 1), 0);
    for (int n = 0; n <= N; ++n) {
        cnt_[static_cast<std::size_t>(n) * (d + 1) + 1] = 1;
        for (int k = 2; k <= d; ++k) {
            std::size_t s = 0;
            for (int v = 0; v <= n; ++v) s += cnt(n - v, k - 1);
            cnt_[static_cast<std::size_t>(n) * (d + 1) + k] = s;
        }
    }
    size_ = cnt(N, d);
    flat_.resize(size_ * d);
    std::vector<int> x(d, 0);
    std::size_t k = 0;
    // Lexicographic: x_0 ascending, then x_1, ...; the last part absorbs the rest.
    auto rec = [&](auto&& self, int pos, int rem) -> void {
        if (pos == d - 1) {
            x[pos] = rem;
            std::copy(x.begin(), x.end(), flat_.begin() + static_cast<std::ptrdiff_t>(k * d));
            ++k;
            return;
        }
        for (int v = 0; v <= rem; ++v) {
            x[pos] = v;
            self(self, pos + 1, rem - v);
        }
    };
    rec(rec, 0, N);
}

std::size_t ConfigSpace::index_of(std::span<const int> x) const {
    std::size_t r = 0;
    int rem = N_;
    for (int i = 0; i + 1 < d_; ++i) {
        // Compositions of rem into (d-i) parts whose first part is below x_i.
        const int k = d_ - i;
        r += cnt(rem, k) - cnt(rem - x[i], k);
        rem -= x[i];
    }
    return r;
}

} // namespace wipmf
