#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wipmf {

// All d-part compositions of N in lexicographic order, with O(d) ranking.
class ConfigSpace {
public:
    ConfigSpace() = default;
    ConfigSpace(int N, int d);

    static std::size_t count(int N, int d);

    int N() const { return N_; }
    int d() const { return d_; }
    std::size_t size() const { return size_; }
    std::span<const int> operator[](std::size_t k) const { return {flat_.data() + k * d_, static_cast<std::size_t>(d_)}; }
    std::size_t index_of(std::span<const int> x) const;

private:
    int N_ = 0, d_ = 0;
    std::size_t size_ = 0;
    std::vector<int> flat_;
    std::vector<std::size_t> cnt_; // cnt_[n * (d+1) + k] = compositions of n into k parts
    std::size_t cnt(int n, int k) const { return cnt_[static_cast<std::size_t>(n) * (d_ + 1) + k]; }
};

} // namespace wipmf
