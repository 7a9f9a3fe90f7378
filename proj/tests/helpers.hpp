#pragma once

#include "wipmf/bandit.hpp"

#include <doctest.h>

#include <initializer_list>

namespace wipmf::test {

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix A(rows.size(), rows.begin()->size());
    int i = 0;
    for (const auto& r : rows) {
        int j = 0;
        for (double v : r) A(i, j++) = v;
        ++i;
    }
    return A;
}

inline Vector vec(std::initializer_list<double> v) {
    Vector out(v.size());
    int i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

inline double sup(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace wipmf::test
