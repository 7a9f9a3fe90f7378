#include "wipmf/markov.hpp"

#include <Eigen/LU>

namespace wipmf {

Vector stationary_distribution(const Matrix& P) {
    const int d = static_cast<int>(P.rows());
    // (I - P)^T pi = 0 with the last balance row replaced by sum(pi) = 1.
    Matrix A = Matrix::Identity(d, d) - P.transpose();
    A.row(d - 1).setOnes();
    Vector rhs = Vector::Zero(d);
    rhs(d - 1) = 1.0;
    Eigen::FullPivLU<Matrix> lu(A);
    lu.setThreshold(1e-11);
    if (!lu.isInvertible()) throw Error("singular stationary system (chain is multichain under this policy)");
    Vector pi = lu.solve(rhs);
    for (int i = 0; i < d; ++i)
        if (pi(i) < 0.0) pi(i) = 0.0;
    return pi / pi.sum();
}

MarkovReward evaluate_chain(const Matrix& P, const Vector& r) {
    const int d = static_cast<int>(P.rows());
    // Unknowns (g, h_1..h_{d-1}), h_0 = 0: g + h_i - sum_j P_ij h_j = r_i.
    Matrix A(d, d);
    for (int i = 0; i < d; ++i) {
        A(i, 0) = 1.0;
        for (int j = 1; j < d; ++j) A(i, j) = (i == j ? 1.0 : 0.0) - P(i, j);
    }
    Eigen::FullPivLU<Matrix> lu(A);
    lu.setThreshold(1e-11);
    if (!lu.isInvertible()) throw Error("singular evaluation system (chain is multichain under this policy)");
    Vector x = lu.solve(r);
    MarkovReward out;
    out.gain = x(0);
    out.bias = Vector::Zero(d);
    out.bias.tail(d - 1) = x.tail(d - 1);
    return out;
}

bool is_irreducible(const Matrix& P, double tol) {
    const int d = static_cast<int>(P.rows());
    auto reach_all = [&](bool forward) {
        std::vector<char> seen(d, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < d; ++j) {
                const double w = forward ? P(i, j) : P(j, i);
                if (w > tol && !seen[j]) {
                    seen[j] = 1;
                    ++count;
                    stack.push_back(j);
                }
            }
        }
        return count == d;
    };
    return reach_all(true) && reach_all(false);
}

} // namespace wipmf
