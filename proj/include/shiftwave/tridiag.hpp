#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace shiftwave {

/// Tridiagonal system solved by the Thomas algorithm.
///
/// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]; lower[0] and
/// upper[n-1] are ignored. No pivoting: intended for diagonally dominant
/// M-matrices, where elimination is stable.
class Tridiagonal {
public:
    explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

    std::size_t size() const { return diag.size(); }

    /// Precomputes the elimination; call again after editing coefficients.
    void factorize();
    /// Overwrites rhs with the solution. Requires factorize().
    void solve_in_place(std::span<double> rhs) const;

    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

private:
    std::vector<double> c_prime_;
    std::vector<double> inv_denom_;
};

}  // namespace shiftwave
