#include "shiftwave/tridiag.hpp"

#include <stdexcept>

namespace shiftwave {

void Tridiagonal::factorize() {
    const std::size_t n = size();
    if (n == 0) {
        throw std::invalid_argument("tridiagonal: empty system");
    }
    c_prime_.assign(n, 0.0);
    inv_denom_.assign(n, 0.0);
    double prev_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double denom = diag[i] - (i > 0 ? lower[i] * prev_c : 0.0);
        if (denom == 0.0) {
            throw std::runtime_error("tridiagonal: zero pivot");
        }
        inv_denom_[i] = 1.0 / denom;
        prev_c = (i + 1 < n) ? upper[i] * inv_denom_[i] : 0.0;
        c_prime_[i] = prev_c;
    }
}

void Tridiagonal::solve_in_place(std::span<double> rhs) const {
    const std::size_t n = size();
    if (rhs.size() != n || inv_denom_.size() != n) {
        throw std::logic_error("tridiagonal: solve before factorize or size mismatch");
    }
    rhs[0] *= inv_denom_[0];
    for (std::size_t i = 1; i < n; ++i) {
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) * inv_denom_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= c_prime_[i] * rhs[i + 1];
    }
}

}  // namespace shiftwave
