#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace shiftwave {

/// Uniform nodes x_i = x_min + i dx, i = 0..n-1, with dx = (x_max - x_min) / (n - 1).
struct Grid1D {
    double x_min = -100.0;
    double x_max = 200.0;
    std::size_t n = 3001;

    /// Grid with spacing as close to `dx` as the interval allows.
    static Grid1D with_spacing(double x_min, double x_max, double dx);

    double dx() const { return (x_max - x_min) / static_cast<double>(n - 1); }
    double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
    std::vector<double> nodes() const;
    /// Nearest node index to x, clamped to the grid.
    std::size_t index_of(double x) const;

    /// Throws std::invalid_argument unless n >= 3 and x_max > x_min.
    void validate() const;

    bool operator==(const Grid1D&) const = default;
};

/// Nodal values on a grid.
struct Field {
    Grid1D grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(Grid1D g, double fill = 0.0) : grid(g), values(g.n, fill) {}
    Field(Grid1D g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
    std::span<const double> view() const { return values; }

    double sup() const;
    double min() const;
    /// Trapezoid integral over the grid.
    double mass() const;
    bool all_finite() const;
};

/// sup_i |a_i - b_i| over nodes with x in [x_lo, x_hi]; both fields on the same grid.
double sup_distance(const Field& a, const Field& b, double x_lo, double x_hi);

}  // namespace shiftwave
