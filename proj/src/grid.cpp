#include "shiftwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shiftwave {

Grid1D Grid1D::with_spacing(double x_min, double x_max, double dx) {
    if (!(dx > 0.0) || !(x_max > x_min)) {
        throw std::invalid_argument("grid: need dx > 0 and x_max > x_min");
    }
    Grid1D g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.n = static_cast<std::size_t>(std::llround((x_max - x_min) / dx)) + 1;
    g.validate();
    return g;
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x(i);
    }
    return xs;
}

std::size_t Grid1D::index_of(double x) const {
    const double k = std::round((x - x_min) / dx());
    if (k <= 0.0) {
        return 0;
    }
    return std::min(static_cast<std::size_t>(k), n - 1);
}

void Grid1D::validate() const {
    if (n < 3) {
        throw std::invalid_argument("grid: need at least 3 nodes");
    }
    if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw std::invalid_argument("grid: need finite x_min < x_max");
    }
}

Field::Field(Grid1D g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n) {
        throw std::invalid_argument("field: value count does not match grid");
    }
}

double Field::sup() const { return *std::max_element(values.begin(), values.end()); }

double Field::min() const { return *std::min_element(values.begin(), values.end()); }

double Field::mass() const {
    double acc = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        acc += values[i];
    }
    return acc * grid.dx();
}

bool Field::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double sup_distance(const Field& a, const Field& b, double x_lo, double x_hi) {
    if (!(a.grid == b.grid)) {
        throw std::invalid_argument("sup_distance: fields live on different grids");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a.grid.x(i);
        if (x >= x_lo && x <= x_hi) {
            worst = std::max(worst, std::abs(a[i] - b[i]));
        }
    }
    return worst;
}

}  // namespace shiftwave
