#include "nuem/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nuem/error.hpp"

namespace nuem {

ResolventTable ResolventTable::build(const Eigensystem& es, const MergedGrid& grid) {
    ResolventTable t;
    t.modes_ = es.modes();
    t.steps_ = grid.steps();
    const std::size_t width = t.steps_ + 1;
    t.hi_.assign(t.modes_ * width, 0.0);
    t.lo_.assign(t.modes_ * width, 0.0);
    for (std::size_t j = 0; j < t.modes_; ++j) {
        const double lambda = es.lambda(j);
        double hi = 0.0;
        double lo = 0.0;
        for (std::size_t eta = 1; eta <= t.steps_; ++eta) {
            // two-sum accumulation of -log1p(lambda * dtau)
            const double term = -std::log1p(lambda * grid.dtau(eta));
            const double s = hi + term;
            const double bp = s - hi;
            lo += (hi - (s - bp)) + (term - bp);
            hi = s;
            t.hi_[j * width + eta] = hi;
            t.lo_[j * width + eta] = lo;
        }
    }
    return t;
}

double ResolventTable::log_prefix(std::size_t j, std::size_t eta) const {
    if (j >= modes_ || eta > steps_) {
        fail(ErrorCode::IndexOutOfRange, "resolvent table index out of range");
    }
    const std::size_t k = j * (steps_ + 1) + eta;
    return hi_[k] + lo_[k];
}

double ResolventTable::log_factor(std::size_t j, std::size_t a, std::size_t b) const {
    if (a > b) {
        fail(ErrorCode::ReversedWindow, "resolvent window start exceeds its end");
    }
    if (j >= modes_ || b > steps_) {
        fail(ErrorCode::IndexOutOfRange, "resolvent table index out of range");
    }
    const std::size_t row = j * (steps_ + 1);
    return (hi_[row + b] - hi_[row + a]) + (lo_[row + b] - lo_[row + a]);
}

double ResolventTable::factor(std::size_t j, std::size_t a, std::size_t b) const {
    const double lf = log_factor(j, a, b);
    if (a == b) {
        return 1.0;
    }
    return std::max(std::exp(lf), std::numeric_limits<double>::denorm_min());
}

double interpolant_S(const Eigensystem& es, const MergedGrid& grid, std::size_t j, std::size_t eta0, double t) {
    if (eta0 > grid.steps()) {
        fail(ErrorCode::IndexOutOfRange, "interpolant start index beyond the grid");
    }
    const double lambda = es.lambda(j);
    double log_value = 0.0;
    for (std::size_t nu = eta0 + 1; nu <= grid.steps(); ++nu) {
        const double hi = std::min(t, grid.tau(nu));
        const double lo = std::min(t, grid.tau(nu - 1));
        if (hi <= lo) break;
        const double inc = t >= grid.tau(nu) ? grid.dtau(nu) : hi - lo;
        log_value -= std::log1p(lambda * inc);
    }
    return std::exp(log_value);
}

double weight_sum(const ResolventTable& table, const MergedGrid& grid, std::size_t j, std::size_t level,
                  std::size_t i) {
    if (level >= grid.levels() || i < 1 || i > grid.level_steps(level)) {
        fail(ErrorCode::IndexOutOfRange, "weight_sum needs a valid level and 1 <= i <= n_l");
    }
    const std::size_t start = grid.node_index(i - 1, level);
    double sum = 0.0;
    for (std::size_t eta = grid.node_index(i, level); eta <= grid.steps(); ++eta) {
        const double r = table.factor(j, start, eta);
        sum += r * r * grid.dtau(eta);
    }
    return sum;
}

}  // namespace nuem
