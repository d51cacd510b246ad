#pragma once

#include <cstddef>
#include <vector>

#include "nuem/spectral.hpp"
#include "nuem/timegrid.hpp"

namespace nuem {

/// Implicit-Euler propagator products
///   r_j(tau_a, tau_b) = prod_{nu=a+1}^{b} 1 / (1 + lambda_j (tau_nu - tau_{nu-1}))
/// stored as log-space prefix sums so that any window is O(1) and does not
/// underflow for stiff modes. The prefix is kept as an unevaluated sum
/// hi + lo so that window differences keep full relative precision.
class ResolventTable {
public:
    static ResolventTable build(const Eigensystem& es, const MergedGrid& grid);

    std::size_t modes() const noexcept { return modes_; }
    std::size_t steps() const noexcept { return steps_; }

    /// log prod_{nu=1}^{eta} (1 + lambda_j dtau_nu)^{-1}
    double log_prefix(std::size_t j, std::size_t eta) const;
    /// log r_j(tau_a, tau_b); throws ReversedWindow when a > b.
    double log_factor(std::size_t j, std::size_t a, std::size_t b) const;
    /// r_j(tau_a, tau_b) in (0, 1]. Windows whose true value lies below the
    /// subnormal range saturate at the smallest positive double.
    double factor(std::size_t j, std::size_t a, std::size_t b) const;

private:
    std::size_t modes_ = 0;
    std::size_t steps_ = 0;
    std::vector<double> hi_;  // row-major (j, eta)
    std::vector<double> lo_;
};

inline ResolventTable build_resolvent_table(const Eigensystem& es, const MergedGrid& grid) {
    return ResolventTable::build(es, grid);
}

inline double resolvent_factor(const ResolventTable& t, std::size_t j, std::size_t a, std::size_t b) {
    return t.factor(j, a, b);
}

/// Continuous interpolant S_j(tau_{eta0}, t) = prod_{nu>eta0} (1 + lambda_j (t^tau_nu - t^tau_{nu-1}))^{-1}
/// where ^ is the minimum. Equals r_j(tau_{eta0}, tau_eta) at t = tau_eta.
double interpolant_S(const Eigensystem& es, const MergedGrid& grid, std::size_t j, std::size_t eta0, double t);

/// sum over eta with t_{i,l} <= tau_eta <= 1 of r_j(t_{i-1,l}, tau_eta)^2 (tau_eta - tau_{eta-1}).
/// Bounded by 2 / lambda_j on uniform level grids (2 c_disc / lambda_j on quasi-uniform ones).
double weight_sum(const ResolventTable& table, const MergedGrid& grid, std::size_t j, std::size_t level,
                  std::size_t i);

}  // namespace nuem
