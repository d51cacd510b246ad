#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nuem/diffusion.hpp"
#include "nuem/noise.hpp"
#include "nuem/resolvent.hpp"
#include "nuem/spectral.hpp"
#include "nuem/timegrid.hpp"

namespace nuem {

/// Everything one path integration needs. Holds references; the referenced
/// objects must outlive the input.
struct SolverInput {
    const Eigensystem& es;
    const MergedGrid& grid;
    const ResolventTable& table;
    const DiffusionOperator& op;
    const SpectralVector& xi;
    const LevelIncrements& increments;
};

/// Checks J, L, N agree across members. Throws DimensionMismatch / GridMismatch.
void validate(const SolverInput& in);

/// Coefficients X_j(tau_eta) for eta = 0..N, j = 0..J-1.
class Trajectory {
public:
    Trajectory(std::size_t steps, std::size_t modes) : steps_(steps), modes_(modes), values_((steps + 1) * modes, 0.0) {}

    std::size_t steps() const noexcept { return steps_; }
    std::size_t modes() const noexcept { return modes_; }
    double at(std::size_t eta, std::size_t j) const { return values_[eta * modes_ + j]; }
    double& at(std::size_t eta, std::size_t j) { return values_[eta * modes_ + j]; }
    std::span<const double> row(std::size_t eta) const {
        return std::span<const double>(values_).subspan(eta * modes_, modes_);
    }
    std::span<double> row(std::size_t eta) { return std::span<double>(values_).subspan(eta * modes_, modes_); }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t steps_;
    std::size_t modes_;
    std::vector<double> values_;
};

/// Recursive form: per merged step, decay the previous state and add the
/// increments of the levels owning tau_eta, each propagated from that
/// level's previous node s_{eta,l} using the state stored there.
Trajectory run_recursive(const SolverInput& in);

/// Convolution form: every row is rebuilt from the initial condition and all
/// completed level steps. O(N^2 J L); a reference for the recursive form.
Trajectory run_convolution(const SolverInput& in);

/// Uniform implicit Euler-Maruyama; requires n_l = N for every level.
Trajectory run_uniform(const SolverInput& in);

/// Noise part only: sum over completed level steps of
/// r_j(t_{i-1,l}, tau_eta) sqrt(q_l) b_{j,l}(t_{i-1,l}, state(t_{i-1,l})) dbeta_{i,l}.
Trajectory discrete_stochastic_convolution(const SolverInput& in, const Trajectory& state_source);

}  // namespace nuem
