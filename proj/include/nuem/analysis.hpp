#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nuem/diffusion.hpp"
#include "nuem/resolvent.hpp"
#include "nuem/solver.hpp"
#include "nuem/spectral.hpp"
#include "nuem/timegrid.hpp"

namespace nuem {

/// Second moments E|X_j(tau_eta)|^2, eta = 0..N, j < J. Estimated tables carry
/// per-cell standard errors; exact tables carry zeros.
struct MomentTable {
    std::size_t steps = 0;
    std::size_t modes = 0;
    bool exact = true;
    std::vector<double> values;
    std::vector<double> standard_errors;

    MomentTable() = default;
    MomentTable(std::size_t steps_, std::size_t modes_, bool exact_)
        : steps(steps_), modes(modes_), exact(exact_), values((steps_ + 1) * modes_, 0.0),
          standard_errors((steps_ + 1) * modes_, 0.0) {}

    double at(std::size_t eta, std::size_t j) const { return values[eta * modes + j]; }
    double& at(std::size_t eta, std::size_t j) { return values[eta * modes + j]; }
    double se(std::size_t eta, std::size_t j) const { return standard_errors[eta * modes + j]; }
};

enum class MomentPart { Full, Convolution, Initial };

/// sum_{eta>=1} sum_j lambda_j^{2 iota + 1} moment(eta, j) dtau_eta.
double maxreg_lhs(const MomentTable& moments, const Eigensystem& es, const MergedGrid& grid, double iota);
/// Per-eta terms of maxreg_lhs (index 0 is zero).
std::vector<double> maxreg_lhs_terms(const MomentTable& moments, const Eigensystem& es, const MergedGrid& grid,
                                     double iota);

/// 2 sum_l sum_{i=1}^{n_l} q_l sum_j lambda_j^{2 iota} b_{j,l}(t_{i-1,l}, X(t_{i-1,l}))^2 (t_{i,l} - t_{i-1,l}).
/// For state-independent operators `states` may be null; otherwise the value
/// is pathwise and its mean over paths estimates the expectation.
double maxreg_rhs(const Eigensystem& es, const MergedGrid& grid, const DiffusionOperator& op,
                  const Trajectory* states, double iota);

/// ||P_J xi||^2_{D(A^iota)}.
double init_norm_squared(const SpectralVector& xi, const Eigensystem& es, double iota);

/// Exact second moments of the scheme for state-independent diffusion via
/// Ito isometry over the level increments.
MomentTable exact_second_moments(const Eigensystem& es, const MergedGrid& grid, const ResolventTable& table,
                                 const DiffusionOperator& op, const SpectralVector& xi,
                                 MomentPart part = MomentPart::Full);

/// Mode-wise second moments of the continuous mild solution for diagonal
/// state-independent diffusion, evaluated at the given times.
MomentTable continuous_second_moments(const Eigensystem& es, const DiffusionOperator& op, const SpectralVector& xi,
                                      std::span<const double> times);

struct InitWeight {
    std::size_t mode = 0;
    double weight = 0.0;  // sum_eta r_j(0, tau_eta)^2 dtau_eta
    double bound = 0.0;   // 2 / lambda_j
    double margin = 0.0;  // bound - weight
};

struct InitWeightReport {
    std::vector<InitWeight> modes;
    double lhs = 0.0;    // sum_j lambda_j^{2 iota + 1} xi_j^2 weight_j
    double bound = 0.0;  // 2 ||P_J xi||^2_{D(A^iota)}
    bool holds() const noexcept;
};

InitWeightReport init_weight_check(const Eigensystem& es, const MergedGrid& grid, const ResolventTable& table,
                                   const SpectralVector& xi, double iota);

/// Inputs of a Monte Carlo maximal-regularity experiment on one merged grid.
struct ExperimentConfig {
    const Eigensystem* es = nullptr;
    const MergedGrid* grid = nullptr;
    const DiffusionOperator* op = nullptr;
    SpectralVector xi;
    double iota = 0.0;
    std::size_t paths = 2;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    /// When set, Brownian paths are sampled on this finer grid and summed onto
    /// `grid`, so experiments sharing a seed and noise grid are coupled.
    const MergedGrid* noise_grid = nullptr;
};

struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

struct ExactRegularity {
    double lhs = 0.0;       // full scheme
    double lhs_conv = 0.0;  // stochastic convolution only
    double rhs = 0.0;
    double bound = 0.0;     // 2 init_term + rhs
    bool conv_holds = false;
    bool full_holds = false;
};

struct RegularityReport {
    double iota = 0.0;
    std::size_t paths = 0;
    std::size_t failed_paths = 0;
    Estimate lhs;          // full scheme
    Estimate lhs_conv;     // stochastic convolution only
    Estimate rhs;          // convolution bound (factor 2 included)
    Estimate slack;        // per-path (2 init_term + rhs) - lhs
    double init_term = 0.0;  // ||P_J xi||^2_{D(A^iota)}
    double bound = 0.0;      // 2 init_term + rhs.mean
    double relative_se = 0.0;
    double gate = 0.0;       // bound * (1 + 4 relative_se)
    bool statistical_holds = false;  // lhs.mean <= gate
    bool holds = false;  // exact verdict when available, else statistical
    std::string verdict;
    MomentTable moments;
    std::vector<double> lhs_terms;  // per-eta contributions of lhs.mean
    std::optional<ExactRegularity> exact;
    std::optional<MomentTable> exact_moments;
};

RegularityReport mc_regularity_experiment(const ExperimentConfig& config);

/// Exact-mode maximal-regularity quantities for state-independent diffusion.
ExactRegularity exact_regularity(const Eigensystem& es, const MergedGrid& grid, const ResolventTable& table,
                                 const DiffusionOperator& op, const SpectralVector& xi, double iota);

}  // namespace nuem
