#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nuem/spectral.hpp"
#include "nuem/timegrid.hpp"

namespace nuem {

/// Philox4x32-10 counter-based generator. A block is a pure function of
/// (key, counter), which makes every draw addressable without state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Identity of one path's noise. The standard normal for (level, step) is a
/// pure function of (seed, path, level, step).
struct NoiseStream {
    std::uint64_t seed = 0;
    std::uint64_t path = 0;

    /// Uniform in the open interval (0, 1).
    double uniform(std::size_t level, std::size_t step) const;
    /// Standard normal via the inverse normal CDF of uniform(level, step).
    double gaussian(std::size_t level, std::size_t step) const;
};

/// Brownian increments of each level: merged(l, eta) over (tau_{eta-1}, tau_eta]
/// and the aggregated level increments level(l)[i] over (t_{i-1,l}, t_{i,l}]
/// (index 0 of each level vector is unused and zero).
class LevelIncrements {
public:
    LevelIncrements(std::size_t levels, std::size_t steps)
        : levels_(levels), steps_(steps), merged_(levels * (steps + 1), 0.0), level_(levels) {}

    std::size_t levels() const noexcept { return levels_; }
    std::size_t steps() const noexcept { return steps_; }

    double merged(std::size_t level, std::size_t eta) const { return merged_[level * (steps_ + 1) + eta]; }
    double& merged(std::size_t level, std::size_t eta) { return merged_[level * (steps_ + 1) + eta]; }
    std::span<const double> merged_row(std::size_t level) const {
        return std::span<const double>(merged_).subspan(level * (steps_ + 1), steps_ + 1);
    }

    bool has_level_part() const noexcept { return !level_.empty() && !level_.front().empty(); }
    double level(std::size_t level, std::size_t i) const { return level_.at(level).at(i); }
    double& level(std::size_t level, std::size_t i) { return level_.at(level).at(i); }
    std::span<const double> level_row(std::size_t level) const { return level_.at(level); }
    void resize_level(std::size_t level, std::size_t steps) { level_.at(level).assign(steps + 1, 0.0); }

private:
    std::size_t levels_;
    std::size_t steps_;
    std::vector<double> merged_;
    std::vector<std::vector<double>> level_;
};

/// Independent N(0, dtau_eta) draws for levels 0..levels-1 on every merged step.
LevelIncrements sample_merged_increments(const MergedGrid& grid, std::size_t levels, const NoiseStream& stream);

/// Fills the level part by exact partial sums over merged steps. Uses the
/// first grid.levels() noise levels.
void aggregate_level_increments(LevelIncrements& inc, const MergedGrid& grid);
void aggregate_level_increments(LevelIncrements& inc, const LevelGrids& levels, const MergedGrid& grid);

/// Re-expresses increments sampled on a finer merged grid on a coarser one
/// whose nodes are a subset of the fine nodes (same Brownian paths), and
/// aggregates the level part for the coarse grid.
LevelIncrements coarsen_increments(const LevelIncrements& fine, const MergedGrid& fine_grid,
                                   const MergedGrid& coarse_grid);

/// Convenience: sample and aggregate for one path.
LevelIncrements sample_path_increments(const MergedGrid& grid, const NoiseStream& stream);

/// sum_{l <= L} lambda_l^{2r} q_l, so that E||W_L(t)||^2_{D(A^r)} = t * coefficient.
/// For r > 0 the eigensystem needs at least as many modes as levels.
double wiener_regularity_coefficient(const Eigensystem& es, double r);

}  // namespace nuem
