#include "nuem/noise.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "nuem/error.hpp"

namespace nuem {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::array<std::uint32_t, 2> split(std::uint64_t v) {
    return {static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(v >> 32)};
}

std::array<std::uint32_t, 4> counter_for(std::uint64_t path, std::size_t level, std::size_t step) {
    if (level > std::numeric_limits<std::uint32_t>::max() || step > std::numeric_limits<std::uint32_t>::max()) {
        fail(ErrorCode::IndexOutOfRange, "noise stream addresses at most 2^32 levels and steps");
    }
    const auto p = split(path);
    return {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(level), p[0], p[1]};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
    return c;
}

double NoiseStream::uniform(std::size_t level, std::size_t step) const {
    const auto block = philox4x32(counter_for(path, level, step), split(seed));
    const std::uint64_t bits = (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
    // 53 random bits centred in their cell: never exactly 0 or 1
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseStream::gaussian(std::size_t level, std::size_t step) const {
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, uniform(level, step));
}

LevelIncrements sample_merged_increments(const MergedGrid& grid, std::size_t levels, const NoiseStream& stream) {
    if (levels == 0) {
        fail(ErrorCode::EmptyLevels, "at least one noise level is required");
    }
    LevelIncrements inc(levels, grid.steps());
    for (std::size_t l = 0; l < levels; ++l) {
        for (std::size_t eta = 1; eta <= grid.steps(); ++eta) {
            inc.merged(l, eta) = std::sqrt(grid.dtau(eta)) * stream.gaussian(l, eta);
        }
    }
    return inc;
}

void aggregate_level_increments(LevelIncrements& inc, const MergedGrid& grid) {
    if (inc.steps() != grid.steps() || inc.levels() < grid.levels()) {
        fail(ErrorCode::GridMismatch, "increments were not sampled on this merged grid");
    }
    for (std::size_t l = 0; l < grid.levels(); ++l) {
        const std::size_t n = grid.level_steps(l);
        inc.resize_level(l, n);
        for (std::size_t i = 1; i <= n; ++i) {
            double sum = 0.0;
            for (std::size_t eta = grid.node_index(i - 1, l) + 1; eta <= grid.node_index(i, l); ++eta) {
                sum += inc.merged(l, eta);
            }
            inc.level(l, i) = sum;
        }
    }
}

void aggregate_level_increments(LevelIncrements& inc, const LevelGrids& levels, const MergedGrid& grid) {
    if (levels.levels() != grid.levels()) {
        fail(ErrorCode::GridMismatch, "level grids and merged grid disagree on the number of levels");
    }
    for (std::size_t l = 0; l < levels.levels(); ++l) {
        if (levels.steps(l) != grid.level_steps(l)) {
            fail(ErrorCode::GridMismatch, "level " + std::to_string(l + 1) + " step count differs from merged grid");
        }
    }
    aggregate_level_increments(inc, grid);
}

LevelIncrements coarsen_increments(const LevelIncrements& fine, const MergedGrid& fine_grid,
                                   const MergedGrid& coarse_grid) {
    if (fine.steps() != fine_grid.steps() || fine.levels() < coarse_grid.levels()) {
        fail(ErrorCode::GridMismatch, "fine increments do not match the fine grid");
    }
    LevelIncrements out(coarse_grid.levels(), coarse_grid.steps());
    std::size_t f = 0;
    std::vector<std::size_t> boundary(coarse_grid.steps() + 1, 0);
    for (std::size_t eta = 1; eta <= coarse_grid.steps(); ++eta) {
        const double target = coarse_grid.tau(eta);
        while (f < fine_grid.steps() && fine_grid.tau(f) < target) ++f;
        if (fine_grid.tau(f) != target) {
            fail(ErrorCode::GridMismatch, "coarse node is not a node of the fine grid");
        }
        boundary[eta] = f;
    }
    for (std::size_t l = 0; l < coarse_grid.levels(); ++l) {
        for (std::size_t eta = 1; eta <= coarse_grid.steps(); ++eta) {
            double sum = 0.0;
            for (std::size_t k = boundary[eta - 1] + 1; k <= boundary[eta]; ++k) {
                sum += fine.merged(l, k);
            }
            out.merged(l, eta) = sum;
        }
    }
    aggregate_level_increments(out, coarse_grid);
    return out;
}

LevelIncrements sample_path_increments(const MergedGrid& grid, const NoiseStream& stream) {
    auto inc = sample_merged_increments(grid, grid.levels(), stream);
    aggregate_level_increments(inc, grid);
    return inc;
}

double wiener_regularity_coefficient(const Eigensystem& es, double r) {
    if (r < 0.0) {
        fail(ErrorCode::NegativeExponent, "fractional exponent must be non-negative");
    }
    if (r > 0.0 && es.levels() > es.modes()) {
        fail(ErrorCode::DimensionMismatch, "D(A^r) norm of the noise needs lambda_l for every level");
    }
    double sum = 0.0;
    for (std::size_t l = 0; l < es.levels(); ++l) {
        const double w = r == 0.0 ? 1.0 : std::pow(es.lambda(l), 2.0 * r);
        sum += w * es.q(l);
    }
    return sum;
}

}  // namespace nuem
