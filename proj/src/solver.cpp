#include "nuem/solver.hpp"

#include <cassert>
#include <cmath>
#include <optional>
#include <string>

#include "nuem/error.hpp"

namespace nuem {

void validate(const SolverInput& in) {
    const std::size_t modes = in.es.modes();
    const std::size_t levels = in.es.levels();
    const std::size_t steps = in.grid.steps();
    if (in.xi.size() < modes) {
        fail(ErrorCode::DimensionMismatch, "initial condition has " + std::to_string(in.xi.size()) +
                                               " coefficients, eigensystem has " + std::to_string(modes) + " modes");
    }
    if (in.grid.levels() != levels) {
        fail(ErrorCode::DimensionMismatch, "grid has " + std::to_string(in.grid.levels()) +
                                               " levels, eigensystem has " + std::to_string(levels));
    }
    if (in.table.modes() != modes || in.table.steps() != steps) {
        fail(ErrorCode::DimensionMismatch, "resolvent table was built for a different eigensystem or grid");
    }
    if (in.op.levels() < levels) {
        fail(ErrorCode::DimensionMismatch, "diffusion operator defines fewer levels than the eigensystem");
    }
    if (in.increments.steps() != steps || in.increments.levels() < levels || !in.increments.has_level_part()) {
        fail(ErrorCode::GridMismatch, "increments do not match the merged grid or lack level sums");
    }
}

namespace {

void check_finite(std::span<const double> row, std::size_t eta) {
    for (double v : row) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::NonFiniteState, "non-finite state at merged step " + std::to_string(eta), eta);
        }
    }
}

void set_initial_row(const SolverInput& in, Trajectory& out) {
    for (std::size_t j = 0; j < out.modes(); ++j) {
        out.at(0, j) = in.xi[j];
    }
}

/// Caches b_{., l}(t_{i-1,l}, state(t_{i-1,l})) per completed level step.
class ColumnCache {
public:
    ColumnCache(const SolverInput& in, const Trajectory& states) : in_(in), states_(states), cols_(in.grid.levels()) {
        for (std::size_t l = 0; l < cols_.size(); ++l) {
            cols_[l].resize(in.grid.level_steps(l) + 1);
        }
    }

    std::span<const double> get(std::size_t level, std::size_t i) {
        auto& slot = cols_[level][i];
        if (!slot) {
            const std::size_t start = in_.grid.node_index(i - 1, level);
            slot.emplace(in_.es.modes());
            in_.op.column(in_.grid.tau(start), states_.row(start), level, *slot);
        }
        return *slot;
    }

private:
    const SolverInput& in_;
    const Trajectory& states_;
    std::vector<std::vector<std::optional<std::vector<double>>>> cols_;
};

/// Noise sum of the convolution form at merged step eta, written into out.
void convolution_row(const SolverInput& in, ColumnCache& cache, std::size_t eta, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t l = 0; l < in.grid.levels(); ++l) {
        const double sqrt_q = std::sqrt(in.es.q(l));
        for (std::size_t i = 1; i <= in.grid.level_steps(l) && in.grid.node_index(i, l) <= eta; ++i) {
            const std::size_t start = in.grid.node_index(i - 1, l);
            const auto col = cache.get(l, i);
            const double noise = sqrt_q * in.increments.level(l, i);
            for (std::size_t j = 0; j < out.size(); ++j) {
                out[j] += in.table.factor(j, start, eta) * col[j] * noise;
            }
        }
    }
}

}  // namespace

Trajectory run_recursive(const SolverInput& in) {
    validate(in);
    const std::size_t modes = in.es.modes();
    const std::size_t levels = in.es.levels();
    const auto& grid = in.grid;
    Trajectory out(grid.steps(), modes);
    set_initial_row(in, out);

    // Per-level snapshot of the state at that level's latest node.
    std::vector<std::vector<double>> snapshot(levels, std::vector<double>(out.row(0).begin(), out.row(0).end()));
    std::vector<std::size_t> snapshot_index(levels, 0);
    std::vector<double> col(modes);
    const bool diagonal = in.op.diagonal();

    for (std::size_t eta = 1; eta <= grid.steps(); ++eta) {
        auto row = out.row(eta);
        for (std::size_t j = 0; j < modes; ++j) {
            row[j] = in.table.factor(j, eta - 1, eta) * out.at(eta - 1, j);
        }
        for (const auto& node : grid.active(eta)) {
            const std::size_t l = node.level;
            const std::size_t s = snapshot_index[l];
            assert(s == grid.prev_node(eta, l));
            const double noise = std::sqrt(in.es.q(l)) * in.increments.level(l, node.step);
            const double ts = grid.tau(s);
            if (diagonal) {
                if (l < modes) {
                    row[l] += in.table.factor(l, s, eta) * in.op.diagonal_entry(ts, snapshot[l], l) * noise;
                }
                continue;
            }
            in.op.column(ts, snapshot[l], l, col);
            for (std::size_t j = 0; j < modes; ++j) {
                // r_j(s, tau_eta) = r_j(tau_{eta-1}, tau_eta) * r_j(s, tau_{eta-1})
                assert(std::abs(in.table.factor(j, eta - 1, eta) * in.table.factor(j, s, eta - 1) -
                                in.table.factor(j, s, eta)) <= 1e-12 * in.table.factor(j, s, eta));
                row[j] += in.table.factor(j, s, eta) * col[j] * noise;
            }
        }
        check_finite(row, eta);
        for (const auto& node : grid.active(eta)) {
            snapshot[node.level].assign(row.begin(), row.end());
            snapshot_index[node.level] = eta;
        }
    }
    return out;
}

Trajectory run_convolution(const SolverInput& in) {
    validate(in);
    const std::size_t modes = in.es.modes();
    Trajectory out(in.grid.steps(), modes);
    set_initial_row(in, out);
    ColumnCache cache(in, out);
    std::vector<double> conv(modes);
    for (std::size_t eta = 1; eta <= in.grid.steps(); ++eta) {
        convolution_row(in, cache, eta, conv);
        auto row = out.row(eta);
        for (std::size_t j = 0; j < modes; ++j) {
            row[j] = in.table.factor(j, 0, eta) * in.xi[j] + conv[j];
        }
        check_finite(row, eta);
    }
    return out;
}

Trajectory run_uniform(const SolverInput& in) {
    validate(in);
    if (!in.grid.is_uniform()) {
        fail(ErrorCode::NonUniformInput, "uniform scheme needs n_l = N for every level");
    }
    const std::size_t modes = in.es.modes();
    const std::size_t steps = in.grid.steps();
    const double n = static_cast<double>(steps);
    Trajectory out(steps, modes);
    set_initial_row(in, out);
    std::vector<double> col(modes);
    std::vector<double> acc(modes);
    for (std::size_t i = 1; i <= steps; ++i) {
        const auto prev = out.row(i - 1);
        const double t_prev = in.grid.tau(i - 1);
        std::copy(prev.begin(), prev.end(), acc.begin());
        for (std::size_t l = 0; l < in.es.levels(); ++l) {
            const double noise = std::sqrt(in.es.q(l)) * in.increments.level(l, i);
            in.op.column(t_prev, prev, l, col);
            for (std::size_t j = 0; j < modes; ++j) {
                acc[j] += col[j] * noise;
            }
        }
        auto row = out.row(i);
        for (std::size_t j = 0; j < modes; ++j) {
            row[j] = acc[j] / (1.0 + in.es.lambda(j) / n);
        }
        check_finite(row, i);
    }
    return out;
}

Trajectory discrete_stochastic_convolution(const SolverInput& in, const Trajectory& state_source) {
    validate(in);
    if (state_source.steps() != in.grid.steps() || state_source.modes() != in.es.modes()) {
        fail(ErrorCode::DimensionMismatch, "state source does not match the grid and eigensystem");
    }
    Trajectory out(in.grid.steps(), in.es.modes());
    ColumnCache cache(in, state_source);
    for (std::size_t eta = 1; eta <= in.grid.steps(); ++eta) {
        convolution_row(in, cache, eta, out.row(eta));
        check_finite(out.row(eta), eta);
    }
    return out;
}

}  // namespace nuem
