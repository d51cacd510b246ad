#include "nuem/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "nuem/error.hpp"
#include "nuem/noise.hpp"
#include "nuem/parallel.hpp"

namespace nuem {

namespace {

double power_weight(double lambda, double exponent) { return exponent == 0.0 ? 1.0 : std::pow(lambda, exponent); }

void require_iota(double iota) {
    if (!(iota >= 0.0 && iota <= 0.5)) {
        fail(ErrorCode::ValidationError, "iota must lie in [0, 0.5]");
    }
}

/// Sequential mean / variance accumulator (Welford), fed in path order.
struct Running {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double standard_error() const {
        if (n < 2) return 0.0;
        return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    Estimate estimate() const { return {mean, standard_error()}; }
};

}  // namespace

std::vector<double> maxreg_lhs_terms(const MomentTable& moments, const Eigensystem& es, const MergedGrid& grid,
                                     double iota) {
    require_iota(iota);
    if (moments.steps != grid.steps() || moments.modes > es.modes()) {
        fail(ErrorCode::DimensionMismatch, "moment table does not match the grid or eigensystem");
    }
    std::vector<double> terms(grid.steps() + 1, 0.0);
    for (std::size_t eta = 1; eta <= grid.steps(); ++eta) {
        double sum = 0.0;
        for (std::size_t j = 0; j < moments.modes; ++j) {
            sum += power_weight(es.lambda(j), 2.0 * iota + 1.0) * moments.at(eta, j);
        }
        terms[eta] = sum * grid.dtau(eta);
    }
    return terms;
}

double maxreg_lhs(const MomentTable& moments, const Eigensystem& es, const MergedGrid& grid, double iota) {
    double total = 0.0;
    for (double term : maxreg_lhs_terms(moments, es, grid, iota)) total += term;
    return total;
}

double maxreg_rhs(const Eigensystem& es, const MergedGrid& grid, const DiffusionOperator& op,
                  const Trajectory* states, double iota) {
    require_iota(iota);
    if (!states && !op.state_independent()) {
        fail(ErrorCode::StateDependentDiffusion, "state-dependent diffusion needs a trajectory");
    }
    if (op.levels() < es.levels() || grid.levels() != es.levels()) {
        fail(ErrorCode::DimensionMismatch, "operator, grid and eigensystem disagree on levels");
    }
    const std::size_t modes = es.modes();
    const std::vector<double> zeros(modes, 0.0);
    std::vector<double> col(modes);
    double total = 0.0;
    for (std::size_t l = 0; l < es.levels(); ++l) {
        double level_sum = 0.0;
        for (std::size_t i = 1; i <= grid.level_steps(l); ++i) {
            const std::size_t start = grid.node_index(i - 1, l);
            const std::span<const double> x = states ? states->row(start) : std::span<const double>(zeros);
            op.column(grid.tau(start), x, l, col);
            double inner = 0.0;
            for (std::size_t j = 0; j < modes; ++j) {
                inner += power_weight(es.lambda(j), 2.0 * iota) * col[j] * col[j];
            }
            level_sum += inner * grid.level_dt(i, l);
        }
        total += es.q(l) * level_sum;
    }
    return 2.0 * total;
}

double init_norm_squared(const SpectralVector& xi, const Eigensystem& es, double iota) {
    const auto c = xi.coeffs().first(std::min(xi.size(), es.modes()));
    return fractional_norm_squared(c, es.lambdas(), iota);
}

MomentTable exact_second_moments(const Eigensystem& es, const MergedGrid& grid, const ResolventTable& table,
                                 const DiffusionOperator& op, const SpectralVector& xi, MomentPart part) {
    if (!op.state_independent()) {
        fail(ErrorCode::StateDependentDiffusion, "exact moments need state-independent diffusion");
    }
    const std::size_t modes = es.modes();
    if (xi.size() < modes || table.modes() != modes || table.steps() != grid.steps() ||
        grid.levels() != es.levels() || op.levels() < es.levels()) {
        fail(ErrorCode::DimensionMismatch, "inputs disagree on modes, levels or steps");
    }
    MomentTable out(grid.steps(), modes, true);
    const std::vector<double> zeros(modes, 0.0);

    if (part != MomentPart::Convolution) {
        for (std::size_t eta = 0; eta <= grid.steps(); ++eta) {
            for (std::size_t j = 0; j < modes; ++j) {
                const double r = table.factor(j, 0, eta);
                out.at(eta, j) = r * r * xi[j] * xi[j];
            }
        }
    }
    if (part == MomentPart::Initial) return out;

    std::vector<double> col(modes);
    for (std::size_t l = 0; l < es.levels(); ++l) {
        for (std::size_t i = 1; i <= grid.level_steps(l); ++i) {
            const std::size_t start = grid.node_index(i - 1, l);
            op.column(grid.tau(start), zeros, l, col);
            const double scale = es.q(l) * grid.level_dt(i, l);
            for (std::size_t eta = grid.node_index(i, l); eta <= grid.steps(); ++eta) {
                for (std::size_t j = 0; j < modes; ++j) {
                    const double r = table.factor(j, start, eta);
                    out.at(eta, j) += r * r * col[j] * col[j] * scale;
                }
            }
        }
    }
    return out;
}

MomentTable continuous_second_moments(const Eigensystem& es, const DiffusionOperator& op, const SpectralVector& xi,
                                      std::span<const double> times) {
    if (!op.state_independent() || !op.diagonal()) {
        fail(ErrorCode::StateDependentDiffusion, "continuous oracle needs diagonal state-independent diffusion");
    }
    if (times.empty()) {
        fail(ErrorCode::InvalidArgument, "continuous oracle needs at least one time");
    }
    const std::size_t modes = es.modes();
    if (xi.size() < modes) {
        fail(ErrorCode::DimensionMismatch, "initial condition shorter than the eigensystem");
    }
    const std::vector<double> zeros(modes, 0.0);
    MomentTable out(times.size() - 1, modes, true);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double s = times[k];
        for (std::size_t j = 0; j < modes; ++j) {
            const double lambda = es.lambda(j);
            double noise = 0.0;
            if (j < es.levels()) {
                const double b = op.diagonal_entry(s, zeros, j);
                noise = es.q(j) * b * b * (-std::expm1(-2.0 * lambda * s)) / (2.0 * lambda);
            }
            out.at(k, j) = std::exp(-2.0 * lambda * s) * xi[j] * xi[j] + noise;
        }
    }
    return out;
}

bool InitWeightReport::holds() const noexcept {
    return lhs <= bound &&
           std::all_of(modes.begin(), modes.end(), [](const InitWeight& w) { return w.margin >= 0.0; });
}

InitWeightReport init_weight_check(const Eigensystem& es, const MergedGrid& grid, const ResolventTable& table,
                                   const SpectralVector& xi, double iota) {
    require_iota(iota);
    const std::size_t modes = es.modes();
    if (xi.size() < modes) {
        fail(ErrorCode::DimensionMismatch, "initial condition shorter than the eigensystem");
    }
    InitWeightReport report;
    for (std::size_t j = 0; j < modes; ++j) {
        InitWeight w;
        w.mode = j;
        for (std::size_t eta = 1; eta <= grid.steps(); ++eta) {
            const double r = table.factor(j, 0, eta);
            w.weight += r * r * grid.dtau(eta);
        }
        w.bound = 2.0 / es.lambda(j);
        w.margin = w.bound - w.weight;
        report.lhs += power_weight(es.lambda(j), 2.0 * iota + 1.0) * xi[j] * xi[j] * w.weight;
        report.modes.push_back(w);
    }
    report.bound = 2.0 * init_norm_squared(xi, es, iota);
    return report;
}

ExactRegularity exact_regularity(const Eigensystem& es, const MergedGrid& grid, const ResolventTable& table,
                                 const DiffusionOperator& op, const SpectralVector& xi, double iota) {
    ExactRegularity r;
    const auto full = exact_second_moments(es, grid, table, op, xi, MomentPart::Full);
    const auto conv = exact_second_moments(es, grid, table, op, xi, MomentPart::Convolution);
    r.lhs = maxreg_lhs(full, es, grid, iota);
    r.lhs_conv = maxreg_lhs(conv, es, grid, iota);
    r.rhs = maxreg_rhs(es, grid, op, nullptr, iota);
    r.bound = 2.0 * init_norm_squared(xi, es, iota) + r.rhs;
    r.conv_holds = r.lhs_conv <= r.rhs;
    r.full_holds = r.lhs <= r.bound;
    return r;
}

namespace {

struct PathResult {
    bool failed = false;
    std::vector<double> squares;  // (eta, j) row-major
    double lhs = 0.0;
    double lhs_conv = 0.0;
    double rhs = 0.0;
};

constexpr std::size_t kBlock = 256;

}  // namespace

RegularityReport mc_regularity_experiment(const ExperimentConfig& config) {
    if (!config.es || !config.grid || !config.op) {
        fail(ErrorCode::InvalidArgument, "experiment needs an eigensystem, grid and operator");
    }
    if (config.paths < 2) {
        fail(ErrorCode::InvalidArgument, "experiment needs at least two paths");
    }
    require_iota(config.iota);
    const auto& es = *config.es;
    const auto& grid = *config.grid;
    const auto& op = *config.op;
    const std::size_t modes = es.modes();
    const std::size_t steps = grid.steps();
    const auto table = ResolventTable::build(es, grid);

    std::vector<double> w_lhs(modes);
    for (std::size_t j = 0; j < modes; ++j) w_lhs[j] = power_weight(es.lambda(j), 2.0 * config.iota + 1.0);
    const double init_term = init_norm_squared(config.xi, es, config.iota);

    auto run_path = [&](std::size_t p, PathResult& out) {
        const NoiseStream stream{config.seed, p};
        const auto inc = config.noise_grid
                             ? coarsen_increments(sample_merged_increments(*config.noise_grid, grid.levels(), stream),
                                                  *config.noise_grid, grid)
                             : sample_path_increments(grid, stream);
        const SolverInput in{es, grid, table, op, config.xi, inc};
        Trajectory traj(steps, modes);
        try {
            traj = run_recursive(in);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonFiniteState) throw;
            out.failed = true;
            return;
        }
        out.failed = false;
        out.squares.assign((steps + 1) * modes, 0.0);
        out.lhs = 0.0;
        out.lhs_conv = 0.0;
        for (std::size_t eta = 0; eta <= steps; ++eta) {
            double full = 0.0;
            double conv = 0.0;
            for (std::size_t j = 0; j < modes; ++j) {
                const double x = traj.at(eta, j);
                const double c = x - table.factor(j, 0, eta) * config.xi[j];
                out.squares[eta * modes + j] = x * x;
                full += w_lhs[j] * x * x;
                conv += w_lhs[j] * c * c;
            }
            if (eta > 0) {
                out.lhs += full * grid.dtau(eta);
                out.lhs_conv += conv * grid.dtau(eta);
            }
        }
        out.rhs = maxreg_rhs(es, grid, op, &traj, config.iota);
    };

    std::vector<Running> cells((steps + 1) * modes);
    Running lhs;
    Running lhs_conv;
    Running rhs;
    Running slack;
    std::size_t failed = 0;
    std::vector<PathResult> block(kBlock);
    for (std::size_t first = 0; first < config.paths; first += kBlock) {
        const std::size_t count = std::min(kBlock, config.paths - first);
        parallel_for(count, config.threads, [&](std::size_t k) { run_path(first + k, block[k]); });
        for (std::size_t k = 0; k < count; ++k) {
            const auto& r = block[k];
            if (r.failed) {
                ++failed;
                continue;
            }
            for (std::size_t c = 0; c < cells.size(); ++c) cells[c].push(r.squares[c]);
            lhs.push(r.lhs);
            lhs_conv.push(r.lhs_conv);
            rhs.push(r.rhs);
            slack.push(2.0 * init_term + r.rhs - r.lhs);
        }
    }
    if (failed == config.paths) {
        fail(ErrorCode::AllPathsFailed, "every Monte Carlo path produced a non-finite state");
    }

    RegularityReport report;
    report.iota = config.iota;
    report.paths = config.paths;
    report.failed_paths = failed;
    report.lhs = lhs.estimate();
    report.lhs_conv = lhs_conv.estimate();
    report.rhs = rhs.estimate();
    report.slack = slack.estimate();
    report.init_term = init_term;
    report.bound = 2.0 * init_term + report.rhs.mean;
    report.relative_se = report.bound > 0.0 ? report.slack.standard_error / report.bound : 0.0;
    report.gate = report.bound * (1.0 + 4.0 * report.relative_se);
    report.moments = MomentTable(steps, modes, false);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        report.moments.values[c] = cells[c].mean;
        report.moments.standard_errors[c] = cells[c].standard_error();
    }
    report.lhs_terms = maxreg_lhs_terms(report.moments, es, grid, config.iota);

    report.statistical_holds = report.lhs.mean <= report.gate;
    if (op.state_independent()) {
        report.exact = exact_regularity(es, grid, table, op, config.xi, config.iota);
        report.exact_moments = exact_second_moments(es, grid, table, op, config.xi);
        report.holds = report.exact->conv_holds && report.exact->full_holds;
        report.verdict = report.holds ? "holds (exact)" : "violated (exact)";
    } else {
        report.holds = report.statistical_holds;
        report.verdict = report.holds ? "holds (statistical)" : "violated (statistical)";
    }
    return report;
}

}  // namespace nuem
