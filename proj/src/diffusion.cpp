#include "nuem/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nuem/error.hpp"

namespace nuem {

void validate_iota(double iota) {
    if (!(iota >= 0.0 && iota <= 0.5)) {
        fail(ErrorCode::ValidationError, "iota must lie in [0, 0.5]");
    }
}

double DiffusionOperator::diagonal_entry(double t, std::span<const double> x, std::size_t level) const {
    std::vector<double> col(level + 1, 0.0);
    column(t, x, level, col);
    return col[level];
}

std::vector<double> DiffusionOperator::matrix(double t, std::span<const double> x, std::size_t modes) const {
    const std::size_t l_count = levels();
    std::vector<double> out(modes * l_count, 0.0);
    std::vector<double> col(modes);
    for (std::size_t l = 0; l < l_count; ++l) {
        column(t, x, l, col);
        for (std::size_t j = 0; j < modes; ++j) {
            out[j * l_count + l] = col[j];
        }
    }
    return out;
}

AdditiveDiagonal::AdditiveDiagonal(std::vector<double> sigma, double iota) : sigma_(std::move(sigma)), iota_(iota) {
    validate_iota(iota_);
}

void AdditiveDiagonal::column(double, std::span<const double>, std::size_t level, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (level < out.size()) out[level] = sigma_.at(level);
}

double AdditiveDiagonal::diagonal_entry(double, std::span<const double>, std::size_t level) const {
    return sigma_.at(level);
}

LinearDiagonal::LinearDiagonal(std::vector<double> gamma, std::vector<double> rho, double iota)
    : gamma_(std::move(gamma)), rho_(std::move(rho)), iota_(iota) {
    validate_iota(iota_);
    if (gamma_.size() != rho_.size()) {
        fail(ErrorCode::DimensionMismatch, "gamma and rho must have the same length");
    }
}

bool LinearDiagonal::state_independent() const noexcept {
    return std::all_of(rho_.begin(), rho_.end(), [](double r) { return r == 0.0; });
}

void LinearDiagonal::column(double t, std::span<const double> x, std::size_t level, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (level < out.size()) out[level] = diagonal_entry(t, x, level);
}

double LinearDiagonal::diagonal_entry(double, std::span<const double> x, std::size_t level) const {
    const double xl = level < x.size() ? x[level] : 0.0;
    return gamma_.at(level) + rho_.at(level) * xl;
}

ConstantMatrix::ConstantMatrix(std::size_t modes, std::size_t levels, std::vector<double> coeffs, double iota)
    : modes_(modes), levels_(levels), coeffs_(std::move(coeffs)), iota_(iota) {
    validate_iota(iota_);
    if (coeffs_.size() != modes_ * levels_) {
        fail(ErrorCode::DimensionMismatch, "coefficient matrix must have modes * levels entries");
    }
}

void ConstantMatrix::column(double, std::span<const double>, std::size_t level, std::span<double> out) const {
    if (level >= levels_) {
        fail(ErrorCode::IndexOutOfRange, "level beyond coefficient matrix");
    }
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = j < modes_ ? coeffs_[j * levels_ + level] : 0.0;
    }
}

CallbackOperator::CallbackOperator(Fn fn, std::size_t levels, double iota, bool state_independent)
    : fn_(std::move(fn)), levels_(levels), iota_(iota), state_independent_(state_independent) {
    validate_iota(iota_);
    if (!fn_) {
        fail(ErrorCode::InvalidArgument, "callback operator needs a coefficient function");
    }
}

void CallbackOperator::column(double t, std::span<const double> x, std::size_t level, std::span<double> out) const {
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = fn_(t, x, j, level);
    }
}

namespace {

double weight(double lambda, double r) { return r == 0.0 ? 1.0 : std::pow(lambda, 2.0 * r); }

void check_levels(const DiffusionOperator& op, const Eigensystem& es) {
    if (op.levels() < es.levels()) {
        fail(ErrorCode::DimensionMismatch, "diffusion operator defines fewer levels than the eigensystem");
    }
}

}  // namespace

double hs_norm(const DiffusionOperator& op, const Eigensystem& es, double t, std::span<const double> x, double r,
               std::size_t modes, std::size_t levels) {
    if (r < 0.0) {
        fail(ErrorCode::NegativeExponent, "fractional exponent must be non-negative");
    }
    check_levels(op, es);
    if (modes > es.modes() || levels > es.levels()) {
        fail(ErrorCode::TruncationTooLarge, "truncation exceeds the eigensystem");
    }
    std::vector<double> col(modes);
    double sum = 0.0;
    for (std::size_t l = 0; l < levels; ++l) {
        op.column(t, x, l, col);
        double inner = 0.0;
        for (std::size_t j = 0; j < modes; ++j) {
            inner += weight(es.lambda(j), r) * col[j] * col[j];
        }
        sum += es.q(l) * inner;
    }
    return std::sqrt(sum);
}

double hs_norm(const DiffusionOperator& op, const Eigensystem& es, double t, std::span<const double> x, double r) {
    return hs_norm(op, es, t, x, r, es.modes(), es.levels());
}

double hs_norm_difference(const DiffusionOperator& op, const Eigensystem& es, double t, std::span<const double> u,
                          std::span<const double> v, double r) {
    if (r < 0.0) {
        fail(ErrorCode::NegativeExponent, "fractional exponent must be non-negative");
    }
    check_levels(op, es);
    std::vector<double> cu(es.modes());
    std::vector<double> cv(es.modes());
    double sum = 0.0;
    for (std::size_t l = 0; l < es.levels(); ++l) {
        op.column(t, u, l, cu);
        op.column(t, v, l, cv);
        double inner = 0.0;
        for (std::size_t j = 0; j < es.modes(); ++j) {
            const double d = cu[j] - cv[j];
            inner += weight(es.lambda(j), r) * d * d;
        }
        sum += es.q(l) * inner;
    }
    return std::sqrt(sum);
}

ValidationReport check_assumption_B(const DiffusionOperator& op, const Eigensystem& es, std::size_t sample_count,
                                    std::uint64_t seed) {
    if (sample_count < 2) {
        fail(ErrorCode::InvalidArgument, "check_assumption_B needs at least two samples");
    }
    check_levels(op, es);
    ValidationReport report;
    report.samples = sample_count;
    report.note =
        "quotients are suprema over sampled inputs: empirical lower bounds on the Lipschitz and "
        "linear-growth constants, not proofs";

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t modes = es.modes();
    std::vector<double> u(modes);
    std::vector<double> v(modes);
    for (std::size_t k = 0; k < sample_count; ++k) {
        const double t = unit(rng);
        const double scale = std::pow(10.0, -2.0 + 4.0 * unit(rng));
        for (std::size_t j = 0; j < modes; ++j) {
            u[j] = scale * normal(rng);
            v[j] = scale * normal(rng);
        }
        // Perturb a single mode every other sample to probe coordinate directions.
        if (k % 2 == 1) {
            v = u;
            v[k / 2 % modes] += scale * (0.5 + unit(rng));
        }

        const double diff = hs_norm_difference(op, es, t, u, v, 0.0);
        double dist = 0.0;
        for (std::size_t j = 0; j < modes; ++j) dist += (u[j] - v[j]) * (u[j] - v[j]);
        dist = std::sqrt(dist);
        const double growth =
            hs_norm(op, es, t, u, op.iota()) / (1.0 + std::sqrt(fractional_norm_squared(u, es.lambdas(), op.iota())));

        if (!std::isfinite(diff) || !std::isfinite(growth)) {
            report.failures.push_back("non-finite coefficients at sample " + std::to_string(k) +
                                      " (t = " + std::to_string(t) + ")");
            continue;
        }
        if (dist > 0.0) {
            report.lipschitz_quotient = std::max(report.lipschitz_quotient, diff / dist);
        }
        report.growth_quotient = std::max(report.growth_quotient, growth);
    }
    return report;
}

}  // namespace nuem
