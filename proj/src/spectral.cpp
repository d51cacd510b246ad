#include "nuem/spectral.hpp"

#include <cmath>
#include <string>

#include "nuem/error.hpp"

namespace nuem {

namespace {

void validate_lambdas(const std::vector<double>& lambdas) {
    if (lambdas.empty()) {
        fail(ErrorCode::InvalidArgument, "eigensystem needs at least one mode");
    }
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        if (!std::isfinite(lambdas[j]) || lambdas[j] <= 0.0) {
            fail(ErrorCode::NonMonotoneSpectrum,
                 "lambda_" + std::to_string(j + 1) + " must be finite and positive");
        }
        if (j > 0 && !(lambdas[j] > lambdas[j - 1])) {
            fail(ErrorCode::NonMonotoneSpectrum,
                 "lambda must be strictly increasing (lambda_" + std::to_string(j + 1) +
                     " <= lambda_" + std::to_string(j) + ")");
        }
    }
}

void validate_qs(const std::vector<double>& qs) {
    if (qs.empty()) {
        fail(ErrorCode::InvalidArgument, "eigensystem needs at least one noise level");
    }
    for (std::size_t l = 0; l < qs.size(); ++l) {
        if (!std::isfinite(qs[l])) {
            fail(ErrorCode::NegativeCovariance, "q_" + std::to_string(l + 1) + " is not finite");
        }
        if (qs[l] < 0.0) {
            fail(ErrorCode::NegativeCovariance, "q_" + std::to_string(l + 1) + " is negative");
        }
    }
}

std::vector<double> power_values(double scale, double exponent, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] = scale * std::pow(static_cast<double>(k + 1), exponent);
    }
    return out;
}

}  // namespace

Eigensystem Eigensystem::from_values(std::vector<double> lambdas, std::vector<double> qs) {
    validate_lambdas(lambdas);
    validate_qs(qs);
    return Eigensystem(std::move(lambdas), std::move(qs));
}

Eigensystem Eigensystem::from_power_law(const PowerLawSpec& spec) {
    return make_eigensystem(PowerLaw{spec.lambda_scale, spec.lambda_exponent, spec.modes},
                            PowerLaw{spec.q_scale, spec.q_exponent, spec.levels});
}

Eigensystem make_eigensystem(const SpectrumSpec& lambda, const SpectrumSpec& q) {
    std::vector<double> lambdas;
    if (const auto* p = std::get_if<PowerLaw>(&lambda)) {
        if (!(p->scale > 0.0) || !(p->exponent > 0.0)) {
            fail(ErrorCode::InvalidArgument, "lambda power law needs scale > 0 and exponent > 0");
        }
        lambdas = power_values(p->scale, p->exponent, p->count);
    } else {
        lambdas = std::get<ExplicitValues>(lambda).values;
    }

    std::vector<double> qs;
    if (const auto* p = std::get_if<PowerLaw>(&q)) {
        if (p->scale < 0.0) {
            fail(ErrorCode::NegativeCovariance, "q power law needs scale >= 0");
        }
        if (!(p->exponent > 1.0)) {
            fail(ErrorCode::InvalidArgument, "q power law needs exponent > 1 (finite trace)");
        }
        qs = power_values(p->scale, -p->exponent, p->count);
    } else {
        qs = std::get<ExplicitValues>(q).values;
    }
    return Eigensystem::from_values(std::move(lambdas), std::move(qs));
}

SpectralVector::SpectralVector(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
        if (!std::isfinite(coeffs_[j])) {
            fail(ErrorCode::InvalidArgument,
                 "spectral coefficient " + std::to_string(j + 1) + " is not finite");
        }
    }
}

double fractional_norm_squared(std::span<const double> x, std::span<const double> lambdas, double r) {
    if (r < 0.0) {
        fail(ErrorCode::NegativeExponent, "fractional exponent must be non-negative");
    }
    if (x.size() > lambdas.size()) {
        fail(ErrorCode::DimensionMismatch, "vector has more modes than the eigensystem");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double w = r == 0.0 ? 1.0 : std::pow(lambdas[j], 2.0 * r);
        sum += w * x[j] * x[j];
    }
    return sum;
}

double fractional_norm(const SpectralVector& x, const Eigensystem& es, double r) {
    return std::sqrt(fractional_norm_squared(x.coeffs(), es.lambdas(), r));
}

SpectralVector project(const SpectralVector& x, std::size_t modes) {
    if (modes > x.size()) {
        fail(ErrorCode::TruncationTooLarge, "cannot project " + std::to_string(x.size()) +
                                                " modes onto " + std::to_string(modes));
    }
    auto c = x.coeffs();
    return SpectralVector(std::vector<double>(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(modes)));
}

}  // namespace nuem
