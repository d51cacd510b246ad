#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace nuem {

/// Power-law family value_k = scale * k^exponent for k = 1..count.
struct PowerLaw {
    double scale = 1.0;
    double exponent = 1.0;
    std::size_t count = 0;
};

/// Explicit list of values.
struct ExplicitValues {
    std::vector<double> values;
};

using SpectrumSpec = std::variant<PowerLaw, ExplicitValues>;

/// Concrete spectra for the drift operator and the noise covariance.
/// lambda_j = lambda_scale * j^lambda_exponent, q_l = q_scale * l^(-q_exponent).
struct PowerLawSpec {
    double lambda_scale = 1.0;
    double lambda_exponent = 2.0;
    double q_scale = 1.0;
    double q_exponent = 2.0;
    std::size_t modes = 1;
    std::size_t levels = 1;
};

/// Eigenvalues lambda_j of -A (strictly increasing, positive) and
/// eigenvalues q_l of the covariance Q (non-negative) in a shared basis.
/// Modes and levels are zero-based: lambda(0) is the first eigenvalue.
class Eigensystem {
public:
    static Eigensystem from_values(std::vector<double> lambdas, std::vector<double> qs);
    static Eigensystem from_power_law(const PowerLawSpec& spec);

    std::span<const double> lambdas() const noexcept { return lambdas_; }
    std::span<const double> qs() const noexcept { return qs_; }
    double lambda(std::size_t j) const { return lambdas_.at(j); }
    double q(std::size_t l) const { return qs_.at(l); }
    std::size_t modes() const noexcept { return lambdas_.size(); }
    std::size_t levels() const noexcept { return qs_.size(); }

private:
    Eigensystem(std::vector<double> lambdas, std::vector<double> qs)
        : lambdas_(std::move(lambdas)), qs_(std::move(qs)) {}

    std::vector<double> lambdas_;
    std::vector<double> qs_;
};

/// Builds an eigensystem from independent lambda and q specifications.
/// A power-law q spec is read as q_l = scale * l^(-exponent) and requires
/// exponent > 1 so that the full trace is finite.
Eigensystem make_eigensystem(const SpectrumSpec& lambda, const SpectrumSpec& q);

/// Truncated Fourier coefficients <x, h_j> of an H-valued object.
class SpectralVector {
public:
    SpectralVector() = default;
    explicit SpectralVector(std::vector<double> coeffs);

    static SpectralVector zeros(std::size_t n) { return SpectralVector(std::vector<double>(n, 0.0)); }

    std::span<const double> coeffs() const noexcept { return coeffs_; }
    std::size_t size() const noexcept { return coeffs_.size(); }
    double operator[](std::size_t j) const { return coeffs_[j]; }

private:
    std::vector<double> coeffs_;
};

/// ||x||_{D(A^r)} = (sum_j lambda_j^{2r} x_j^2)^{1/2}, summed in ascending j.
/// x may be shorter than the eigensystem (a projection); never longer.
double fractional_norm(const SpectralVector& x, const Eigensystem& es, double r);
double fractional_norm_squared(std::span<const double> x, std::span<const double> lambdas, double r);

/// Keeps the first `modes` coefficients.
SpectralVector project(const SpectralVector& x, std::size_t modes);

}  // namespace nuem
