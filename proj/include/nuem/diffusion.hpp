#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nuem/spectral.hpp"

namespace nuem {

/// Coefficient oracle for the diffusion operator:
///   b_{j,l}(t, x) = <B(t, x) h_l, h_j>,  j < modes, l < levels.
/// Both scheme forms only ever need these coefficients.
class DiffusionOperator {
public:
    virtual ~DiffusionOperator() = default;

    /// Number of noise levels the operator is defined for.
    virtual std::size_t levels() const noexcept = 0;
    /// Smoothness index iota in [0, 1/2].
    virtual double iota() const noexcept = 0;
    virtual bool state_independent() const noexcept = 0;
    /// Diagonal operators have b_{j,l} = 0 for j != l.
    virtual bool diagonal() const noexcept { return false; }

    /// Column l of the coefficient matrix: out[j] = b_{j,l}(t, x) for j < out.size().
    virtual void column(double t, std::span<const double> x, std::size_t level, std::span<double> out) const = 0;

    /// b_{l,l}(t, x); only meaningful for diagonal operators.
    virtual double diagonal_entry(double t, std::span<const double> x, std::size_t level) const;

    /// Dense coefficient matrix, row-major (j, l), modes x levels().
    std::vector<double> matrix(double t, std::span<const double> x, std::size_t modes) const;
};

/// b_{j,l} = sigma_l when j == l, else 0.
class AdditiveDiagonal final : public DiffusionOperator {
public:
    AdditiveDiagonal(std::vector<double> sigma, double iota = 0.0);

    std::size_t levels() const noexcept override { return sigma_.size(); }
    double iota() const noexcept override { return iota_; }
    bool state_independent() const noexcept override { return true; }
    bool diagonal() const noexcept override { return true; }
    void column(double t, std::span<const double> x, std::size_t level, std::span<double> out) const override;
    double diagonal_entry(double t, std::span<const double> x, std::size_t level) const override;

    std::span<const double> sigma() const noexcept { return sigma_; }

private:
    std::vector<double> sigma_;
    double iota_;
};

/// b_{j,l}(t, x) = gamma_l + rho_l x_l when j == l, else 0.
class LinearDiagonal final : public DiffusionOperator {
public:
    LinearDiagonal(std::vector<double> gamma, std::vector<double> rho, double iota = 0.0);

    std::size_t levels() const noexcept override { return gamma_.size(); }
    double iota() const noexcept override { return iota_; }
    bool state_independent() const noexcept override;
    bool diagonal() const noexcept override { return true; }
    void column(double t, std::span<const double> x, std::size_t level, std::span<double> out) const override;
    double diagonal_entry(double t, std::span<const double> x, std::size_t level) const override;

private:
    std::vector<double> gamma_;
    std::vector<double> rho_;
    double iota_;
};

/// Constant dense coefficient matrix (row-major modes x levels).
class ConstantMatrix final : public DiffusionOperator {
public:
    ConstantMatrix(std::size_t modes, std::size_t levels, std::vector<double> coeffs, double iota = 0.0);

    std::size_t levels() const noexcept override { return levels_; }
    double iota() const noexcept override { return iota_; }
    bool state_independent() const noexcept override { return true; }
    void column(double t, std::span<const double> x, std::size_t level, std::span<double> out) const override;

private:
    std::size_t modes_;
    std::size_t levels_;
    std::vector<double> coeffs_;
    double iota_;
};

/// User-supplied coefficient function b(t, x, j, l). The function must be
/// pure and re-entrant; nothing is enforced beyond the declared metadata.
class CallbackOperator final : public DiffusionOperator {
public:
    using Fn = std::function<double(double t, std::span<const double> x, std::size_t j, std::size_t l)>;

    CallbackOperator(Fn fn, std::size_t levels, double iota, bool state_independent = false);

    std::size_t levels() const noexcept override { return levels_; }
    double iota() const noexcept override { return iota_; }
    bool state_independent() const noexcept override { return state_independent_; }
    void column(double t, std::span<const double> x, std::size_t level, std::span<double> out) const override;

private:
    Fn fn_;
    std::size_t levels_;
    double iota_;
    bool state_independent_;
};

/// Truncated Hilbert-Schmidt norm of B(t, x) from H_0 into D(A^r):
///   ( sum_{l<L} q_l sum_{j<J} lambda_j^{2r} b_{j,l}(t, x)^2 )^{1/2}.
double hs_norm(const DiffusionOperator& op, const Eigensystem& es, double t, std::span<const double> x, double r);
/// Same with the sums truncated at modes < J' and levels < L'.
double hs_norm(const DiffusionOperator& op, const Eigensystem& es, double t, std::span<const double> x, double r,
               std::size_t modes, std::size_t levels);
/// Same quantity for the difference B(t, u) - B(t, v).
double hs_norm_difference(const DiffusionOperator& op, const Eigensystem& es, double t, std::span<const double> u,
                          std::span<const double> v, double r);

/// Empirical check of the Lipschitz and linear-growth conditions. Both
/// quotients are suprema over the sampled inputs and therefore only lower
/// bounds on the true constants.
struct ValidationReport {
    std::size_t samples = 0;
    double lipschitz_quotient = 0.0;
    double growth_quotient = 0.0;
    std::vector<std::string> failures;
    std::string note;

    bool passed() const noexcept { return failures.empty(); }
};

ValidationReport check_assumption_B(const DiffusionOperator& op, const Eigensystem& es, std::size_t sample_count,
                                    std::uint64_t seed);

void validate_iota(double iota);

}  // namespace nuem
