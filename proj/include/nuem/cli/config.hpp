#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nuem/diffusion.hpp"
#include "nuem/spectral.hpp"

namespace nuem::cli {

struct DiffusionSpec {
    enum class Kind { Additive, Linear };
    Kind kind = Kind::Additive;
    std::vector<double> sigma;
    std::vector<double> gamma;
    std::vector<double> rho;
};

/// xi_j = scale * j^(-exponent) or explicit coefficients.
struct XiSpec {
    enum class Kind { Explicit, PowerLaw };
    Kind kind = Kind::Explicit;
    std::vector<double> values;
    double scale = 0.0;
    double exponent = 0.0;
};

/// n_l = ceil(base * ratio^(l-1)).
struct GeometricRule {
    double base = 1.0;
    double ratio = 1.0;
};

/// A fully validated run configuration.
struct RunConfig {
    SpectrumSpec lambda;
    SpectrumSpec q;
    std::optional<std::vector<std::size_t>> n_levels;
    std::optional<GeometricRule> n_rule;
    DiffusionSpec diffusion;
    double iota = 0.0;
    XiSpec xi;
    std::uint64_t seed = 0;
    std::size_t paths = 1000;
    std::string out_dir = "out";
    std::size_t threads = 1;
};

/// Command-line values that take precedence over config keys.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> threads;
    std::optional<std::string> out_dir;
};

/// Parses a TOML document, applies overrides and validates every key.
/// Throws Error{ParseError} on syntax errors and Error{ValidationError}
/// with a message starting with the offending key otherwise.
RunConfig parse_config(std::string_view text, const Overrides& overrides = {});

/// Canonical TOML text of the model part of a config (fixed key order, 17
/// significant digits). Execution settings (out_dir, threads) are excluded.
std::string canonicalize(const RunConfig& cfg);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_digest(const RunConfig& cfg);

std::vector<std::size_t> level_steps(const RunConfig& cfg);
Eigensystem make_eigensystem(const RunConfig& cfg);
std::unique_ptr<DiffusionOperator> make_diffusion(const RunConfig& cfg);
SpectralVector make_initial_condition(const RunConfig& cfg, std::size_t modes);

}  // namespace nuem::cli
