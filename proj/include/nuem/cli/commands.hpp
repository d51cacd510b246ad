#pragma once

#include <array>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include "nuem/cli/config.hpp"

namespace nuem::cli {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

inline constexpr std::array<std::string_view, 5> kSubcommands = {"check-lemma", "simulate", "maxreg", "oracle",
                                                                  "compare-uniform"};

struct CommandOptions {
    bool dump_increments = false;
};

/// Runs one subcommand and writes its artifacts plus manifest.json into
/// cfg.out_dir. Library errors propagate as nuem::Error.
void run(std::string_view subcommand, const RunConfig& cfg, const CommandOptions& options = {});

/// Machine-readable error document: {"error": {"code", "message", "subcommand", "step"?}}.
std::string error_json(std::string_view subcommand, std::string_view code, std::string_view message,
                       const std::optional<std::size_t>& step = std::nullopt);

/// Fixed 17-significant-digit rendering used in every CSV.
std::string format_double(double v);

}  // namespace nuem::cli
