#include "nuem/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "nuem/error.hpp"

namespace nuem::cli {

namespace {

[[noreturn]] void invalid(const std::string& key, const std::string& reason) {
    fail(ErrorCode::ValidationError, key + ": " + reason);
}

double number(const toml::node* node, const std::string& key) {
    if (!node) invalid(key, "required key is missing");
    if (const auto* i = node->as_integer()) return static_cast<double>(i->get());
    if (const auto* f = node->as_floating_point()) {
        if (!std::isfinite(f->get())) invalid(key, "must be finite");
        return f->get();
    }
    invalid(key, "must be a number");
}

std::uint64_t unsigned_integer(const toml::node* node, const std::string& key) {
    if (!node) invalid(key, "required key is missing");
    if (const auto* i = node->as_integer()) {
        if (i->get() < 0) invalid(key, "must be non-negative");
        return static_cast<std::uint64_t>(i->get());
    }
    if (const auto* s = node->as_string()) {
        // u64 values above the TOML integer range are written as strings
        const std::string& text = s->get();
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) invalid(key, "must be an unsigned integer");
        return v;
    }
    invalid(key, "must be an unsigned integer");
}

std::vector<double> number_array(const toml::node* node, const std::string& key) {
    if (!node) invalid(key, "required key is missing");
    const auto* arr = node->as_array();
    if (!arr) invalid(key, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < arr->size(); ++k) {
        out.push_back(number(arr->get(k), key + "[" + std::to_string(k) + "]"));
    }
    return out;
}

std::string string_value(const toml::node* node, const std::string& key) {
    if (!node) invalid(key, "required key is missing");
    const auto* s = node->as_string();
    if (!s) invalid(key, "must be a string");
    return s->get();
}

const toml::table& table_value(const toml::node* node, const std::string& key) {
    if (!node) invalid(key, "required key is missing");
    const auto* t = node->as_table();
    if (!t) invalid(key, "must be a table");
    return *t;
}

void allow_keys(const toml::table& t, const std::string& prefix, std::initializer_list<std::string_view> keys) {
    const std::set<std::string_view> allowed(keys);
    for (const auto& [k, v] : t) {
        if (!allowed.count(k.str())) {
            invalid(prefix.empty() ? std::string(k.str()) : prefix + "." + std::string(k.str()), "unknown key");
        }
    }
}

SpectrumSpec parse_spectrum(const toml::node* node, const std::string& key) {
    const auto& t = table_value(node, key);
    const std::string type = string_value(t.get("type"), key + ".type");
    if (type == "powerlaw") {
        allow_keys(t, key, {"type", "scale", "exponent", "count"});
        const auto count = unsigned_integer(t.get("count"), key + ".count");
        if (count == 0) invalid(key + ".count", "must be at least 1");
        return PowerLaw{number(t.get("scale"), key + ".scale"), number(t.get("exponent"), key + ".exponent"),
                        static_cast<std::size_t>(count)};
    }
    if (type == "explicit") {
        allow_keys(t, key, {"type", "values"});
        return ExplicitValues{number_array(t.get("values"), key + ".values")};
    }
    invalid(key + ".type", "must be \"powerlaw\" or \"explicit\"");
}

std::size_t spectrum_size(const SpectrumSpec& s) {
    if (const auto* p = std::get_if<PowerLaw>(&s)) return p->count;
    return std::get<ExplicitValues>(s).values.size();
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos &&
        s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::string format_array(const std::vector<double>& values) {
    std::string s = "[";
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) s += ", ";
        s += format_number(values[k]);
    }
    return s + "]";
}

std::string format_spectrum(const SpectrumSpec& s) {
    if (const auto* p = std::get_if<PowerLaw>(&s)) {
        return "{type = \"powerlaw\", scale = " + format_number(p->scale) +
               ", exponent = " + format_number(p->exponent) + ", count = " + std::to_string(p->count) + "}";
    }
    return "{type = \"explicit\", values = " + format_array(std::get<ExplicitValues>(s).values) + "}";
}

void validate(RunConfig& cfg) {
    const std::size_t modes = spectrum_size(cfg.lambda);
    const std::size_t levels = spectrum_size(cfg.q);
    try {
        nuem::make_eigensystem(cfg.lambda, PowerLaw{1.0, 2.0, 1});
    } catch (const Error& e) {
        invalid("lambda", e.what());
    }
    try {
        nuem::make_eigensystem(PowerLaw{1.0, 1.0, 1}, cfg.q);
    } catch (const Error& e) {
        invalid("q", e.what());
    }

    if (cfg.n_levels.has_value() == cfg.n_rule.has_value()) {
        invalid("n_levels", "exactly one of n_levels and n_rule must be given");
    }
    if (cfg.n_levels) {
        if (cfg.n_levels->size() != levels) {
            invalid("n_levels", "needs one entry per noise level (" + std::to_string(levels) + ")");
        }
        for (auto n : *cfg.n_levels) {
            if (n == 0) invalid("n_levels", "every level needs at least one step");
        }
    } else {
        if (!(cfg.n_rule->base > 0.0) || !(cfg.n_rule->ratio > 0.0)) {
            invalid("n_rule", "base and ratio must be positive");
        }
    }

    auto& d = cfg.diffusion;
    if (d.kind == DiffusionSpec::Kind::Additive) {
        if (d.sigma.size() != levels) invalid("diffusion.sigma", "needs one entry per noise level");
    } else {
        if (d.gamma.size() != levels) invalid("diffusion.gamma", "needs one entry per noise level");
        if (d.rho.size() != levels) invalid("diffusion.rho", "needs one entry per noise level");
    }
    if (!(cfg.iota >= 0.0 && cfg.iota <= 0.5)) {
        invalid("iota", "iota must lie in [0, 0.5]");
    }
    if (cfg.xi.kind == XiSpec::Kind::Explicit && cfg.xi.values.size() != modes) {
        invalid("xi.values", "needs one coefficient per mode (" + std::to_string(modes) + ")");
    }
    if (cfg.paths == 0) invalid("paths", "must be at least 1");
    if (cfg.threads == 0) invalid("threads", "must be at least 1");
    if (cfg.out_dir.empty()) invalid("out_dir", "must not be empty");
}

}  // namespace

RunConfig parse_config(std::string_view text, const Overrides& overrides) {
    toml::table doc;
    try {
        doc = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "line " << e.source().begin.line << ", column " << e.source().begin.column << ": "
            << e.description();
        fail(ErrorCode::ParseError, msg.str());
    }
    allow_keys(doc, "",
               {"seed", "paths", "iota", "lambda", "q", "n_levels", "n_rule", "diffusion", "xi", "out_dir", "threads"});

    RunConfig cfg;
    cfg.lambda = parse_spectrum(doc.get("lambda"), "lambda");
    cfg.q = parse_spectrum(doc.get("q"), "q");

    if (const auto* node = doc.get("n_levels")) {
        std::vector<std::size_t> n;
        for (double v : number_array(node, "n_levels")) {
            if (v < 1.0 || v != std::floor(v)) invalid("n_levels", "entries must be positive integers");
            n.push_back(static_cast<std::size_t>(v));
        }
        cfg.n_levels = std::move(n);
    }
    if (const auto* node = doc.get("n_rule")) {
        const auto& t = table_value(node, "n_rule");
        allow_keys(t, "n_rule", {"type", "base", "ratio"});
        if (string_value(t.get("type"), "n_rule.type") != "geometric") {
            invalid("n_rule.type", "must be \"geometric\"");
        }
        cfg.n_rule = GeometricRule{number(t.get("base"), "n_rule.base"), number(t.get("ratio"), "n_rule.ratio")};
    }

    const auto& diff = table_value(doc.get("diffusion"), "diffusion");
    const std::string dtype = string_value(diff.get("type"), "diffusion.type");
    std::optional<double> diffusion_iota;
    if (diff.get("iota")) diffusion_iota = number(diff.get("iota"), "diffusion.iota");
    if (dtype == "additive") {
        allow_keys(diff, "diffusion", {"type", "sigma", "iota"});
        cfg.diffusion.kind = DiffusionSpec::Kind::Additive;
        cfg.diffusion.sigma = number_array(diff.get("sigma"), "diffusion.sigma");
    } else if (dtype == "linear") {
        allow_keys(diff, "diffusion", {"type", "gamma", "rho", "iota"});
        cfg.diffusion.kind = DiffusionSpec::Kind::Linear;
        cfg.diffusion.gamma = number_array(diff.get("gamma"), "diffusion.gamma");
        cfg.diffusion.rho = number_array(diff.get("rho"), "diffusion.rho");
    } else {
        invalid("diffusion.type", "must be \"additive\" or \"linear\"");
    }

    if (const auto* node = doc.get("iota")) {
        cfg.iota = number(node, "iota");
        if (diffusion_iota && *diffusion_iota != cfg.iota) {
            invalid("diffusion.iota", "conflicts with top-level iota");
        }
    } else if (diffusion_iota) {
        cfg.iota = *diffusion_iota;
    } else {
        invalid("iota", "required key is missing");
    }

    if (const auto* node = doc.get("xi")) {
        const auto& t = table_value(node, "xi");
        const std::string type = string_value(t.get("type"), "xi.type");
        if (type == "explicit") {
            allow_keys(t, "xi", {"type", "values"});
            cfg.xi.kind = XiSpec::Kind::Explicit;
            cfg.xi.values = number_array(t.get("values"), "xi.values");
        } else if (type == "powerlaw") {
            allow_keys(t, "xi", {"type", "scale", "exponent"});
            cfg.xi.kind = XiSpec::Kind::PowerLaw;
            cfg.xi.scale = number(t.get("scale"), "xi.scale");
            cfg.xi.exponent = number(t.get("exponent"), "xi.exponent");
        } else {
            invalid("xi.type", "must be \"explicit\" or \"powerlaw\"");
        }
    } else {
        cfg.xi.kind = XiSpec::Kind::Explicit;
        cfg.xi.values.assign(spectrum_size(cfg.lambda), 0.0);
    }

    if (overrides.seed) {
        cfg.seed = *overrides.seed;
    } else {
        cfg.seed = unsigned_integer(doc.get("seed"), "seed");
    }
    if (overrides.paths) {
        cfg.paths = *overrides.paths;
    } else if (const auto* node = doc.get("paths")) {
        cfg.paths = static_cast<std::size_t>(unsigned_integer(node, "paths"));
    }
    if (overrides.threads) {
        cfg.threads = *overrides.threads;
    } else if (const auto* node = doc.get("threads")) {
        cfg.threads = static_cast<std::size_t>(unsigned_integer(node, "threads"));
    }
    if (overrides.out_dir) {
        cfg.out_dir = *overrides.out_dir;
    } else if (const auto* node = doc.get("out_dir")) {
        cfg.out_dir = string_value(node, "out_dir");
    }

    validate(cfg);
    return cfg;
}

std::string canonicalize(const RunConfig& cfg) {
    std::string out;
    if (cfg.seed > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        out += "seed = \"" + std::to_string(cfg.seed) + "\"\n";
    } else {
        out += "seed = " + std::to_string(cfg.seed) + "\n";
    }
    out += "paths = " + std::to_string(cfg.paths) + "\n";
    out += "iota = " + format_number(cfg.iota) + "\n";
    out += "lambda = " + format_spectrum(cfg.lambda) + "\n";
    out += "q = " + format_spectrum(cfg.q) + "\n";
    if (cfg.n_levels) {
        out += "n_levels = [";
        for (std::size_t k = 0; k < cfg.n_levels->size(); ++k) {
            if (k) out += ", ";
            out += std::to_string((*cfg.n_levels)[k]);
        }
        out += "]\n";
    } else {
        out += "n_rule = {type = \"geometric\", base = " + format_number(cfg.n_rule->base) +
               ", ratio = " + format_number(cfg.n_rule->ratio) + "}\n";
    }
    if (cfg.diffusion.kind == DiffusionSpec::Kind::Additive) {
        out += "diffusion = {type = \"additive\", sigma = " + format_array(cfg.diffusion.sigma) + "}\n";
    } else {
        out += "diffusion = {type = \"linear\", gamma = " + format_array(cfg.diffusion.gamma) +
               ", rho = " + format_array(cfg.diffusion.rho) + "}\n";
    }
    if (cfg.xi.kind == XiSpec::Kind::Explicit) {
        out += "xi = {type = \"explicit\", values = " + format_array(cfg.xi.values) + "}\n";
    } else {
        out += "xi = {type = \"powerlaw\", scale = " + format_number(cfg.xi.scale) +
               ", exponent = " + format_number(cfg.xi.exponent) + "}\n";
    }
    return out;
}

std::string config_digest(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonicalize(cfg)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::size_t> level_steps(const RunConfig& cfg) {
    if (cfg.n_levels) return *cfg.n_levels;
    const std::size_t levels = spectrum_size(cfg.q);
    std::vector<std::size_t> n(levels);
    for (std::size_t l = 0; l < levels; ++l) {
        const double v = cfg.n_rule->base * std::pow(cfg.n_rule->ratio, static_cast<double>(l));
        // guard against pow rounding just above an integer
        n[l] = static_cast<std::size_t>(std::max(1.0, std::ceil(v * (1.0 - 1e-12))));
    }
    return n;
}

Eigensystem make_eigensystem(const RunConfig& cfg) { return nuem::make_eigensystem(cfg.lambda, cfg.q); }

std::unique_ptr<DiffusionOperator> make_diffusion(const RunConfig& cfg) {
    if (cfg.diffusion.kind == DiffusionSpec::Kind::Additive) {
        return std::make_unique<AdditiveDiagonal>(cfg.diffusion.sigma, cfg.iota);
    }
    return std::make_unique<LinearDiagonal>(cfg.diffusion.gamma, cfg.diffusion.rho, cfg.iota);
}

SpectralVector make_initial_condition(const RunConfig& cfg, std::size_t modes) {
    if (cfg.xi.kind == XiSpec::Kind::Explicit) {
        return project(SpectralVector(cfg.xi.values), modes);
    }
    std::vector<double> v(modes);
    for (std::size_t j = 0; j < modes; ++j) {
        v[j] = cfg.xi.scale * std::pow(static_cast<double>(j + 1), -cfg.xi.exponent);
    }
    return SpectralVector(std::move(v));
}

}  // namespace nuem::cli
