#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nuem/cli/commands.hpp"
#include "nuem/cli/config.hpp"
#include "nuem/error.hpp"

using namespace nuem;
using namespace nuem::cli;
namespace fs = std::filesystem;

namespace {

const std::string kBase = R"(
seed = 11
paths = 64
iota = 0.25
lambda = { type = "powerlaw", scale = 9.8696044010893586, exponent = 2.0, count = 4 }
q = { type = "powerlaw", scale = 1.0, exponent = 2.0, count = 2 }
n_levels = [2, 3]
diffusion = { type = "additive", sigma = [1.0, 0.5] }
xi = { type = "explicit", values = [1.0, 0.5, 0.0, 0.0] }
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

Error error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an error");
    return Error(ErrorCode::InvalidArgument, "");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("nuem_config_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("valid config parses") {
    const auto cfg = parse_config(kBase);
    CHECK(cfg.seed == 11);
    CHECK(cfg.paths == 64);
    CHECK(cfg.iota == 0.25);
    CHECK(level_steps(cfg) == std::vector<std::size_t>{2, 3});
    const auto es = make_eigensystem(cfg);
    CHECK(es.modes() == 4);
    CHECK(es.q(1) == 0.25);
    CHECK(make_initial_condition(cfg, 4)[1] == 0.5);
    CHECK(make_diffusion(cfg)->state_independent());
}

TEST_CASE("iota outside [0, 0.5] is rejected") {
    const auto e = error_of(replace(kBase, "iota = 0.25", "iota = 0.7"));
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()).find("iota must lie in [0, 0.5]") != std::string::npos);
}

TEST_CASE("missing seed names the key") {
    const auto e = error_of(replace(kBase, "seed = 11", ""));
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()).rfind("seed", 0) == 0);
    Overrides o;
    o.seed = 5;
    CHECK(parse_config(replace(kBase, "seed = 11", ""), o).seed == 5);
}

TEST_CASE("diagnostics") {
    const auto syntax = error_of("seed = = 3");
    CHECK(syntax.code() == ErrorCode::ParseError);
    CHECK(std::string(syntax.what()).rfind("line 1", 0) == 0);

    CHECK(std::string(error_of(kBase + "bogus = 1\n").what()).rfind("bogus", 0) == 0);
    CHECK(std::string(error_of(replace(kBase, "n_levels = [2, 3]", "n_levels = [2]")).what()).rfind("n_levels", 0) ==
          0);
    CHECK(std::string(error_of(replace(kBase, "sigma = [1.0, 0.5]", "sigma = [1.0]")).what())
              .rfind("diffusion.sigma", 0) == 0);
    CHECK(std::string(error_of(replace(kBase, "exponent = 2.0, count = 2", "exponent = 0.5, count = 2")).what())
              .rfind("q", 0) == 0);
    CHECK(std::string(error_of(replace(kBase, "values = [1.0, 0.5, 0.0, 0.0]", "values = [1.0]")).what())
              .rfind("xi.values", 0) == 0);
    CHECK(std::string(error_of(replace(kBase, "iota = 0.25", "iota = 0.25\nthreads = 0")).what())
              .rfind("threads", 0) == 0);
}

TEST_CASE("canonicalization is idempotent") {
    const auto cfg = parse_config(kBase);
    const auto canon = canonicalize(cfg);
    CHECK(canon.find("n_levels = [2, 3]") != std::string::npos);
    const auto again = parse_config(canon);
    CHECK(canonicalize(again) == canon);
    CHECK(config_digest(again) == config_digest(cfg));
}

TEST_CASE("digest ignores execution settings and tracks model settings") {
    const auto base = parse_config(kBase);
    Overrides exec;
    exec.threads = 8;
    exec.out_dir = "/tmp/elsewhere";
    CHECK(config_digest(parse_config(kBase, exec)) == config_digest(base));
    Overrides seed;
    seed.seed = 12;
    CHECK(config_digest(parse_config(kBase, seed)) != config_digest(base));
    CHECK(config_digest(parse_config(replace(kBase, "iota = 0.25", "iota = 0.5"))) != config_digest(base));
}

TEST_CASE("geometric rule, iota placement and power-law xi") {
    const std::string text = R"(
seed = "18446744073709551615"
lambda = { type = "explicit", values = [1.0, 2.0, 4.0] }
q = { type = "explicit", values = [1.0, 0.5, 0.25] }
n_rule = { type = "geometric", base = 3, ratio = 2 }
diffusion = { type = "linear", gamma = [1, 1, 1], rho = [0.1, 0.2, 0.3], iota = 0.5 }
xi = { type = "powerlaw", scale = 2.0, exponent = 1.0 }
)";
    const auto cfg = parse_config(text);
    CHECK(cfg.seed == 18446744073709551615ull);
    CHECK(cfg.iota == 0.5);
    CHECK(level_steps(cfg) == std::vector<std::size_t>{3, 6, 12});
    CHECK(make_initial_condition(cfg, 3)[2] == doctest::Approx(2.0 / 3.0));
    CHECK(!make_diffusion(cfg)->state_independent());
    CHECK(canonicalize(parse_config(canonicalize(cfg))) == canonicalize(cfg));
    const auto conflict = error_of(replace(text, "n_rule", "iota = 0.25\nn_rule"));
    CHECK(std::string(conflict.what()).rfind("diffusion.iota", 0) == 0);
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5e17}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("error document") {
    const auto doc = nlohmann::json::parse(error_json("simulate", "NonFiniteState", "boom", std::size_t{7}));
    CHECK(doc["error"]["code"] == "NonFiniteState");
    CHECK(doc["error"]["subcommand"] == "simulate");
    CHECK(doc["error"]["step"] == 7);
    CHECK(!nlohmann::json::parse(error_json("oracle", "ParseError", "x")).at("error").contains("step"));
}

TEST_CASE("check-lemma margins are non-negative") {
    Overrides o;
    o.out_dir = scratch("lemma").string();
    const auto cfg = parse_config(kBase, o);
    run("check-lemma", cfg);
    std::ifstream csv(fs::path(*o.out_dir) / "weights.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "j,lambda,ell,i,weight_sum,bound,margin");
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        const double margin = std::stod(line.substr(line.rfind(',') + 1));
        CHECK(margin >= 0.0);
        ++rows;
    }
    CHECK(rows == 4 * (2 + 3));
    const auto manifest = nlohmann::json::parse(slurp(fs::path(*o.out_dir) / "manifest.json"));
    CHECK(manifest["config_digest"] == config_digest(cfg));
    CHECK(manifest["counts"]["N"] == 4);
    CHECK(manifest["counts"]["J"] == 4);
    CHECK(manifest["counts"]["L"] == 2);
}

TEST_CASE("simulate twice gives identical bytes") {
    Overrides a, b;
    a.out_dir = scratch("sim_a").string();
    b.out_dir = scratch("sim_b").string();
    run("simulate", parse_config(kBase, a), {true});
    run("simulate", parse_config(kBase, b), {true});
    for (const char* f : {"trajectory.csv", "increments.csv"}) {
        const auto x = slurp(fs::path(*a.out_dir) / f);
        CHECK(!x.empty());
        CHECK(x == slurp(fs::path(*b.out_dir) / f));
    }
}

TEST_CASE("maxreg on an additive config holds exactly") {
    Overrides o;
    o.out_dir = scratch("maxreg").string();
    run("maxreg", parse_config(kBase, o));
    const auto doc = nlohmann::json::parse(slurp(fs::path(*o.out_dir) / "report.json"));
    CHECK(doc["report"]["verdict"] == "holds (exact)");
    CHECK(fs::exists(fs::path(*o.out_dir) / "contributions.csv"));
    CHECK(fs::exists(fs::path(*o.out_dir) / "mc_moments.csv"));
}

TEST_CASE("oracle and compare-uniform") {
    Overrides o;
    o.out_dir = scratch("oracle").string();
    run("oracle", parse_config(kBase, o));
    CHECK(fs::exists(fs::path(*o.out_dir) / "moments.csv"));

    const auto lin = replace(kBase, R"(diffusion = { type = "additive", sigma = [1.0, 0.5] })",
                             R"(diffusion = { type = "linear", gamma = [1.0, 0.5], rho = [0.3, 0.0] })");
    try {
        run("oracle", parse_config(lin, o));
        FAIL("expected StateDependentDiffusion");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StateDependentDiffusion);
    }

    o.out_dir = scratch("compare").string();
    run("compare-uniform", parse_config(kBase, o));
    const auto doc = nlohmann::json::parse(slurp(fs::path(*o.out_dir) / "report.json"));
    // budget 2 + 3 = 5 spread over two levels rounds up to 3 steps each
    CHECK(doc["uniform"]["n"] == 3);
    CHECK(doc["nonuniform"]["increments"] == 5);
    CHECK(doc["uniform"]["report"]["verdict"] == "holds (exact)");
    CHECK(doc["nonuniform"]["report"]["verdict"] == "holds (exact)");
}
