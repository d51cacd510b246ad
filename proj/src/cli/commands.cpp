#include "nuem/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "nuem/analysis.hpp"
#include "nuem/error.hpp"
#include "nuem/noise.hpp"
#include "nuem/parallel.hpp"
#include "nuem/resolvent.hpp"
#include "nuem/solver.hpp"

namespace nuem::cli {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string error_json(std::string_view subcommand, std::string_view code, std::string_view message,
                       const std::optional<std::size_t>& step) {
    json err = {{"code", code}, {"message", message}, {"subcommand", subcommand}};
    if (step) err["step"] = *step;
    return json{{"error", err}}.dump();
}

namespace {

struct Model {
    Eigensystem es;
    LevelGrids levels;
    MergedGrid grid;
    ResolventTable table;
    std::unique_ptr<DiffusionOperator> op;
    SpectralVector xi;
};

Model build_model(const RunConfig& cfg) {
    auto es = make_eigensystem(cfg);
    LevelGrids levels(level_steps(cfg));
    auto grid = MergedGrid::merge(levels);
    auto table = ResolventTable::build(es, grid);
    auto op = make_diffusion(cfg);
    auto xi = make_initial_condition(cfg, es.modes());
    return Model{std::move(es), std::move(levels), std::move(grid), std::move(table), std::move(op), std::move(xi)};
}

class PhaseTimer {
public:
    void start(std::string name) {
        name_ = std::move(name);
        begin_ = std::chrono::steady_clock::now();
    }
    void stop() {
        const auto elapsed = std::chrono::steady_clock::now() - begin_;
        timings_[name_] = std::chrono::duration<double, std::milli>(elapsed).count();
    }
    const json& timings() const { return timings_; }

private:
    std::string name_;
    std::chrono::steady_clock::time_point begin_;
    json timings_ = json::object();
};

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> columns)
        : out_(path, std::ios::binary) {
        if (!out_) fail(ErrorCode::InvalidArgument, "cannot open " + path.string() + " for writing");
        bool first = true;
        for (auto c : columns) {
            if (!first) out_ << ',';
            out_ << c;
            first = false;
        }
        out_ << '\n';
    }

    CsvWriter& field(double v) { return raw(format_double(v)); }
    CsvWriter& field(std::size_t v) { return raw(std::to_string(v)); }
    CsvWriter& empty() { return raw(""); }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }

private:
    CsvWriter& raw(const std::string& s) {
        if (!first_) out_ << ',';
        out_ << s;
        first_ = false;
        return *this;
    }

    std::ofstream out_;
    bool first_ = true;
};

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
}

json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"standard_error", e.standard_error}}; }

json report_json(const RegularityReport& r) {
    json doc = {
        {"iota", r.iota},
        {"paths", r.paths},
        {"failed_paths", r.failed_paths},
        {"lhs", estimate_json(r.lhs)},
        {"lhs_convolution", estimate_json(r.lhs_conv)},
        {"rhs", estimate_json(r.rhs)},
        {"init_term", r.init_term},
        {"bound", r.bound},
        {"relative_standard_error", r.relative_se},
        {"gate", r.gate},
        {"statistical_holds", r.statistical_holds},
        {"verdict", r.verdict},
    };
    if (r.exact) {
        doc["exact"] = {
            {"lhs", r.exact->lhs},
            {"lhs_convolution", r.exact->lhs_conv},
            {"rhs", r.exact->rhs},
            {"bound", r.exact->bound},
            {"convolution_holds", r.exact->conv_holds},
            {"full_holds", r.exact->full_holds},
            {"convolution_margin", r.exact->rhs - r.exact->lhs_conv},
            {"full_margin", r.exact->bound - r.exact->lhs},
        };
    }
    return doc;
}

json counts_json(const Model& m) {
    return {{"N", m.grid.steps()}, {"J", m.es.modes()}, {"L", m.es.levels()}};
}

void write_manifest(const RunConfig& cfg, std::string_view subcommand, const json& counts, const json& outputs,
                    const PhaseTimer& timer) {
    json doc = {
        {"version", kVersion},
        {"schema_version", kSchemaVersion},
        {"subcommand", subcommand},
        {"config_digest", config_digest(cfg)},
        {"seed", cfg.seed},
        {"counts", counts},
        {"outputs", outputs},
        // Only this block may differ between repeated runs.
        {"execution", {{"threads", cfg.threads}, {"timings_ms", timer.timings()}}},
    };
    write_json(std::filesystem::path(cfg.out_dir) / "manifest.json", doc);
}

void check_lemma(const RunConfig& cfg, PhaseTimer& timer) {
    timer.start("setup");
    const auto m = build_model(cfg);
    timer.stop();
    timer.start("weights");
    const std::filesystem::path dir(cfg.out_dir);
    CsvWriter csv(dir / "weights.csv", {"j", "lambda", "ell", "i", "weight_sum", "bound", "margin"});
    std::size_t rows = 0;
    std::size_t violations = 0;
    double min_relative = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m.es.modes(); ++j) {
        const double bound = 2.0 / m.es.lambda(j);
        for (std::size_t l = 0; l < m.grid.levels(); ++l) {
            for (std::size_t i = 1; i <= m.grid.level_steps(l); ++i) {
                const double w = weight_sum(m.table, m.grid, j, l, i);
                const double margin = bound - w;
                csv.field(j + 1).field(m.es.lambda(j)).field(l + 1).field(i).field(w).field(bound).field(margin);
                csv.end_row();
                ++rows;
                if (margin < 0.0) ++violations;
                min_relative = std::min(min_relative, margin / bound);
            }
        }
    }
    timer.stop();
    write_json(dir / "report.json", {{"subcommand", "check-lemma"},
                                     {"rows", rows},
                                     {"violations", violations},
                                     {"min_relative_margin", min_relative}});
    write_manifest(cfg, "check-lemma", counts_json(m),
                   {{"weights.csv", {"j", "lambda", "ell", "i", "weight_sum", "bound", "margin"}},
                    {"report.json", json::array()}},
                   timer);
}

void simulate(const RunConfig& cfg, const CommandOptions& options, PhaseTimer& timer) {
    timer.start("setup");
    const auto m = build_model(cfg);
    timer.stop();
    timer.start("simulate");
    const std::filesystem::path dir(cfg.out_dir);
    CsvWriter traj_csv(dir / "trajectory.csv", {"path", "eta", "tau", "j", "value"});
    std::unique_ptr<CsvWriter> inc_csv;
    if (options.dump_increments) {
        inc_csv = std::make_unique<CsvWriter>(dir / "increments.csv",
                                              std::initializer_list<std::string_view>{"path", "level", "merged_step", "value"});
    }

    constexpr std::size_t kBlock = 64;
    struct PathOut {
        std::optional<LevelIncrements> inc;
        std::optional<Trajectory> traj;
    };
    std::vector<PathOut> block(kBlock);
    for (std::size_t first = 0; first < cfg.paths; first += kBlock) {
        const std::size_t count = std::min(kBlock, cfg.paths - first);
        parallel_for(count, cfg.threads, [&](std::size_t k) {
            auto inc = sample_path_increments(m.grid, NoiseStream{cfg.seed, first + k});
            const SolverInput in{m.es, m.grid, m.table, *m.op, m.xi, inc};
            block[k].traj = run_recursive(in);
            block[k].inc = std::move(inc);
        });
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t path = first + k;
            const auto& traj = *block[k].traj;
            for (std::size_t eta = 0; eta <= traj.steps(); ++eta) {
                for (std::size_t j = 0; j < traj.modes(); ++j) {
                    traj_csv.field(path).field(eta).field(m.grid.tau(eta)).field(j + 1).field(traj.at(eta, j));
                    traj_csv.end_row();
                }
            }
            if (inc_csv) {
                const auto& inc = *block[k].inc;
                for (std::size_t l = 0; l < inc.levels(); ++l) {
                    for (std::size_t eta = 1; eta <= inc.steps(); ++eta) {
                        inc_csv->field(path).field(l + 1).field(eta).field(inc.merged(l, eta));
                        inc_csv->end_row();
                    }
                }
            }
        }
    }
    timer.stop();
    json outputs = {{"trajectory.csv", {"path", "eta", "tau", "j", "value"}}};
    if (inc_csv) outputs["increments.csv"] = {"path", "level", "merged_step", "value"};
    write_manifest(cfg, "simulate", counts_json(m), outputs, timer);
}

RegularityReport run_experiment(const Model& m, const RunConfig& cfg, const MergedGrid& grid,
                                const MergedGrid* noise_grid) {
    ExperimentConfig ec;
    ec.es = &m.es;
    ec.grid = &grid;
    ec.op = m.op.get();
    ec.xi = m.xi;
    ec.iota = cfg.iota;
    ec.paths = cfg.paths;
    ec.seed = cfg.seed;
    ec.threads = cfg.threads;
    ec.noise_grid = noise_grid;
    return mc_regularity_experiment(ec);
}

void maxreg(const RunConfig& cfg, PhaseTimer& timer) {
    if (cfg.paths < 2) fail(ErrorCode::InvalidArgument, "maxreg needs at least two paths");
    timer.start("setup");
    const auto m = build_model(cfg);
    timer.stop();
    timer.start("monte_carlo");
    const auto report = run_experiment(m, cfg, m.grid, nullptr);
    timer.stop();

    const std::filesystem::path dir(cfg.out_dir);
    json doc = report_json(report);
    doc = json{{"subcommand", "maxreg"}, {"report", doc}};
    write_json(dir / "report.json", doc);

    std::vector<double> exact_terms;
    std::vector<double> exact_conv_terms;
    if (report.exact_moments) {
        exact_terms = maxreg_lhs_terms(*report.exact_moments, m.es, m.grid, cfg.iota);
        const auto conv = exact_second_moments(m.es, m.grid, m.table, *m.op, m.xi, MomentPart::Convolution);
        exact_conv_terms = maxreg_lhs_terms(conv, m.es, m.grid, cfg.iota);
    }
    CsvWriter contrib(dir / "contributions.csv",
                      {"eta", "tau", "dtau", "lhs_estimate", "lhs_exact", "lhs_convolution_exact"});
    for (std::size_t eta = 1; eta <= m.grid.steps(); ++eta) {
        contrib.field(eta).field(m.grid.tau(eta)).field(m.grid.dtau(eta)).field(report.lhs_terms[eta]);
        if (report.exact_moments) {
            contrib.field(exact_terms[eta]).field(exact_conv_terms[eta]);
        } else {
            contrib.empty().empty();
        }
        contrib.end_row();
    }
    CsvWriter moments(dir / "mc_moments.csv", {"eta", "tau", "j", "estimate", "standard_error", "exact"});
    for (std::size_t eta = 0; eta <= m.grid.steps(); ++eta) {
        for (std::size_t j = 0; j < m.es.modes(); ++j) {
            moments.field(eta).field(m.grid.tau(eta)).field(j + 1).field(report.moments.at(eta, j)).field(
                report.moments.se(eta, j));
            if (report.exact_moments) {
                moments.field(report.exact_moments->at(eta, j));
            } else {
                moments.empty();
            }
            moments.end_row();
        }
    }
    write_manifest(cfg, "maxreg", counts_json(m),
                   {{"report.json", json::array()},
                    {"contributions.csv", {"eta", "tau", "dtau", "lhs_estimate", "lhs_exact", "lhs_convolution_exact"}},
                    {"mc_moments.csv", {"eta", "tau", "j", "estimate", "standard_error", "exact"}}},
                   timer);
}

void oracle(const RunConfig& cfg, PhaseTimer& timer) {
    timer.start("setup");
    const auto m = build_model(cfg);
    timer.stop();
    timer.start("oracle");
    const auto full = exact_second_moments(m.es, m.grid, m.table, *m.op, m.xi, MomentPart::Full);
    const auto conv = exact_second_moments(m.es, m.grid, m.table, *m.op, m.xi, MomentPart::Convolution);
    const auto exact = exact_regularity(m.es, m.grid, m.table, *m.op, m.xi, cfg.iota);
    const auto init = init_weight_check(m.es, m.grid, m.table, m.xi, cfg.iota);
    timer.stop();

    const std::filesystem::path dir(cfg.out_dir);
    CsvWriter csv(dir / "moments.csv", {"eta", "tau", "j", "full", "convolution"});
    for (std::size_t eta = 0; eta <= m.grid.steps(); ++eta) {
        for (std::size_t j = 0; j < m.es.modes(); ++j) {
            csv.field(eta).field(m.grid.tau(eta)).field(j + 1).field(full.at(eta, j)).field(conv.at(eta, j));
            csv.end_row();
        }
    }
    json margins = json::array();
    for (const auto& w : init.modes) margins.push_back(w.margin);
    write_json(dir / "report.json",
               {{"subcommand", "oracle"},
                {"iota", cfg.iota},
                {"exact",
                 {{"lhs", exact.lhs},
                  {"lhs_convolution", exact.lhs_conv},
                  {"rhs", exact.rhs},
                  {"bound", exact.bound},
                  {"convolution_holds", exact.conv_holds},
                  {"full_holds", exact.full_holds}}},
                {"init_weights", {{"lhs", init.lhs}, {"bound", init.bound}, {"holds", init.holds()}, {"margins", margins}}},
                {"verdict", exact.conv_holds && exact.full_holds ? "holds (exact)" : "violated (exact)"}});
    write_manifest(cfg, "oracle", counts_json(m),
                   {{"moments.csv", {"eta", "tau", "j", "full", "convolution"}}, {"report.json", json::array()}},
                   timer);
}

void compare_uniform(const RunConfig& cfg, PhaseTimer& timer) {
    if (cfg.paths < 2) fail(ErrorCode::InvalidArgument, "compare-uniform needs at least two paths");
    timer.start("setup");
    const auto m = build_model(cfg);
    const std::size_t levels = m.es.levels();
    const auto steps = level_steps(cfg);
    const std::size_t budget = std::accumulate(steps.begin(), steps.end(), std::size_t{0});
    const std::size_t uniform_n = (budget + levels - 1) / levels;

    const auto uniform_grid = MergedGrid::merge(LevelGrids(std::vector<std::size_t>(levels, uniform_n)));
    std::vector<std::size_t> joint = steps;
    joint.push_back(uniform_n);
    const auto noise_grid = MergedGrid::merge(LevelGrids(joint));
    timer.stop();

    timer.start("nonuniform");
    const auto nonuniform_report = run_experiment(m, cfg, m.grid, &noise_grid);
    timer.stop();
    timer.start("uniform");
    const auto uniform_report = run_experiment(m, cfg, uniform_grid, &noise_grid);
    timer.stop();

    json n_levels = json::array();
    for (auto n : steps) n_levels.push_back(n);
    write_json(std::filesystem::path(cfg.out_dir) / "report.json",
               {{"subcommand", "compare-uniform"},
                {"nonuniform",
                 {{"n_levels", n_levels}, {"N", m.grid.steps()}, {"increments", budget},
                  {"report", report_json(nonuniform_report)}}},
                {"uniform",
                 {{"n", uniform_n}, {"N", uniform_grid.steps()}, {"increments", uniform_n * levels},
                  {"report", report_json(uniform_report)}}}});
    write_manifest(cfg, "compare-uniform", counts_json(m), {{"report.json", json::array()}}, timer);
}

}  // namespace

void run(std::string_view subcommand, const RunConfig& cfg, const CommandOptions& options) {
    if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end()) {
        fail(ErrorCode::InvalidArgument, "unknown subcommand " + std::string(subcommand));
    }
    std::filesystem::create_directories(cfg.out_dir);
    PhaseTimer timer;
    if (subcommand == "check-lemma") {
        check_lemma(cfg, timer);
    } else if (subcommand == "simulate") {
        simulate(cfg, options, timer);
    } else if (subcommand == "maxreg") {
        maxreg(cfg, timer);
    } else if (subcommand == "oracle") {
        oracle(cfg, timer);
    } else {
        compare_uniform(cfg, timer);
    }
}

}  // namespace nuem::cli
