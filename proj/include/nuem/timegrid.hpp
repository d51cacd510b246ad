#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nuem {

/// Exact non-negative rational i/n in lowest terms; used for node identity
/// so that e.g. 1/3 and 2/6 collapse to the same merged node.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t num, std::int64_t den);
    double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept;
};

/// Uniform per-level grids t_{i,l} = i / n_l on [0, 1].
class LevelGrids {
public:
    explicit LevelGrids(std::vector<std::size_t> steps);

    std::size_t levels() const noexcept { return steps_.size(); }
    std::size_t steps(std::size_t level) const { return steps_.at(level); }
    std::span<const std::size_t> all_steps() const noexcept { return steps_; }
    Rational node(std::size_t i, std::size_t level) const;

private:
    std::vector<std::size_t> steps_;
};

/// Same as constructing LevelGrids directly; kept as a named entry point.
LevelGrids build_level_grids(std::vector<std::size_t> steps);

/// Quasi-uniform per-level grids given by explicit node lists
/// 0 = t_{0,l} < ... < t_{n_l,l} = 1.
class QuasiUniformGrids {
public:
    explicit QuasiUniformGrids(std::vector<std::vector<double>> nodes);

    std::size_t levels() const noexcept { return nodes_.size(); }
    std::span<const double> nodes(std::size_t level) const { return nodes_.at(level); }

private:
    std::vector<std::vector<double>> nodes_;
};

/// max over levels of (largest step / smallest step). 1 for uniform grids.
double quasi_uniformity(const QuasiUniformGrids& grids);
double quasi_uniformity(const LevelGrids& grids);

/// A level that owns merged node eta, together with the index i such that
/// tau_eta = t_{i,level}.
struct LevelNode {
    std::size_t level = 0;
    std::size_t step = 0;
};

/// The sorted union 0 = tau_0 < ... < tau_N = 1 of all level nodes and the
/// index maps the scheme needs. Levels are zero-based; merged steps run 0..N.
class MergedGrid {
public:
    static MergedGrid merge(const LevelGrids& grids);
    static MergedGrid merge(const QuasiUniformGrids& grids);

    std::size_t steps() const noexcept { return taus_.size() - 1; }
    std::size_t levels() const noexcept { return level_nodes_.size(); }
    std::span<const double> taus() const noexcept { return taus_; }
    double tau(std::size_t eta) const { return taus_.at(eta); }
    /// tau_eta - tau_{eta-1}, eta >= 1.
    double dtau(std::size_t eta) const { return dtaus_.at(eta); }

    /// Levels whose grid contains tau_eta (the set K_eta), ascending level.
    std::span<const LevelNode> active(std::size_t eta) const;
    /// Merged index of s_{eta,l}: the last level-l node strictly below tau_eta.
    std::size_t prev_node(std::size_t eta, std::size_t level) const;
    /// Merged index eta* with tau_{eta*} = t_{i,l}.
    std::size_t node_index(std::size_t i, std::size_t level) const;

    std::size_t level_steps(std::size_t level) const { return level_nodes_.at(level).size() - 1; }
    double level_time(std::size_t i, std::size_t level) const { return taus_.at(node_index(i, level)); }
    /// t_{i,l} - t_{i-1,l}, i >= 1.
    double level_dt(std::size_t i, std::size_t level) const;

    /// True when every level has the same node set as the merged grid.
    bool is_uniform() const noexcept;

private:
    MergedGrid() = default;

    template <typename Key, typename ToDouble, typename Diff>
    static MergedGrid merge_keys(const std::vector<std::vector<Key>>& level_keys, ToDouble to_double,
                                 Diff diff);

    std::vector<double> taus_;
    std::vector<double> dtaus_;
    std::vector<std::vector<LevelNode>> active_;
    std::vector<std::size_t> prev_;  // row-major (eta, level), eta = 0..N (row 0 unused)
    std::vector<std::vector<std::size_t>> level_nodes_;
    std::vector<std::vector<double>> level_dts_;
};

/// Xi_nu: levels active at any merged node in {nu, ..., eta}. 1 <= nu <= eta <= N.
std::vector<std::size_t> xi_set(const MergedGrid& grid, std::size_t nu, std::size_t eta);

}  // namespace nuem
