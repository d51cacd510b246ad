#include "nuem/timegrid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "nuem/error.hpp"

namespace nuem {

Rational Rational::make(std::int64_t num, std::int64_t den) {
    if (den <= 0 || num < 0) {
        fail(ErrorCode::InvalidArgument, "rational nodes must be non-negative with positive denominator");
    }
    const std::int64_t g = std::gcd(num, den);
    return Rational{num / g, den / g};
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    const __int128 lhs = static_cast<__int128>(a.num) * b.den;
    const __int128 rhs = static_cast<__int128>(b.num) * a.den;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

LevelGrids::LevelGrids(std::vector<std::size_t> steps) : steps_(std::move(steps)) {
    if (steps_.empty()) {
        fail(ErrorCode::EmptyLevels, "at least one noise level is required");
    }
    for (std::size_t l = 0; l < steps_.size(); ++l) {
        if (steps_[l] == 0) {
            fail(ErrorCode::ZeroSteps, "level " + std::to_string(l + 1) + " has zero steps");
        }
    }
}

Rational LevelGrids::node(std::size_t i, std::size_t level) const {
    const std::size_t n = steps_.at(level);
    if (i > n) {
        fail(ErrorCode::IndexOutOfRange, "node index beyond level grid");
    }
    return Rational::make(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n));
}

LevelGrids build_level_grids(std::vector<std::size_t> steps) {
    return LevelGrids(std::move(steps));
}

QuasiUniformGrids::QuasiUniformGrids(std::vector<std::vector<double>> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) {
        fail(ErrorCode::EmptyLevels, "at least one noise level is required");
    }
    for (std::size_t l = 0; l < nodes_.size(); ++l) {
        const auto& t = nodes_[l];
        const std::string name = "level " + std::to_string(l + 1);
        if (t.size() < 2) {
            fail(ErrorCode::ZeroSteps, name + " has no steps");
        }
        if (t.front() != 0.0 || t.back() != 1.0) {
            fail(ErrorCode::InvalidArgument, name + " must start at 0 and end at 1");
        }
        for (std::size_t i = 1; i < t.size(); ++i) {
            if (!(t[i] > t[i - 1])) {
                fail(ErrorCode::InvalidArgument, name + " nodes must be strictly increasing");
            }
        }
    }
}

double quasi_uniformity(const QuasiUniformGrids& grids) {
    double c = 1.0;
    for (std::size_t l = 0; l < grids.levels(); ++l) {
        const auto t = grids.nodes(l);
        double lo = t[1] - t[0];
        double hi = lo;
        for (std::size_t i = 2; i < t.size(); ++i) {
            const double d = t[i] - t[i - 1];
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        c = std::max(c, hi / lo);
    }
    return c;
}

double quasi_uniformity(const LevelGrids&) { return 1.0; }

template <typename Key, typename ToDouble, typename Diff>
MergedGrid MergedGrid::merge_keys(const std::vector<std::vector<Key>>& level_keys, ToDouble to_double,
                                  Diff diff) {
    struct Entry {
        Key key;
        std::size_t level;
        std::size_t step;
    };
    std::vector<Entry> all;
    for (std::size_t l = 0; l < level_keys.size(); ++l) {
        for (std::size_t i = 0; i < level_keys[l].size(); ++i) {
            all.push_back({level_keys[l][i], l, i});
        }
    }
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
        if (a.key < b.key) return true;
        if (b.key < a.key) return false;
        return a.level < b.level;
    });

    const std::size_t levels = level_keys.size();
    MergedGrid g;
    g.level_nodes_.resize(levels);
    for (std::size_t l = 0; l < levels; ++l) {
        g.level_nodes_[l].assign(level_keys[l].size(), 0);
    }
    std::vector<Key> keys;
    for (std::size_t k = 0; k < all.size();) {
        const std::size_t eta = keys.size();
        keys.push_back(all[k].key);
        g.taus_.push_back(to_double(all[k].key));
        g.active_.emplace_back();
        for (; k < all.size() && all[k].key == keys.back(); ++k) {
            g.active_.back().push_back({all[k].level, all[k].step});
            g.level_nodes_[all[k].level][all[k].step] = eta;
        }
    }

    const std::size_t n = g.taus_.size() - 1;
    g.dtaus_.assign(n + 1, 0.0);
    for (std::size_t eta = 1; eta <= n; ++eta) {
        g.dtaus_[eta] = diff(keys[eta], keys[eta - 1]);
    }

    // s_{eta,l}: walk forward keeping the latest level-l node seen strictly before eta.
    g.prev_.assign((n + 1) * levels, 0);
    std::vector<std::size_t> latest(levels, 0);
    for (std::size_t eta = 1; eta <= n; ++eta) {
        for (std::size_t l = 0; l < levels; ++l) {
            g.prev_[eta * levels + l] = latest[l];
        }
        for (const auto& a : g.active_[eta]) {
            latest[a.level] = eta;
        }
    }

    g.level_dts_.resize(levels);
    for (std::size_t l = 0; l < levels; ++l) {
        const auto& kk = level_keys[l];
        g.level_dts_[l].assign(kk.size(), 0.0);
        for (std::size_t i = 1; i < kk.size(); ++i) {
            g.level_dts_[l][i] = diff(kk[i], kk[i - 1]);
        }
    }
    return g;
}

MergedGrid MergedGrid::merge(const LevelGrids& grids) {
    std::vector<std::vector<Rational>> keys(grids.levels());
    for (std::size_t l = 0; l < grids.levels(); ++l) {
        for (std::size_t i = 0; i <= grids.steps(l); ++i) {
            keys[l].push_back(grids.node(i, l));
        }
    }
    return merge_keys(
        keys, [](const Rational& r) { return r.to_double(); },
        [](const Rational& a, const Rational& b) {
            // exact difference, rounded once
            const __int128 num = static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den;
            const __int128 den = static_cast<__int128>(a.den) * b.den;
            const __int128 g = std::gcd(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
            return static_cast<double>(num / g) / static_cast<double>(den / g);
        });
}

MergedGrid MergedGrid::merge(const QuasiUniformGrids& grids) {
    std::vector<std::vector<double>> keys(grids.levels());
    for (std::size_t l = 0; l < grids.levels(); ++l) {
        const auto t = grids.nodes(l);
        keys[l].assign(t.begin(), t.end());
    }
    return merge_keys(
        keys, [](double x) { return x; }, [](double a, double b) { return a - b; });
}

std::span<const LevelNode> MergedGrid::active(std::size_t eta) const { return active_.at(eta); }

std::size_t MergedGrid::prev_node(std::size_t eta, std::size_t level) const {
    if (eta == 0 || eta > steps() || level >= levels()) {
        fail(ErrorCode::IndexOutOfRange, "prev_node needs 1 <= eta <= N and a valid level");
    }
    return prev_[eta * levels() + level];
}

std::size_t MergedGrid::node_index(std::size_t i, std::size_t level) const {
    if (level >= levels() || i >= level_nodes_[level].size()) {
        fail(ErrorCode::IndexOutOfRange, "level node index out of range");
    }
    return level_nodes_[level][i];
}

double MergedGrid::level_dt(std::size_t i, std::size_t level) const {
    if (level >= levels() || i == 0 || i >= level_dts_[level].size()) {
        fail(ErrorCode::IndexOutOfRange, "level step index out of range");
    }
    return level_dts_[level][i];
}

bool MergedGrid::is_uniform() const noexcept {
    return std::all_of(level_nodes_.begin(), level_nodes_.end(),
                       [&](const auto& nodes) { return nodes.size() == taus_.size(); });
}

std::vector<std::size_t> xi_set(const MergedGrid& grid, std::size_t nu, std::size_t eta) {
    if (nu < 1 || nu > eta || eta > grid.steps()) {
        fail(ErrorCode::IndexOutOfRange, "xi_set needs 1 <= nu <= eta <= N");
    }
    std::vector<bool> seen(grid.levels(), false);
    for (std::size_t mu = nu; mu <= eta; ++mu) {
        for (const auto& a : grid.active(mu)) {
            seen[a.level] = true;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l < seen.size(); ++l) {
        if (seen[l]) out.push_back(l);
    }
    return out;
}

}  // namespace nuem
