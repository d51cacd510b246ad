#pragma once

// Brute-force reference computations written straight from the definitions.
// Deliberately share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

// i/n kept as a reduced pair; ordering by cross multiplication.
struct Frac {
    long long num;
    long long den;
    bool operator<(const Frac& o) const { return num * o.den < o.num * den; }
    bool operator==(const Frac& o) const { return num == o.num && den == o.den; }
    long double value() const { return static_cast<long double>(num) / den; }
    double dvalue() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Frac frac(long long i, long long n) {
    const long long g = std::gcd(i, n);
    return Frac{i / g, n / g};
}

struct Grid {
    std::vector<Frac> nodes;                 // tau_0..tau_N
    std::vector<std::set<std::size_t>> K;    // K[eta]: owning levels (zero-based)
    std::vector<std::vector<Frac>> prev;     // prev[eta][l]: last level node < tau_eta
    std::vector<std::size_t> n;
    std::size_t N() const { return nodes.size() - 1; }
    std::size_t index_of(const Frac& f) const {
        return static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), f) - nodes.begin());
    }
    long double dtau(std::size_t eta) const { return nodes[eta].value() - nodes[eta - 1].value(); }
};

// O(N * L * n_max) naive tables.
inline Grid brute_grid(const std::vector<std::size_t>& n) {
    Grid g;
    g.n = n;
    std::set<Frac> all;
    for (auto nl : n) {
        for (std::size_t i = 0; i <= nl; ++i) all.insert(frac(static_cast<long long>(i), static_cast<long long>(nl)));
    }
    g.nodes.assign(all.begin(), all.end());
    g.K.resize(g.nodes.size());
    g.prev.assign(g.nodes.size(), std::vector<Frac>(n.size(), Frac{0, 1}));
    for (std::size_t eta = 0; eta < g.nodes.size(); ++eta) {
        for (std::size_t l = 0; l < n.size(); ++l) {
            for (std::size_t i = 0; i <= n[l]; ++i) {
                const Frac t = frac(static_cast<long long>(i), static_cast<long long>(n[l]));
                if (eta > 0 && t == g.nodes[eta]) g.K[eta].insert(l);
                if (t < g.nodes[eta]) g.prev[eta][l] = t;
            }
        }
    }
    return g;
}

// prod_{nu=a+1}^{b} 1/(1 + lambda dtau_nu) by plain multiplication.
inline long double direct_factor(const Grid& g, long double lambda, std::size_t a, std::size_t b) {
    long double r = 1.0L;
    for (std::size_t nu = a + 1; nu <= b; ++nu) r /= 1.0L + lambda * g.dtau(nu);
    return r;
}

// sum_{eta: t_{i,l} <= tau_eta <= 1} r(t_{i-1,l}, tau_eta)^2 dtau_eta, zero-based level.
inline long double brute_weight_sum(const Grid& g, long double lambda, std::size_t l, std::size_t i) {
    const auto ll = static_cast<long long>(g.n[l]);
    const std::size_t start = g.index_of(frac(static_cast<long long>(i) - 1, ll));
    const std::size_t first = g.index_of(frac(static_cast<long long>(i), ll));
    long double s = 0.0L;
    for (std::size_t eta = first; eta <= g.N(); ++eta) {
        const long double r = direct_factor(g, lambda, start, eta);
        s += r * r * g.dtau(eta);
    }
    return s;
}

// Ito isometry for diagonal additive noise b_{j,l} = sigma_l [j == l]:
// E|X_j(tau_eta)|^2 = r(0,eta)^2 xi_j^2 + sum_{i: t_{i,j} <= tau_eta} q_j sigma_j^2 r(t_{i-1,j}, eta)^2 dt_j.
inline std::vector<std::vector<long double>> additive_moments(const Grid& g, const std::vector<double>& lambda,
                                                               const std::vector<double>& q,
                                                               const std::vector<double>& sigma,
                                                               const std::vector<double>& xi, bool with_init) {
    std::vector<std::vector<long double>> m(g.nodes.size(), std::vector<long double>(lambda.size(), 0.0L));
    for (std::size_t eta = 0; eta <= g.N(); ++eta) {
        for (std::size_t j = 0; j < lambda.size(); ++j) {
            long double v = 0.0L;
            if (with_init) {
                const long double r0 = direct_factor(g, lambda[j], 0, eta);
                v += r0 * r0 * xi[j] * xi[j];
            }
            if (j < q.size()) {
                const auto nl = static_cast<long long>(g.n[j]);
                for (long long i = 1; i <= nl; ++i) {
                    const std::size_t end = g.index_of(frac(i, nl));
                    if (end > eta) break;
                    const long double r = direct_factor(g, lambda[j], g.index_of(frac(i - 1, nl)), eta);
                    v += q[j] * sigma[j] * sigma[j] * r * r / static_cast<long double>(nl);
                }
            }
            m[eta][j] = v;
        }
    }
    return m;
}

// Literal maximal-regularity functionals. lhs weights use lambda^{2 iota + 1},
// rhs weights lambda^{2 iota}, rhs carries the factor 2.
inline long double literal_lhs(const Grid& g, const std::vector<double>& lambda,
                               const std::vector<std::vector<long double>>& moments, double iota) {
    long double s = 0.0L;
    for (std::size_t eta = 1; eta <= g.N(); ++eta) {
        for (std::size_t j = 0; j < lambda.size(); ++j) {
            s += std::pow(static_cast<long double>(lambda[j]), 2.0L * iota + 1.0L) * moments[eta][j] * g.dtau(eta);
        }
    }
    return s;
}

inline long double literal_additive_rhs(const Grid& g, const std::vector<double>& lambda,
                                        const std::vector<double>& q, const std::vector<double>& sigma,
                                        double iota) {
    long double s = 0.0L;
    for (std::size_t l = 0; l < q.size(); ++l) {
        for (std::size_t i = 1; i <= g.n[l]; ++i) {
            // only the diagonal entry j == l is non-zero
            if (l < lambda.size()) {
                s += q[l] * std::pow(static_cast<long double>(lambda[l]), 2.0L * iota) * sigma[l] * sigma[l] /
                     static_cast<long double>(g.n[l]);
            }
        }
    }
    return 2.0L * s;
}

inline std::vector<double> log_uniform_lambdas(std::mt19937_64& rng, std::size_t modes, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    std::set<double> vals;
    while (vals.size() < modes) vals.insert(std::exp(u(rng)));
    return {vals.begin(), vals.end()};
}

inline std::vector<std::size_t> random_steps(std::mt19937_64& rng, std::size_t levels, std::size_t max_n) {
    std::uniform_int_distribution<std::size_t> d(1, max_n);
    std::vector<std::size_t> n(levels);
    for (auto& v : n) v = d(rng);
    return n;
}

}  // namespace oracle
