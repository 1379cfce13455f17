#pragma once

// Reference implementations used only as test oracles. Each is written from the
// defining formula, deliberately without reuse of the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace oracle {

using Dense = std::vector<double>;

inline double dense_dot(const Dense& a, const Dense& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) s += a[i] * b[i];
    return s;
}

// argmin_v 0.5 |v - w|^2 + C max(0, 1 - y <v, x>)^2, the unconstrained form of
// the squared-slack objective, by Nesterov's method for strongly convex smooth
// functions. mu = 1, so |v - v*| <= |grad f(v)|; iteration stops once that
// bound drops below `tol`.
inline Dense squared_slack_minimizer(const Dense& w, const Dense& x, double y, double c, double tol = 1e-11) {
    const double L = 1.0 + 2.0 * c * dense_dot(x, x);
    const double beta = (std::sqrt(L) - 1.0) / (std::sqrt(L) + 1.0);
    const std::size_t d = w.size();
    auto grad = [&](const Dense& v) {
        const double slack = std::max(0.0, 1.0 - y * dense_dot(v, x));
        Dense g(d);
        for (std::size_t i = 0; i < d; ++i) g[i] = (v[i] - w[i]) - 2.0 * c * slack * y * x[i];
        return g;
    };
    Dense v = w;
    Dense z = w;
    for (int it = 0; it < 10'000'000; ++it) {
        const Dense gz = grad(z);
        Dense next(d);
        for (std::size_t i = 0; i < d; ++i) next[i] = z[i] - gz[i] / L;
        for (std::size_t i = 0; i < d; ++i) z[i] = next[i] + beta * (next[i] - v[i]);
        v = std::move(next);
        const Dense gv = grad(v);
        if (std::sqrt(dense_dot(gv, gv)) < tol) return v;
    }
    throw std::runtime_error("squared_slack_minimizer did not converge");
}

// KKT check for argmin 0.5 |v - w|^2 + C max(0, 1 - y <v, x>): v - w = tau y x
// with tau = C when the new margin is below 1, tau = 0 above 1, and tau in [0, C]
// at exactly 1 (up to tol).
inline bool linear_slack_kkt(const Dense& w, const Dense& x, double y, double c, const Dense& v,
                             double tol = 1e-9) {
    const double xx = dense_dot(x, x);
    if (xx == 0.0) return v == w;
    Dense diff(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) diff[i] = v[i] - w[i];
    const double tau = y * dense_dot(diff, x) / xx;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (std::abs(diff[i] - tau * y * x[i]) > tol) return false;
    }
    const double margin = y * dense_dot(v, x);
    if (margin < 1.0 - tol) return std::abs(tau - c) <= tol;
    if (margin > 1.0 + tol) return std::abs(tau) <= tol;
    return tau >= -tol && tau <= c + tol;
}

inline double soft(double v, double t) {
    const double mag = std::max(std::abs(v) - t, 0.0);
    if (mag == 0.0) return 0.0;
    return v > 0 ? mag : -mag;
}

// Dense FSOL: theta accumulates eta y x; every coordinate of w is recomputed.
struct DenseFsol {
    Dense theta;
    Dense w;
    explicit DenseFsol(std::size_t d) : theta(d, 0.0), w(d, 0.0) {}
    void update(const std::vector<std::pair<std::size_t, double>>& x, double y, double eta, double lambda) {
        for (auto [i, v] : x) theta[i] += eta * y * v;
        for (std::size_t i = 0; i < theta.size(); ++i) w[i] = soft(theta[i], eta * lambda);
    }
};

// Average ranks of |d| (ties share the mean rank), doubled so that every rank is
// an integer.
inline std::vector<long> doubled_ranks(const std::vector<double>& d) {
    const std::size_t n = d.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });
    std::vector<long> r(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(d[idx[j + 1]]) == std::abs(d[idx[i]])) ++j;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = static_cast<long>(i + 1 + j + 1);
        i = j + 1;
    }
    return r;
}

// Two-sided signed-rank p-value by enumerating all 2^n sign patterns of the
// non-zero differences: min(1, 2 min(P[W+ <= obs], P[W+ >= obs])).
inline double wilcoxon_bruteforce_p(const std::vector<std::pair<double, double>>& pairs) {
    std::vector<double> d;
    for (auto [a, b] : pairs) {
        if (a - b != 0.0) d.push_back(a - b);
    }
    const std::size_t n = d.size();
    if (n == 0 || n > 24) throw std::invalid_argument("wilcoxon_bruteforce_p: bad n");
    const auto r = doubled_ranks(d);
    long observed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] > 0) observed += r[i];
    }
    std::uint64_t lower = 0;
    std::uint64_t upper = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        long s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1) s += r[i];
        }
        lower += s <= observed;
        upper += s >= observed;
    }
    return std::min(1.0, 2.0 * static_cast<double>(std::min(lower, upper)) / static_cast<double>(total));
}

// Upper tail of the chi-square distribution.
inline double chi_square_sf(double statistic, double dof) {
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

// Asymptotic Kolmogorov distribution with the Stephens small-sample correction.
// For a discrete null the test is conservative.
inline double ks_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

// Support {0, 1, 2, ...}: P[S = k] = (1 - p)^k p.
inline double geometric_cdf(std::uint64_t k, double p) {
    return 1.0 - std::pow(1.0 - p, static_cast<double>(k) + 1.0);
}

// sup_k |F_n(k) - F(k)| over the support points; for an integer-valued sample
// the supremum over the reals is attained at these jumps or just before them.
inline double ks_statistic_geometric(std::vector<std::uint64_t> sample, double p) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    std::size_t i = 0;
    const std::uint64_t top = sample.back();
    for (std::uint64_t k = 0; k <= top; ++k) {
        const double before = static_cast<double>(i) / n;
        d = std::max(d, std::abs(before - (k == 0 ? 0.0 : geometric_cdf(k - 1, p))));
        while (i < sample.size() && sample[i] == k) ++i;
        d = std::max(d, std::abs(static_cast<double>(i) / n - geometric_cdf(k, p)));
    }
    return d;
}

inline double sample_sd(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0));
}

}  // namespace oracle
