#include "wat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wat {

double accuracy(const WeightVector& w, std::span<const Example> examples) {
    if (examples.empty()) throw std::invalid_argument("accuracy needs a non-empty test set");
    std::size_t correct = 0;
    for (const Example& ex : examples) {
        if (sign(ex.y) * dot(w, ex.x) > 0.0) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(examples.size());
}

double sparsity(const WeightVector& w, std::size_t dimension) {
    if (w.dimension() > dimension) {
        throw std::invalid_argument("weight vector extends past the declared dimension");
    }
    if (dimension == 0) return 1.0;
    const std::size_t zeros = dimension - w.count_nonzero();
    return static_cast<double>(zeros) / static_cast<double>(dimension);
}

AccuracyCurve oracle_curve(const AccuracyCurve& base) {
    AccuracyCurve out;
    out.reserve(base.size());
    double best = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        best = i == 0 ? base[i].accuracy : std::max(best, base[i].accuracy);
        out.push_back({base[i].timestep, best});
    }
    return out;
}

double rop(const AccuracyCurve& oracle, const AccuracyCurve& model) {
    if (oracle.empty() || oracle.size() != model.size()) {
        throw std::invalid_argument("ROP needs non-empty curves on the same checkpoints");
    }
    double gap = 0.0;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        if (oracle[i].timestep != model[i].timestep) {
            throw std::invalid_argument("ROP curves disagree on checkpoint timesteps");
        }
        gap += oracle[i].accuracy - model[i].accuracy;
    }
    return gap / static_cast<double>(oracle.size());
}

namespace {

// Average ranks (1-based) of |d|, plus the tie group sizes.
std::vector<double> average_ranks(const std::vector<double>& magnitudes, std::vector<std::size_t>& ties) {
    const std::size_t n = magnitudes.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return magnitudes[a] < magnitudes[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && magnitudes[order[j]] == magnitudes[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        if (j - i > 1) ties.push_back(j - i);
        i = j;
    }
    return ranks;
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs) {
    std::vector<double> diffs;
    diffs.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        const double d = a - b;
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) throw std::invalid_argument("Wilcoxon test undefined: all differences are zero");

    std::vector<double> magnitudes(diffs.size());
    std::transform(diffs.begin(), diffs.end(), magnitudes.begin(), [](double d) { return std::abs(d); });
    std::vector<std::size_t> ties;
    const std::vector<double> ranks = average_ranks(magnitudes, ties);

    WilcoxonResult r;
    r.n = diffs.size();
    for (std::size_t i = 0; i < diffs.size(); ++i) (diffs[i] > 0.0 ? r.w_plus : r.w_minus) += ranks[i];
    r.statistic = std::min(r.w_plus, r.w_minus);

    const auto n = static_cast<double>(r.n);
    if (r.n <= kWilcoxonExactLimit) {
        // Average ranks are multiples of 1/2, so doubled ranks are integers and the
        // sign-flip distribution of 2 W+ fits a counting table.
        std::vector<std::size_t> doubled(r.n);
        std::size_t total = 0;
        for (std::size_t i = 0; i < r.n; ++i) {
            doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
            total += doubled[i];
        }
        std::vector<double> counts(total + 1, 0.0);
        counts[0] = 1.0;
        for (std::size_t rank2 : doubled) {
            for (std::size_t s = total; s >= rank2; --s) {
                counts[s] += counts[s - rank2];
                if (s == rank2) break;
            }
        }
        const auto observed = static_cast<std::size_t>(std::llround(2.0 * r.w_plus));
        double lower = 0.0;
        double upper = 0.0;
        for (std::size_t s = 0; s <= total; ++s) {
            if (s <= observed) lower += counts[s];
            if (s >= observed) upper += counts[s];
        }
        const double patterns = std::ldexp(1.0, static_cast<int>(r.n));
        r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / patterns);
        r.exact = true;
    } else {
        const double mean = n * (n + 1.0) / 4.0;
        double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
        for (std::size_t t : ties) {
            const auto tt = static_cast<double>(t);
            variance -= (tt * tt * tt - tt) / 48.0;
        }
        r.z = variance > 0.0 ? (r.w_plus - mean) / std::sqrt(variance) : 0.0;
        r.p_value = std::min(1.0, std::erfc(std::abs(r.z) / std::sqrt(2.0)));
        r.exact = false;
    }
    return r;
}

}  // namespace wat
