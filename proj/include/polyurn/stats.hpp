#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace polyurn {

namespace detail {

/// Regularized lower incomplete gamma P(s, x) by series / continued fraction.
inline double gamma_p(double s, double x) {
    if (x < 0.0 || s <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(s);
    if (x < s + 1.0) {
        // series expansion
        double ap = s;
        double sum = 1.0 / s;
        double del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + s * std::log(x) - lg);
    }
    // Lentz continued fraction for Q, then P = 1 - Q
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + s * std::log(x) - lg) * h;
    return 1.0 - q;
}

}  // namespace detail

/// Upper-tail p-value of a chi-square statistic with the given degrees of
/// freedom.
inline double chi_square_pvalue(double statistic, int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof must be >= 1");
    if (statistic <= 0.0) return 1.0;
    return 1.0 - detail::gamma_p(0.5 * dof, 0.5 * statistic);
}

/// Pool cells (in index order) until each pooled bin has expected count at
/// least min_expected; the final bin absorbs any small leftover.
inline std::vector<std::vector<std::size_t>> pool_bins(const std::vector<double>& expected,
                                                       double min_expected) {
    std::vector<std::vector<std::size_t>> bins;
    std::vector<std::size_t> current;
    double acc = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        current.push_back(i);
        acc += expected[i];
        if (acc >= min_expected) {
            bins.push_back(current);
            current.clear();
            acc = 0.0;
        }
    }
    if (!current.empty()) {
        if (bins.empty()) {
            bins.push_back(current);
        } else {
            for (std::size_t i : current) bins.back().push_back(i);
        }
    }
    return bins;
}

/// Goodness-of-fit p-value of observed counts against cell probabilities,
/// with automatic pooling to keep expected counts >= min_expected.
inline double chi2_gof_pvalue(const std::vector<std::int64_t>& counts,
                              const std::vector<double>& probs, double min_expected = 5.0) {
    if (counts.size() != probs.size())
        throw std::invalid_argument("chi2_gof_pvalue: size mismatch");
    std::int64_t n = 0;
    for (std::int64_t c : counts) n += c;
    std::vector<double> expected(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) expected[i] = probs[i] * n;

    const auto bins = pool_bins(expected, min_expected);
    if (bins.size() < 2) return 1.0;
    double stat = 0.0;
    for (const auto& bin : bins) {
        double e = 0.0;
        double o = 0.0;
        for (std::size_t i : bin) {
            e += expected[i];
            o += static_cast<double>(counts[i]);
        }
        stat += (o - e) * (o - e) / e;
    }
    return chi_square_pvalue(stat, static_cast<int>(bins.size()) - 1);
}

/// Two-sample chi-square p-value for count vectors over the same cells,
/// pooling on combined counts.
inline double chi2_two_sample_pvalue(const std::vector<std::int64_t>& counts1,
                                     const std::vector<std::int64_t>& counts2,
                                     double min_expected = 5.0) {
    if (counts1.size() != counts2.size())
        throw std::invalid_argument("chi2_two_sample_pvalue: size mismatch");
    std::vector<double> combined(counts1.size());
    for (std::size_t i = 0; i < counts1.size(); ++i)
        combined[i] = static_cast<double>(counts1[i] + counts2[i]);

    const auto bins = pool_bins(combined, 2.0 * min_expected);
    if (bins.size() < 2) return 1.0;

    double n1 = 0.0, n2 = 0.0;
    for (std::int64_t c : counts1) n1 += static_cast<double>(c);
    for (std::int64_t c : counts2) n2 += static_cast<double>(c);
    const double k1 = std::sqrt(n2 / n1);
    const double k2 = std::sqrt(n1 / n2);

    double stat = 0.0;
    for (const auto& bin : bins) {
        double o1 = 0.0, o2 = 0.0;
        for (std::size_t i : bin) {
            o1 += static_cast<double>(counts1[i]);
            o2 += static_cast<double>(counts2[i]);
        }
        if (o1 + o2 == 0.0) continue;
        const double d = k1 * o1 - k2 * o2;
        stat += d * d / (o1 + o2);
    }
    return chi_square_pvalue(stat, static_cast<int>(bins.size()) - 1);
}

struct BinomialInterval {
    double fraction = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval (default ~95%).
inline BinomialInterval wilson_interval(std::int64_t successes, std::int64_t trials,
                                        double z = 1.959963984540054) {
    if (trials <= 0) throw std::invalid_argument("wilson_interval: trials must be > 0");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace polyurn
