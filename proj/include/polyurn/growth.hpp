#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace polyurn {

enum class GrowthKind { Power, PowerLog, Exp };

/// Analytic weight family: scale * x^alpha, scale * x^alpha (ln x)^beta, or
/// scale * base-e exponential exp(gamma x). These are the families whose
/// reciprocal tail sums admit closed-form integral remainder bounds, which is
/// what the diagnostics below trade on.
struct GrowthFamily {
    GrowthKind kind = GrowthKind::Power;
    double alpha = 1.0;
    double beta = 0.0;   // PowerLog only
    double gamma = 1.0;  // Exp only
    double scale = 1.0;

    static GrowthFamily power(double alpha, double scale = 1.0) {
        return {GrowthKind::Power, alpha, 0.0, 1.0, scale};
    }
    static GrowthFamily power_log(double alpha, double beta, double scale = 1.0) {
        return {GrowthKind::PowerLog, alpha, beta, 1.0, scale};
    }
    static GrowthFamily exponential(double gamma, double scale = 1.0) {
        return {GrowthKind::Exp, 0.0, 0.0, gamma, scale};
    }

    void validate() const {
        if (!(scale > 0.0)) throw std::invalid_argument("growth family: scale must be > 0");
        switch (kind) {
            case GrowthKind::Power:
                if (alpha < 0.0) throw std::invalid_argument("growth family: alpha must be >= 0");
                break;
            case GrowthKind::PowerLog:
                if (!(alpha > 0.0) || beta < 0.0)
                    throw std::invalid_argument("growth family: need alpha > 0 and beta >= 0");
                break;
            case GrowthKind::Exp:
                if (!(gamma > 0.0)) throw std::invalid_argument("growth family: gamma must be > 0");
                break;
        }
    }

    // ln argument guarded away from the x = 1 zero; arguments are >= 1 in
    // every use, so the guard only touches the boundary.
    static double guarded_log(double x) { return std::log(std::max(x, 1.0 + 1e-12)); }

    double eval(double x) const {
        switch (kind) {
            case GrowthKind::Power:
                return scale * std::pow(x, alpha);
            case GrowthKind::PowerLog:
                return scale * std::pow(x, alpha) * std::pow(guarded_log(x), beta);
            case GrowthKind::Exp:
                return scale * std::exp(gamma * x);
        }
        return 0.0;
    }

    /// Natural log of eval(x); exact even where eval overflows.
    double log_eval(double x) const {
        switch (kind) {
            case GrowthKind::Power:
                return std::log(scale) + alpha * std::log(x);
            case GrowthKind::PowerLog:
                return std::log(scale) + alpha * std::log(x) + beta * std::log(guarded_log(x));
            case GrowthKind::Exp:
                return std::log(scale) + gamma * x;
        }
        return 0.0;
    }

    /// Family of eval(x)^p, used for squared-weight tail sums.
    GrowthFamily powered(int p) const {
        GrowthFamily f = *this;
        f.scale = std::pow(scale, p);
        f.alpha = alpha * p;
        f.beta = beta * p;
        f.gamma = gamma * p;
        return f;
    }

    /// Does the reciprocal series sum_k 1/eval(k) converge?
    bool reciprocal_converges() const {
        switch (kind) {
            case GrowthKind::Power:
                return alpha > 1.0;
            case GrowthKind::PowerLog:
                return alpha > 1.0 || (alpha == 1.0 && beta > 1.0);
            case GrowthKind::Exp:
                return true;
        }
        return false;
    }

    friend bool operator==(const GrowthFamily&, const GrowthFamily&) = default;
};

/// Certified enclosure of a nonnegative quantity.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool finite = true;

    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }

    static Interval infinite() {
        return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                false};
    }
};

namespace detail {

/// Upper bound on the integral of 1/F(x+shift) over [t, infinity).
inline double reciprocal_integral_upper(const GrowthFamily& f, double shift, double t) {
    const double u = t + shift;
    switch (f.kind) {
        case GrowthKind::Power:
            return std::pow(u, 1.0 - f.alpha) / ((f.alpha - 1.0) * f.scale);
        case GrowthKind::PowerLog: {
            if (f.alpha == 1.0)
                return std::pow(std::log(u), 1.0 - f.beta) / ((f.beta - 1.0) * f.scale);
            // (ln x)^-beta <= (ln u)^-beta on [u, inf)
            return std::pow(std::log(u), -f.beta) * std::pow(u, 1.0 - f.alpha) /
                   ((f.alpha - 1.0) * f.scale);
        }
        case GrowthKind::Exp:
            return std::exp(-f.gamma * u) / (f.gamma * f.scale);
    }
    return 0.0;
}

/// Lower bound on the same integral.
inline double reciprocal_integral_lower(const GrowthFamily& f, double shift, double t) {
    const double u = t + shift;
    switch (f.kind) {
        case GrowthKind::Power:
            return std::pow(u, 1.0 - f.alpha) / ((f.alpha - 1.0) * f.scale);
        case GrowthKind::PowerLog: {
            if (f.alpha == 1.0)
                return std::pow(std::log(u), 1.0 - f.beta) / ((f.beta - 1.0) * f.scale);
            // cut at M = 1000 u and use (ln x)^-beta >= (ln M)^-beta below M
            const double m = 1000.0 * u;
            return std::pow(std::log(m), -f.beta) *
                   (std::pow(u, 1.0 - f.alpha) - std::pow(m, 1.0 - f.alpha)) /
                   ((f.alpha - 1.0) * f.scale);
        }
        case GrowthKind::Exp:
            return std::exp(-f.gamma * u) / (f.gamma * f.scale);
    }
    return 0.0;
}

}  // namespace detail

/// Certified value of sum_{k >= from} 1/F(k + shift).
///
/// Exponential families sum in closed form. The power families accumulate
/// terms until they stop mattering (or max_terms), then bracket the remainder
/// with the integral test, so the returned interval is a rigorous enclosure.
inline Interval reciprocal_tail(const GrowthFamily& f, double shift, std::int64_t from,
                                std::int64_t max_terms = 2'000'000) {
    f.validate();
    if (from < 1) throw std::invalid_argument("reciprocal_tail: start index must be >= 1");
    if (!f.reciprocal_converges()) return Interval::infinite();

    if (f.kind == GrowthKind::Exp) {
        const double q = std::exp(-f.gamma);
        const double head = std::exp(-f.gamma * (from + shift)) / f.scale;
        const double total = head / (1.0 - q);
        return {total, total, true};
    }

    long double partial = 0.0L;
    std::int64_t k = from;
    for (std::int64_t n = 0; n < max_terms; ++n, ++k) {
        const double term = 1.0 / f.eval(static_cast<double>(k) + shift);
        partial += term;
        if (term < 1e-14 * static_cast<double>(partial) && n > 16) {
            ++k;
            break;
        }
    }
    // remainder over k' >= k, bracketed by integrals from k and k-1
    const double lo = static_cast<double>(partial) + detail::reciprocal_integral_lower(f, shift, static_cast<double>(k));
    const double hi = static_cast<double>(partial) + detail::reciprocal_integral_upper(f, shift, static_cast<double>(k) - 1.0);
    return {lo, hi, true};
}

}  // namespace polyurn
