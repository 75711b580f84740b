#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "polyurn/growth.hpp"

namespace polyurn {

// ---------------------------------------------------------------------------
// Growth-margin condition: Psi(z + a ln z) / Psi(z + theta(z)) >= 1 + 1/(2z)
// ---------------------------------------------------------------------------

struct GrowthConditionReport {
    bool holds = false;
    double min_margin = 0.0;
    double argmin_z = 0.0;
    std::optional<double> first_violation_z;
};

/// Evaluate the margin Psi(z + a ln z)/Psi(z + theta(z)) - (1 + 1/(2z)) on a
/// geometric grid; theta(z) = theta_coeff * ln z. Violations are data, not
/// errors.
inline GrowthConditionReport check_psi_growth_condition(const GrowthFamily& psi,
                                                        double theta_coeff, double a,
                                                        double z_lo, double z_hi,
                                                        int grid_points = 257) {
    psi.validate();
    if (!(a > 0.0 && a < 0.5))
        throw std::invalid_argument("growth condition: a must lie in (0, 1/2)");
    if (!(z_lo > 1.0) || !(z_hi > z_lo))
        throw std::invalid_argument("growth condition: need 1 < z_lo < z_hi");
    if (grid_points < 2) throw std::invalid_argument("growth condition: need >= 2 grid points");

    GrowthConditionReport report;
    report.min_margin = std::numeric_limits<double>::infinity();
    const double step = std::log(z_hi / z_lo) / (grid_points - 1);
    for (int i = 0; i < grid_points; ++i) {
        const double z = z_lo * std::exp(step * i);
        const double lz = std::log(z);
        // ratio through the log so exponential families cannot overflow
        const double ratio =
            std::exp(psi.log_eval(z + a * lz) - psi.log_eval(z + theta_coeff * lz));
        const double margin = ratio - (1.0 + 0.5 / z);
        if (margin < report.min_margin) {
            report.min_margin = margin;
            report.argmin_z = z;
        }
        if (margin <= 0.0 && !report.first_violation_z) report.first_violation_z = z;
    }
    report.holds = !report.first_violation_z.has_value();
    return report;
}

// ---------------------------------------------------------------------------
// Ratio profile Psi(n) * sum 1/Psi^2 / sum 1/Psi
// ---------------------------------------------------------------------------

struct RatioProfile {
    bool applicable = false;  // false when sum 1/Psi diverges
    std::vector<std::int64_t> grid;
    std::vector<double> ratio;       // midpoint estimates
    std::vector<double> ratio_lo;    // certified enclosures
    std::vector<double> ratio_hi;
    double running_infimum = 0.0;    // the liminf estimate
};

/// Profile of Psi(n) * sum_{k>=n} Psi(k)^-2 / sum_{k>=n} Psi(k)^-1 on a
/// geometric grid up to n_max. For exponential families the ratio is the
/// exact constant 1/(1 + e^-gamma); for power families both tails carry
/// integral remainder enclosures.
inline RatioProfile liminf_ratio_profile(const GrowthFamily& psi, std::int64_t n_max,
                                         std::int64_t n_min = 16, int grid_points = 33) {
    psi.validate();
    if (n_max < n_min) throw std::invalid_argument("ratio profile: n_max < n_min");

    RatioProfile profile;
    if (!psi.reciprocal_converges()) return profile;  // not applicable
    profile.applicable = true;
    profile.running_infimum = std::numeric_limits<double>::infinity();

    const double step = std::log(static_cast<double>(n_max) / n_min) /
                        std::max(1, grid_points - 1);
    std::int64_t prev = -1;
    for (int i = 0; i < grid_points; ++i) {
        const std::int64_t n =
            std::max<std::int64_t>(n_min, static_cast<std::int64_t>(
                                              std::llround(n_min * std::exp(step * i))));
        if (n == prev || n > n_max) continue;
        prev = n;

        double lo, hi;
        if (psi.kind == GrowthKind::Exp) {
            const double q = std::exp(-psi.gamma);
            lo = hi = 1.0 / (1.0 + q);
        } else {
            const Interval s1 = reciprocal_tail(psi, 0.0, n, 200'000);
            const Interval s2 = reciprocal_tail(psi.powered(2), 0.0, n, 200'000);
            const double w = std::exp(psi.log_eval(static_cast<double>(n)));
            lo = w * s2.lo / s1.hi;
            hi = w * s2.hi / s1.lo;
        }
        profile.grid.push_back(n);
        profile.ratio_lo.push_back(lo);
        profile.ratio_hi.push_back(hi);
        profile.ratio.push_back(0.5 * (lo + hi));
        profile.running_infimum = std::min(profile.running_infimum, 0.5 * (lo + hi));
    }
    return profile;
}

// ---------------------------------------------------------------------------
// Tail domination:
//   sum_{k >= n - (1/2) floor(ln n) - 1} 1/Psi(k + theta(k))  >=  sum_{k >= n} 1/Psi(k)
// ---------------------------------------------------------------------------

struct TailDominationPoint {
    std::int64_t n = 0;
    double slack_lower = 0.0;  // certified lower bound on LHS - RHS, scaled by Psi(n)
    double slack_upper = 0.0;
    bool holds = false;
};

struct TailDominationReport {
    bool holds = false;
    double min_slack = 0.0;  // most pessimistic certified slack (scaled by Psi(n))
    std::int64_t argmin_n = 0;
    int violations = 0;
    std::vector<TailDominationPoint> points;
};

namespace detail {

inline double log_reciprocal_integral_upper(const GrowthFamily& f, double t) {
    switch (f.kind) {
        case GrowthKind::Power:
            return (1.0 - f.alpha) * std::log(t) - std::log((f.alpha - 1.0) * f.scale);
        case GrowthKind::PowerLog:
            if (f.alpha == 1.0)
                return (1.0 - f.beta) * std::log(std::log(t)) - std::log((f.beta - 1.0) * f.scale);
            return -f.beta * std::log(std::log(t)) + (1.0 - f.alpha) * std::log(t) -
                   std::log((f.alpha - 1.0) * f.scale);
        case GrowthKind::Exp:
            return -f.gamma * t - std::log(f.gamma * f.scale);
    }
    return 0.0;
}

inline double log_reciprocal_integral_lower(const GrowthFamily& f, double t) {
    switch (f.kind) {
        case GrowthKind::Power:
            return (1.0 - f.alpha) * std::log(t) - std::log((f.alpha - 1.0) * f.scale);
        case GrowthKind::PowerLog: {
            if (f.alpha == 1.0)
                return (1.0 - f.beta) * std::log(std::log(t)) - std::log((f.beta - 1.0) * f.scale);
            const double m = 1000.0 * t;
            const double body =
                (std::pow(t, 1.0 - f.alpha) - std::pow(m, 1.0 - f.alpha)) / ((f.alpha - 1.0) * f.scale);
            return -f.beta * std::log(std::log(m)) + std::log(body);
        }
        case GrowthKind::Exp:
            return -f.gamma * t - std::log(f.gamma * f.scale);
    }
    return 0.0;
}

}  // namespace detail

/// Certified check of the shifted-tail domination at one n, with everything
/// scaled by Psi(n) so the slack is an O(1) number and exponential families
/// cannot underflow.
///
/// The difference LHS - RHS splits into a positive head
///   sum_{k0 <= k < n} 1/Psi(k + theta(k)),   k0 = ceil(n - floor(ln n)/2 - 1),
/// minus the deficit sum_{k >= n} [1/Psi(k) - 1/Psi(k + theta(k))]. The
/// deficit terms are summed explicitly until the integral-form remainder
/// bound I(K) - I(K + theta(K))/(1 + theta'(K)) stops mattering.
inline TailDominationPoint check_tail_domination_at(const GrowthFamily& psi, double theta_coeff,
                                                    std::int64_t n,
                                                    std::int64_t max_terms = 60'000'000) {
    psi.validate();
    if (theta_coeff < 0.0)
        throw std::invalid_argument("tail domination: theta coefficient must be >= 0");
    if (n < 8) throw std::invalid_argument("tail domination: n too small");
    if (!psi.reciprocal_converges())
        throw std::invalid_argument("tail domination: reciprocal series diverges");

    const double s0 = psi.log_eval(static_cast<double>(n));  // log of the scaling factor
    const auto scaled_term = [&](double x) { return std::exp(s0 - psi.log_eval(x)); };
    const auto theta = [&](double x) { return theta_coeff * std::log(x); };

    const double w1 = 0.5 * std::floor(std::log(static_cast<double>(n))) + 1.0;
    const std::int64_t k0 = static_cast<std::int64_t>(std::ceil(static_cast<double>(n) - w1));

    double head = 0.0;
    for (std::int64_t k = k0; k < n; ++k) {
        const double x = static_cast<double>(k);
        head += scaled_term(x + theta(x));
    }

    TailDominationPoint point;
    point.n = n;

    if (theta_coeff == 0.0) {  // the left sum merely starts earlier
        point.slack_lower = head;
        point.slack_upper = head;
        point.holds = head >= 0.0;
        return point;
    }

    const auto remainder_bound = [&](std::int64_t k_last) {
        const double t = static_cast<double>(k_last);
        const double upper = std::exp(s0 + detail::log_reciprocal_integral_upper(psi, t));
        const double lower =
            std::exp(s0 + detail::log_reciprocal_integral_lower(psi, t + theta(t))) /
            (1.0 + theta_coeff / t);
        return std::max(upper - lower, 0.0);
    };

    double deficit = 0.0;
    std::int64_t k = n;
    double rem = remainder_bound(k);
    for (std::int64_t steps = 0; steps < max_terms; ++k, ++steps) {
        const double x = static_cast<double>(k);
        deficit += scaled_term(x) - scaled_term(x + theta(x));
        if ((steps & 0xFFFF) == 0xFFFF) {
            rem = remainder_bound(k);
            const double provisional = head - deficit - rem;
            if (rem <= 0.02 * std::abs(provisional)) break;
        }
    }
    rem = remainder_bound(k);

    point.slack_lower = head - deficit - rem;
    point.slack_upper = head - deficit;  // the tail deficit is nonnegative
    point.holds = point.slack_lower > 0.0;
    return point;
}

inline TailDominationReport check_tail_domination(const GrowthFamily& psi, double theta_coeff,
                                                  std::int64_t n_lo, std::int64_t n_hi,
                                                  int grid_points = 9) {
    if (n_lo < 8 || n_hi < n_lo)
        throw std::invalid_argument("tail domination: need 8 <= n_lo <= n_hi");
    TailDominationReport report;
    report.min_slack = std::numeric_limits<double>::infinity();
    report.holds = true;

    const double step = std::log(static_cast<double>(n_hi) / n_lo) / std::max(1, grid_points - 1);
    std::int64_t prev = -1;
    for (int i = 0; i < grid_points; ++i) {
        const std::int64_t n = std::max<std::int64_t>(
            n_lo, static_cast<std::int64_t>(std::llround(n_lo * std::exp(step * i))));
        if (n == prev || n > n_hi) continue;
        prev = n;
        const TailDominationPoint point = check_tail_domination_at(psi, theta_coeff, n);
        if (point.slack_lower < report.min_slack) {
            report.min_slack = point.slack_lower;
            report.argmin_n = n;
        }
        if (!point.holds) {
            report.holds = false;
            ++report.violations;
        }
        report.points.push_back(point);
    }
    return report;
}

}  // namespace polyurn
