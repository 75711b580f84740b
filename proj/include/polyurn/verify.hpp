#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "polyurn/growth.hpp"
#include "polyurn/psi_checks.hpp"
#include "polyurn/ruin.hpp"

namespace polyurn {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {

inline std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace detail

/// Deterministic numeric checker battery: ruin-moment identities and oracles,
/// growth-condition margins, ratio profiles and tail domination for the
/// analytic weight families. Everything here is closed-form or certified
/// numerics; no sampling.
inline VerifyReport run_verify_battery() {
    VerifyReport report;
    const auto add = [&](std::string name, bool pass, std::string detail) {
        report.checks.push_back({std::move(name), pass, std::move(detail)});
    };

    {  // the two ruin-moment rewrites agree with the closed forms
        double worst1 = 0.0, worst2 = 0.0;
        bool lower_ok = true, jensen_ok = true;
        for (int i = 1; i <= 100; ++i) {
            const double x = 0.07 * i;
            const double a = x + 0.11 * i;  // spans (0, 7] x (x, 18.1)
            const auto closed = ruin_moments_closed_form(x, a);
            const auto [l1, l2] = l_decomposition(a - x, x);
            worst1 = std::max(worst1, std::abs(l1 - closed.m1) / std::max(1.0, closed.m1));
            worst2 = std::max(worst2, std::abs(l2 - closed.m2) / std::max(1.0, closed.m2));
            lower_ok = lower_ok && l1 >= (a - x) * (a - x) / 3.0 - 1e-15;
            jensen_ok = jensen_ok && closed.m2 >= closed.m1 * closed.m1 * (1.0 - 1e-12);
        }
        add("ruin-l1-identity", worst1 <= 1e-12, "max rel err " + detail::num(worst1));
        add("ruin-l2-identity", worst2 <= 1e-12, "max rel err " + detail::num(worst2));
        add("ruin-l1-lower-bound", lower_ok, "L1 >= d^2/3 on grid");
        add("ruin-jensen", jensen_ok, "m2 >= m1^2 on grid");
    }

    {  // absorbing-chain solve reproduces the conditional mean exactly
        double worst = 0.0;
        for (int a = 2; a <= 50; ++a)
            for (int x = 1; x < a; ++x)
                worst = std::max(worst, std::abs(ruin_mean_chain_oracle(x, a) -
                                                 (static_cast<double>(a) * a - x * x) / 3.0));
        add("ruin-chain-oracle", worst <= 1e-9, "max abs err " + detail::num(worst));
    }

    {  // Laplace-transform finite differences recover both moments
        bool ok = true;
        std::string detail_str;
        for (const auto& [x, a] : std::vector<std::pair<double, double>>{{1, 2}, {1, 3}, {2, 5}}) {
            const auto closed = ruin_moments_closed_form(x, a);
            const auto [m1_est, m2_est] = laplace_moment_check(x, a, 1e-6);
            const double e1 = std::abs(m1_est - closed.m1);
            const double e2 = std::abs(m2_est - closed.m2) / closed.m2;
            ok = ok && e1 <= 1e-3 && e2 <= 1e-2;
            detail_str += "(" + detail::num(x) + "," + detail::num(a) + "): " + detail::num(e1) +
                          "/" + detail::num(e2) + " ";
        }
        add("ruin-laplace-moments", ok, detail_str);
    }

    {  // growth-margin condition for the square and exponential families
        const auto sq = check_psi_growth_condition(GrowthFamily::power(2.0), 0.4, 0.45,
                                                   std::exp(6.0), 1e6);
        add("growth-condition-square", sq.holds,
            "min margin " + detail::num(sq.min_margin) + " at z=" + detail::num(sq.argmin_z));
        const auto ex = check_psi_growth_condition(GrowthFamily::exponential(1.0), 0.4, 0.45,
                                                   std::exp(4.0), 1e6);
        add("growth-condition-exp", ex.holds, "min margin " + detail::num(ex.min_margin));
        // equal arguments make the ratio 1 < 1 + 1/(2z): must be flagged
        const auto eq = check_psi_growth_condition(GrowthFamily::power(2.0), 0.45, 0.45,
                                                   std::exp(4.0), 1e6);
        add("growth-condition-detects-violation", !eq.holds,
            "min margin " + detail::num(eq.min_margin));
    }

    {  // ratio profiles
        const auto sq = liminf_ratio_profile(GrowthFamily::power(2.0), 10'000);
        const double at_end = sq.ratio.empty() ? 0.0 : sq.ratio.back();
        add("liminf-ratio-square", sq.applicable && std::abs(at_end - 1.0 / 3.0) <= 1e-2,
            "ratio(1e4) = " + detail::num(at_end));
        bool grid_ok = true;
        for (double alpha : {1.5, 2.0, 3.0}) {
            const auto prof = liminf_ratio_profile(GrowthFamily::power(alpha), 10'000);
            grid_ok = grid_ok && prof.applicable && prof.running_infimum > 0.01;
        }
        add("liminf-ratio-alpha-grid", grid_ok, "running infimum > 0.01 for alpha in {1.5,2,3}");
        const auto ex = liminf_ratio_profile(GrowthFamily::exponential(1.0), 10'000);
        add("liminf-ratio-exp", ex.applicable && ex.running_infimum >= 0.5,
            "constant " + detail::num(ex.running_infimum));
        const auto diverging = liminf_ratio_profile(GrowthFamily::power(1.0), 10'000);
        add("liminf-ratio-divergent-flagged", !diverging.applicable, "linear case not applicable");
    }

    {  // shifted-tail domination
        const auto sq = check_tail_domination(GrowthFamily::power(2.0), 0.4, 1'000, 100'000);
        add("tail-domination-square", sq.holds,
            "min scaled slack " + detail::num(sq.min_slack) + " at n=" +
                std::to_string(sq.argmin_n));
        const auto zero = check_tail_domination(GrowthFamily::power(2.0), 0.0, 1'000, 100'000);
        add("tail-domination-zero-shift", zero.holds, "superset of terms");
        const auto ex = check_tail_domination(GrowthFamily::exponential(1.0), 0.4, 1'000, 10'000);
        add("tail-domination-exp", ex.holds, "min scaled slack " + detail::num(ex.min_slack));
    }

    {  // certified tail arithmetic: sum_{k>=2} k^-2 = pi^2/6 - 1
        const Interval basel = reciprocal_tail(GrowthFamily::power(2.0), 0.0, 2);
        const double target = 3.14159265358979323846 * 3.14159265358979323846 / 6.0 - 1.0;
        const bool ok = basel.finite && std::abs(basel.mid() - target) <= 1e-6 &&
                        basel.lo <= target && target <= basel.hi;
        add("tail-sum-basel", ok, "mid " + detail::num(basel.mid()));
    }

    return report;
}

}  // namespace polyurn
