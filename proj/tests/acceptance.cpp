// Acceptance suite: end-to-end statistical and numeric gates for the
// simulator library. Each criterion prints one PASS/FAIL line; the process
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "polyurn/polyurn.hpp"

using namespace polyurn;

namespace {

struct Criterion {
    std::string id;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<Criterion> g_results;

void run_criterion(const std::string& id, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c;
    c.id = id;
    c.name = name;
    try {
        auto [pass, detail] = body();
        c.pass = pass;
        c.detail = std::move(detail);
    } catch (const std::exception& e) {
        c.pass = false;
        c.detail = std::string("exception: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "[" << c.id << "] " << (c.pass ? "PASS" : "FAIL") << " " << c.name << " — "
              << c.detail << " (" << std::fixed << c.seconds << std::defaultfloat << " s)\n"
              << std::flush;
    g_results.push_back(std::move(c));
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(5);
    os << v;
    return os.str();
}

const int kWorkers = 4;

}  // namespace

// ---------------------------------------------------------------------------

int main() {
    std::cout << "acceptance suite\n";

    // 1. linear urn sequence law: exact enumeration + MC
    run_criterion("1", "urn engine vs exhaustive enumeration (linear, n=6)", [] {
        const auto naive = oracle::enumerate_polya_sequences(1, 1, 6);
        std::vector<double> white_prob(7, 0.0);
        for (const auto& [code, p] : naive) white_prob[__builtin_popcountll(code)] += p;

        FunctionUrnProvider linear;
        linear.g_white = linear.g_red = GrowthFamily::power(1.0);
        const auto engine = oracle::enumerate_urn_sequences(linear, UrnState::start(1, 1), 6);
        std::vector<double> engine_white(7, 0.0);
        for (const auto& [code, p] : engine) engine_white[__builtin_popcountll(code)] += p;

        double worst = 0.0;
        for (int k = 0; k <= 6; ++k) {
            worst = std::max(worst, std::abs(white_prob[k] - 1.0 / 7.0));
            worst = std::max(worst, std::abs(engine_white[k] - 1.0 / 7.0));
        }
        if (worst > 1e-12) return std::pair{false, "enumeration off by " + fmt(worst)};

        const std::int64_t replicas = 100'000;
        std::vector<std::int64_t> counts(7, 0);
        for (std::int64_t r = 0; r < replicas; ++r) {
            ReinforcementProvider provider = linear;
            UrnState state = UrnState::start(1, 1);
            RngStream rng(1001, r);
            int whites = 0;
            for (int s = 0; s < 6; ++s)
                if (gup_step(state, provider, rng) == BallColor::White) ++whites;
            counts[whites] += 1;
        }
        const double sigma = std::sqrt((1.0 / 7.0) * (6.0 / 7.0) / replicas);
        double worst_z = 0.0;
        for (int k = 0; k <= 6; ++k) {
            const double freq = static_cast<double>(counts[k]) / replicas;
            worst_z = std::max(worst_z, std::abs(freq - 1.0 / 7.0) / sigma);
        }
        return std::pair{worst_z <= 4.0, "exact err " + fmt(worst) + ", MC worst z = " +
                                             fmt(worst_z) + " (limit 4)"};
    });

    // 2. walker path law vs 16-path enumeration
    run_criterion("2", "walker MC vs exhaustive path enumeration (triangle, h=4)", [] {
        WalkConfig cfg;
        cfg.vertices = 3;
        cfg.particles = 1;
        cfg.alpha = 2.0;
        const int horizon = 4;
        const auto law = oracle::enumerate_walk_paths(cfg, horizon);

        const std::int64_t replicas = 100'000;
        std::map<std::uint64_t, std::int64_t> counts;
        for (std::int64_t r = 0; r < replicas; ++r) {
            RngStream rng(1002, r);
            const Trajectory traj = simulate_walk(cfg, horizon, rng);
            counts[oracle::walk_path_code(traj, horizon)] += 1;
        }
        std::vector<std::int64_t> observed;
        std::vector<double> probs;
        for (const auto& [code, p] : law) {
            observed.push_back(counts[code]);
            probs.push_back(p);
        }
        const double pvalue = chi2_gof_pvalue(observed, probs);
        return std::pair{pvalue > 0.001, "chi-square p = " + fmt(pvalue) + " over " +
                                             std::to_string(law.size()) + " paths"};
    });

    // 3. direct draw vs exponential race, square urn, horizon 8
    run_criterion("3", "gup_step vs race_step sequence laws (square, h=8)", [] {
        const int horizon = 8;
        const std::int64_t replicas = 100'000;
        std::vector<std::int64_t> direct(1 << horizon, 0), race(1 << horizon, 0);
        FunctionUrnProvider square;
        square.g_white = square.g_red = GrowthFamily::power(2.0);
        for (std::int64_t r = 0; r < replicas; ++r) {
            {
                ReinforcementProvider provider = square;
                UrnState state = UrnState::start(1, 1);
                RngStream rng(1003, r);
                for (int s = 0; s < horizon; ++s) gup_step(state, provider, rng);
                direct[oracle::draw_log_code(state.draw_log)] += 1;
            }
            {
                ReinforcementProvider provider = square;
                UrnState state = UrnState::start(1, 1);
                RngStream rng(1004, r);
                for (int s = 0; s < horizon; ++s) race_step(state, provider, rng);
                race[oracle::draw_log_code(state.draw_log)] += 1;
            }
        }
        const double pvalue = chi2_two_sample_pvalue(direct, race);
        return std::pair{pvalue > 0.001, "chi-square p = " + fmt(pvalue)};
    });

    // 4. ruin moments: oracle, Laplace transform, rewrites
    run_criterion("4", "ruin moments: chain oracle, Laplace check, rewrites", [] {
        double worst_oracle = 0.0;
        for (int a = 2; a <= 50; ++a)
            for (int x = 1; x < a; ++x)
                worst_oracle = std::max(
                    worst_oracle, std::abs(ruin_mean_chain_oracle(x, a) -
                                           (static_cast<double>(a) * a - x * x) / 3.0));
        if (worst_oracle > 1e-9)
            return std::pair{false, "chain oracle err " + fmt(worst_oracle)};

        for (const auto& [x, a] : std::vector<std::pair<double, double>>{{1, 2}, {1, 3}, {2, 5}}) {
            const auto closed = ruin_moments_closed_form(x, a);
            const auto [m1, m2] = laplace_moment_check(x, a, 1e-6);
            if (std::abs(m1 - closed.m1) > 1e-3)
                return std::pair{false, "laplace m1 err " + fmt(std::abs(m1 - closed.m1))};
            if (std::abs(m2 - closed.m2) / closed.m2 > 1e-2)
                return std::pair{false, "laplace m2 err " + fmt(std::abs(m2 - closed.m2))};
        }

        double worst_id = 0.0;
        for (int i = 1; i <= 100; ++i) {
            const double x = 0.13 * i;
            const double a = x + 0.07 * i;
            const auto closed = ruin_moments_closed_form(x, a);
            const auto [l1, l2] = l_decomposition(a - x, x);
            worst_id = std::max(worst_id, std::abs(l1 - closed.m1) / std::max(1.0, closed.m1));
            worst_id = std::max(worst_id, std::abs(l2 - closed.m2) / std::max(1.0, closed.m2));
        }
        return std::pair{worst_id <= 1e-12,
                         "oracle err " + fmt(worst_oracle) + ", identity err " + fmt(worst_id)};
    });

    // 5 + 8. localization surrogate and the kernel-bound invariant
    double max_xi = 0.0;
    std::int64_t xi_violations = 0;
    double xi_bound = 0.0;
    run_criterion("5", "two-particle localization >= 0.95 and monotone in horizon", [&] {
        WalkConfig cfg;
        cfg.vertices = 3;
        cfg.particles = 2;
        cfg.alpha = 2.0;
        cfg.initial_positions = {0, 0};
        cfg.kernel = KernelSpec::exp_discount(1.0);
        xi_bound = kernel_bound(cfg.kernel, 2);

        const std::vector<std::int64_t> horizons{1'000, 10'000, 100'000};
        const std::int64_t window = 1'000;
        const std::int64_t replicas = 500;

        std::vector<std::vector<std::array<bool, 2>>> localized(
            horizons.size(), std::vector<std::array<bool, 2>>(replicas, {false, false}));
        std::vector<double> rep_max_xi(replicas, 0.0);
        std::vector<std::int64_t> rep_violations(replicas, 0);

        detail::parallel_replicas(replicas, kWorkers, [&](std::int64_t r) {
            RngStream rng(1005, r);
            const Trajectory traj = simulate_walk(cfg, horizons.back(), rng);
            const PolygonGraph g(3);
            for (std::size_t hi = 0; hi < horizons.size(); ++hi)
                for (int p = 0; p < 2; ++p) {
                    std::span<const int> path(&traj.positions(p, 0),
                                              static_cast<std::size_t>(horizons[hi]) + 1);
                    localized[hi][r][p] = detect_localization(path, g, window).localized;
                }
            rep_max_xi[r] = traj.max_kernel_value;
            rep_violations[r] = traj.kernel_bound_violations;
        });
        for (std::int64_t r = 0; r < replicas; ++r) {
            max_xi = std::max(max_xi, rep_max_xi[r]);
            xi_violations += rep_violations[r];
        }

        std::vector<std::array<double, 2>> fraction(horizons.size());
        for (std::size_t hi = 0; hi < horizons.size(); ++hi)
            for (int p = 0; p < 2; ++p) {
                std::int64_t hits = 0;
                for (std::int64_t r = 0; r < replicas; ++r)
                    if (localized[hi][r][p]) ++hits;
                fraction[hi][p] = static_cast<double>(hits) / replicas;
            }

        bool pass = fraction[1][0] >= 0.95 && fraction[1][1] >= 0.95;
        for (int p = 0; p < 2; ++p)
            for (std::size_t hi = 0; hi + 1 < horizons.size(); ++hi)
                pass = pass && fraction[hi][p] <= fraction[hi + 1][p];

        std::string detail = "fractions per horizon:";
        for (std::size_t hi = 0; hi < horizons.size(); ++hi)
            detail += " " + std::to_string(horizons[hi]) + ":(" + fmt(fraction[hi][0]) + "," +
                      fmt(fraction[hi][1]) + ")";
        return std::pair{pass, detail};
    });

    // 6. monochromatic tails: square urn vs the linear control
    run_criterion("6", "square urn monochromatic tail >= 0.99, linear <= 0.01", [] {
        const std::int64_t replicas = 1'000;
        const std::int64_t horizon = 10'000;
        const std::int64_t window = 5'000;

        const auto tail_fraction = [&](double alpha, std::uint64_t seed) {
            std::vector<char> hit(replicas, 0);
            FunctionUrnProvider f;
            f.g_white = f.g_red = GrowthFamily::power(alpha);
            detail::parallel_replicas(replicas, kWorkers, [&](std::int64_t r) {
                RngStream rng(seed, r);
                const UrnRun run = run_urn(f, UrnState::start(1, 1), horizon, rng);
                hit[r] = detect_monochromatic_tail(run.final_state.draw_log, window).has_value();
            });
            std::int64_t hits = 0;
            for (char h : hit) hits += h;
            return static_cast<double>(hits) / replicas;
        };

        const double square = tail_fraction(2.0, 1006);
        const double linear = tail_fraction(1.0, 1007);
        return std::pair{square >= 0.99 && linear <= 0.01,
                         "square " + fmt(square) + ", linear " + fmt(linear)};
    });

    // 7. appendix checkers
    run_criterion("7a", "growth margin positive for (x^2, 0.4 ln z, 0.45) on [e^4, 1e6]", [] {
        const auto report = check_psi_growth_condition(GrowthFamily::power(2.0), 0.4, 0.45,
                                                       std::exp(4.0), 1e6, 513);
        std::string detail = "min margin " + fmt(report.min_margin) + " at z=" +
                             fmt(report.argmin_z);
        if (report.first_violation_z) {
            // locate where the condition starts to hold
            double lo = *report.first_violation_z, hi = 1e6;
            const auto margin = [](double z) {
                const double lz = std::log(z);
                const double ratio = std::pow((z + 0.45 * lz) / (z + 0.4 * lz), 2.0);
                return ratio - (1.0 + 0.5 / z);
            };
            for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-12; ++i) {
                const double mid = std::sqrt(lo * hi);
                (margin(mid) < 0.0 ? lo : hi) = mid;
            }
            detail += "; first violation z=" + fmt(*report.first_violation_z) +
                      ", inequality first holds at z~" + fmt(hi) + " (=e^" + fmt(std::log(hi)) +
                      ")";
        }
        return std::pair{report.holds && report.min_margin > 0.0, detail};
    });

    run_criterion("7b", "ratio profile for x^2 equals 1/3 +- 1e-2 at n=1e4", [] {
        const auto profile = liminf_ratio_profile(GrowthFamily::power(2.0), 10'000);
        if (!profile.applicable || profile.ratio.empty())
            return std::pair{false, std::string("profile not applicable")};
        const double at_end = profile.ratio.back();
        return std::pair{profile.grid.back() == 10'000 && std::abs(at_end - 1.0 / 3.0) <= 1e-2,
                         "ratio(1e4) = " + fmt(at_end)};
    });

    run_criterion("7c", "tail domination holds for x^2 with theta = 0.4 ln z on [1e3, 1e5]", [] {
        const auto report = check_tail_domination(GrowthFamily::power(2.0), 0.4, 1'000, 100'000);
        return std::pair{report.holds, "min scaled slack " + fmt(report.min_slack) + " at n=" +
                                           std::to_string(report.argmin_n) + ", violations " +
                                           std::to_string(report.violations)};
    });

    // 8. kernel bound invariant across the acceptance walks
    run_criterion("8", "kernel values never exceed the declared bound", [&] {
        return std::pair{xi_violations == 0 && max_xi <= xi_bound * (1.0 + 1e-12),
                         "max value " + fmt(max_xi) + " vs bound " + fmt(xi_bound) +
                             ", violations " + std::to_string(xi_violations)};
    });

    // 9. byte-identical reruns
    run_criterion("9", "identical config + seed reproduce identical bytes", [] {
        const auto render = [](const ExperimentConfig& cfg, int workers) {
            std::ostringstream os;
            write_result(run_experiment(cfg, workers), os);
            return os.str();
        };

        auto walk_cfg = *find_preset("triangle-two-particles");
        walk_cfg.replicas = 60;
        walk_cfg.horizon = 2'000;
        walk_cfg.windows = {500};
        const std::string w1 = render(walk_cfg, 1);
        const std::string w2 = render(walk_cfg, 1);
        const std::string w3 = render(walk_cfg, 4);

        auto urn_cfg = *find_preset("rubin-square");
        urn_cfg.replicas = 60;
        urn_cfg.horizon = 2'000;
        urn_cfg.windows = {500};
        urn_cfg.format = OutputFormat::Json;
        const std::string u1 = render(urn_cfg, 1);
        const std::string u2 = render(urn_cfg, 3);

        const bool pass = w1 == w2 && w1 == w3 && u1 == u2 && !w1.empty() && !u1.empty();
        return std::pair{pass, "walk csv " + std::to_string(w1.size()) + " bytes, urn json " +
                                   std::to_string(u1.size()) + " bytes, stable across reruns and "
                                   "worker counts"};
    });

    int failures = 0;
    for (const auto& c : g_results)
        if (!c.pass) ++failures;
    std::cout << (failures == 0 ? "ALL CRITERIA PASSED"
                                : std::to_string(failures) + " CRITERIA FAILED")
              << "\n";
    return failures == 0 ? 0 : 1;
}
