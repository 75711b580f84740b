#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "polyurn/growth.hpp"
#include "polyurn/rng.hpp"

namespace polyurn {

enum class BallColor : int { White = 0, Red = 1 };

inline BallColor other(BallColor c) {
    return c == BallColor::White ? BallColor::Red : BallColor::White;
}

/// Two-color urn composition plus the draw history. One ball is added per
/// step, so composition[0] + composition[1] == start total + step always.
struct UrnState {
    std::array<std::int64_t, 2> composition{1, 1};
    std::int64_t step = 0;
    std::vector<std::uint8_t> draw_log;

    std::int64_t total() const { return composition[0] + composition[1]; }

    static UrnState start(std::int64_t white, std::int64_t red) {
        if (white < 1 || red < 1)
            throw std::invalid_argument("urn: initial composition must be >= 1 per color");
        UrnState s;
        s.composition = {white, red};
        return s;
    }
};

/// Weights for the next draw. f_* drive the pick probability and may carry a
/// common rescaling (which leaves the pick law unchanged); log_f_* are exact
/// natural logs of the true weights and feed the diagnostics.
struct UrnWeights {
    double f_white = 1.0;
    double f_red = 1.0;
    double log_f_white = 0.0;
    double log_f_red = 0.0;
};

// ---------------------------------------------------------------------------
// Built-in reinforcement providers
// ---------------------------------------------------------------------------

/// f_i = g_i(composition_i): the classical composition-driven urn.
struct FunctionUrnProvider {
    GrowthFamily g_white = GrowthFamily::power(1.0);
    GrowthFamily g_red = GrowthFamily::power(1.0);

    void validate() const {
        g_white.validate();
        g_red.validate();
    }

    UrnWeights next_weights(const UrnState& state) {
        UrnWeights w;
        w.log_f_white = g_white.log_eval(static_cast<double>(state.composition[0]));
        w.log_f_red = g_red.log_eval(static_cast<double>(state.composition[1]));
        if (g_white.kind == GrowthKind::Exp || g_red.kind == GrowthKind::Exp) {
            // exponential weights overflow quickly; shift by the larger log
            const double m = std::max(w.log_f_white, w.log_f_red);
            w.f_white = std::exp(w.log_f_white - m);
            w.f_red = std::exp(w.log_f_red - m);
        } else {
            w.f_white = g_white.eval(static_cast<double>(state.composition[0]));
            w.f_red = g_red.eval(static_cast<double>(state.composition[1]));
        }
        return w;
    }

    void advance(const UrnState&, BallColor, RngStream&) {}

    double weight_floor(const UrnState& start) const {
        return std::min(g_white.eval(static_cast<double>(start.composition[0])),
                        g_red.eval(static_cast<double>(start.composition[1])));
    }

    friend bool operator==(const FunctionUrnProvider&, const FunctionUrnProvider&) = default;
};

/// f_i = Psi(composition_i + g_i(Z)) for a finite-state modulator chain Z.
/// The g values are capped at theta(n+2) = theta_coeff * ln(n+2); cap hits
/// are counted, not fatal (the cap only needs to hold eventually).
struct PsiUrnProvider {
    GrowthFamily psi = GrowthFamily::power(2.0);
    std::vector<std::vector<double>> transition{{1.0}};  // row-stochastic
    int initial_chain_state = 0;
    std::vector<double> g_white{0.0};  // per chain state
    std::vector<double> g_red{0.0};
    double theta_coeff = 0.45;  // in (0, 1/2)

    // run state
    int chain_state = 0;
    std::int64_t theta_clamps = 0;

    void validate() const {
        psi.validate();
        if (psi.kind != GrowthKind::Exp && !(psi.alpha > 0.0))
            throw std::invalid_argument("psi urn: the weight function must be increasing");
        const std::size_t n = transition.size();
        if (n == 0) throw std::invalid_argument("psi urn: modulator chain needs >= 1 state");
        for (const auto& row : transition) {
            if (row.size() != n)
                throw std::invalid_argument("psi urn: transition matrix must be square");
            double sum = 0.0;
            for (double p : row) {
                if (p < 0.0) throw std::invalid_argument("psi urn: negative transition probability");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("psi urn: transition rows must sum to 1");
        }
        if (g_white.size() != n || g_red.size() != n)
            throw std::invalid_argument("psi urn: need one g value per chain state and color");
        for (double g : g_white)
            if (g < 0.0) throw std::invalid_argument("psi urn: g values must be >= 0");
        for (double g : g_red)
            if (g < 0.0) throw std::invalid_argument("psi urn: g values must be >= 0");
        if (initial_chain_state < 0 || initial_chain_state >= static_cast<int>(n))
            throw std::invalid_argument("psi urn: initial chain state out of range");
        if (!(theta_coeff > 0.0 && theta_coeff < 0.5))
            throw std::invalid_argument("psi urn: theta coefficient must lie in (0, 1/2)");
    }

    double theta_cap(std::int64_t step) const {
        return theta_coeff * std::log(static_cast<double>(step + 2));
    }

    UrnWeights next_weights(const UrnState& state) {
        const double cap = theta_cap(state.step);
        double gw = g_white[chain_state];
        double gr = g_red[chain_state];
        if (gw > cap || gr > cap) ++theta_clamps;
        gw = std::min(gw, cap);
        gr = std::min(gr, cap);

        UrnWeights w;
        w.log_f_white = psi.log_eval(static_cast<double>(state.composition[0]) + gw);
        w.log_f_red = psi.log_eval(static_cast<double>(state.composition[1]) + gr);
        if (psi.kind == GrowthKind::Exp) {
            const double m = std::max(w.log_f_white, w.log_f_red);
            w.f_white = std::exp(w.log_f_white - m);
            w.f_red = std::exp(w.log_f_red - m);
        } else {
            w.f_white = psi.eval(static_cast<double>(state.composition[0]) + gw);
            w.f_red = psi.eval(static_cast<double>(state.composition[1]) + gr);
        }
        return w;
    }

    void advance(const UrnState&, BallColor, RngStream& rng) {
        if (transition.size() <= 1) return;  // degenerate chain consumes no randomness
        const double u = rng.u01();
        double acc = 0.0;
        const auto& row = transition[chain_state];
        for (std::size_t z = 0; z < row.size(); ++z) {
            acc += row[z];
            if (u < acc) {
                chain_state = static_cast<int>(z);
                return;
            }
        }
        chain_state = static_cast<int>(row.size()) - 1;
    }

    double min_g(BallColor c) const {
        const auto& g = (c == BallColor::White) ? g_white : g_red;
        double m = g[0];
        for (double v : g) m = std::min(m, v);
        return m;
    }

    double weight_floor(const UrnState& start) const {
        return std::min(psi.eval(static_cast<double>(start.composition[0])),
                        psi.eval(static_cast<double>(start.composition[1])));
    }

    friend bool operator==(const PsiUrnProvider&, const PsiUrnProvider&) = default;
};

/// f_i = (composition_i + lambda * L_i)^alpha where L_i is the longest run of
/// consecutive color-i draws so far: reinforcement that rewards streaks.
struct LongestRunProvider {
    double alpha = 2.0;
    double run_bonus = 1.0;  // lambda

    // run state
    std::array<std::int64_t, 2> longest_run{0, 0};
    std::int64_t current_run = 0;
    int current_color = -1;

    void validate() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("longest-run urn: alpha must be > 0");
        if (run_bonus < 0.0) throw std::invalid_argument("longest-run urn: lambda must be >= 0");
    }

    UrnWeights next_weights(const UrnState& state) {
        UrnWeights w;
        const double bw = static_cast<double>(state.composition[0]) + run_bonus * longest_run[0];
        const double br = static_cast<double>(state.composition[1]) + run_bonus * longest_run[1];
        w.f_white = std::pow(bw, alpha);
        w.f_red = std::pow(br, alpha);
        w.log_f_white = alpha * std::log(bw);
        w.log_f_red = alpha * std::log(br);
        return w;
    }

    void advance(const UrnState&, BallColor drawn, RngStream&) {
        const int c = static_cast<int>(drawn);
        current_run = (c == current_color) ? current_run + 1 : 1;
        current_color = c;
        if (current_run > longest_run[c]) longest_run[c] = current_run;
    }

    double weight_floor(const UrnState& start) const {
        return std::pow(static_cast<double>(std::min(start.composition[0], start.composition[1])),
                        alpha);
    }

    friend bool operator==(const LongestRunProvider&, const LongestRunProvider&) = default;
};

using ReinforcementProvider =
    std::variant<FunctionUrnProvider, PsiUrnProvider, LongestRunProvider>;

inline void validate_provider(const ReinforcementProvider& p) {
    std::visit([](const auto& prov) { prov.validate(); }, p);
}

inline UrnWeights next_weights(ReinforcementProvider& p, const UrnState& state) {
    return std::visit([&](auto& prov) { return prov.next_weights(state); }, p);
}

inline void advance_provider(ReinforcementProvider& p, const UrnState& state, BallColor drawn,
                             RngStream& rng) {
    std::visit([&](auto& prov) { prov.advance(state, drawn, rng); }, p);
}

/// Declared positive floor under every reachable weight, given the start
/// composition (compositions never shrink and the families are increasing).
inline double provider_floor(const ReinforcementProvider& p, const UrnState& start) {
    return std::visit([&](const auto& prov) { return prov.weight_floor(start); }, p);
}

// ---------------------------------------------------------------------------
// Steps
// ---------------------------------------------------------------------------

inline void check_weights(const UrnWeights& w, double floor) {
    if (!(w.f_white > 0.0) || !(w.f_red > 0.0) || !std::isfinite(w.f_white) ||
        !std::isfinite(w.f_red))
        throw std::logic_error("urn provider produced a nonpositive or non-finite weight");
    // rescaled weight pairs keep their ratio, so compare the true logs
    if (floor > 0.0) {
        const double log_floor = std::log(floor) - 1e-9;
        if (w.log_f_white < log_floor || w.log_f_red < log_floor)
            throw std::logic_error("urn provider violated its declared weight floor");
    }
}

inline double pick_white_probability(const UrnWeights& w) {
    return w.f_white / (w.f_white + w.f_red);
}

inline BallColor apply_draw(UrnState& state, ReinforcementProvider& provider, BallColor drawn,
                            RngStream& rng) {
    state.composition[static_cast<int>(drawn)] += 1;
    state.step += 1;
    state.draw_log.push_back(static_cast<std::uint8_t>(drawn));
    advance_provider(provider, state, drawn, rng);
    return drawn;
}

/// Draw one ball: white with probability f_white / (f_white + f_red).
/// Consumes exactly one uniform, compared against the pick probability, so
/// providers that differ by a positive factor generate identical paths under
/// the same stream.
inline BallColor gup_step_with(UrnState& state, ReinforcementProvider& provider,
                               const UrnWeights& w, RngStream& rng) {
    const BallColor drawn =
        rng.u01() < pick_white_probability(w) ? BallColor::White : BallColor::Red;
    return apply_draw(state, provider, drawn, rng);
}

inline BallColor gup_step(UrnState& state, ReinforcementProvider& provider, RngStream& rng,
                          double floor = 0.0) {
    const UrnWeights w = next_weights(provider, state);
    check_weights(w, floor);
    return gup_step_with(state, provider, w, rng);
}

/// Same draw law realized as an exponential race: color i wins when its
/// clock E_i / f_i rings first. Used as a distributional cross-check of
/// gup_step.
inline BallColor race_step_with(UrnState& state, ReinforcementProvider& provider,
                                const UrnWeights& w, RngStream& rng) {
    const double clock_white = rng.exponential() / w.f_white;
    const double clock_red = rng.exponential() / w.f_red;
    const BallColor drawn = clock_white <= clock_red ? BallColor::White : BallColor::Red;
    return apply_draw(state, provider, drawn, rng);
}

inline BallColor race_step(UrnState& state, ReinforcementProvider& provider, RngStream& rng,
                           double floor = 0.0) {
    const UrnWeights w = next_weights(provider, state);
    check_weights(w, floor);
    return race_step_with(state, provider, w, rng);
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

struct UrnRun {
    std::array<std::int64_t, 2> start{1, 1};
    UrnState final_state;
    std::vector<double> log_f_white;  // weight pair offered at each step
    std::vector<double> log_f_red;
    std::array<std::vector<std::int64_t>, 2> pick_times;  // 1-based steps, per color
    std::int64_t theta_clamps = 0;

    std::int64_t horizon() const { return final_state.step; }

    /// Composition after n draws, reconstructed from the log.
    std::array<std::int64_t, 2> composition_at(std::int64_t n) const {
        std::array<std::int64_t, 2> c = start;
        for (std::int64_t t = 0; t < n; ++t) c[final_state.draw_log[t]] += 1;
        return c;
    }

    /// Sum of 1/f_i^2 over the picks of color i (underflows to 0 where the
    /// true weights exceed double range, which only sharpens the sum).
    double squared_weight_tail_sum(BallColor color) const {
        const auto& logs = (color == BallColor::White) ? log_f_white : log_f_red;
        double acc = 0.0;
        for (std::int64_t t : pick_times[static_cast<int>(color)])
            acc += std::exp(-2.0 * logs[t - 1]);
        return acc;
    }
};

inline UrnRun run_urn(ReinforcementProvider provider, const UrnState& start,
                      std::int64_t horizon, RngStream& rng, bool use_race = false) {
    if (horizon < 0) throw std::invalid_argument("run_urn: horizon must be >= 0");
    validate_provider(provider);
    const double floor = provider_floor(provider, start);

    UrnRun run;
    run.start = start.composition;
    run.log_f_white.reserve(horizon);
    run.log_f_red.reserve(horizon);

    UrnState state = start;
    state.draw_log.reserve(horizon);
    for (std::int64_t s = 0; s < horizon; ++s) {
        const UrnWeights w = next_weights(provider, state);
        check_weights(w, floor);
        run.log_f_white.push_back(w.log_f_white);
        run.log_f_red.push_back(w.log_f_red);
        const BallColor drawn = use_race ? race_step_with(state, provider, w, rng)
                                         : gup_step_with(state, provider, w, rng);
        run.pick_times[static_cast<int>(drawn)].push_back(s + 1);
    }

    if (auto* psi = std::get_if<PsiUrnProvider>(&provider)) run.theta_clamps = psi->theta_clamps;
    run.final_state = std::move(state);
    return run;
}

// ---------------------------------------------------------------------------
// Tail-sum diagnostics
// ---------------------------------------------------------------------------

/// Sum of reciprocals 1/values[t] for t >= from; empty range sums to zero.
inline double tail_sum(std::span<const double> values, std::size_t from = 0) {
    double acc = 0.0;
    for (std::size_t t = from; t < values.size(); ++t) {
        if (!(values[t] > 0.0))
            throw std::invalid_argument("tail_sum: entries must be strictly positive");
        acc += 1.0 / values[t];
    }
    return acc;
}

struct AssumptionIDiagnostic {
    Interval reciprocal_tail_white;  // certified enclosure of <B_white>
    Interval reciprocal_tail_red;
    bool holds = false;  // some enclosure finite
};

/// Certified tail sums of the essential-infimum weights per color. Supported
/// for the composition-driven and Psi-modulated providers, whose weight at
/// the k-th pick of color i is bounded below analytically; the longest-run
/// provider has path-dependent infima and is rejected.
inline AssumptionIDiagnostic assumption_I_diagnostic(const ReinforcementProvider& provider,
                                                     const UrnState& start) {
    AssumptionIDiagnostic out;
    if (const auto* f = std::get_if<FunctionUrnProvider>(&provider)) {
        out.reciprocal_tail_white = reciprocal_tail(f->g_white, 0.0, start.composition[0] + 1);
        out.reciprocal_tail_red = reciprocal_tail(f->g_red, 0.0, start.composition[1] + 1);
    } else if (const auto* p = std::get_if<PsiUrnProvider>(&provider)) {
        out.reciprocal_tail_white =
            reciprocal_tail(p->psi, p->min_g(BallColor::White), start.composition[0] + 1);
        out.reciprocal_tail_red =
            reciprocal_tail(p->psi, p->min_g(BallColor::Red), start.composition[1] + 1);
    } else {
        throw std::invalid_argument(
            "assumption_I_diagnostic: longest-run reinforcement has no analytic weight floor");
    }
    out.holds = out.reciprocal_tail_white.finite || out.reciprocal_tail_red.finite;
    return out;
}

}  // namespace polyurn
