#pragma once

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "polyurn/detect.hpp"
#include "polyurn/psi_checks.hpp"
#include "polyurn/rng.hpp"
#include "polyurn/ruin.hpp"
#include "polyurn/stats.hpp"
#include "polyurn/urn.hpp"
#include "polyurn/walker.hpp"

namespace polyurn {

enum class ExperimentKind { Walk, Urn, Verify };
enum class OutputFormat { Csv, Json };

struct UrnExperimentConfig {
    ReinforcementProvider provider = FunctionUrnProvider{};
    std::array<std::int64_t, 2> start{1, 1};

    friend bool operator==(const UrnExperimentConfig& a, const UrnExperimentConfig& b) {
        return a.start == b.start && a.provider == b.provider;
    }
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Verify;
    std::optional<WalkConfig> walk;
    std::optional<UrnExperimentConfig> urn;
    std::int64_t replicas = 1;
    std::int64_t horizon = 0;
    std::vector<std::int64_t> windows;
    std::uint64_t base_seed = 0;
    std::string output_path;  // empty = stdout
    OutputFormat format = OutputFormat::Csv;

    void validate() const {
        if (replicas < 1) throw std::invalid_argument("config: replicas must be >= 1");
        if (horizon < 0) throw std::invalid_argument("config: horizon must be >= 0");
        for (std::int64_t w : windows) {
            if (w > horizon)
                throw std::invalid_argument("config: window " + std::to_string(w) +
                                            " exceeds horizon " + std::to_string(horizon));
            if (w < (kind == ExperimentKind::Walk ? 2 : 1))
                throw std::invalid_argument("config: window " + std::to_string(w) + " too small");
        }
        if (kind == ExperimentKind::Walk) {
            if (!walk) throw std::invalid_argument("config: kind=walk requires a walk section");
            walk->validate();
            if (windows.empty()) throw std::invalid_argument("config: walk needs >= 1 window");
        } else if (kind == ExperimentKind::Urn) {
            if (!urn) throw std::invalid_argument("config: kind=urn requires an urn section");
            validate_provider(urn->provider);
            if (urn->start[0] < 1 || urn->start[1] < 1)
                throw std::invalid_argument("config: urn start composition must be >= 1 per color");
            if (windows.empty()) throw std::invalid_argument("config: urn needs >= 1 window");
        }
    }

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// ---------------------------------------------------------------------------
// Per-replica summaries
// ---------------------------------------------------------------------------

struct WalkReplicaSummary {
    std::int64_t replica = 0;
    std::vector<LocalizationReport> per_window;
    double max_kernel_value = 0.0;
    std::int64_t kernel_bound_violations = 0;
};

struct UrnReplicaSummary {
    std::int64_t replica = 0;
    std::vector<std::optional<BallColor>> tail_per_window;
    std::int64_t tail_onset = 0;  // start of the maximal monochromatic suffix
    std::array<std::int64_t, 2> last_pick{0, 0};
    std::array<double, 2> squared_weight_tail{0.0, 0.0};
    std::int64_t crossings = 0;
    std::int64_t theta_clamps = 0;
};

struct WindowAggregate {
    std::int64_t window = 0;
    int particle = -1;  // -1 = all particles (walk) or the urn itself
    std::int64_t successes = 0;
    std::int64_t replicas = 0;
    BinomialInterval ci;
    double mean_onset = 0.0;  // over successful replicas
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<WalkReplicaSummary> walk_replicas;
    std::vector<UrnReplicaSummary> urn_replicas;
    std::vector<WindowAggregate> aggregates;
    double kernel_bound = 0.0;
    double max_kernel_value = 0.0;
    std::int64_t kernel_bound_violations = 0;
};

namespace detail {

inline std::string format_double(double v) {
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

/// Run fn(replica_index) for every replica on `workers` threads. Results must
/// be written into preallocated slots so the output order never depends on
/// scheduling.
inline void parallel_replicas(std::int64_t replicas, int workers,
                              const std::function<void(std::int64_t)>& fn) {
    if (workers <= 1 || replicas <= 1) {
        for (std::int64_t r = 0; r < replicas; ++r) fn(r);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    const int n = static_cast<int>(std::min<std::int64_t>(workers, replicas));
    pool.reserve(n);
    for (int t = 0; t < n; ++t) {
        pool.emplace_back([&] {
            for (std::int64_t r = next.fetch_add(1); r < replicas; r = next.fetch_add(1)) fn(r);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

inline WalkReplicaSummary run_walk_replica(const WalkConfig& cfg, std::int64_t horizon,
                                           const std::vector<std::int64_t>& windows,
                                           RngStream rng) {
    WalkReplicaSummary out;
    out.replica = static_cast<std::int64_t>(rng.stream_id());
    const Trajectory traj = simulate_walk(cfg, horizon, rng);
    for (std::int64_t w : windows) out.per_window.push_back(detect_localization(traj, w));
    out.max_kernel_value = traj.max_kernel_value;
    out.kernel_bound_violations = traj.kernel_bound_violations;
    return out;
}

inline UrnReplicaSummary run_urn_replica(const UrnExperimentConfig& cfg, std::int64_t horizon,
                                         const std::vector<std::int64_t>& windows, RngStream rng) {
    UrnReplicaSummary out;
    out.replica = static_cast<std::int64_t>(rng.stream_id());
    const UrnRun run =
        run_urn(cfg.provider, UrnState::start(cfg.start[0], cfg.start[1]), horizon, rng);
    const auto& log = run.final_state.draw_log;
    for (std::int64_t w : windows) out.tail_per_window.push_back(detect_monochromatic_tail(log, w));
    out.tail_onset = monochromatic_onset(log);
    for (int c = 0; c < 2; ++c) {
        out.last_pick[c] = run.pick_times[c].empty() ? 0 : run.pick_times[c].back();
        out.squared_weight_tail[c] = run.squared_weight_tail_sum(static_cast<BallColor>(c));
    }
    out.crossings = static_cast<std::int64_t>(log_gap_crossings(run).size());
    out.theta_clamps = run.theta_clamps;
    return out;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config, int workers = 1) {
    config.validate();
    if (config.kind == ExperimentKind::Verify)
        throw std::invalid_argument("run_experiment: verify has no replicas; use run_verify_battery");

    ExperimentResult result;
    result.config = config;

    if (config.kind == ExperimentKind::Walk) {
        const WalkConfig& wc = *config.walk;
        result.kernel_bound = kernel_bound(wc.kernel, wc.particles);
        result.walk_replicas.resize(config.replicas);
        detail::parallel_replicas(config.replicas, workers, [&](std::int64_t r) {
            result.walk_replicas[r] = run_walk_replica(wc, config.horizon, config.windows,
                                                       RngStream(config.base_seed, r));
        });
        for (const auto& rep : result.walk_replicas) {
            result.max_kernel_value = std::max(result.max_kernel_value, rep.max_kernel_value);
            result.kernel_bound_violations += rep.kernel_bound_violations;
        }
        // aggregates: per window x (each particle, then all particles)
        for (std::size_t wi = 0; wi < config.windows.size(); ++wi) {
            for (int p = 0; p <= wc.particles; ++p) {
                const bool all = (p == wc.particles);
                WindowAggregate agg;
                agg.window = config.windows[wi];
                agg.particle = all ? -1 : p;
                agg.replicas = config.replicas;
                double onset_sum = 0.0;
                for (const auto& rep : result.walk_replicas) {
                    const LocalizationReport& report = rep.per_window[wi];
                    const bool ok =
                        all ? report.all_localized() : report.particles[p].localized;
                    if (ok) {
                        ++agg.successes;
                        if (!all) onset_sum += static_cast<double>(report.particles[p].onset);
                    }
                }
                agg.ci = wilson_interval(agg.successes, agg.replicas);
                agg.mean_onset = (!all && agg.successes > 0)
                                     ? onset_sum / static_cast<double>(agg.successes)
                                     : 0.0;
                result.aggregates.push_back(agg);
            }
        }
    } else {
        const UrnExperimentConfig& uc = *config.urn;
        result.urn_replicas.resize(config.replicas);
        detail::parallel_replicas(config.replicas, workers, [&](std::int64_t r) {
            result.urn_replicas[r] = run_urn_replica(uc, config.horizon, config.windows,
                                                     RngStream(config.base_seed, r));
        });
        for (std::size_t wi = 0; wi < config.windows.size(); ++wi) {
            WindowAggregate agg;
            agg.window = config.windows[wi];
            agg.replicas = config.replicas;
            double onset_sum = 0.0;
            for (const auto& rep : result.urn_replicas) {
                if (rep.tail_per_window[wi]) {
                    ++agg.successes;
                    onset_sum += static_cast<double>(rep.tail_onset);
                }
            }
            agg.ci = wilson_interval(agg.successes, agg.replicas);
            agg.mean_onset =
                agg.successes > 0 ? onset_sum / static_cast<double>(agg.successes) : 0.0;
            result.aggregates.push_back(agg);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Attraction estimates across horizons (common random numbers: each replica
// is simulated once to the largest horizon and read off at the checkpoints)
// ---------------------------------------------------------------------------

struct AttractionCell {
    std::int64_t horizon = 0;
    std::int64_t window = 0;
    int particle = -1;  // -1 = all particles / the urn
    BinomialInterval ci;
};

struct AttractionEstimate {
    std::vector<AttractionCell> cells;

    const AttractionCell& at(std::int64_t horizon, std::int64_t window, int particle = -1) const {
        for (const auto& c : cells)
            if (c.horizon == horizon && c.window == window && c.particle == particle) return c;
        throw std::out_of_range("attraction estimate: no such cell");
    }
};

inline AttractionEstimate estimate_attraction(const ExperimentConfig& config,
                                              const std::vector<std::int64_t>& horizons,
                                              int workers = 1) {
    config.validate();
    if (horizons.empty()) throw std::invalid_argument("estimate_attraction: need >= 1 horizon");
    std::int64_t max_h = 0;
    for (std::int64_t h : horizons) max_h = std::max(max_h, h);

    AttractionEstimate out;
    if (config.kind == ExperimentKind::Walk) {
        const WalkConfig& wc = *config.walk;
        // per-replica detection outcomes, aggregated after the joins so that
        // worker count never touches the result
        const std::size_t cells = horizons.size() * config.windows.size();
        std::vector<std::vector<bool>> ok(config.replicas,
                                          std::vector<bool>(cells * (wc.particles + 1), false));
        detail::parallel_replicas(config.replicas, workers, [&](std::int64_t r) {
            RngStream rng(config.base_seed, r);
            const Trajectory traj = simulate_walk(wc, max_h, rng);
            const PolygonGraph g(wc.vertices);
            for (std::size_t hi = 0; hi < horizons.size(); ++hi)
                for (std::size_t wi = 0; wi < config.windows.size(); ++wi) {
                    if (config.windows[wi] > horizons[hi]) continue;
                    const std::size_t cell = hi * config.windows.size() + wi;
                    bool all_ok = true;
                    for (int p = 0; p < wc.particles; ++p) {
                        std::span<const int> path(&traj.positions(p, 0),
                                                  static_cast<std::size_t>(horizons[hi]) + 1);
                        const auto loc = detect_localization(path, g, config.windows[wi]);
                        ok[r][cell * (wc.particles + 1) + p] = loc.localized;
                        all_ok = all_ok && loc.localized;
                    }
                    ok[r][cell * (wc.particles + 1) + wc.particles] = all_ok;
                }
        });
        for (std::size_t hi = 0; hi < horizons.size(); ++hi)
            for (std::size_t wi = 0; wi < config.windows.size(); ++wi) {
                if (config.windows[wi] > horizons[hi]) continue;
                const std::size_t cell = hi * config.windows.size() + wi;
                for (int p = 0; p <= wc.particles; ++p) {
                    std::int64_t hits = 0;
                    for (std::int64_t r = 0; r < config.replicas; ++r)
                        hits += ok[r][cell * (wc.particles + 1) + p] ? 1 : 0;
                    AttractionCell c;
                    c.horizon = horizons[hi];
                    c.window = config.windows[wi];
                    c.particle = (p == wc.particles) ? -1 : p;
                    c.ci = wilson_interval(hits, config.replicas);
                    out.cells.push_back(c);
                }
            }
    } else if (config.kind == ExperimentKind::Urn) {
        const UrnExperimentConfig& uc = *config.urn;
        const std::size_t cells = horizons.size() * config.windows.size();
        std::vector<std::vector<bool>> ok(config.replicas, std::vector<bool>(cells, false));
        detail::parallel_replicas(config.replicas, workers, [&](std::int64_t r) {
            RngStream rng(config.base_seed, r);
            const UrnRun run =
                run_urn(uc.provider, UrnState::start(uc.start[0], uc.start[1]), max_h, rng);
            const auto& log = run.final_state.draw_log;
            for (std::size_t hi = 0; hi < horizons.size(); ++hi)
                for (std::size_t wi = 0; wi < config.windows.size(); ++wi) {
                    if (config.windows[wi] > horizons[hi]) continue;
                    std::span<const std::uint8_t> prefix(log.data(),
                                                         static_cast<std::size_t>(horizons[hi]));
                    ok[r][hi * config.windows.size() + wi] =
                        detect_monochromatic_tail(prefix, config.windows[wi]).has_value();
                }
        });
        for (std::size_t hi = 0; hi < horizons.size(); ++hi)
            for (std::size_t wi = 0; wi < config.windows.size(); ++wi) {
                if (config.windows[wi] > horizons[hi]) continue;
                std::int64_t hits = 0;
                for (std::int64_t r = 0; r < config.replicas; ++r)
                    hits += ok[r][hi * config.windows.size() + wi] ? 1 : 0;
                AttractionCell c;
                c.horizon = horizons[hi];
                c.window = config.windows[wi];
                c.ci = wilson_interval(hits, config.replicas);
                out.cells.push_back(c);
            }
    } else {
        throw std::invalid_argument("estimate_attraction: config must be a walk or urn experiment");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Writers (byte-stable: fixed column sets, shortest round-trip doubles)
// ---------------------------------------------------------------------------

inline constexpr const char* kWalkCsvHeader =
    "replica,window,particle,localized,edge,onset,max_kernel_value";
inline constexpr const char* kUrnCsvHeader =
    "replica,window,tail_color,tail_onset,last_pick_white,last_pick_red,"
    "tail_sum_sq_white,tail_sum_sq_red,log_gap_crossings,theta_clamps";

inline const char* color_name(std::optional<BallColor> c) {
    if (!c) return "none";
    return *c == BallColor::White ? "white" : "red";
}

inline void write_result_csv(const ExperimentResult& result, std::ostream& os) {
    using detail::format_double;
    const ExperimentConfig& cfg = result.config;
    if (cfg.kind == ExperimentKind::Walk) {
        os << kWalkCsvHeader << "\n";
        for (const auto& rep : result.walk_replicas)
            for (std::size_t wi = 0; wi < cfg.windows.size(); ++wi)
                for (std::size_t p = 0; p < rep.per_window[wi].particles.size(); ++p) {
                    const auto& loc = rep.per_window[wi].particles[p];
                    os << rep.replica << ',' << cfg.windows[wi] << ',' << p << ','
                       << (loc.localized ? 1 : 0) << ',' << loc.edge << ',' << loc.onset << ','
                       << format_double(rep.max_kernel_value) << "\n";
                }
    } else {
        os << kUrnCsvHeader << "\n";
        for (const auto& rep : result.urn_replicas)
            for (std::size_t wi = 0; wi < cfg.windows.size(); ++wi) {
                os << rep.replica << ',' << cfg.windows[wi] << ','
                   << color_name(rep.tail_per_window[wi]) << ',' << rep.tail_onset << ','
                   << rep.last_pick[0] << ',' << rep.last_pick[1] << ','
                   << format_double(rep.squared_weight_tail[0]) << ','
                   << format_double(rep.squared_weight_tail[1]) << ',' << rep.crossings << ','
                   << rep.theta_clamps << "\n";
            }
    }
    for (const auto& agg : result.aggregates) {
        os << "# aggregate window=" << agg.window << " particle="
           << (agg.particle < 0 ? std::string("all") : std::to_string(agg.particle))
           << " fraction=" << format_double(agg.ci.fraction)
           << " ci_lo=" << format_double(agg.ci.lo) << " ci_hi=" << format_double(agg.ci.hi)
           << " mean_onset=" << format_double(agg.mean_onset) << "\n";
    }
    if (cfg.kind == ExperimentKind::Walk) {
        os << "# kernel bound=" << format_double(result.kernel_bound)
           << " max_value=" << format_double(result.max_kernel_value)
           << " violations=" << result.kernel_bound_violations << "\n";
    }
}

}  // namespace polyurn
