#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "polyurn/polygon.hpp"
#include "polyurn/urn.hpp"
#include "polyurn/walker.hpp"

namespace polyurn {

struct ParticleLocalization {
    bool localized = false;
    int edge = -1;              // connecting edge when localized
    std::int64_t onset = -1;    // earliest step after which the pair holds through the horizon
    std::int64_t window = 0;
};

/// A particle counts as localized when its last `window` positions occupy
/// exactly one pair of adjacent vertices {j, j+1}; the walk moves every step,
/// so any window of length >= 2 inside the pair visits both endpoints.
inline ParticleLocalization detect_localization(std::span<const int> positions,
                                                const PolygonGraph& g, std::int64_t window) {
    const std::int64_t n = static_cast<std::int64_t>(positions.size());
    if (window < 2) throw std::invalid_argument("detect_localization: window must be >= 2");
    if (window > n) throw std::invalid_argument("detect_localization: window exceeds trajectory");

    ParticleLocalization out;
    out.window = window;

    const int last = positions[n - 1];
    const int before = positions[n - 2];
    if (!g.adjacent(before, last)) return out;  // cannot happen for a ring walk
    const int lo = (g.next(before) == last) ? before : last;  // pair is {lo, lo+1}
    const int hi = g.next(lo);

    for (std::int64_t t = n - window; t < n; ++t) {
        const int p = positions[t];
        if (p != lo && p != hi) return out;
    }

    out.localized = true;
    out.edge = lo;

    std::int64_t onset = n - window;
    while (onset > 0 && (positions[onset - 1] == lo || positions[onset - 1] == hi)) --onset;
    out.onset = onset;
    return out;
}

struct LocalizationReport {
    std::vector<ParticleLocalization> particles;
    std::int64_t window = 0;

    bool all_localized() const {
        for (const auto& p : particles)
            if (!p.localized) return false;
        return true;
    }
};

inline LocalizationReport detect_localization(const Trajectory& trajectory, std::int64_t window) {
    const PolygonGraph g(trajectory.last_visit.cols());
    LocalizationReport report;
    report.window = window;
    const int particles = trajectory.positions.rows();
    const int path_len = trajectory.positions.cols();
    for (int l = 0; l < particles; ++l) {
        std::span<const int> path(&trajectory.positions(l, 0), static_cast<std::size_t>(path_len));
        report.particles.push_back(detect_localization(path, g, window));
    }
    return report;
}

/// The color drawn in every one of the last `window` draws, if any.
inline std::optional<BallColor> detect_monochromatic_tail(std::span<const std::uint8_t> draw_log,
                                                          std::int64_t window) {
    const std::int64_t n = static_cast<std::int64_t>(draw_log.size());
    if (window < 1) throw std::invalid_argument("detect_monochromatic_tail: window must be >= 1");
    if (window > n)
        throw std::invalid_argument("detect_monochromatic_tail: window exceeds draw log");
    const std::uint8_t color = draw_log[n - 1];
    for (std::int64_t t = n - window; t < n; ++t)
        if (draw_log[t] != color) return std::nullopt;
    return static_cast<BallColor>(color);
}

/// First index (0-based) of the maximal monochromatic suffix; equals the log
/// length when the log is empty.
inline std::int64_t monochromatic_onset(std::span<const std::uint8_t> draw_log) {
    std::int64_t onset = static_cast<std::int64_t>(draw_log.size());
    if (onset == 0) return onset;
    const std::uint8_t color = draw_log[onset - 1];
    while (onset > 0 && draw_log[onset - 1] == color) --onset;
    return onset;
}

/// Gap threshold (1/2) * floor(ln n) + 1 for the infinitely-often crossing
/// diagnostic.
inline double log_gap_threshold(std::int64_t n) {
    return 0.5 * std::floor(std::log(static_cast<double>(n))) + 1.0;
}

/// All times n at which |composition gap| reaches the log threshold. For a
/// balanced urn the count grows with the horizon; a runaway color qualifies
/// at every large n.
inline std::vector<std::int64_t> log_gap_crossings(const UrnRun& run) {
    std::vector<std::int64_t> crossings;
    std::array<std::int64_t, 2> c = run.start;
    const auto& log = run.final_state.draw_log;
    for (std::int64_t n = 1; n <= static_cast<std::int64_t>(log.size()); ++n) {
        c[log[n - 1]] += 1;
        const double gap = static_cast<double>(std::llabs(c[0] - c[1]));
        if (gap >= log_gap_threshold(n)) crossings.push_back(n);
    }
    return crossings;
}

}  // namespace polyurn
