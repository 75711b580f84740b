#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "polyurn/kernels.hpp"
#include "polyurn/polygon.hpp"
#include "polyurn/rng.hpp"
#include "polyurn/state.hpp"
#include "polyurn/table.hpp"

namespace polyurn {

struct EdgeWeights {
    double toward_next;  // weight of edge j, toward vertex j+1
    double toward_prev;  // weight of edge j-1, toward vertex j-1
};

/// Base value (traversals + kernel) of edge j as seen by particle l.
inline double weight_base(const SystemState& state, int particle, int edge) {
    return static_cast<double>(state.traversals(particle, edge)) +
           state.kernel.values(particle, edge);
}

/// The two reinforcement weights (base^alpha) at the particle's current
/// vertex j: edge j going clockwise, edge j-1 going counterclockwise. Bases
/// are >= 1, so both weights are strictly positive.
inline EdgeWeights reinforcement_weights(const SystemState& state, double alpha, int particle) {
    const PolygonGraph g(state.vertex_count());
    const int j = state.positions[particle];
    const double base_next = weight_base(state, particle, j);
    const double base_prev = weight_base(state, particle, g.prev(j));
    return {std::pow(base_next, alpha), std::pow(base_prev, alpha)};
}

/// P(step to j+1) = base_next^alpha / (base_next^alpha + base_prev^alpha),
/// evaluated with the larger base factored out so the ratio never overflows
/// for extreme alpha.
inline double probability_from_bases(double base_next, double base_prev, double alpha) {
    if (base_next >= base_prev) {
        const double t = std::pow(base_prev / base_next, alpha);
        return 1.0 / (1.0 + t);
    }
    const double t = std::pow(base_next / base_prev, alpha);
    return t / (1.0 + t);
}

inline double probability_from_weights(double weight_next, double weight_prev) {
    return weight_next / (weight_next + weight_prev);
}

/// Probability that the particle's next step is clockwise (to j+1).
inline double clockwise_probability(const SystemState& state, double alpha, int particle) {
    const PolygonGraph g(state.vertex_count());
    const int j = state.positions[particle];
    return probability_from_bases(weight_base(state, particle, j),
                                  weight_base(state, particle, g.prev(j)), alpha);
}

/// One step of the whole system. All transition probabilities are computed
/// from the state at time s before any particle moves (the draws are
/// conditionally independent given that state); then positions move, one
/// traversal count per particle increments, and the kernel consumes the
/// realized traversal events.
///
/// Returns the per-particle traversed edges.
inline std::vector<int> step_system(SystemState& state, double alpha, const KernelSpec& spec,
                                    RngStream& rng) {
    const PolygonGraph g(state.vertex_count());
    const int particles = state.particle_count();

    std::vector<double> p_clockwise(particles);
    for (int l = 0; l < particles; ++l) p_clockwise[l] = clockwise_probability(state, alpha, l);

    std::vector<int> traversed(particles);
    for (int l = 0; l < particles; ++l) {
        const int j = state.positions[l];
        if (rng.u01() < p_clockwise[l]) {
            traversed[l] = j;  // edge j leads to j+1
            state.positions[l] = g.next(j);
        } else {
            traversed[l] = g.prev(j);  // edge j-1 leads to j-1
            state.positions[l] = g.prev(j);
        }
        state.traversals(l, traversed[l]) += 1;
    }

    state.step += 1;
    kernel_update(spec, state.kernel, traversed, state.step);
    return traversed;
}

struct Trajectory {
    Table<int> positions;         // particles x (horizon+1), includes the start
    Table<int> traversed_edges;   // particles x horizon
    Table<std::int64_t> last_visit;  // particles x vertices, -1 = never visited
    SystemState final_state;
    std::int64_t horizon = 0;
    double max_kernel_value = 0.0;
    double kernel_bound_used = 0.0;
    std::int64_t kernel_bound_violations = 0;
};

/// Run the system for `horizon` steps. Deterministic given (config, horizon,
/// rng stream). Tracks the largest kernel value seen and counts violations of
/// the declared kernel bound (checked with a 1e-12 relative cushion for
/// floating-point rounding).
inline Trajectory simulate_walk(const WalkConfig& config, std::int64_t horizon, RngStream& rng) {
    if (horizon < 0) throw std::invalid_argument("simulate_walk: horizon must be >= 0");
    SystemState state = initial_state(config);
    const int particles = state.particle_count();
    const int vertices = state.vertex_count();

    Trajectory out;
    out.horizon = horizon;
    out.positions = Table<int>(particles, static_cast<int>(horizon) + 1);
    out.traversed_edges = Table<int>(particles, static_cast<int>(horizon));
    out.last_visit = Table<std::int64_t>(particles, vertices, -1);
    out.kernel_bound_used = kernel_bound(config.kernel, particles);
    const double bound_cushion = out.kernel_bound_used * (1.0 + 1e-12);

    for (int l = 0; l < particles; ++l) {
        out.positions(l, 0) = state.positions[l];
        out.last_visit(l, state.positions[l]) = 0;
    }

    for (std::int64_t s = 1; s <= horizon; ++s) {
        const std::vector<int> traversed = step_system(state, config.alpha, config.kernel, rng);
        for (int l = 0; l < particles; ++l) {
            out.positions(l, static_cast<int>(s)) = state.positions[l];
            out.traversed_edges(l, static_cast<int>(s) - 1) = traversed[l];
            out.last_visit(l, state.positions[l]) = s;
        }
        for (double xi : state.kernel.values) {
            if (xi > out.max_kernel_value) out.max_kernel_value = xi;
            if (xi > bound_cushion) ++out.kernel_bound_violations;
        }
    }

    out.final_state = std::move(state);
    return out;
}

}  // namespace polyurn
