#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyurn/kernels.hpp"
#include "polyurn/polygon.hpp"
#include "polyurn/table.hpp"

namespace polyurn {

/// Full Markov state of the K-particle system: positions, per-particle edge
/// traversal counts (exact integers, so this part of the state is
/// drift-free), and the kernel values/marks.
struct SystemState {
    std::vector<int> positions;
    Table<std::int64_t> traversals;
    KernelState kernel;
    std::int64_t step = 0;

    int particle_count() const { return static_cast<int>(positions.size()); }
    int vertex_count() const { return traversals.cols(); }

    friend bool operator==(const SystemState&, const SystemState&) = default;
};

struct WalkConfig {
    int vertices = 3;
    int particles = 1;
    double alpha = 2.0;
    std::vector<int> initial_positions;          // defaults to all zeros
    std::optional<Table<std::int64_t>> initial_weights;  // defaults to all ones
    KernelSpec kernel;

    void validate() const {
        if (vertices < 3)
            throw std::invalid_argument("walk: vertices must be >= 3, got " +
                                        std::to_string(vertices));
        if (particles < 1)
            throw std::invalid_argument("walk: particles must be >= 1, got " +
                                        std::to_string(particles));
        if (!(alpha > 0.0))
            throw std::invalid_argument("walk: alpha must be > 0");
        if (!initial_positions.empty() &&
            static_cast<int>(initial_positions.size()) != particles)
            throw std::invalid_argument("walk: initial_positions must list one vertex per particle");
        for (int p : initial_positions)
            if (p < 0 || p >= vertices)
                throw std::invalid_argument("walk: initial position " + std::to_string(p) +
                                            " outside 0.." + std::to_string(vertices - 1));
        if (initial_weights) {
            if (initial_weights->rows() != particles || initial_weights->cols() != vertices)
                throw std::invalid_argument("walk: initial_weights must be particles x vertices");
            for (std::int64_t w : *initial_weights)
                if (w < 1) throw std::invalid_argument("walk: initial weights must be >= 1");
        }
        kernel.validate(particles);
    }

    std::vector<int> positions_or_default() const {
        if (!initial_positions.empty()) return initial_positions;
        return std::vector<int>(particles, 0);
    }

    Table<std::int64_t> weights_or_default() const {
        if (initial_weights) return *initial_weights;
        return Table<std::int64_t>(particles, vertices, 1);
    }

    friend bool operator==(const WalkConfig&, const WalkConfig&) = default;
};

inline SystemState initial_state(const WalkConfig& config) {
    config.validate();
    SystemState st;
    st.positions = config.positions_or_default();
    st.traversals = config.weights_or_default();
    st.kernel = KernelState::initial(config.kernel, config.particles, config.vertices);
    st.step = 0;
    return st;
}

}  // namespace polyurn
