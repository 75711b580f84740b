#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "polyurn/table.hpp"

namespace polyurn {

inline constexpr double kEulerE = 2.718281828459045235360287471352662498;

enum class KernelVariant { Zero, ExpDiscount, Recency };

/// Interaction process feeding each particle's edge weights: the bounded
/// term added to the traversal count before exponentiation.
///
/// Variants:
///  - Zero:        no interaction; values identically 0.
///  - ExpDiscount: trail deposits from the other particles, evaporating by a
///                 factor base^-beta per step. For K = 2 the two particles
///                 may deposit trails with different evaporation rates.
///  - Recency:     each value counts the other particles whose last traversal
///                 of the edge is at least as recent as one's own. Ties count,
///                 including the never-traversed case, so a fresh state sits
///                 at K-1 everywhere.
struct KernelSpec {
    KernelVariant variant = KernelVariant::Zero;
    double beta = 1.0;
    std::optional<std::array<double, 2>> per_particle_betas;
    double base = kEulerE;

    static KernelSpec zero() { return {}; }

    static KernelSpec exp_discount(double beta, double base = kEulerE) {
        KernelSpec s;
        s.variant = KernelVariant::ExpDiscount;
        s.beta = beta;
        s.base = base;
        return s;
    }

    static KernelSpec exp_discount_asymmetric(double beta1, double beta2,
                                              double base = kEulerE) {
        KernelSpec s;
        s.variant = KernelVariant::ExpDiscount;
        s.beta = beta1;
        s.per_particle_betas = {beta1, beta2};
        s.base = base;
        return s;
    }

    static KernelSpec recency() {
        KernelSpec s;
        s.variant = KernelVariant::Recency;
        return s;
    }

    /// Per-step multiplier applied to row `particle`. Deposits seen by
    /// particle l evaporate at the rate of the particle that left them, so
    /// with asymmetric rates row l discounts by the other particle's beta.
    double row_discount(int particle) const {
        if (per_particle_betas) {
            double other_beta = (*per_particle_betas)[particle == 0 ? 1 : 0];
            return std::pow(base, -other_beta);
        }
        return std::pow(base, -beta);
    }

    void validate(int particle_count) const {
        if (variant == KernelVariant::ExpDiscount) {
            if (base <= 1.0) throw std::invalid_argument("kernel: discount base must be > 1");
            if (per_particle_betas) {
                if (particle_count != 2)
                    throw std::invalid_argument(
                        "kernel: per-particle discount rates are only defined for 2 particles");
                for (double b : *per_particle_betas)
                    if (!(b > 0.0)) throw std::invalid_argument("kernel: beta must be > 0");
            } else if (!(beta > 0.0)) {
                throw std::invalid_argument("kernel: beta must be > 0");
            }
        }
    }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Uniform bound R on every reachable kernel value.
///
/// For ExpDiscount each step adds at most K-1 deposits to an entry, so the
/// geometric supremum (K-1)/(1 - discount) is tight; Recency counts at most
/// K-1 other particles.
inline double kernel_bound(const KernelSpec& spec, int particle_count) {
    switch (spec.variant) {
        case KernelVariant::Zero:
            return 0.0;
        case KernelVariant::Recency:
            return static_cast<double>(particle_count - 1);
        case KernelVariant::ExpDiscount: {
            double bound = 0.0;
            for (int l = 0; l < particle_count; ++l) {
                double q = spec.row_discount(l);
                bound = std::max(bound, (particle_count - 1) / (1.0 - q));
            }
            return bound;
        }
    }
    return 0.0;
}

struct KernelState {
    Table<double> values;                 // one row per particle, one column per edge
    Table<std::int64_t> last_traversal;   // recency marks, 0 = never traversed

    static KernelState initial(const KernelSpec& spec, int particle_count, int vertex_count) {
        KernelState st;
        st.values = Table<double>(particle_count, vertex_count, 0.0);
        if (spec.variant == KernelVariant::Recency) {
            st.last_traversal = Table<std::int64_t>(particle_count, vertex_count, 0);
            // everyone ties at "never", so each entry starts at K-1
            st.values.fill(static_cast<double>(particle_count - 1));
        }
        return st;
    }

    friend bool operator==(const KernelState&, const KernelState&) = default;
};

/// Advance the kernel with the realized traversals of one step: exactly one
/// edge per particle, `step_now` being the time of those traversals.
inline void kernel_update(const KernelSpec& spec, KernelState& state,
                          std::span<const int> traversed_edges, std::int64_t step_now) {
    const int particles = state.values.rows();
    const int edges = state.values.cols();
    if (static_cast<int>(traversed_edges.size()) != particles)
        throw std::invalid_argument("kernel_update: expected one traversed edge per particle, got " +
                                    std::to_string(traversed_edges.size()));

    switch (spec.variant) {
        case KernelVariant::Zero:
            return;
        case KernelVariant::ExpDiscount: {
            for (int l = 0; l < particles; ++l) {
                const double q = spec.row_discount(l);
                for (int j = 0; j < edges; ++j) state.values(l, j) *= q;
            }
            for (int k = 0; k < particles; ++k) {
                const int j = traversed_edges[k];
                for (int l = 0; l < particles; ++l)
                    if (l != k) state.values(l, j) += 1.0;
            }
            return;
        }
        case KernelVariant::Recency: {
            for (int k = 0; k < particles; ++k)
                state.last_traversal(k, traversed_edges[k]) = step_now;
            // only columns touched this step can change
            for (int k = 0; k < particles; ++k) {
                const int j = traversed_edges[k];
                bool seen_before = false;
                for (int p = 0; p < k; ++p) seen_before |= (traversed_edges[p] == j);
                if (seen_before) continue;
                for (int l = 0; l < particles; ++l) {
                    int count = 0;
                    for (int u = 0; u < particles; ++u)
                        if (u != l && state.last_traversal(u, j) >= state.last_traversal(l, j))
                            ++count;
                    state.values(l, j) = static_cast<double>(count);
                }
            }
            return;
        }
    }
}

}  // namespace polyurn
