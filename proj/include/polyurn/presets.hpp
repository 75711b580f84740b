#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyurn/experiment.hpp"

namespace polyurn {

struct Preset {
    std::string name;
    std::string summary;
    ExperimentConfig config;
};

/// Ready-made experiments covering the built-in dynamics: the two-particle
/// triangle with evaporating trails, a larger ring with the recency kernel,
/// the classical linear urn (balanced forever) against the square urn
/// (monopoly), the modulated-weight urn, and the streak-rewarding urn.
inline const std::vector<Preset>& preset_catalog() {
    static const std::vector<Preset> catalog = [] {
        std::vector<Preset> presets;

        {
            ExperimentConfig c;
            c.kind = ExperimentKind::Walk;
            WalkConfig w;
            w.vertices = 3;
            w.particles = 2;
            w.alpha = 2.0;
            w.initial_positions = {0, 0};
            w.kernel = KernelSpec::exp_discount(1.0);
            c.walk = w;
            c.replicas = 500;
            c.horizon = 10'000;
            c.windows = {1'000};
            c.base_seed = 7101;
            presets.push_back({"triangle-two-particles",
                               "two square-reinforced walkers on a triangle, evaporating trails",
                               c});
        }
        {
            ExperimentConfig c;
            c.kind = ExperimentKind::Walk;
            WalkConfig w;
            w.vertices = 6;
            w.particles = 3;
            w.alpha = 2.0;
            w.initial_positions = {0, 2, 4};
            w.kernel = KernelSpec::recency();
            c.walk = w;
            c.replicas = 200;
            c.horizon = 10'000;
            c.windows = {1'000};
            c.base_seed = 7102;
            presets.push_back(
                {"polygon-k-walkers", "three walkers on a hexagon with the recency kernel", c});
        }
        {
            ExperimentConfig c;
            c.kind = ExperimentKind::Urn;
            UrnExperimentConfig u;
            FunctionUrnProvider f;
            f.g_white = f.g_red = GrowthFamily::power(1.0);
            u.provider = f;
            c.urn = u;
            c.replicas = 1'000;
            c.horizon = 10'000;
            c.windows = {5'000};
            c.base_seed = 7103;
            presets.push_back(
                {"polya-linear", "linear urn: both colors keep being drawn (negative control)", c});
        }
        {
            ExperimentConfig c;
            c.kind = ExperimentKind::Urn;
            UrnExperimentConfig u;
            FunctionUrnProvider f;
            f.g_white = f.g_red = GrowthFamily::power(2.0);
            u.provider = f;
            c.urn = u;
            c.replicas = 1'000;
            c.horizon = 10'000;
            c.windows = {5'000};
            c.base_seed = 7104;
            presets.push_back(
                {"rubin-square", "square-weight urn: one color takes over almost immediately", c});
        }
        {
            ExperimentConfig c;
            c.kind = ExperimentKind::Urn;
            UrnExperimentConfig u;
            PsiUrnProvider p;
            p.psi = GrowthFamily::power(2.0);
            p.transition = {{0.9, 0.1}, {0.1, 0.9}};
            p.initial_chain_state = 0;
            p.chain_state = 0;
            p.g_white = {0.0, 1.0};
            p.g_red = {1.0, 0.0};
            p.theta_coeff = 0.45;
            u.provider = p;
            c.urn = u;
            c.replicas = 500;
            c.horizon = 10'000;
            c.windows = {5'000};
            c.base_seed = 7105;
            presets.push_back({"psi-modulated",
                               "square urn whose weights are nudged by a two-state chain", c});
        }
        {
            ExperimentConfig c;
            c.kind = ExperimentKind::Urn;
            UrnExperimentConfig u;
            LongestRunProvider l;
            l.alpha = 2.0;
            l.run_bonus = 1.0;
            u.provider = l;
            c.urn = u;
            c.replicas = 500;
            c.horizon = 10'000;
            c.windows = {5'000};
            c.base_seed = 7106;
            presets.push_back(
                {"longest-run", "urn whose weights also reward the longest streak so far", c});
        }
        return presets;
    }();
    return catalog;
}

inline std::optional<ExperimentConfig> find_preset(const std::string& name) {
    for (const Preset& p : preset_catalog())
        if (p.name == name) return p.config;
    return std::nullopt;
}

}  // namespace polyurn
