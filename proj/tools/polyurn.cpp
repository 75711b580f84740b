// Batch experiment runner for the reinforced-walk and urn simulators:
// parse a config (or preset), fan out seeded replicas, aggregate detector
// statistics, and emit machine-readable CSV/JSON.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polyurn/polyurn.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string preset;
    std::optional<std::int64_t> replicas;
    std::optional<std::int64_t> horizon;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::vector<std::int64_t> windows;
    int workers = 1;
};

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "experiment config file (JSON)");
    cmd->add_option("--preset", opt.preset, "built-in preset name (see `presets`)");
    cmd->add_option("--replicas", opt.replicas, "override replica count");
    cmd->add_option("--horizon", opt.horizon, "override horizon");
    cmd->add_option("--seed", opt.seed, "override base seed");
    cmd->add_option("--out", opt.out, "output path (default: config value or stdout)");
    cmd->add_option("--format", opt.format, "output format: csv or json");
    cmd->add_option("--windows", opt.windows, "override detection windows");
    cmd->add_option("--workers", opt.workers, "worker threads for replica fan-out");
}

polyurn::ExperimentConfig resolve_config(const CommonOptions& opt,
                                         polyurn::ExperimentKind expected) {
    polyurn::ExperimentConfig cfg;
    if (!opt.preset.empty()) {
        auto found = polyurn::find_preset(opt.preset);
        if (!found) throw polyurn::ConfigError("no preset named '" + opt.preset + "'");
        cfg = *found;
    } else if (!opt.config_path.empty()) {
        cfg = polyurn::load_config_file(opt.config_path);
    } else {
        throw polyurn::ConfigError("pass --config FILE or --preset NAME");
    }
    if (cfg.kind != expected)
        throw polyurn::ConfigError("config kind does not match the subcommand");

    if (opt.replicas) cfg.replicas = *opt.replicas;
    if (opt.horizon) cfg.horizon = *opt.horizon;
    if (opt.seed) cfg.base_seed = *opt.seed;
    if (opt.out) cfg.output_path = *opt.out;
    if (!opt.windows.empty()) cfg.windows = opt.windows;
    if (opt.format) {
        if (*opt.format == "csv")
            cfg.format = polyurn::OutputFormat::Csv;
        else if (*opt.format == "json")
            cfg.format = polyurn::OutputFormat::Json;
        else
            throw polyurn::ConfigError("--format must be csv or json");
    }
    cfg.validate();
    return cfg;
}

void emit_result(const polyurn::ExperimentResult& result) {
    const std::string& path = result.config.output_path;
    if (path.empty()) {
        polyurn::write_result(result, std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    polyurn::write_result(result, out);
    for (const auto& agg : result.aggregates) {
        std::cout << "window=" << agg.window << " particle="
                  << (agg.particle < 0 ? std::string("all") : std::to_string(agg.particle))
                  << " fraction=" << agg.ci.fraction << " ci=[" << agg.ci.lo << ","
                  << agg.ci.hi << "]\n";
    }
    std::cout << "wrote " << path << "\n";
}

void write_walk_trace(const polyurn::ExperimentConfig& cfg, const std::string& path) {
    polyurn::RngStream rng(cfg.base_seed, 0);
    const polyurn::Trajectory traj = polyurn::simulate_walk(*cfg.walk, cfg.horizon, rng);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open trace file '" + path + "'");
    out << "step,particle,position,traversed_edge\n";
    for (std::int64_t s = 1; s <= traj.horizon; ++s)
        for (int l = 0; l < traj.positions.rows(); ++l)
            out << s << ',' << l << ',' << traj.positions(l, static_cast<int>(s)) << ','
                << traj.traversed_edges(l, static_cast<int>(s) - 1) << "\n";
}

void write_draw_log(const polyurn::ExperimentConfig& cfg, const std::string& path) {
    polyurn::RngStream rng(cfg.base_seed, 0);
    const polyurn::UrnRun run = polyurn::run_urn(
        cfg.urn->provider, polyurn::UrnState::start(cfg.urn->start[0], cfg.urn->start[1]),
        cfg.horizon, rng);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open draw-log file '" + path + "'");
    out << "step,color,f_white,f_red,phi_white,phi_red\n";
    std::array<std::int64_t, 2> comp = run.start;
    for (std::int64_t s = 1; s <= run.horizon(); ++s) {
        const int color = run.final_state.draw_log[s - 1];
        comp[color] += 1;
        out << s << ',' << (color == 0 ? "white" : "red") << ','
            << polyurn::detail::format_double(std::exp(run.log_f_white[s - 1])) << ','
            << polyurn::detail::format_double(std::exp(run.log_f_red[s - 1])) << ',' << comp[0]
            << ',' << comp[1] << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"interacting reinforced walks on polygons + generalized urns"};
    app.require_subcommand(1);

    CommonOptions walk_opt, urn_opt;
    auto* walk_cmd = app.add_subcommand("walk", "run a reinforced-walk experiment");
    add_common_options(walk_cmd, walk_opt);
    std::string trace_path;
    walk_cmd->add_option("--trace", trace_path, "also write the replica-0 trajectory CSV here");

    auto* urn_cmd = app.add_subcommand("urn", "run an urn experiment");
    add_common_options(urn_cmd, urn_opt);
    std::string draw_log_path;
    urn_cmd->add_option("--draw-log", draw_log_path,
                        "also write the replica-0 draw log CSV here");

    auto* verify_cmd = app.add_subcommand("verify", "run the numeric checker battery");

    auto* presets_cmd = app.add_subcommand("presets", "list built-in presets");
    std::string emit_name;
    presets_cmd->add_option("--emit", emit_name, "print the named preset as a config file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (walk_cmd->parsed()) {
            const auto cfg = resolve_config(walk_opt, polyurn::ExperimentKind::Walk);
            emit_result(polyurn::run_experiment(cfg, walk_opt.workers));
            if (!trace_path.empty()) write_walk_trace(cfg, trace_path);
        } else if (urn_cmd->parsed()) {
            const auto cfg = resolve_config(urn_opt, polyurn::ExperimentKind::Urn);
            emit_result(polyurn::run_experiment(cfg, urn_opt.workers));
            if (!draw_log_path.empty()) write_draw_log(cfg, draw_log_path);
        } else if (verify_cmd->parsed()) {
            const auto report = polyurn::run_verify_battery();
            for (const auto& check : report.checks)
                std::cout << (check.pass ? "[ ok ] " : "[FAIL] ") << check.name << ": "
                          << check.detail << "\n";
            std::cout << (report.all_pass() ? "all checks passed" : "CHECKS FAILED") << "\n";
            return report.all_pass() ? 0 : 1;
        } else if (presets_cmd->parsed()) {
            if (!emit_name.empty()) {
                auto found = polyurn::find_preset(emit_name);
                if (!found) throw polyurn::ConfigError("no preset named '" + emit_name + "'");
                std::cout << polyurn::serialize_config(*found);
            } else {
                for (const auto& p : polyurn::preset_catalog()) {
                    const char* kind = p.config.kind == polyurn::ExperimentKind::Walk ? "walk"
                                                                                      : "urn";
                    std::cout << p.name << " [" << kind << "] — " << p.summary
                              << " (replicas=" << p.config.replicas
                              << ", horizon=" << p.config.horizon << ")\n";
                }
            }
        }
    } catch (const polyurn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
