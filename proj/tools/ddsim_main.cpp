#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddsim/config.hpp"
#include "ddsim/metrics.hpp"
#include "ddsim/simnet.hpp"
#include "ddsim/transcript.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::uint32_t devices = 0;
    bool devices_set = false;
    std::string mode;
    bool transcript = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "Scenario config file (key=value lines)");
    cmd->add_option("--seed", o.seed, "Override the scenario seed")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--devices", o.devices, "Override the fleet size")->each([&](const std::string&) {
        o.devices_set = true;
    });
    cmd->add_option("--out", o.out_dir, "Output directory (default: $DDS_SIM_OUT, else .)");
}

ddsim::ScenarioConfig load(const CommonOpts& o) {
    ddsim::ScenarioConfig cfg;
    if (!o.config_path.empty())
        cfg = ddsim::load_config(o.config_path);
    if (o.seed_set)
        cfg.seed = o.seed;
    if (o.devices_set)
        cfg.devices = o.devices;
    if (!o.mode.empty())
        cfg.mode = ddsim::mode_from_string(o.mode);
    ddsim::validate_config(cfg);
    return cfg;
}

std::string resolve_out_dir(const CommonOpts& o) {
    if (!o.out_dir.empty())
        return o.out_dir;
    const char* env = std::getenv("DDS_SIM_OUT");
    if (env != nullptr && *env != '\0')
        return env;
    return ".";
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

// Post-run sanity: a violation here means the simulation itself misbehaved,
// so it fails the command even though the run "completed".
void check_invariants(const ddsim::RunMetrics& m, const ddsim::ScenarioConfig& cfg) {
    if (m.bytes < m.messages)
        throw std::runtime_error("invariant failed: hop-weighted bytes below message count");
    if (m.rounds_opened != m.re_registered + m.eliminated)
        throw std::runtime_error("invariant failed: a protocol round never resolved");
    if (cfg.attacker_fraction == 0.0 &&
        (m.rounds_opened != 0 || m.detected + m.missed + m.false_positives != 0))
        throw std::runtime_error("invariant failed: clean scenario produced suspicion");
}

void emit(const std::vector<ddsim::RunMetrics>& rows, const std::string& path) {
    std::printf("%s\n", ddsim::csv_header().c_str());
    for (const auto& m : rows)
        std::printf("%s\n", ddsim::csv_row(m).c_str());
    ddsim::write_csv(rows, path);
    std::fprintf(stderr, "wrote %s\n", path.c_str());
}

int cmd_run(const CommonOpts& o) {
    const ddsim::ScenarioConfig cfg = load(o);
    const std::string dir = resolve_out_dir(o);

    std::vector<ddsim::Mode> modes;
    if (cfg.mode == ddsim::Mode::Both)
        modes = {ddsim::Mode::Centralized, ddsim::Mode::Distributed};
    else
        modes = {cfg.mode};

    std::vector<ddsim::RunMetrics> rows;
    for (ddsim::Mode m : modes) {
        const ddsim::Transcript tr = ddsim::run_scenario(cfg, m);
        if (o.transcript) {
            const std::string path =
                join(dir, std::string("transcript_") + ddsim::to_string(m) + ".tsv");
            ddsim::write_transcript(tr, path);
            std::fprintf(stderr, "wrote %s\n", path.c_str());
        }
        rows.push_back(ddsim::compute_metrics(tr));
        check_invariants(rows.back(), cfg);
    }
    emit(rows, join(dir, "run.csv"));
    return 0;
}

int cmd_compare(const CommonOpts& o) {
    const ddsim::ScenarioConfig cfg = load(o);
    const ddsim::ModeComparison cmp = ddsim::compare_modes(cfg);
    check_invariants(cmp.centralized, cfg);
    check_invariants(cmp.distributed, cfg);
    emit({cmp.centralized, cmp.distributed}, join(resolve_out_dir(o), "compare.csv"));
    std::printf("cost_total_reduction_pct=%.2f\n", cmp.cost_total_reduction_pct);
    std::printf("bytes_reduction_pct=%.2f\n", cmp.bytes_reduction_pct);
    return 0;
}

int cmd_sweep(const CommonOpts& o, std::uint32_t from, std::uint32_t to, std::uint32_t step) {
    if (from == 0 || step == 0 || to < from)
        throw std::invalid_argument("sweep: need 0 < from <= to and step > 0");
    ddsim::ScenarioConfig cfg = load(o);

    std::vector<ddsim::RunMetrics> rows;
    for (std::uint32_t n = from; n <= to; n += step) {
        cfg.devices = n;
        ddsim::validate_config(cfg);
        for (ddsim::Mode m : {ddsim::Mode::Centralized, ddsim::Mode::Distributed}) {
            rows.push_back(ddsim::compute_metrics(ddsim::run_scenario(cfg, m)));
            check_invariants(rows.back(), cfg);
        }
    }
    emit(rows, join(resolve_out_dir(o), "sweep.csv"));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic fleet-diagnosis simulator"};
    app.require_subcommand(1);

    CommonOpts run_o, cmp_o, sweep_o;
    std::uint32_t from = 50, to = 500, step = 50;

    CLI::App* run = app.add_subcommand("run", "Simulate one scenario and print metrics");
    add_common(run, run_o);
    run->add_option("--mode", run_o.mode, "centralized|distributed|both");
    run->add_flag("--transcript", run_o.transcript, "Also write the full event transcript(s)");

    CLI::App* cmp = app.add_subcommand("compare", "Run both modes and print the reductions");
    add_common(cmp, cmp_o);

    CLI::App* sweep = app.add_subcommand("sweep", "Both modes across fleet sizes");
    add_common(sweep, sweep_o);
    sweep->add_option("--from", from, "Smallest fleet (default 50)");
    sweep->add_option("--to", to, "Largest fleet (default 500)");
    sweep->add_option("--step", step, "Fleet size step (default 50)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(run_o);
        if (cmp->parsed())
            return cmd_compare(cmp_o);
        return cmd_sweep(sweep_o, from, to, step);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
