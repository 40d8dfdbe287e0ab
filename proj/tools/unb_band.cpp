// unb-band: Monte Carlo band-assignment experiments for multiband UNB networks.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "unb/assign.hpp"
#include "unb/config.hpp"
#include "unb/harness.hpp"
#include "unb/text.hpp"
#include "unb/training.hpp"

namespace {

struct GlobalOptions {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t realizations = 20;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool timing = false;
    std::vector<std::string> overrides;
};

unb::SimConfig load(const GlobalOptions& g) {
    unb::SimConfig config;
    if (!g.config_path.empty()) config = unb::load_config(g.config_path);
    for (const auto& kv : g.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got " + kv);
        unb::set_config_value(config, unb::trim(kv.substr(0, eq)), unb::trim(kv.substr(eq + 1)));
    }
    config.validate();
    return config;
}

std::uint64_t master_seed(const GlobalOptions& g, const unb::SimConfig& config) {
    return g.seed_given ? g.seed : config.master_seed;
}

/// Output stream for --out, or stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void print_summary(const std::string& label, const std::vector<unb::StrategySummary>& summary) {
    std::fprintf(stderr, "%s\n", label.c_str());
    std::fprintf(stderr, "  %-22s %12s %12s %10s %10s\n", "strategy", "error_rate", "std_err",
                 "pdp", "trans_rate");
    for (const auto& s : summary) {
        std::fprintf(stderr, "  %-22s %12.6f %12.6f %10.6f %10.6f\n", unb::strategy_name(s.strategy),
                     s.mean_error_rate, s.stderr_error_rate, s.mean_pdp, s.mean_transmission_rate);
    }
}

/// "6,7,8" or "6:0.5:14" (inclusive range).
std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        const auto parts = unb::split(text, ':');
        if (parts.size() != 3) throw std::invalid_argument("range must be start:step:stop");
        const double start = unb::parse_double(parts[0]);
        const double step = unb::parse_double(parts[1]);
        const double stop = unb::parse_double(parts[2]);
        if (!(step > 0.0) || stop < start) throw std::invalid_argument("bad range " + text);
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) values.push_back(start + step * static_cast<double>(i));
    } else {
        for (const auto& item : unb::split(text, ',')) values.push_back(unb::parse_double(item));
    }
    if (values.empty()) throw std::invalid_argument("no sweep values");
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Band assignment for multiband ultra-narrowband IoT networks"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    auto* seed_opt = app.add_option("--seed", g.seed, "Master seed (default: config master_seed)");
    app.add_option("--realizations", g.realizations, "Monte Carlo realizations")
        ->check(CLI::PositiveNumber);
    app.add_option("--config", g.config_path, "Key = value configuration file")
        ->check(CLI::ExistingFile);
    app.add_option("--out", g.out_path, "Output file (default: stdout)");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--timing", g.timing, "Record wall time per strategy (output is then not reproducible)");
    app.add_option("--set", g.overrides, "Override a config key, e.g. --set num_bs=8");

    auto* simulate = app.add_subcommand("simulate", "Run one Monte Carlo batch");
    std::string summary_path;
    simulate->add_option("--summary", summary_path, "Write per-strategy summary CSV here");

    auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo batch per parameter value");
    std::string sweep_param;
    std::string sweep_values;
    sweep_cmd->add_option("--param", sweep_param, "num_bs | sinr_threshold | eta | training_duration")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "Comma list or start:step:stop")->required();
    sweep_cmd->add_option("--summary", summary_path, "Write per-value summary CSV here");

    auto* solve_cmd = app.add_subcommand("solve", "Assign BSs to bands from a statistics table");
    std::string stats_path;
    std::string objective = "p3";
    solve_cmd->add_option("--stats", stats_path, "Statistics table written by 'train'")
        ->check(CLI::ExistingFile);
    solve_cmd->add_option("--objective", objective, "p3 (training statistics) or p4 (BS locations)")
        ->check(CLI::IsMember({"p3", "p4"}));

    auto* train_cmd = app.add_subcommand("train", "Simulate training and write the statistics table");
    bool low_overhead = false;
    train_cmd->add_flag("--low-overhead", low_overhead, "Measure on probe_band only");

    CLI11_PARSE(app, argc, argv);
    g.seed_given = seed_opt->count() > 0;

    try {
        const unb::SimConfig config = load(g);
        const std::uint64_t seed = master_seed(g, config);
        const unb::RunOptions run{g.threads, g.timing};

        if (*simulate) {
            const auto mc = unb::run_monte_carlo(config, g.realizations, seed, run);
            Output out(g.out_path);
            unb::write_results_header(out.stream());
            unb::write_results_rows(out.stream(), "", mc.results);
            if (!summary_path.empty()) {
                std::ofstream sum(summary_path);
                unb::write_summary_header(sum);
                unb::write_summary_rows(sum, "", mc.summary);
            }
            print_summary("realizations: " + std::to_string(g.realizations), mc.summary);
        } else if (*sweep_cmd) {
            const auto param = unb::parse_sweep_parameter(sweep_param);
            const auto values = parse_values(sweep_values);
            const auto result = unb::sweep(config, param, values, g.realizations, seed, run);
            Output out(g.out_path);
            unb::write_results_header(out.stream());
            std::unique_ptr<std::ofstream> sum;
            if (!summary_path.empty()) {
                sum = std::make_unique<std::ofstream>(summary_path);
                unb::write_summary_header(*sum);
            }
            for (std::size_t v = 0; v < values.size(); ++v) {
                const auto label = unb::format_double(values[v]);
                unb::write_results_rows(out.stream(), label, result.runs[v].results);
                if (sum) unb::write_summary_rows(*sum, label, result.runs[v].summary);
                print_summary(std::string(unb::sweep_parameter_name(param)) + " = " + label,
                              result.runs[v].summary);
            }
        } else if (*solve_cmd) {
            unb::QuadraticAssignmentObjective obj;
            if (objective == "p3") {
                if (stats_path.empty()) throw std::invalid_argument("solve --objective p3 needs --stats");
                std::ifstream in(stats_path);
                obj = unb::build_p3_objective(unb::read_stats(in));
            } else {
                const auto topo = unb::realization_topology(config, unb::realization_seed(seed, 0));
                obj = unb::build_p4_objective(topo.bs_locations, config.eta, config.num_bands);
            }
            unb::Rng rng = unb::make_rng(seed, {0x501Eu});
            const auto solved =
                unb::solve(obj, config.enumeration_cap, config.local_search_restarts, rng);
            Output out(g.out_path);
            out.stream() << unb::format_assignment(solved.assignment) << '\n';
            std::fprintf(stderr, "objective value: %.12g\n", solved.value);
        } else if (*train_cmd) {
            const auto stats = unb::realization_training_stats(config, unb::realization_seed(seed, 0),
                                                               low_overhead);
            Output out(g.out_path);
            unb::write_stats(out.stream(), stats);
            if (stats.flagged_cells() > 0) {
                std::fprintf(stderr, "warning: %zu statistics cells had no samples\n",
                             stats.flagged_cells());
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
