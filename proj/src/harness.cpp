#include "unb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "unb/text.hpp"

namespace unb {

namespace {

// Substream tags within one realization.
enum : std::uint64_t {
    kTopology = 1,
    kChannel,
    kFullTraining,
    kLowOverheadTraining,
    kEvalUnb,
    kEvalInterferer,
    kEvalFading,
    kRandomAssignment,
    kLocalSearch,
};

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

class Stopwatch {
public:
    explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        if (!enabled_) return 0.0;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_;
};

std::uint64_t sweep_seed(std::uint64_t seed, SweepParameter p, double value, bool nested) {
    if (p != SweepParameter::num_bs || nested) return seed;
    return derive_seed(seed, {std::bit_cast<std::uint64_t>(value)});
}

void sort_results(std::vector<ExperimentResult>& results) {
    std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
        return std::pair(a.realization, static_cast<int>(a.strategy)) <
               std::pair(b.realization, static_cast<int>(b.strategy));
    });
}

MonteCarloResult finish(std::vector<std::vector<ExperimentResult>> per_realization) {
    MonteCarloResult out;
    for (auto& rows : per_realization) {
        out.results.insert(out.results.end(), rows.begin(), rows.end());
    }
    sort_results(out.results);
    out.summary = summarize(out.results);
    return out;
}

}  // namespace

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::proposed: return "proposed";
        case Strategy::proposed_low_overhead: return "proposed_low_overhead";
        case Strategy::heuristic: return "heuristic";
        case Strategy::random: return "random";
        case Strategy::oracle_trans: return "oracle_trans";
        case Strategy::oracle_packet: return "oracle_packet";
    }
    return "?";
}

Strategy parse_strategy(const std::string& name) {
    for (auto s : kStrategies) {
        if (name == strategy_name(s)) return s;
    }
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t realization) {
    return derive_seed(master_seed, {0x2EA1u, static_cast<std::uint64_t>(realization)});
}

Topology realization_topology(const SimConfig& config, std::uint64_t seed) {
    config.validate();
    Rng topo_rng = make_rng(seed, {kTopology});
    return generate_topology(config, topo_rng);
}

DecodeStats realization_training_stats(const SimConfig& config, std::uint64_t seed,
                                       bool low_overhead) {
    const auto cap = capture_realization(config, seed);
    const auto& training = low_overhead ? cap.low_overhead_training : cap.full_training;
    auto stats = estimate_stats(records_from_capture(training, config.sinr_threshold),
                                config.num_bands);
    return low_overhead ? replicate_band(stats, config.probe_band) : stats;
}

RealizationCapture capture_realization(const SimConfig& config, std::uint64_t seed) {
    config.validate();
    RealizationCapture cap;
    cap.config = config;
    cap.seed = seed;

    cap.topology = realization_topology(config, seed);
    Rng channel_rng = make_rng(seed, {kChannel});
    const ChannelRealization channel = make_channel_realization(cap.topology, config, channel_rng);

    std::vector<int> bands(static_cast<std::size_t>(config.num_bands));
    for (int m = 0; m < config.num_bands; ++m) bands[static_cast<std::size_t>(m)] = m;
    const double slot = config.training_duration / config.num_bands;
    Rng full_rng = make_rng(seed, {kFullTraining});
    cap.full_training = capture_training(cap.topology, channel, config, full_rng, bands, slot);
    Rng low_rng = make_rng(seed, {kLowOverheadTraining});
    const int probe[] = {config.probe_band};
    cap.low_overhead_training = capture_training(cap.topology, channel, config, low_rng, probe, slot);

    Rng unb_rng = make_rng(seed, {kEvalUnb});
    Rng interferer_rng = make_rng(seed, {kEvalInterferer});
    Rng fading_rng = make_rng(seed, {kEvalFading});
    const TrafficTrace trace = merge_traces(generate_unb_traffic(cap.topology, config, unb_rng),
                                            generate_interferer_traffic(cap.topology, config, interferer_rng));
    cap.evaluation = compute_sinr_table(trace, channel, config, fading_rng);

    Rng random_rng = make_rng(seed, {kRandomAssignment});
    cap.random_choice = random_assignment(config.num_bs, config.num_bands, random_rng);
    return cap;
}

std::vector<ExperimentResult> evaluate_realization(const RealizationCapture& cap, double tau_db,
                                                   double eta, std::size_t realization_id,
                                                   const RunOptions& options) {
    const SimConfig& cfg = cap.config;
    const DecodeTable table = threshold_sinr(cap.evaluation, tau_db);
    if (table.num_events() == 0) {
        throw std::runtime_error("realization " + std::to_string(realization_id) +
                                 ": no UNB transmissions in the evaluation horizon");
    }
    const MetricsEvaluator evaluator(table);
    Rng search_rng = make_rng(cap.seed, {kLocalSearch});

    std::vector<ExperimentResult> out;
    auto record = [&](Strategy s, const Assignment& x, double seconds) {
        const Metrics m = evaluator.evaluate(x);
        out.push_back(ExperimentResult{realization_id, s, m.pdp, m.transmission_rate, 1.0 - m.pdp, x,
                                       seconds});
    };

    {
        Stopwatch clock(options.record_wall_time);
        const auto stats =
            estimate_stats(records_from_capture(cap.full_training, tau_db), cfg.num_bands);
        const auto solved = solve(build_p3_objective(stats), cfg.enumeration_cap,
                                  cfg.local_search_restarts, search_rng);
        record(Strategy::proposed, solved.assignment, clock.seconds());
    }
    {
        Stopwatch clock(options.record_wall_time);
        const auto stats = replicate_band(
            estimate_stats(records_from_capture(cap.low_overhead_training, tau_db), cfg.num_bands),
            cfg.probe_band);
        const auto solved = solve(build_p3_objective(stats), cfg.enumeration_cap,
                                  cfg.local_search_restarts, search_rng);
        record(Strategy::proposed_low_overhead, solved.assignment, clock.seconds());
    }
    {
        Stopwatch clock(options.record_wall_time);
        const auto solved = solve(build_p4_objective(cap.topology.bs_locations, eta, cfg.num_bands),
                                  cfg.enumeration_cap, cfg.local_search_restarts, search_rng);
        record(Strategy::heuristic, solved.assignment, clock.seconds());
    }
    record(Strategy::random, cap.random_choice, 0.0);
    {
        Stopwatch clock(options.record_wall_time);
        const auto oracles =
            oracle_best_assignments(evaluator, cfg.num_bs, cfg.num_bands, cfg.enumeration_cap);
        const double seconds = clock.seconds();
        record(Strategy::oracle_trans, oracles.transmission.assignment, seconds);
        record(Strategy::oracle_packet, oracles.packet.assignment, seconds);
    }
    return out;
}

std::vector<ExperimentResult> run_realization(const SimConfig& config, std::uint64_t seed,
                                              std::size_t realization_id,
                                              const RunOptions& options) {
    try {
        const auto cap = capture_realization(config, seed);
        return evaluate_realization(cap, config.sinr_threshold, config.eta, realization_id, options);
    } catch (const std::exception& e) {
        throw std::runtime_error("realization " + std::to_string(realization_id) + " (seed " +
                                 std::to_string(seed) + "): " + e.what());
    }
}

std::vector<StrategySummary> summarize(const std::vector<ExperimentResult>& results) {
    std::vector<StrategySummary> out;
    for (auto s : kStrategies) {
        StrategySummary sum;
        sum.strategy = s;
        std::vector<double> errors;
        for (const auto& r : results) {
            if (r.strategy != s) continue;
            errors.push_back(r.error_rate);
            sum.mean_pdp += r.pdp;
            sum.mean_transmission_rate += r.transmission_rate;
        }
        sum.realizations = errors.size();
        if (!errors.empty()) {
            const auto n = static_cast<double>(errors.size());
            sum.mean_pdp /= n;
            sum.mean_transmission_rate /= n;
            for (double e : errors) sum.mean_error_rate += e;
            sum.mean_error_rate /= n;
            if (errors.size() > 1) {
                double ss = 0.0;
                for (double e : errors) ss += (e - sum.mean_error_rate) * (e - sum.mean_error_rate);
                sum.var_error_rate = ss / (n - 1.0);
                sum.stderr_error_rate = std::sqrt(sum.var_error_rate / n);
            }
        }
        out.push_back(sum);
    }
    return out;
}

const StrategySummary& MonteCarloResult::of(Strategy s) const {
    for (const auto& sum : summary) {
        if (sum.strategy == s) return sum;
    }
    throw std::out_of_range("MonteCarloResult: strategy missing");
}

std::vector<double> MonteCarloResult::error_rates(Strategy s) const {
    std::vector<double> out;
    for (const auto& r : results) {
        if (r.strategy == s) out.push_back(r.error_rate);
    }
    return out;
}

MonteCarloResult run_monte_carlo(const SimConfig& config, std::size_t n_realizations,
                                 std::uint64_t master_seed, const RunOptions& options) {
    if (n_realizations < 1) throw std::invalid_argument("run_monte_carlo: need >= 1 realization");
    std::vector<std::vector<ExperimentResult>> rows(n_realizations);
    parallel_for(n_realizations, options.threads, [&](std::size_t i) {
        rows[i] = run_realization(config, realization_seed(master_seed, i), i, options);
    });
    return finish(std::move(rows));
}

SweepParameter parse_sweep_parameter(const std::string& name) {
    for (auto p : {SweepParameter::num_bs, SweepParameter::sinr_threshold, SweepParameter::eta,
                   SweepParameter::training_duration}) {
        if (name == sweep_parameter_name(p)) return p;
    }
    throw std::invalid_argument("unknown sweep parameter '" + name + "'");
}

const char* sweep_parameter_name(SweepParameter p) {
    switch (p) {
        case SweepParameter::num_bs: return "num_bs";
        case SweepParameter::sinr_threshold: return "sinr_threshold";
        case SweepParameter::eta: return "eta";
        case SweepParameter::training_duration: return "training_duration";
    }
    return "?";
}

SweepResult sweep(const SimConfig& config, SweepParameter parameter,
                  const std::vector<double>& values, std::size_t n_realizations,
                  std::uint64_t master_seed, const RunOptions& options) {
    if (values.empty()) throw std::invalid_argument("sweep: no values");
    if (n_realizations < 1) throw std::invalid_argument("sweep: need >= 1 realization");
    SweepResult out;
    out.parameter = parameter;
    out.values = values;

    // rows[value][realization]
    std::vector<std::vector<std::vector<ExperimentResult>>> rows(
        values.size(), std::vector<std::vector<ExperimentResult>>(n_realizations));

    if (parameter == SweepParameter::sinr_threshold || parameter == SweepParameter::eta) {
        parallel_for(n_realizations, options.threads, [&](std::size_t i) {
            const auto seed = realization_seed(master_seed, i);
            try {
                const auto cap = capture_realization(config, seed);
                for (std::size_t v = 0; v < values.size(); ++v) {
                    const bool tau = parameter == SweepParameter::sinr_threshold;
                    rows[v][i] = evaluate_realization(cap, tau ? values[v] : config.sinr_threshold,
                                                      tau ? config.eta : values[v], i, options);
                }
            } catch (const std::exception& e) {
                throw std::runtime_error("realization " + std::to_string(i) + " (seed " +
                                         std::to_string(seed) + "): " + e.what());
            }
        });
    } else {
        std::vector<SimConfig> configs;
        for (double v : values) {
            SimConfig c = config;
            if (parameter == SweepParameter::num_bs) {
                if (v < 1 || std::floor(v) != v) throw std::invalid_argument("sweep: num_bs must be a positive integer");
                c.num_bs = static_cast<int>(v);
            } else {
                c.training_duration = v;
            }
            c.validate();
            configs.push_back(c);
        }
        parallel_for(values.size() * n_realizations, options.threads, [&](std::size_t job) {
            const std::size_t v = job / n_realizations;
            const std::size_t i = job % n_realizations;
            const auto seed = sweep_seed(realization_seed(master_seed, i), parameter, values[v],
                                         config.nested_topologies);
            rows[v][i] = run_realization(configs[v], seed, i, options);
        });
    }
    for (auto& per_value : rows) out.runs.push_back(finish(std::move(per_value)));
    return out;
}

void write_results_header(std::ostream& out) {
    out << "param_value,realization,strategy,pdp,transmission_rate,error_rate,assignment,wall_time_s\n";
}

void write_results_rows(std::ostream& out, const std::string& param_value,
                        const std::vector<ExperimentResult>& results) {
    for (const auto& r : results) {
        out << param_value << ',' << r.realization << ',' << strategy_name(r.strategy) << ','
            << format_double(r.pdp) << ',' << format_double(r.transmission_rate) << ','
            << format_double(r.error_rate) << ',' << format_assignment(r.assignment) << ','
            << format_double(r.wall_time) << '\n';
    }
}

void write_summary_header(std::ostream& out) { out << "param_value,strategy,statistic,value\n"; }

void write_summary_rows(std::ostream& out, const std::string& param_value,
                        const std::vector<StrategySummary>& summary) {
    for (const auto& s : summary) {
        const std::pair<const char*, double> stats[] = {
            {"realizations", static_cast<double>(s.realizations)},
            {"mean_error_rate", s.mean_error_rate},
            {"stderr_error_rate", s.stderr_error_rate},
            {"var_error_rate", s.var_error_rate},
            {"mean_pdp", s.mean_pdp},
            {"mean_transmission_rate", s.mean_transmission_rate},
        };
        for (const auto& [name, value] : stats) {
            out << param_value << ',' << strategy_name(s.strategy) << ',' << name << ','
                << format_double(value) << '\n';
        }
    }
}

}  // namespace unb
