#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "unb/assign.hpp"
#include "unb/channel.hpp"
#include "unb/config.hpp"
#include "unb/phy.hpp"
#include "unb/training.hpp"
#include "unb/traffic.hpp"

namespace unb {

enum class Strategy {
    proposed,
    proposed_low_overhead,
    heuristic,
    random,
    oracle_trans,
    oracle_packet,
};

inline constexpr std::array<Strategy, 6> kStrategies = {
    Strategy::proposed,     Strategy::proposed_low_overhead, Strategy::heuristic,
    Strategy::random,       Strategy::oracle_trans,          Strategy::oracle_packet,
};

const char* strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);

struct ExperimentResult {
    std::size_t realization = 0;
    Strategy strategy = Strategy::proposed;
    double pdp = 0.0;
    double transmission_rate = 0.0;
    double error_rate = 1.0;  // 1 - pdp
    Assignment assignment;
    double wall_time = 0.0;  // s spent choosing the assignment; 0 unless timing is on

    bool operator==(const ExperimentResult&) const = default;
};

struct RunOptions {
    unsigned threads = 1;
    bool record_wall_time = false;
};

/// Everything random about one realization, independent of tau and eta.
struct RealizationCapture {
    SimConfig config;
    Topology topology;
    TrainingCapture full_training;
    TrainingCapture low_overhead_training;
    SinrTable evaluation;
    Assignment random_choice;
    std::uint64_t seed = 0;
};

RealizationCapture capture_realization(const SimConfig& config, std::uint64_t realization_seed);

/// Assignments and metrics of all six strategies at the given threshold and
/// heuristic exponent, all scored on the same evaluation decode table.
std::vector<ExperimentResult> evaluate_realization(const RealizationCapture& capture,
                                                   double tau_db, double eta,
                                                   std::size_t realization_id,
                                                   const RunOptions& options = {});

std::vector<ExperimentResult> run_realization(const SimConfig& config,
                                              std::uint64_t realization_seed,
                                              std::size_t realization_id = 0,
                                              const RunOptions& options = {});

std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t realization);

/// Topology of the realization with this seed, without simulating traffic.
Topology realization_topology(const SimConfig& config, std::uint64_t realization_seed);

/// Training statistics (full or low-overhead) of the realization with this
/// seed at config.sinr_threshold.
DecodeStats realization_training_stats(const SimConfig& config, std::uint64_t realization_seed,
                                       bool low_overhead);

struct StrategySummary {
    Strategy strategy = Strategy::proposed;
    std::size_t realizations = 0;
    double mean_error_rate = 0.0;
    double stderr_error_rate = 0.0;  // sample std-dev / sqrt(n); 0 when n == 1
    double var_error_rate = 0.0;     // sample variance; 0 when n == 1
    double mean_pdp = 0.0;
    double mean_transmission_rate = 0.0;
};

struct MonteCarloResult {
    std::vector<ExperimentResult> results;  // sorted by (realization, strategy)
    std::vector<StrategySummary> summary;   // kStrategies order

    const StrategySummary& of(Strategy s) const;
    /// error_rate of one strategy per realization, in realization order.
    std::vector<double> error_rates(Strategy s) const;
};

std::vector<StrategySummary> summarize(const std::vector<ExperimentResult>& results);

MonteCarloResult run_monte_carlo(const SimConfig& config, std::size_t n_realizations,
                                 std::uint64_t master_seed, const RunOptions& options = {});

enum class SweepParameter { num_bs, sinr_threshold, eta, training_duration };
SweepParameter parse_sweep_parameter(const std::string& name);
const char* sweep_parameter_name(SweepParameter p);

struct SweepResult {
    SweepParameter parameter = SweepParameter::sinr_threshold;
    std::vector<double> values;
    std::vector<MonteCarloResult> runs;  // one per value
};

/// Monte Carlo per value with common random numbers: realization i uses the
/// same seed for every value. A num_bs sweep draws a fresh topology per value
/// unless config.nested_topologies is set, in which case smaller networks
/// are the first BSs of larger ones. Threshold and eta sweeps reuse one
/// capture per realization.
SweepResult sweep(const SimConfig& config, SweepParameter parameter,
                  const std::vector<double>& values, std::size_t n_realizations,
                  std::uint64_t master_seed, const RunOptions& options = {});

/// Header: param_value,realization,strategy,pdp,transmission_rate,error_rate,assignment,wall_time_s
void write_results_header(std::ostream& out);
void write_results_rows(std::ostream& out, const std::string& param_value,
                        const std::vector<ExperimentResult>& results);
/// Header: param_value,strategy,statistic,value
void write_summary_header(std::ostream& out);
void write_summary_rows(std::ostream& out, const std::string& param_value,
                        const std::vector<StrategySummary>& summary);

}  // namespace unb
