#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace unb {

/// Simulation parameters. Defaults reproduce the reference deployment:
/// 13 km x 13 km, 6 BSs over 3 x 200 kHz bands, 600 Hz UNB signals repeated
/// 3 times, 125 kHz interferers, 10 dB decoding threshold.
struct SimConfig {
    int num_bs = 6;
    int num_bands = 3;
    double band_width = 200e3;           // Hz
    double tx_bandwidth = 600.0;         // Hz
    double interferer_bandwidth = 125e3; // Hz
    double tx_power_iot = 14.0;          // dBm
    double tx_power_interferer = 14.0;   // dBm
    double noise_power = -146.0;         // dBm
    double noise_jitter_db = 0.0;        // std-dev of per-transmission noise, dB
    int repetitions = 3;
    double packets_per_hour = 3.0;
    double interferer_packets_per_hour = 30.0;
    double packet_bits = 2080.0;
    std::optional<double> interferer_duration;  // seconds; defaults to tx_duration()
    double sinr_threshold = 10.0;               // dB
    double area_side = 13000.0;                 // m
    double mean_iot_count = 5000.0;
    double mean_interferer_count = 2000.0;
    double pathloss_exponent = 3.5;
    double shadowing_std = 9.0;              // dB
    double shadowing_decorrelation = 200.0;  // m
    double fading_scale = 1.0;               // RMS Rayleigh amplitude
    bool fading_enabled = true;              // off: every fading term is 0 dB
    double training_duration = 3600.0;       // s
    double sim_horizon = 3600.0;             // s
    bool cross_bs_shadowing_correlated = false;
    std::uint64_t master_seed = 1;

    // Solver and harness knobs.
    double eta = 1.0;
    int probe_band = 0;                       // low-overhead training band (0-based)
    std::uint64_t enumeration_cap = 1000000;
    int local_search_restarts = 20;
    bool nested_topologies = false;
    int shadowing_exact_max_sources = 4000;

    /// UNB transmission time, packet_bits / tx_bandwidth.
    double tx_duration() const { return packet_bits / tx_bandwidth; }
    double interferer_tx_duration() const {
        return interferer_duration ? *interferer_duration : tx_duration();
    }

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

/// Sets one field from its textual value. Unknown keys are rejected.
void set_config_value(SimConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const SimConfig& config, const std::string& key);
const std::vector<std::string>& config_keys();

/// Flat "key = value" document; '#' starts a comment.
SimConfig parse_config(const std::string& text, SimConfig base = {});
SimConfig load_config(const std::string& path, SimConfig base = {});
std::string format_config(const SimConfig& config);

}  // namespace unb
