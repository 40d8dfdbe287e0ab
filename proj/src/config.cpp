#include "unb/config.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "unb/text.hpp"

namespace unb {

namespace {

struct Field {
    std::function<void(SimConfig&, const std::string&)> set;
    std::function<std::string(const SimConfig&)> get;
};

double to_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " expects a number, got '" + value + "'");
    }
    if (used != value.size()) {
        throw std::invalid_argument("config: " + key + " expects a number, got '" + value + "'");
    }
    return v;
}

template <typename T>
T to_integer(const std::string& key, const std::string& value) {
    T v{};
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec == std::errc{} && end == value.data() + value.size()) return v;
    // Accept integral values written in floating-point form, e.g. 1e6.
    const double d = to_double(key, value);
    if (!std::isfinite(d) || std::floor(d) != d ||
        d < static_cast<double>(std::numeric_limits<T>::lowest()) ||
        d >= std::ldexp(1.0, std::numeric_limits<T>::digits)) {
        throw std::invalid_argument("config: " + key + " expects an integer, got '" + value + "'");
    }
    return static_cast<T>(d);
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw std::invalid_argument("config: " + key + " expects a boolean, got '" + value + "'");
}

template <typename T>
Field number(T SimConfig::*member) {
    return Field{
        [member](SimConfig& c, const std::string& v) {
            if constexpr (std::is_same_v<T, double>) {
                c.*member = to_double("value", v);
            } else {
                c.*member = to_integer<T>("value", v);
            }
        },
        [member](const SimConfig& c) {
            if constexpr (std::is_same_v<T, double>) {
                return format_double(c.*member);
            } else {
                return std::to_string(c.*member);
            }
        }};
}

Field flag(bool SimConfig::*member) {
    return Field{[member](SimConfig& c, const std::string& v) { c.*member = to_bool("value", v); },
                 [member](const SimConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["num_bs"] = number(&SimConfig::num_bs);
        t["num_bands"] = number(&SimConfig::num_bands);
        t["band_width"] = number(&SimConfig::band_width);
        t["tx_bandwidth"] = number(&SimConfig::tx_bandwidth);
        t["interferer_bandwidth"] = number(&SimConfig::interferer_bandwidth);
        t["tx_power_iot"] = number(&SimConfig::tx_power_iot);
        t["tx_power_interferer"] = number(&SimConfig::tx_power_interferer);
        t["noise_power"] = number(&SimConfig::noise_power);
        t["noise_jitter_db"] = number(&SimConfig::noise_jitter_db);
        t["repetitions"] = number(&SimConfig::repetitions);
        t["packets_per_hour"] = number(&SimConfig::packets_per_hour);
        t["interferer_packets_per_hour"] = number(&SimConfig::interferer_packets_per_hour);
        t["packet_bits"] = number(&SimConfig::packet_bits);
        t["interferer_duration"] = Field{
            [](SimConfig& c, const std::string& v) {
                if (v == "auto") {
                    c.interferer_duration.reset();
                } else {
                    c.interferer_duration = to_double("interferer_duration", v);
                }
            },
            [](const SimConfig& c) {
                return c.interferer_duration ? format_double(*c.interferer_duration)
                                             : std::string("auto");
            }};
        t["sinr_threshold"] = number(&SimConfig::sinr_threshold);
        t["area_side"] = number(&SimConfig::area_side);
        t["mean_iot_count"] = number(&SimConfig::mean_iot_count);
        t["mean_interferer_count"] = number(&SimConfig::mean_interferer_count);
        t["pathloss_exponent"] = number(&SimConfig::pathloss_exponent);
        t["shadowing_std"] = number(&SimConfig::shadowing_std);
        t["shadowing_decorrelation"] = number(&SimConfig::shadowing_decorrelation);
        t["fading_scale"] = number(&SimConfig::fading_scale);
        t["fading_enabled"] = flag(&SimConfig::fading_enabled);
        t["training_duration"] = number(&SimConfig::training_duration);
        t["sim_horizon"] = number(&SimConfig::sim_horizon);
        t["cross_bs_shadowing_correlated"] = flag(&SimConfig::cross_bs_shadowing_correlated);
        t["master_seed"] = number(&SimConfig::master_seed);
        t["eta"] = number(&SimConfig::eta);
        t["probe_band"] = number(&SimConfig::probe_band);
        t["enumeration_cap"] = number(&SimConfig::enumeration_cap);
        t["local_search_restarts"] = number(&SimConfig::local_search_restarts);
        t["nested_topologies"] = flag(&SimConfig::nested_topologies);
        t["shadowing_exact_max_sources"] = number(&SimConfig::shadowing_exact_max_sources);
        return t;
    }();
    return table;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("config: " + what);
}

}  // namespace

void SimConfig::validate() const {
    require(num_bs >= 1, "num_bs must be >= 1");
    require(num_bs <= 64, "num_bs must be <= 64");
    require(num_bands >= 1, "num_bands must be >= 1");
    require(std::isfinite(band_width) && band_width > 0, "band_width must be positive");
    require(tx_bandwidth > 0 && tx_bandwidth < band_width, "need 0 < tx_bandwidth < band_width");
    require(interferer_bandwidth > 0 && interferer_bandwidth <= band_width,
            "need 0 < interferer_bandwidth <= band_width");
    require(std::isfinite(tx_power_iot) && std::isfinite(tx_power_interferer) &&
                std::isfinite(noise_power),
            "powers must be finite");
    require(std::isfinite(noise_jitter_db) && noise_jitter_db >= 0, "noise_jitter_db must be >= 0");
    require(repetitions >= 1, "repetitions must be >= 1");
    require(std::isfinite(packets_per_hour) && packets_per_hour >= 0,
            "packets_per_hour must be >= 0");
    require(std::isfinite(interferer_packets_per_hour) && interferer_packets_per_hour >= 0,
            "interferer_packets_per_hour must be >= 0");
    require(std::isfinite(packet_bits) && packet_bits > 0, "packet_bits must be positive");
    require(!interferer_duration || (std::isfinite(*interferer_duration) && *interferer_duration > 0),
            "interferer_duration must be positive");
    require(!std::isnan(sinr_threshold), "sinr_threshold must not be NaN");
    require(std::isfinite(area_side) && area_side > 0, "area_side must be positive");
    require(std::isfinite(mean_iot_count) && mean_iot_count >= 0, "mean_iot_count must be >= 0");
    require(std::isfinite(mean_interferer_count) && mean_interferer_count >= 0,
            "mean_interferer_count must be >= 0");
    require(std::isfinite(pathloss_exponent) && pathloss_exponent > 0,
            "pathloss_exponent must be positive");
    require(std::isfinite(shadowing_std) && shadowing_std >= 0, "shadowing_std must be >= 0");
    require(std::isfinite(shadowing_decorrelation) && shadowing_decorrelation > 0,
            "shadowing_decorrelation must be positive");
    require(std::isfinite(fading_scale) && fading_scale > 0, "fading_scale must be positive");
    require(std::isfinite(training_duration) && training_duration > 0,
            "training_duration must be positive");
    require(std::isfinite(sim_horizon) && sim_horizon > 0, "sim_horizon must be positive");
    require(std::isfinite(eta) && eta > 0, "eta must be positive");
    require(probe_band >= 0 && probe_band < num_bands, "probe_band must lie in [0, num_bands)");
    require(enumeration_cap >= 1, "enumeration_cap must be >= 1");
    require(local_search_restarts >= 1, "local_search_restarts must be >= 1");
    require(shadowing_exact_max_sources >= 0, "shadowing_exact_max_sources must be >= 0");
}

void set_config_value(SimConfig& config, const std::string& key, const std::string& value) {
    if (key == "tx_duration") {
        throw std::invalid_argument("config: tx_duration is derived as packet_bits / tx_bandwidth");
    }
    const auto it = fields().find(key);
    if (it == fields().end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    try {
        it->second.set(config, value);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config: bad value for " + key + ": '" + value + "'");
    }
}

std::string get_config_value(const SimConfig& config, const std::string& key) {
    if (key == "tx_duration") return format_double(config.tx_duration());
    const auto it = fields().find(key);
    if (it == fields().end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    return it->second.get(config);
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, field] : fields()) k.push_back(name);
        return k;
    }();
    return keys;
}

SimConfig parse_config(const std::string& text, SimConfig base) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    base.validate();
    return base;
}

SimConfig load_config(const std::string& path, SimConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::move(base));
}

std::string format_config(const SimConfig& config) {
    std::string out;
    for (const auto& key : config_keys()) {
        out += key + " = " + get_config_value(config, key) + "\n";
    }
    return out;
}

}  // namespace unb
