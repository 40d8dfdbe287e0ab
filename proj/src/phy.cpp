#include "unb/phy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include "unb/text.hpp"

namespace unb {

namespace {

double freq_intersection(const TransmissionEvent& a, const TransmissionEvent& b) {
    const double lo = std::max(a.carrier_freq - a.bandwidth / 2, b.carrier_freq - b.bandwidth / 2);
    const double hi = std::min(a.carrier_freq + a.bandwidth / 2, b.carrier_freq + b.bandwidth / 2);
    return hi - lo;
}

bool same_packet(const TransmissionEvent& a, const TransmissionEvent& b) {
    return a.kind == EventKind::unb && b.kind == EventKind::unb && a.packet_id == b.packet_id &&
           a.source_id == b.source_id;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

}  // namespace

bool time_freq_overlap(const TransmissionEvent& a, const TransmissionEvent& b) {
    const bool time = a.start_time <= b.end_time() && b.start_time <= a.end_time();
    return time && freq_intersection(a, b) >= 0.0;
}

double spectral_overlap_fraction(const TransmissionEvent& target,
                                 const TransmissionEvent& interferer) {
    const double width = freq_intersection(target, interferer);
    if (width <= 0.0) return 0.0;
    return std::min(width, interferer.bandwidth) / interferer.bandwidth;
}

double interference_power_mw(std::span<const TransmissionEvent> events, std::size_t target,
                             int bs, const Eigen::MatrixXd& powers_dbm) {
    const auto& t = events[target];
    double total = 0.0;
    for (std::size_t e = 0; e < events.size(); ++e) {
        if (e == target || same_packet(t, events[e]) || !time_freq_overlap(t, events[e])) continue;
        total += dbm_to_mw(powers_dbm(bs, static_cast<Eigen::Index>(e))) *
                 spectral_overlap_fraction(t, events[e]);
    }
    return total;
}

double sinr_db(double signal_dbm, double noise_dbm, double interference_mw) {
    return 10.0 * std::log10(dbm_to_mw(signal_dbm) / (dbm_to_mw(noise_dbm) + interference_mw));
}

SinrTable compute_sinr_table(const TrafficTrace& trace, const ChannelRealization& channel,
                             const SimConfig& config, Rng& rng) {
    const int num_bs = static_cast<int>(channel.pathloss_db.rows());
    const auto& events = trace.events;
    const std::size_t num_events = events.size();
    const auto nb = static_cast<std::size_t>(num_bs);

    // Received power per (event, BS), linear and dB, fading included.
    const std::uint64_t base = rng();
    std::vector<double> power_dbm(num_events * nb);
    for (int b = 0; b < num_bs; ++b) {
        Rng fading = make_rng(base, {static_cast<std::uint64_t>(b)});
        for (std::size_t e = 0; e < num_events; ++e) {
            const auto& ev = events[e];
            const auto col = static_cast<Eigen::Index>(channel.source_column(ev.kind, ev.source_id));
            const double tx = ev.kind == EventKind::unb ? config.tx_power_iot
                                                        : config.tx_power_interferer;
            power_dbm[e * nb + static_cast<std::size_t>(b)] = received_power_dbm(
                tx, channel.pathloss_db(b, col), channel.shadowing_db(b, col),
                config.fading_enabled ? sample_fading_db(config.fading_scale, fading) : 0.0);
        }
    }
    std::vector<double> power_mw(power_dbm.size());
    std::transform(power_dbm.begin(), power_dbm.end(), power_mw.begin(), dbm_to_mw);

    Rng noise_rng = make_rng(base, {0x4E015Eu});
    std::normal_distribution<double> jitter(0.0, 1.0);

    std::vector<double> starts(num_events);
    double max_duration = 0.0;
    for (std::size_t e = 0; e < num_events; ++e) {
        starts[e] = events[e].start_time;
        max_duration = std::max(max_duration, events[e].duration);
    }

    SinrTable table;
    table.num_bs = num_bs;
    table.num_bands = config.num_bands;
    table.num_packets = trace.num_packets;
    std::vector<double> interference(nb);
    for (std::size_t n = 0; n < num_events; ++n) {
        const auto& t = events[n];
        if (t.kind != EventKind::unb) continue;
        std::fill(interference.begin(), interference.end(), 0.0);
        const auto first = static_cast<std::size_t>(
            std::lower_bound(starts.begin(), starts.end(), t.start_time - max_duration) -
            starts.begin());
        for (std::size_t e = first; e < num_events && starts[e] <= t.end_time(); ++e) {
            if (e == n || same_packet(t, events[e]) || !time_freq_overlap(t, events[e])) continue;
            const double frac = spectral_overlap_fraction(t, events[e]);
            if (frac <= 0.0) continue;
            const double* p = &power_mw[e * nb];
            for (std::size_t b = 0; b < nb; ++b) interference[b] += p[b] * frac;
        }
        const double noise_dbm =
            config.noise_power +
            (config.noise_jitter_db > 0.0 ? config.noise_jitter_db * jitter(noise_rng) : 0.0);
        for (std::size_t b = 0; b < nb; ++b) {
            table.sinr.push_back(sinr_db(power_dbm[n * nb + b], noise_dbm, interference[b]));
        }
        table.event_band.push_back(t.band);
        table.event_packet.push_back(t.packet_id);
    }
    return table;
}

DecodeTable::DecodeTable(int num_bs, int num_bands, std::size_t num_packets,
                         std::vector<std::uint64_t> decode_mask, std::vector<int> event_band,
                         std::vector<std::size_t> event_packet)
    : num_bs_(num_bs),
      num_bands_(num_bands),
      num_packets_(num_packets),
      decode_mask_(std::move(decode_mask)),
      event_band_(std::move(event_band)),
      event_packet_(std::move(event_packet)) {
    if (num_bs < 1 || num_bs > 64) throw std::invalid_argument("DecodeTable: need 1 <= B <= 64");
    if (decode_mask_.size() != event_band_.size() || decode_mask_.size() != event_packet_.size()) {
        throw std::invalid_argument("DecodeTable: column lengths differ");
    }
    packet_offsets_.assign(num_packets_ + 1, 0);
    for (std::size_t n = 0; n < event_packet_.size(); ++n) {
        if (event_packet_[n] >= num_packets_) {
            throw std::invalid_argument("DecodeTable: packet id out of range");
        }
        if (event_band_[n] < 0 || event_band_[n] >= num_bands_) {
            throw std::invalid_argument("DecodeTable: band out of range");
        }
        ++packet_offsets_[event_packet_[n] + 1];
    }
    for (std::size_t p = 0; p < num_packets_; ++p) packet_offsets_[p + 1] += packet_offsets_[p];
    packet_events_.resize(event_packet_.size());
    auto cursor = packet_offsets_;
    for (std::size_t n = 0; n < event_packet_.size(); ++n) {
        packet_events_[cursor[event_packet_[n]]++] = n;
    }
}

std::span<const std::size_t> DecodeTable::packet_events(std::size_t packet_id) const {
    if (packet_id >= num_packets_) throw std::out_of_range("DecodeTable: unknown packet id");
    return std::span<const std::size_t>(packet_events_)
        .subspan(packet_offsets_[packet_id], packet_offsets_[packet_id + 1] - packet_offsets_[packet_id]);
}

DecodeTable threshold_sinr(const SinrTable& sinr, double tau_db) {
    std::vector<std::uint64_t> masks(sinr.num_events(), 0);
    for (std::size_t n = 0; n < sinr.num_events(); ++n) {
        for (int b = 0; b < sinr.num_bs; ++b) {
            if (sinr.at(n, b) >= tau_db) masks[n] |= std::uint64_t{1} << b;
        }
    }
    return DecodeTable(sinr.num_bs, sinr.num_bands, sinr.num_packets, std::move(masks),
                       sinr.event_band, sinr.event_packet);
}

DecodeTable build_decode_table(const TrafficTrace& trace, const ChannelRealization& channel,
                               const SimConfig& config, Rng& rng) {
    return threshold_sinr(compute_sinr_table(trace, channel, config, rng), config.sinr_threshold);
}

bool packet_decoded(const Assignment& x, std::size_t packet_id, const DecodeTable& table) {
    for (std::size_t n : table.packet_events(packet_id)) {
        for (int b = 0; b < table.num_bs(); ++b) {
            if (x(b, table.band(n)) && table.decoded(b, n)) return true;
        }
    }
    return false;
}

Metrics metrics(const Assignment& x, const DecodeTable& table) {
    if (table.num_events() == 0 || table.num_packets() == 0) {
        throw std::invalid_argument("metrics: empty decode table");
    }
    if (auto bad = validate_assignment(x, table.num_bs(), table.num_bands())) {
        throw std::invalid_argument("metrics: invalid assignment at row " + std::to_string(*bad));
    }
    const auto masks = x.band_masks();
    std::vector<std::uint8_t> packet_ok(table.num_packets(), 0);
    std::size_t decoded_events = 0;
    for (std::size_t n = 0; n < table.num_events(); ++n) {
        if (table.mask(n) & masks[static_cast<std::size_t>(table.band(n))]) {
            ++decoded_events;
            packet_ok[table.packet(n)] = 1;
        }
    }
    const auto decoded_packets =
        static_cast<std::size_t>(std::count(packet_ok.begin(), packet_ok.end(), 1));
    return Metrics{static_cast<double>(decoded_packets) / static_cast<double>(table.num_packets()),
                   static_cast<double>(decoded_events) / static_cast<double>(table.num_events())};
}

MetricsEvaluator::MetricsEvaluator(const DecodeTable& table)
    : num_events_(table.num_events()), num_packets_(table.num_packets()) {
    if (num_events_ == 0 || num_packets_ == 0) {
        throw std::invalid_argument("MetricsEvaluator: empty decode table");
    }
    std::map<std::pair<int, std::uint64_t>, std::size_t> event_counts;
    std::map<std::vector<std::pair<int, std::uint64_t>>, std::size_t> packet_counts;
    for (std::size_t n = 0; n < num_events_; ++n) {
        if (table.mask(n) != 0) ++event_counts[{table.band(n), table.mask(n)}];
    }
    for (std::size_t p = 0; p < num_packets_; ++p) {
        std::vector<std::pair<int, std::uint64_t>> sig;
        for (std::size_t n : table.packet_events(p)) {
            if (table.mask(n) != 0) sig.emplace_back(table.band(n), table.mask(n));
        }
        if (sig.empty()) continue;
        std::sort(sig.begin(), sig.end());
        sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
        ++packet_counts[std::move(sig)];
    }
    for (const auto& [key, count] : event_counts) events_.push_back({key.first, key.second, count});
    for (auto& [key, count] : packet_counts) packets_.push_back({key, count});
}

Metrics MetricsEvaluator::evaluate(std::span<const std::uint64_t> band_masks) const {
    std::size_t decoded_events = 0;
    for (const auto& k : events_) {
        if (k.mask & band_masks[static_cast<std::size_t>(k.band)]) decoded_events += k.count;
    }
    std::size_t decoded_packets = 0;
    for (const auto& k : packets_) {
        for (const auto& [band, mask] : k.reps) {
            if (mask & band_masks[static_cast<std::size_t>(band)]) {
                decoded_packets += k.count;
                break;
            }
        }
    }
    return Metrics{static_cast<double>(decoded_packets) / static_cast<double>(num_packets_),
                   static_cast<double>(decoded_events) / static_cast<double>(num_events_)};
}

void write_decode_table(std::ostream& out, const DecodeTable& table) {
    out << "event,packet,band";
    for (int b = 0; b < table.num_bs(); ++b) out << ",bs" << (b + 1);
    out << '\n';
    for (std::size_t n = 0; n < table.num_events(); ++n) {
        out << n << ',' << table.packet(n) << ',' << (table.band(n) + 1);
        for (int b = 0; b < table.num_bs(); ++b) out << ',' << (table.decoded(b, n) ? 1 : 0);
        out << '\n';
    }
}

DecodeTable read_decode_table(std::istream& in, int num_bands) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("decode table: missing header");
    const auto header = split(trim(line), ',');
    if (header.size() < 4 || header[0] != "event" || header[1] != "packet" || header[2] != "band") {
        throw std::runtime_error("decode table: bad header");
    }
    const int num_bs = static_cast<int>(header.size()) - 3;
    std::vector<std::uint64_t> masks;
    std::vector<int> bands;
    std::vector<std::size_t> packets;
    std::size_t num_packets = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() != header.size()) {
            throw std::runtime_error("decode table line " + std::to_string(line_no) +
                                     ": wrong column count");
        }
        if (std::stoull(cols[0]) != masks.size()) {
            throw std::runtime_error("decode table line " + std::to_string(line_no) +
                                     ": events must be listed in order");
        }
        const std::size_t packet = std::stoull(cols[1]);
        num_packets = std::max(num_packets, packet + 1);
        packets.push_back(packet);
        bands.push_back(std::stoi(cols[2]) - 1);
        std::uint64_t mask = 0;
        for (int b = 0; b < num_bs; ++b) {
            const auto& bit = cols[static_cast<std::size_t>(b) + 3];
            if (bit != "0" && bit != "1") {
                throw std::runtime_error("decode table line " + std::to_string(line_no) +
                                         ": decode bits must be 0 or 1");
            }
            if (bit == "1") mask |= std::uint64_t{1} << b;
        }
        masks.push_back(mask);
    }
    return DecodeTable(num_bs, num_bands, num_packets, std::move(masks), std::move(bands),
                       std::move(packets));
}

}  // namespace unb
