#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "unb/channel.hpp"
#include "unb/config.hpp"
#include "unb/core.hpp"
#include "unb/rng.hpp"
#include "unb/traffic.hpp"

namespace unb {

/// True iff the closed frequency supports and closed time intervals of the
/// two events intersect.
bool time_freq_overlap(const TransmissionEvent& a, const TransmissionEvent& b);

/// Share of `interferer`'s power that falls inside `target`'s receive band,
/// assuming a flat spectrum over the interferer's bandwidth.
double spectral_overlap_fraction(const TransmissionEvent& target,
                                 const TransmissionEvent& interferer);

/// Aggregate interference (mW) seen by events[target] at BS `bs`. powers_dbm
/// is B x events. Repetitions of the target's own packet are excluded.
double interference_power_mw(std::span<const TransmissionEvent> events, std::size_t target,
                             int bs, const Eigen::MatrixXd& powers_dbm);

/// Signal over noise-plus-interference, summed in linear power.
double sinr_db(double signal_dbm, double noise_dbm, double interference_mw);

/// Per-(UNB event, BS) SINR of one traffic trace. Thresholding it yields the
/// decode table for any tau without redrawing randomness.
struct SinrTable {
    int num_bs = 0;
    int num_bands = 0;
    std::size_t num_packets = 0;
    std::vector<double> sinr;  // events x B, row-major
    std::vector<int> event_band;
    std::vector<std::size_t> event_packet;

    std::size_t num_events() const { return event_band.size(); }
    double at(std::size_t event, int b) const {
        return sinr[event * static_cast<std::size_t>(num_bs) + static_cast<std::size_t>(b)];
    }
};

/// Draws a fading term for every (BS, event) pair, UNB and interferer alike,
/// and evaluates the SINR of every UNB event at every BS. Each BS consumes its
/// own substream of `rng`.
SinrTable compute_sinr_table(const TrafficTrace& trace, const ChannelRealization& channel,
                             const SimConfig& config, Rng& rng);

/// Assignment-independent decode indicators: bit b of decode_mask[n] is set
/// iff UNB event n reaches SINR >= tau at BS b.
class DecodeTable {
public:
    DecodeTable() = default;
    DecodeTable(int num_bs, int num_bands, std::size_t num_packets,
                std::vector<std::uint64_t> decode_mask, std::vector<int> event_band,
                std::vector<std::size_t> event_packet);

    int num_bs() const { return num_bs_; }
    int num_bands() const { return num_bands_; }
    std::size_t num_events() const { return decode_mask_.size(); }
    std::size_t num_packets() const { return num_packets_; }

    bool decoded(int b, std::size_t event) const { return (decode_mask_[event] >> b) & 1u; }
    std::uint64_t mask(std::size_t event) const { return decode_mask_[event]; }
    int band(std::size_t event) const { return event_band_[event]; }
    std::size_t packet(std::size_t event) const { return event_packet_[event]; }
    /// Event indices of one packet.
    std::span<const std::size_t> packet_events(std::size_t packet_id) const;

    bool operator==(const DecodeTable&) const = default;

private:
    int num_bs_ = 0;
    int num_bands_ = 0;
    std::size_t num_packets_ = 0;
    std::vector<std::uint64_t> decode_mask_;
    std::vector<int> event_band_;
    std::vector<std::size_t> event_packet_;
    std::vector<std::size_t> packet_offsets_;  // CSR over packet_events_
    std::vector<std::size_t> packet_events_;
};

DecodeTable threshold_sinr(const SinrTable& sinr, double tau_db);

DecodeTable build_decode_table(const TrafficTrace& trace, const ChannelRealization& channel,
                               const SimConfig& config, Rng& rng);

/// Some repetition of the packet is decoded by a BS listening on its band.
bool packet_decoded(const Assignment& x, std::size_t packet_id, const DecodeTable& table);

struct Metrics {
    double pdp = 0.0;
    double transmission_rate = 0.0;
};

/// Direct event-by-event evaluation.
Metrics metrics(const Assignment& x, const DecodeTable& table);

/// Compresses a decode table into counts of distinct (band, mask) events and
/// distinct packet signatures, so one assignment costs O(distinct keys)
/// instead of O(events). Gives the same counts as metrics().
class MetricsEvaluator {
public:
    explicit MetricsEvaluator(const DecodeTable& table);

    Metrics evaluate(std::span<const std::uint64_t> band_masks) const;
    Metrics evaluate(const Assignment& x) const { return evaluate(x.band_masks()); }

    std::size_t num_events() const { return num_events_; }
    std::size_t num_packets() const { return num_packets_; }

private:
    struct EventKey {
        int band;
        std::uint64_t mask;
        std::size_t count;
    };
    struct PacketKey {
        std::vector<std::pair<int, std::uint64_t>> reps;
        std::size_t count;
    };
    std::vector<EventKey> events_;
    std::vector<PacketKey> packets_;
    std::size_t num_events_ = 0;
    std::size_t num_packets_ = 0;
};

/// CSV: event,packet,band,bs1..bsB with 0-based ids and 1-based bands.
void write_decode_table(std::ostream& out, const DecodeTable& table);
DecodeTable read_decode_table(std::istream& in, int num_bands);

}  // namespace unb
