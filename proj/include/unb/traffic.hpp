#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "unb/config.hpp"
#include "unb/core.hpp"
#include "unb/rng.hpp"

namespace unb {

struct Topology {
    std::vector<Point2D> bs_locations;
    std::vector<Point2D> iot_locations;
    std::vector<Point2D> interferer_locations;
    /// One length-M probability vector per interferer.
    std::vector<std::vector<double>> interferer_band_probs;

    std::size_t num_sources() const { return iot_locations.size() + interferer_locations.size(); }
    /// Source column of a device: IoT devices first, then interferers.
    Point2D source_location(std::size_t source) const {
        return source < iot_locations.size()
                   ? iot_locations[source]
                   : interferer_locations[source - iot_locations.size()];
    }
};

enum class EventKind { unb, interferer };

/// One transmission. For UNB events this is repetition rep_index of packet
/// packet_id; interferer events carry rep_index 0.
struct TransmissionEvent {
    std::size_t source_id = 0;  // index into iot_locations or interferer_locations
    EventKind kind = EventKind::unb;
    std::size_t packet_id = 0;
    int rep_index = 0;          // 0..R-1 (unb only)
    double start_time = 0.0;    // s
    double duration = 0.0;      // s
    double carrier_freq = 0.0;  // Hz over [0, M*W]
    int band = 0;               // 0-based
    double bandwidth = 0.0;     // Hz

    double end_time() const { return start_time + duration; }
};

struct TimeWindow {
    double start = 0.0;
    double end = 0.0;
};

struct TrafficTrace {
    std::vector<TransmissionEvent> events;  // sorted by start_time
    double horizon = 0.0;
    std::size_t num_packets = 0;  // UNB packets; packet ids are 0..num_packets-1
};

/// BS positions first, then the IoT and interferer processes, each from its
/// own substream of `rng`. BS positions are drawn sequentially, so the first
/// B' positions of a B-BS topology equal a B'-BS topology from the same seed.
Topology generate_topology(const SimConfig& config, Rng& rng);

/// M i.i.d. U(0,1) draws normalized by their sum.
std::vector<double> build_interferer_band_probs(int num_bands, Rng& rng);

/// Poisson packet starts per device at N/3600 per second. Each packet emits R
/// back-to-back repetitions with independent carrier frequencies. Packet
/// starts are restricted so the whole repetition train ends inside the
/// window. With band_lock, carriers are drawn inside that band only.
TrafficTrace generate_unb_traffic(const Topology& topology, const SimConfig& config, Rng& rng,
                                  std::optional<int> band_lock = std::nullopt,
                                  std::optional<TimeWindow> window = std::nullopt,
                                  std::size_t first_packet_id = 0);

/// Poisson starts at N'/3600 per second per interferer, duration T'. The band
/// of each packet follows the interferer's probability vector and the w'-wide
/// signal lies entirely inside that band.
TrafficTrace generate_interferer_traffic(const Topology& topology, const SimConfig& config,
                                         Rng& rng, std::optional<TimeWindow> window = std::nullopt);

/// Concatenates and re-sorts by start time (stable on ties).
TrafficTrace merge_traces(const TrafficTrace& a, const TrafficTrace& b);

}  // namespace unb
