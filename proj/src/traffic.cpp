#include "unb/traffic.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace unb {

namespace {

std::vector<Point2D> uniform_points(std::size_t count, double side, Rng& rng) {
    std::uniform_real_distribution<double> coord(0.0, side);
    std::vector<Point2D> pts(count);
    for (auto& p : pts) {
        p.x = coord(rng);
        p.y = coord(rng);
    }
    return pts;
}

std::size_t poisson_count(double mean, Rng& rng) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<long long> dist(mean);
    return static_cast<std::size_t>(dist(rng));
}

void sort_events(std::vector<TransmissionEvent>& events) {
    std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
        return std::tie(a.start_time, a.kind, a.source_id, a.packet_id, a.rep_index) <
               std::tie(b.start_time, b.kind, b.source_id, b.packet_id, b.rep_index);
    });
}

TimeWindow resolve(const SimConfig& config, std::optional<TimeWindow> window) {
    const TimeWindow w = window.value_or(TimeWindow{0.0, config.sim_horizon});
    if (!(w.end >= w.start)) throw std::invalid_argument("traffic: window end before start");
    return w;
}

/// Sorted start times of a homogeneous Poisson process on [lo, hi].
std::vector<double> poisson_starts(double rate_per_s, double lo, double hi, Rng& rng) {
    std::vector<double> starts;
    if (hi <= lo || rate_per_s <= 0.0) return starts;
    starts.resize(poisson_count(rate_per_s * (hi - lo), rng));
    std::uniform_real_distribution<double> when(lo, hi);
    for (auto& t : starts) t = when(rng);
    std::sort(starts.begin(), starts.end());
    return starts;
}

}  // namespace

std::vector<double> build_interferer_band_probs(int num_bands, Rng& rng) {
    if (num_bands < 1) throw std::invalid_argument("build_interferer_band_probs: M < 1");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> probs(static_cast<std::size_t>(num_bands));
    double total = 0.0;
    while (total <= 0.0) {
        total = 0.0;
        for (auto& p : probs) {
            p = u(rng);
            total += p;
        }
    }
    for (auto& p : probs) p /= total;
    return probs;
}

Topology generate_topology(const SimConfig& config, Rng& rng) {
    config.validate();
    Rng bs_rng = split_rng(rng);
    Rng iot_rng = split_rng(rng);
    Rng interferer_rng = split_rng(rng);

    Topology topo;
    topo.bs_locations =
        uniform_points(static_cast<std::size_t>(config.num_bs), config.area_side, bs_rng);
    topo.iot_locations =
        uniform_points(poisson_count(config.mean_iot_count, iot_rng), config.area_side, iot_rng);
    topo.interferer_locations = uniform_points(
        poisson_count(config.mean_interferer_count, interferer_rng), config.area_side,
        interferer_rng);
    topo.interferer_band_probs.reserve(topo.interferer_locations.size());
    for (std::size_t i = 0; i < topo.interferer_locations.size(); ++i) {
        topo.interferer_band_probs.push_back(
            build_interferer_band_probs(config.num_bands, interferer_rng));
    }
    return topo;
}

TrafficTrace generate_unb_traffic(const Topology& topology, const SimConfig& config, Rng& rng,
                                  std::optional<int> band_lock, std::optional<TimeWindow> window,
                                  std::size_t first_packet_id) {
    const TimeWindow w = resolve(config, window);
    const double T = config.tx_duration();
    const double half = config.tx_bandwidth / 2.0;
    const double W = config.band_width;
    const int M = config.num_bands;
    if (band_lock && (*band_lock < 0 || *band_lock >= M)) {
        throw std::out_of_range("generate_unb_traffic: band_lock out of range");
    }

    // (start, device) for every packet whose repetition train fits the window.
    std::vector<std::pair<double, std::size_t>> packets;
    const double rate = config.packets_per_hour / 3600.0;
    const double last_start = w.end - config.repetitions * T;
    for (std::size_t dev = 0; dev < topology.iot_locations.size(); ++dev) {
        for (double t : poisson_starts(rate, w.start, last_start, rng)) packets.emplace_back(t, dev);
    }
    std::sort(packets.begin(), packets.end());

    const double lo = band_lock ? *band_lock * W + half : half;
    const double hi = band_lock ? (*band_lock + 1) * W - half : M * W - half;
    std::uniform_real_distribution<double> carrier(lo, hi);

    TrafficTrace trace;
    trace.horizon = w.end;
    trace.num_packets = packets.size();
    trace.events.reserve(packets.size() * static_cast<std::size_t>(config.repetitions));
    for (std::size_t p = 0; p < packets.size(); ++p) {
        for (int r = 0; r < config.repetitions; ++r) {
            TransmissionEvent e;
            e.source_id = packets[p].second;
            e.kind = EventKind::unb;
            e.packet_id = first_packet_id + p;
            e.rep_index = r;
            e.start_time = packets[p].first + r * T;
            e.duration = T;
            e.carrier_freq = carrier(rng);
            e.band = band_lock ? *band_lock : band_of_frequency(e.carrier_freq, W, M);
            e.bandwidth = config.tx_bandwidth;
            trace.events.push_back(e);
        }
    }
    sort_events(trace.events);
    return trace;
}

TrafficTrace generate_interferer_traffic(const Topology& topology, const SimConfig& config,
                                         Rng& rng, std::optional<TimeWindow> window) {
    if (config.interferer_bandwidth > config.band_width) {
        throw std::invalid_argument("generate_interferer_traffic: w' > W");
    }
    const TimeWindow w = resolve(config, window);
    const double duration = config.interferer_tx_duration();
    const double half = config.interferer_bandwidth / 2.0;
    const double W = config.band_width;
    const double rate = config.interferer_packets_per_hour / 3600.0;

    TrafficTrace trace;
    trace.horizon = w.end;
    std::size_t packet = 0;
    for (std::size_t i = 0; i < topology.interferer_locations.size(); ++i) {
        const auto& probs = topology.interferer_band_probs.at(i);
        std::discrete_distribution<int> pick_band(probs.begin(), probs.end());
        for (double t : poisson_starts(rate, w.start, w.end - duration, rng)) {
            const int band = pick_band(rng);
            std::uniform_real_distribution<double> center(band * W + half, (band + 1) * W - half);
            TransmissionEvent e;
            e.source_id = i;
            e.kind = EventKind::interferer;
            e.packet_id = packet++;
            e.start_time = t;
            e.duration = duration;
            e.carrier_freq = center(rng);
            e.band = band;
            e.bandwidth = config.interferer_bandwidth;
            trace.events.push_back(e);
        }
    }
    sort_events(trace.events);
    return trace;
}

TrafficTrace merge_traces(const TrafficTrace& a, const TrafficTrace& b) {
    TrafficTrace out;
    out.horizon = std::max(a.horizon, b.horizon);
    out.num_packets = a.num_packets + b.num_packets;
    out.events.reserve(a.events.size() + b.events.size());
    out.events.insert(out.events.end(), a.events.begin(), a.events.end());
    out.events.insert(out.events.end(), b.events.begin(), b.events.end());
    sort_events(out.events);
    return out;
}

}  // namespace unb
