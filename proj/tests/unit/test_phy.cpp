#include <stdexcept>
#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <limits>
#include <sstream>

#include "unb/assign.hpp"
#include "unb/channel.hpp"
#include "unb/phy.hpp"
#include "unb/traffic.hpp"

using namespace unb;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TransmissionEvent unb_event(double t, double phi, std::size_t source, std::size_t packet,
                            int rep = 0, double T = 2080.0 / 600.0) {
    TransmissionEvent e;
    e.kind = EventKind::unb;
    e.source_id = source;
    e.packet_id = packet;
    e.rep_index = rep;
    e.start_time = t;
    e.duration = T;
    e.carrier_freq = phi;
    e.band = band_of_frequency(phi, 200e3, 3);
    e.bandwidth = 600.0;
    return e;
}

TransmissionEvent interferer_event(double t, double phi, std::size_t source, double T = 2080.0 / 600.0) {
    TransmissionEvent e;
    e.kind = EventKind::interferer;
    e.source_id = source;
    e.start_time = t;
    e.duration = T;
    e.carrier_freq = phi;
    e.band = band_of_frequency(phi, 200e3, 3);
    e.bandwidth = 125e3;
    return e;
}

/// Random decode table with `reps` events per packet.
DecodeTable random_table(int B, int M, std::size_t packets, int reps, double p, Rng& rng) {
    std::bernoulli_distribution bit(p);
    std::uniform_int_distribution<int> band(0, M - 1);
    std::vector<std::uint64_t> masks;
    std::vector<int> bands;
    std::vector<std::size_t> ids;
    for (std::size_t k = 0; k < packets; ++k) {
        for (int r = 0; r < reps; ++r) {
            std::uint64_t m = 0;
            for (int b = 0; b < B; ++b) {
                if (bit(rng)) m |= std::uint64_t{1} << b;
            }
            masks.push_back(m);
            bands.push_back(band(rng));
            ids.push_back(k);
        }
    }
    return DecodeTable(B, M, packets, masks, bands, ids);
}

/// Topology of `n` devices around a few BSs with a quiet channel.
struct SmallWorld {
    Topology topo;
    ChannelRealization channel;
    SimConfig cfg;
};

SmallWorld small_world(std::uint64_t seed, bool fading) {
    SmallWorld w;
    w.cfg.num_bs = 3;
    w.cfg.area_side = 3000.0;
    w.cfg.mean_iot_count = 300;
    w.cfg.mean_interferer_count = 40;
    w.cfg.packets_per_hour = 20;
    w.cfg.interferer_packets_per_hour = 60;
    w.cfg.sim_horizon = 600;
    w.cfg.fading_enabled = fading;
    Rng rng(seed);
    w.topo = generate_topology(w.cfg, rng);
    w.channel = make_channel_realization(w.topo, w.cfg, rng);
    return w;
}

}  // namespace

TEST_SUITE("phy") {

TEST_CASE("time-frequency overlap uses closed intervals") {
    const auto a = unb_event(0.0, 100e3, 0, 0);
    CHECK(time_freq_overlap(a, unb_event(0.0, 100e3 + 600.0, 1, 1)));
    CHECK_FALSE(time_freq_overlap(a, unb_event(0.0, 100e3 + 1200.0, 1, 1)));
    CHECK(time_freq_overlap(a, interferer_event(0.0, 130e3, 0)));
    CHECK(time_freq_overlap(a, unb_event(a.end_time(), 100e3, 1, 1)));
    CHECK_FALSE(time_freq_overlap(a, unb_event(a.end_time() + 1e-6, 100e3, 1, 1)));
    CHECK(time_freq_overlap(a, unb_event(-a.duration, 100e3, 1, 1)));
    // Unequal durations: a long interferer covering the target.
    auto longer = interferer_event(-100.0, 100e3, 0, 200.0);
    CHECK(time_freq_overlap(a, longer));
}

TEST_CASE("spectral overlap fraction") {
    const auto a = unb_event(0.0, 100e3, 0, 0);
    CHECK(spectral_overlap_fraction(a, unb_event(0, 100e3, 1, 1)) == 1.0);
    CHECK(spectral_overlap_fraction(a, unb_event(0, 100e3 + 300.0, 1, 1)) == doctest::Approx(0.5));
    CHECK(spectral_overlap_fraction(a, unb_event(0, 100e3 + 600.0, 1, 1)) == 0.0);
    CHECK(spectral_overlap_fraction(a, interferer_event(0, 130e3, 0)) == doctest::Approx(600.0 / 125e3));
    // Interferer edge cuts the target band in half.
    CHECK(spectral_overlap_fraction(a, interferer_event(0, 100e3 + 62.5e3, 0)) ==
          doctest::Approx(300.0 / 125e3));
}

TEST_CASE("interference power examples") {
    const Eigen::MatrixXd powers = (Eigen::MatrixXd(1, 3) << -50.0, -80.0, -60.0).finished();

    std::vector<TransmissionEvent> alone = {unb_event(0, 100e3, 0, 0), unb_event(500, 100e3, 1, 1),
                                            interferer_event(0, 400e3, 0)};
    CHECK(interference_power_mw(alone, 0, 0, powers) == 0.0);

    std::vector<TransmissionEvent> one_unb = {unb_event(0, 100e3, 0, 0), unb_event(0, 100e3, 1, 1),
                                              interferer_event(0, 400e3, 0)};
    CHECK(interference_power_mw(one_unb, 0, 0, powers) == doctest::Approx(1e-8).epsilon(1e-12));

    std::vector<TransmissionEvent> one_interferer = {unb_event(0, 100e3, 0, 0),
                                                     unb_event(800, 100e3, 1, 1),
                                                     interferer_event(0, 130e3, 0)};
    CHECK(interference_power_mw(one_interferer, 0, 0, powers) ==
          doctest::Approx(1e-6 * 600.0 / 125e3).epsilon(1e-12));
    CHECK(1e-6 * 600.0 / 125e3 == doctest::Approx(4.8e-9));
}

TEST_CASE("own repetitions do not interfere, other devices do") {
    const double T = 2080.0 / 600.0;
    const Eigen::MatrixXd powers = Eigen::MatrixXd::Constant(1, 3, -70.0);
    std::vector<TransmissionEvent> ev = {unb_event(0, 100e3, 0, 0, 0), unb_event(T, 100e3, 0, 0, 1),
                                         unb_event(T, 100e3, 1, 1, 0)};
    // Event 0 touches its own repetition (excluded) and the other device's packet.
    CHECK(interference_power_mw(ev, 0, 0, powers) == doctest::Approx(1e-7));
}

TEST_CASE("sinr examples") {
    CHECK(sinr_db(-46, -146, 0.0) == doctest::Approx(100.0));
    CHECK(sinr_db(-46, -146, std::pow(10.0, -4.6)) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(std::abs(sinr_db(-46, -146, std::pow(10.0, -14.6)) - (100.0 - 10.0 * std::log10(2.0))) < 1e-9);
    CHECK(sinr_db(-46, -146, std::pow(10.0, -14.6)) == doctest::Approx(96.99).epsilon(1e-4));
}

TEST_CASE("closed-form link: one device 1 km from one BS") {
    SimConfig cfg;
    cfg.num_bs = 1;
    cfg.shadowing_std = 0.0;
    cfg.fading_enabled = false;
    Topology topo;
    topo.bs_locations = {{0, 0}};
    topo.iot_locations = {{1000, 0}};
    Rng rng(1);
    const auto ch = make_channel_realization(topo, cfg, rng);
    TrafficTrace trace;
    trace.events = {unb_event(5, 100e3, 0, 0)};
    trace.num_packets = 1;
    trace.horizon = 3600;
    const auto sinr = compute_sinr_table(trace, ch, cfg, rng);
    CHECK(sinr.at(0, 0) == doctest::Approx(14.0 - 105.0 + 146.0));
    const auto d = threshold_sinr(sinr, 10.0);
    CHECK(d.decoded(0, 0));
}

TEST_CASE("degenerate thresholds") {
    auto w = small_world(3, true);
    Rng rng(4);
    const auto trace = merge_traces(generate_unb_traffic(w.topo, w.cfg, rng),
                                    generate_interferer_traffic(w.topo, w.cfg, rng));
    const auto sinr = compute_sinr_table(trace, w.channel, w.cfg, rng);
    REQUIRE(sinr.num_events() > 0);
    const auto all = threshold_sinr(sinr, -kInf);
    const auto none = threshold_sinr(sinr, kInf);
    for (std::size_t n = 0; n < all.num_events(); ++n) {
        CHECK(all.mask(n) == 0b111);
        CHECK(none.mask(n) == 0);
    }
}

TEST_CASE("bulk SINR matches the per-event interference sum") {
    auto w = small_world(5, false);
    Rng rng(6);
    const auto trace = merge_traces(generate_unb_traffic(w.topo, w.cfg, rng),
                                    generate_interferer_traffic(w.topo, w.cfg, rng));
    const auto& ev = trace.events;
    Eigen::MatrixXd powers(3, static_cast<Eigen::Index>(ev.size()));
    for (std::size_t e = 0; e < ev.size(); ++e) {
        const auto col = static_cast<Eigen::Index>(w.channel.source_column(ev[e].kind, ev[e].source_id));
        const double tx = ev[e].kind == EventKind::unb ? w.cfg.tx_power_iot : w.cfg.tx_power_interferer;
        for (int b = 0; b < 3; ++b) {
            powers(b, static_cast<Eigen::Index>(e)) =
                tx + w.channel.pathloss_db(b, col) + w.channel.shadowing_db(b, col);
        }
    }
    const auto sinr = compute_sinr_table(trace, w.channel, w.cfg, rng);
    std::size_t row = 0;
    std::size_t with_interference = 0;
    for (std::size_t n = 0; n < ev.size(); ++n) {
        if (ev[n].kind != EventKind::unb) continue;
        for (int b = 0; b < 3; ++b) {
            const double i_mw = interference_power_mw(ev, n, b, powers);
            if (i_mw > 0) ++with_interference;
            const double expected = sinr_db(powers(b, static_cast<Eigen::Index>(n)), w.cfg.noise_power, i_mw);
            CHECK(sinr.at(row, b) == doctest::Approx(expected).epsilon(1e-10));
        }
        CHECK(sinr.event_band[row] == ev[n].band);
        CHECK(sinr.event_packet[row] == ev[n].packet_id);
        ++row;
    }
    CHECK(row == sinr.num_events());
    CHECK(with_interference > 0);
}

TEST_CASE("decode table groups R events per packet and thresholding is monotone") {
    auto w = small_world(7, true);
    Rng rng(8);
    const auto trace = merge_traces(generate_unb_traffic(w.topo, w.cfg, rng),
                                    generate_interferer_traffic(w.topo, w.cfg, rng));
    const auto sinr = compute_sinr_table(trace, w.channel, w.cfg, rng);
    const auto table = threshold_sinr(sinr, 10.0);
    for (std::size_t p = 0; p < table.num_packets(); ++p) CHECK(table.packet_events(p).size() == 3);
    DecodeTable previous = threshold_sinr(sinr, -20.0);
    for (double tau = -19.0; tau <= 40.0; tau += 1.0) {
        const auto next = threshold_sinr(sinr, tau);
        for (std::size_t n = 0; n < next.num_events(); ++n) {
            CHECK((next.mask(n) & ~previous.mask(n)) == 0);
        }
        previous = next;
    }
}

TEST_CASE("packet_decoded") {
    // Packet 0: events 0,1 on bands 0,1. Packet 1: event 2 on band 2.
    const DecodeTable zero(2, 3, 2, {0, 0, 0}, {0, 1, 2}, {0, 0, 1});
    const auto x = Assignment::from_bands({1, 2}, 3);
    CHECK_FALSE(packet_decoded(x, 0, zero));

    const DecodeTable one(2, 3, 2, {0, 0b01, 0}, {0, 1, 2}, {0, 0, 1});
    CHECK(packet_decoded(x, 0, one));  // BS 0 listens on band 1 and decodes event 1
    CHECK_FALSE(packet_decoded(x, 1, one));
    CHECK_FALSE(packet_decoded(Assignment::from_bands({0, 1}, 3), 0, one));  // BS 1 on band 1 missed it
    CHECK_THROWS(packet_decoded(x, 2, one));
}

TEST_CASE("metrics examples") {
    Rng rng(9);
    const DecodeTable ones = random_table(4, 3, 50, 3, 1.0, rng);
    const DecodeTable zeros = random_table(4, 3, 50, 3, 0.0, rng);
    for (int i = 0; i < 10; ++i) {
        // Every band needs a listener for an all-ones table to be fully decoded.
        std::vector<int> cover = {0, 1, 2, i % 3};
        std::shuffle(cover.begin(), cover.end(), rng);
        const auto x = Assignment::from_bands(cover, 3);
        CHECK(metrics(x, ones).pdp == 1.0);
        CHECK(metrics(x, ones).transmission_rate == 1.0);
        CHECK(metrics(x, zeros).pdp == 0.0);
        CHECK(metrics(x, zeros).transmission_rate == 0.0);
    }
    const DecodeTable empty(2, 3, 0, {}, {}, {});
    CHECK_THROWS(metrics(Assignment::from_bands({0, 0}, 3), empty));
    Assignment bad(4, 3);
    CHECK_THROWS(metrics(bad, ones));
}

TEST_CASE("metrics agree with direct recounts and the compressed evaluator") {
    Rng rng(10);
    for (int trial = 0; trial < 30; ++trial) {
        const int B = 1 + trial % 5;
        const int M = 1 + trial % 3;
        const auto table = random_table(B, M, 40, 3, 0.3, rng);
        const MetricsEvaluator eval(table);
        for_each_assignment(B, M, [&](std::span<const int> bands) {
            const auto x = Assignment::from_bands({bands.begin(), bands.end()}, M);
            const auto direct = metrics(x, table);
            std::size_t pk = 0, ev = 0;
            for (std::size_t p = 0; p < table.num_packets(); ++p) pk += packet_decoded(x, p, table);
            for (std::size_t n = 0; n < table.num_events(); ++n) {
                bool hit = false;
                for (int b = 0; b < B; ++b) hit = hit || (x(b, table.band(n)) && table.decoded(b, n));
                ev += hit;
            }
            CHECK(direct.pdp == static_cast<double>(pk) / 40.0);
            CHECK(direct.transmission_rate == static_cast<double>(ev) / 120.0);
            CHECK(direct.pdp >= direct.transmission_rate);
            const auto fast = eval.evaluate(x);
            CHECK(fast.pdp == direct.pdp);
            CHECK(fast.transmission_rate == direct.transmission_rate);
        });
    }
}

TEST_CASE("pdp is monotone in decode bits") {
    Rng rng(11);
    auto table = random_table(4, 3, 60, 3, 0.2, rng);
    std::uniform_int_distribution<std::size_t> pick(0, table.num_events() - 1);
    std::uniform_int_distribution<int> pick_bs(0, 3);
    for (int step = 0; step < 50; ++step) {
        std::vector<std::uint64_t> masks;
        std::vector<int> bands;
        std::vector<std::size_t> ids;
        for (std::size_t n = 0; n < table.num_events(); ++n) {
            masks.push_back(table.mask(n));
            bands.push_back(table.band(n));
            ids.push_back(table.packet(n));
        }
        masks[pick(rng)] |= std::uint64_t{1} << pick_bs(rng);
        DecodeTable flipped(4, 3, table.num_packets(), masks, bands, ids);
        for (int i = 0; i < 5; ++i) {
            const auto x = random_assignment(4, 3, rng);
            CHECK(metrics(x, flipped).pdp >= metrics(x, table).pdp);
        }
        table = flipped;
    }
}

TEST_CASE("decode table file round trip") {
    Rng rng(12);
    const auto table = random_table(5, 3, 20, 3, 0.4, rng);
    std::stringstream buf;
    write_decode_table(buf, table);
    const std::string text = buf.str();
    CHECK(text.rfind("event,packet,band,bs1,bs2,bs3,bs4,bs5\n", 0) == 0);
    CHECK(read_decode_table(buf, 3) == table);

    std::istringstream bad_bits("event,packet,band,bs1\n0,0,1,2\n");
    CHECK_THROWS(read_decode_table(bad_bits, 3));
    std::istringstream bad_band("event,packet,band,bs1\n0,0,4,1\n");
    CHECK_THROWS(read_decode_table(bad_band, 3));
    std::istringstream bad_header("id,packet,band,bs1\n");
    CHECK_THROWS(read_decode_table(bad_header, 3));
}

}
