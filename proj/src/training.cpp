#include "unb/training.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "unb/text.hpp"

namespace unb {

void TrainingRecords::add(std::span<const int> z, std::uint64_t y) {
    if (z.size() != static_cast<std::size_t>(num_bs_)) {
        throw std::invalid_argument("TrainingRecords::add: z must have one band per BS");
    }
    z_.insert(z_.end(), z.begin(), z.end());
    y_.push_back(y);
}

void TrainingRecords::add_uniform(int band, std::uint64_t y) {
    z_.insert(z_.end(), static_cast<std::size_t>(num_bs_), band);
    y_.push_back(y);
}

CellEstimates estimate_S(const TrainingRecords& records, int num_bands) {
    const int B = records.num_bs();
    const auto cells = static_cast<std::size_t>(B) * static_cast<std::size_t>(num_bands);
    CellEstimates out{std::vector<double>(cells, 0.0), std::vector<std::int64_t>(cells, 0)};
    std::vector<std::int64_t> hits(cells, 0);
    for (std::size_t l = 0; l < records.size(); ++l) {
        for (int b = 0; b < B; ++b) {
            const int m = records.z(l, b);
            if (m < 0 || m >= num_bands) throw std::out_of_range("estimate_S: band out of range");
            const auto i = static_cast<std::size_t>(b * num_bands + m);
            ++out.count[i];
            hits[i] += records.y(l, b);
        }
    }
    for (std::size_t i = 0; i < cells; ++i) {
        if (out.count[i] > 0) {
            out.value[i] = static_cast<double>(hits[i]) / static_cast<double>(out.count[i]);
        }
    }
    return out;
}

CellEstimates estimate_R(const TrainingRecords& records, int num_bands) {
    const auto B = static_cast<std::size_t>(records.num_bs());
    const auto cells = B * B * static_cast<std::size_t>(num_bands);
    CellEstimates out{std::vector<double>(cells, 0.0), std::vector<std::int64_t>(cells, 0)};
    std::vector<std::int64_t> hits(cells, 0);
    auto index = [B](std::size_t b, std::size_t k, std::size_t m) { return (m * B + b) * B + k; };
    for (std::size_t l = 0; l < records.size(); ++l) {
        for (std::size_t b = 0; b < B; ++b) {
            const int m = records.z(l, static_cast<int>(b));
            if (m < 0 || m >= num_bands) throw std::out_of_range("estimate_R: band out of range");
            const bool yb = records.y(l, static_cast<int>(b));
            for (std::size_t k = b; k < B; ++k) {
                if (records.z(l, static_cast<int>(k)) != m) continue;
                const auto i = index(b, k, static_cast<std::size_t>(m));
                ++out.count[i];
                hits[i] += (yb && records.y(l, static_cast<int>(k))) ? 1 : 0;
            }
        }
    }
    for (std::size_t m = 0; m < static_cast<std::size_t>(num_bands); ++m) {
        for (std::size_t b = 0; b < B; ++b) {
            for (std::size_t k = b; k < B; ++k) {
                const auto i = index(b, k, m);
                if (out.count[i] > 0) {
                    out.value[i] = static_cast<double>(hits[i]) / static_cast<double>(out.count[i]);
                }
                out.value[index(k, b, m)] = out.value[i];
                out.count[index(k, b, m)] = out.count[i];
            }
        }
    }
    return out;
}

std::size_t DecodeStats::flagged_cells() const {
    std::size_t flagged = 0;
    for (int m = 0; m < num_bands; ++m) {
        for (int b = 0; b < num_bs; ++b) {
            if (S_count(b, m) == 0) ++flagged;
            for (int k = b + 1; k < num_bs; ++k) {
                if (R_count(b, k, m) == 0) ++flagged;
            }
        }
    }
    return flagged;
}

Eigen::MatrixXd DecodeStats::gram(int m) const {
    Eigen::MatrixXd q(num_bs, num_bs);
    for (int b = 0; b < num_bs; ++b) {
        for (int k = 0; k < num_bs; ++k) q(b, k) = b == k ? S(b, m) : R(b, k, m);
    }
    return q;
}

DecodeStats estimate_stats(const TrainingRecords& records, int num_bands) {
    return DecodeStats{records.num_bs(), num_bands, estimate_S(records, num_bands),
                       estimate_R(records, num_bands)};
}

DecodeStats stats_from_table(const DecodeTable& table) {
    TrainingRecords records(table.num_bs());
    for (std::size_t n = 0; n < table.num_events(); ++n) {
        records.add_uniform(table.band(n), table.mask(n));
    }
    return estimate_stats(records, table.num_bands());
}

TrainingCapture capture_training(const Topology& topology, const ChannelRealization& channel,
                                 const SimConfig& config, Rng& rng, std::span<const int> bands,
                                 double slot_length) {
    if (!(slot_length > 0.0)) throw std::invalid_argument("capture_training: slot length <= 0");
    const double total = slot_length * static_cast<double>(bands.size());
    Rng interferer_rng = split_rng(rng);
    std::vector<Rng> slot_rngs;
    for (std::size_t i = 0; i < bands.size(); ++i) slot_rngs.push_back(split_rng(rng));
    Rng fading_rng = split_rng(rng);

    TrafficTrace trace =
        generate_interferer_traffic(topology, config, interferer_rng, TimeWindow{0.0, total});
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const TimeWindow window{slot_length * static_cast<double>(i),
                                slot_length * static_cast<double>(i + 1)};
        trace = merge_traces(trace, generate_unb_traffic(topology, config, slot_rngs[i], bands[i],
                                                         window, trace.num_packets));
    }

    TrainingCapture capture;
    capture.sinr = compute_sinr_table(trace, channel, config, fading_rng);
    // All BSs follow the slot's band, which is also every UNB event's band.
    capture.listen_band = capture.sinr.event_band;
    return capture;
}

TrainingRecords records_from_capture(const TrainingCapture& capture, double tau_db) {
    TrainingRecords records(capture.sinr.num_bs);
    for (std::size_t n = 0; n < capture.sinr.num_events(); ++n) {
        std::uint64_t y = 0;
        for (int b = 0; b < capture.sinr.num_bs; ++b) {
            if (capture.sinr.at(n, b) >= tau_db) y |= std::uint64_t{1} << b;
        }
        records.add_uniform(capture.listen_band[n], y);
    }
    return records;
}

DecodeStats run_full_training(const Topology& topology, const ChannelRealization& channel,
                              const SimConfig& config, Rng& rng) {
    std::vector<int> bands(static_cast<std::size_t>(config.num_bands));
    for (int m = 0; m < config.num_bands; ++m) bands[static_cast<std::size_t>(m)] = m;
    const auto capture = capture_training(topology, channel, config, rng, bands,
                                          config.training_duration / config.num_bands);
    return estimate_stats(records_from_capture(capture, config.sinr_threshold), config.num_bands);
}

DecodeStats replicate_band(const DecodeStats& stats, int band) {
    if (band < 0 || band >= stats.num_bands) throw std::out_of_range("replicate_band: bad band");
    DecodeStats out = stats;
    for (int m = 0; m < stats.num_bands; ++m) {
        for (int b = 0; b < stats.num_bs; ++b) {
            out.s.value[out.s_index(b, m)] = stats.S(b, band);
            out.s.count[out.s_index(b, m)] = stats.S_count(b, band);
            for (int k = 0; k < stats.num_bs; ++k) {
                out.r.value[out.r_index(b, k, m)] = stats.R(b, k, band);
                out.r.count[out.r_index(b, k, m)] = stats.R_count(b, k, band);
            }
        }
    }
    return out;
}

DecodeStats run_low_overhead_training(const Topology& topology,
                                      const ChannelRealization& channel, const SimConfig& config,
                                      Rng& rng, int probe_band) {
    if (probe_band < 0 || probe_band >= config.num_bands) {
        throw std::out_of_range("run_low_overhead_training: probe band out of range");
    }
    const int bands[] = {probe_band};
    const auto capture = capture_training(topology, channel, config, rng, bands,
                                          config.training_duration / config.num_bands);
    return replicate_band(
        estimate_stats(records_from_capture(capture, config.sinr_threshold), config.num_bands),
        probe_band);
}

void write_stats(std::ostream& out, const DecodeStats& stats) {
    out << "# num_bs=" << stats.num_bs << " num_bands=" << stats.num_bands << '\n';
    out << "b,k,m,value,count\n";
    for (int m = 0; m < stats.num_bands; ++m) {
        for (int b = 0; b < stats.num_bs; ++b) {
            out << b + 1 << ',' << b + 1 << ',' << m + 1 << ',' << format_double(stats.S(b, m))
                << ',' << stats.S_count(b, m) << '\n';
            for (int k = b + 1; k < stats.num_bs; ++k) {
                out << b + 1 << ',' << k + 1 << ',' << m + 1 << ','
                    << format_double(stats.R(b, k, m)) << ',' << stats.R_count(b, k, m) << '\n';
            }
        }
    }
}

DecodeStats read_stats(std::istream& in) {
    struct Row {
        int b, k, m;
        double value;
        std::int64_t count;
    };
    std::vector<Row> rows;
    std::string line;
    bool header = false;
    int num_bs = 0;
    int num_bands = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "b,k,m,value,count") throw std::runtime_error("stats: bad header");
            header = true;
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 5) {
            throw std::runtime_error("stats line " + std::to_string(line_no) + ": expected 5 columns");
        }
        Row r{std::stoi(cols[0]) - 1, std::stoi(cols[1]) - 1, std::stoi(cols[2]) - 1,
              parse_double(cols[3]), std::stoll(cols[4])};
        if (r.b < 0 || r.k < r.b || r.m < 0 || r.count < 0) {
            throw std::runtime_error("stats line " + std::to_string(line_no) + ": bad indices");
        }
        num_bs = std::max({num_bs, r.b + 1, r.k + 1});
        num_bands = std::max(num_bands, r.m + 1);
        rows.push_back(r);
    }
    if (!header || rows.empty()) throw std::runtime_error("stats: empty table");

    DecodeStats stats;
    stats.num_bs = num_bs;
    stats.num_bands = num_bands;
    const auto s_cells = static_cast<std::size_t>(num_bs * num_bands);
    const auto r_cells = static_cast<std::size_t>(num_bs * num_bs * num_bands);
    stats.s = {std::vector<double>(s_cells, 0.0), std::vector<std::int64_t>(s_cells, 0)};
    stats.r = {std::vector<double>(r_cells, 0.0), std::vector<std::int64_t>(r_cells, 0)};
    for (const auto& r : rows) {
        if (r.b == r.k) {
            stats.s.value[stats.s_index(r.b, r.m)] = r.value;
            stats.s.count[stats.s_index(r.b, r.m)] = r.count;
        }
        for (auto [b, k] : {std::pair{r.b, r.k}, std::pair{r.k, r.b}}) {
            stats.r.value[stats.r_index(b, k, r.m)] = r.value;
            stats.r.count[stats.r_index(b, k, r.m)] = r.count;
        }
    }
    return stats;
}

}  // namespace unb
