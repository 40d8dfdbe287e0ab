#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "unb/channel.hpp"
#include "unb/config.hpp"
#include "unb/phy.hpp"
#include "unb/rng.hpp"
#include "unb/traffic.hpp"

namespace unb {

/// Training observations, one row per unique transmission l: z(l, b) is the
/// band BS b listened to and bit b of y(l) is set iff BS b decoded l there.
class TrainingRecords {
public:
    TrainingRecords() = default;
    explicit TrainingRecords(int num_bs) : num_bs_(num_bs) {}

    void add(std::span<const int> z, std::uint64_t y);
    /// Every BS tuned to the same band.
    void add_uniform(int band, std::uint64_t y);

    int num_bs() const { return num_bs_; }
    std::size_t size() const { return y_.size(); }
    int z(std::size_t l, int b) const {
        return z_[l * static_cast<std::size_t>(num_bs_) + static_cast<std::size_t>(b)];
    }
    bool y(std::size_t l, int b) const { return (y_[l] >> b) & 1u; }

private:
    int num_bs_ = 0;
    std::vector<int> z_;
    std::vector<std::uint64_t> y_;
};

/// Sample means with their sample counts; count 0 marks an unmeasured cell
/// whose value is reported as 0.
struct CellEstimates {
    std::vector<double> value;
    std::vector<std::int64_t> count;
};

/// S(b, m), stored at b * M + m.
CellEstimates estimate_S(const TrainingRecords& records, int num_bands);
/// R(b, k, m), stored at (m * B + b) * B + k; symmetric in (b, k) with the
/// diagonal equal to estimate_S on the same records.
CellEstimates estimate_R(const TrainingRecords& records, int num_bands);

/// Estimated decode rates S and pairwise joint decode rates R.
struct DecodeStats {
    int num_bs = 0;
    int num_bands = 0;
    CellEstimates s;
    CellEstimates r;

    double S(int b, int m) const { return s.value[s_index(b, m)]; }
    double R(int b, int k, int m) const { return r.value[r_index(b, k, m)]; }
    std::int64_t S_count(int b, int m) const { return s.count[s_index(b, m)]; }
    std::int64_t R_count(int b, int k, int m) const { return r.count[r_index(b, k, m)]; }

    std::size_t s_index(int b, int m) const {
        return static_cast<std::size_t>(b) * static_cast<std::size_t>(num_bands) +
               static_cast<std::size_t>(m);
    }
    std::size_t r_index(int b, int k, int m) const {
        return (static_cast<std::size_t>(m) * static_cast<std::size_t>(num_bs) +
                static_cast<std::size_t>(b)) *
                   static_cast<std::size_t>(num_bs) +
               static_cast<std::size_t>(k);
    }

    /// Unmeasured S cells plus unmeasured R cells with b < k.
    std::size_t flagged_cells() const;

    /// Per-band B x B matrix with S on the diagonal and R off it.
    Eigen::MatrixXd gram(int m) const;
};

DecodeStats estimate_stats(const TrainingRecords& records, int num_bands);

/// Decode statistics of the evaluation table itself, one record per event
/// with every BS treated as listening on that event's band.
DecodeStats stats_from_table(const DecodeTable& table);

/// SINRs of the training traffic plus the band all BSs listened to per event.
/// Thresholding is deferred so one capture serves any tau.
struct TrainingCapture {
    SinrTable sinr;
    std::vector<int> listen_band;  // per UNB event
};

/// Training traffic where slot i (length slot_length) has every device
/// transmit only on bands[i] and every BS listen there. Interferers transmit
/// freely over all slots.
TrainingCapture capture_training(const Topology& topology, const ChannelRealization& channel,
                                 const SimConfig& config, Rng& rng, std::span<const int> bands,
                                 double slot_length);

TrainingRecords records_from_capture(const TrainingCapture& capture, double tau_db);

/// M equal slots, one per band, over config.training_duration.
DecodeStats run_full_training(const Topology& topology, const ChannelRealization& channel,
                              const SimConfig& config, Rng& rng);

/// One slot of length training_duration / M on probe_band; S and R measured
/// there are replicated to every band.
DecodeStats run_low_overhead_training(const Topology& topology,
                                      const ChannelRealization& channel, const SimConfig& config,
                                      Rng& rng, int probe_band);

/// Copies the statistics of one band to all bands.
DecodeStats replicate_band(const DecodeStats& stats, int band);

/// Text table "b,k,m,value,count" with 1-based indices. Rows with b == k
/// carry S; rows with b < k carry R.
void write_stats(std::ostream& out, const DecodeStats& stats);
DecodeStats read_stats(std::istream& in);

}  // namespace unb
