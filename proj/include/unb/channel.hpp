#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "unb/config.hpp"
#include "unb/core.hpp"
#include "unb/rng.hpp"
#include "unb/traffic.hpp"

namespace unb {

/// Static large-scale channel of one realization. Columns index sources:
/// IoT devices first, then interferers (see Topology::source_location).
struct ChannelRealization {
    Eigen::MatrixXd pathloss_db;   // B x sources
    Eigen::MatrixXd shadowing_db;  // B x sources
    std::size_t num_iot = 0;

    std::size_t source_column(EventKind kind, std::size_t source_id) const {
        return kind == EventKind::unb ? source_id : num_iot + source_id;
    }
};

/// -10 alpha log10(d). Distances below 1 m are evaluated at 1 m; d <= 0 throws.
double path_loss_db(double alpha, double d);

struct ShadowingOptions {
    double sigma_db = 9.0;
    double decorrelation = 200.0;  // m
    bool cross_bs_correlated = false;
    /// Exact factorization up to this many distinct source points, grid field above.
    int exact_max_sources = 4000;
};

/// Zero-mean Gaussian shadowing (dB), one row per BS, with covariance
/// sigma^2 exp(-|q1 - q2| / beta) between sources. Rows are independent unless
/// cross_bs_correlated, in which case the covariance is multiplied by
/// exp(-|p_b - p_k| / beta) between BS rows. Each BS row draws from its own
/// substream so the first B' rows do not depend on how many BSs follow.
Eigen::MatrixXd sample_shadowing(std::span<const Point2D> bs_locations,
                                 std::span<const Point2D> source_locations,
                                 const ShadowingOptions& options, Rng& rng);

/// Rayleigh fading gain in dB with E[h^2] = sigma_f^2, i.e. an exponential
/// power gain with mean sigma_f^2.
double sample_fading_db(double sigma_f, Rng& rng);

inline double received_power_dbm(double tx_dbm, double pathloss_db, double shadowing_db,
                                 double fading_db) {
    return tx_dbm + pathloss_db + shadowing_db + fading_db;
}

ChannelRealization make_channel_realization(const Topology& topology, const SimConfig& config,
                                            Rng& rng);

}  // namespace unb
