#include "unb/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "unb/gaussian_field.hpp"

namespace unb {

double path_loss_db(double alpha, double d) {
    if (!(d > 0.0)) throw std::domain_error("path_loss_db: distance must be positive");
    return -10.0 * alpha * std::log10(std::max(d, 1.0));
}

Eigen::MatrixXd sample_shadowing(std::span<const Point2D> bs_locations,
                                 std::span<const Point2D> source_locations,
                                 const ShadowingOptions& options, Rng& rng) {
    if (!(options.decorrelation > 0.0) || !(options.sigma_db >= 0.0)) {
        throw std::invalid_argument("sample_shadowing: need beta > 0 and sigma >= 0");
    }
    const auto num_bs = static_cast<Eigen::Index>(bs_locations.size());
    const auto num_src = static_cast<Eigen::Index>(source_locations.size());
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(num_bs, num_src);
    if (options.sigma_db == 0.0 || num_bs == 0 || num_src == 0) return rows;

    const std::uint64_t base = rng();
    auto fill_row = [&](Eigen::Index b, const std::vector<double>& values) {
        for (Eigen::Index s = 0; s < num_src; ++s) rows(b, s) = values[static_cast<std::size_t>(s)];
    };

    if (num_src <= options.exact_max_sources) {
        const auto factor = factor_exponential_kernel(source_locations, options.decorrelation);
        for (Eigen::Index b = 0; b < num_bs; ++b) {
            Rng stream = make_rng(base, {static_cast<std::uint64_t>(b)});
            fill_row(b, factor.sample(stream));
        }
        rows *= options.sigma_db;
    } else {
        const ExponentialFieldSampler sampler(source_locations, options.sigma_db,
                                              options.decorrelation);
        for (Eigen::Index pair = 0; 2 * pair < num_bs; ++pair) {
            Rng stream = make_rng(base, {static_cast<std::uint64_t>(pair)});
            auto [first, second] = sampler.sample_pair(stream);
            fill_row(2 * pair, first);
            if (2 * pair + 1 < num_bs) fill_row(2 * pair + 1, second);
        }
    }

    if (options.cross_bs_correlated && num_bs > 1) {
        // Pivot-free Cholesky keeps the mixing lower triangular, so BS b only
        // mixes rows 0..b and smaller topologies stay nested.
        const auto factor = factor_exponential_kernel(bs_locations, options.decorrelation);
        if (factor.lower.rows() != num_bs) {
            throw std::runtime_error("sample_shadowing: coincident BS locations with cross-BS correlation");
        }
        rows = (factor.lower.triangularView<Eigen::Lower>() * rows).eval();
    }
    return rows;
}

double sample_fading_db(double sigma_f, Rng& rng) {
    if (!(sigma_f > 0.0)) throw std::invalid_argument("sample_fading_db: sigma_f must be positive");
    std::exponential_distribution<double> power(1.0 / (sigma_f * sigma_f));
    return 10.0 * std::log10(power(rng));
}

ChannelRealization make_channel_realization(const Topology& topology, const SimConfig& config,
                                            Rng& rng) {
    ChannelRealization ch;
    ch.num_iot = topology.iot_locations.size();
    const auto num_bs = static_cast<Eigen::Index>(topology.bs_locations.size());
    const auto num_src = static_cast<Eigen::Index>(topology.num_sources());

    std::vector<Point2D> sources;
    sources.reserve(static_cast<std::size_t>(num_src));
    for (std::size_t s = 0; s < topology.num_sources(); ++s) {
        sources.push_back(topology.source_location(s));
    }

    ch.pathloss_db.resize(num_bs, num_src);
    for (Eigen::Index b = 0; b < num_bs; ++b) {
        for (Eigen::Index s = 0; s < num_src; ++s) {
            const double d = distance(topology.bs_locations[static_cast<std::size_t>(b)],
                                      sources[static_cast<std::size_t>(s)]);
            ch.pathloss_db(b, s) = path_loss_db(config.pathloss_exponent, std::max(d, 1.0));
        }
    }

    ShadowingOptions opts;
    opts.sigma_db = config.shadowing_std;
    opts.decorrelation = config.shadowing_decorrelation;
    opts.cross_bs_correlated = config.cross_bs_shadowing_correlated;
    opts.exact_max_sources = config.shadowing_exact_max_sources;
    ch.shadowing_db = sample_shadowing(topology.bs_locations, sources, opts, rng);
    return ch;
}

}  // namespace unb
