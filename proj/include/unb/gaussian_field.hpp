#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "unb/core.hpp"
#include "unb/rng.hpp"

namespace unb {

/// Stationary 2-D Gaussian field with covariance sigma^2 exp(-h / beta),
/// sampled on a regular grid by circulant embedding and read off at arbitrary
/// points by variance-corrected bilinear interpolation.
class ExponentialFieldSampler {
public:
    /// The grid covers the bounding box of `points` with cell size <= beta/4.
    ExponentialFieldSampler(std::span<const Point2D> points, double sigma, double beta);

    /// Two independent field realizations evaluated at the constructor's points.
    std::pair<std::vector<double>, std::vector<double>> sample_pair(Rng& rng) const;

    std::size_t grid_nx() const { return nx_; }
    std::size_t grid_ny() const { return ny_; }
    double cell() const { return cell_; }
    /// Sum of negative embedding eigenvalues clipped to zero, relative to the total.
    double clipped_fraction() const { return clipped_fraction_; }

private:
    /// Fills sqrt_eigen_ for the current tx_ x ty_ torus; returns the clipped fraction.
    double embed();

    struct Stencil {
        std::size_t i = 0;
        std::size_t j = 0;
        double w[4] = {0, 0, 0, 0};
    };

    double sigma_;
    double beta_;
    double cell_;
    double x0_ = 0.0;
    double y0_ = 0.0;
    std::size_t nx_ = 0;  // grid nodes
    std::size_t ny_ = 0;
    std::size_t tx_ = 0;  // torus size
    std::size_t ty_ = 0;
    std::vector<double> sqrt_eigen_;  // sqrt(lambda / (tx*ty)), row-major ty x tx
    std::vector<Stencil> stencils_;
    double clipped_fraction_ = 0.0;
};

/// Cholesky factor of the unit-variance exponential kernel over the distinct
/// points; duplicates map to the same row so they receive identical values.
struct ExactFieldFactor {
    std::vector<std::size_t> point_to_unique;
    Eigen::MatrixXd lower;  // unique x unique

    /// One unit-variance field realization at the original points.
    std::vector<double> sample(Rng& rng) const;
};
/// Throws std::runtime_error if the kernel stays non-positive-definite after jitter.
ExactFieldFactor factor_exponential_kernel(std::span<const Point2D> points, double beta);

}  // namespace unb
