#include "unb/gaussian_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace unb {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

/// In-place forward 2-D DFT of a ty x tx row-major buffer.
void forward_fft(FftwBuffer& buf, std::size_t tx, std::size_t ty) {
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_2d(static_cast<int>(ty), static_cast<int>(tx), buf.data, buf.data,
                                FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

std::size_t smooth_size(std::size_t target) {
    for (std::size_t n = std::max<std::size_t>(target, 1);; ++n) {
        std::size_t r = n;
        for (std::size_t p : {2u, 3u, 5u}) {
            while (r % p == 0) r /= p;
        }
        if (r == 1) return n;
    }
}

}  // namespace

double ExponentialFieldSampler::embed() {
    FftwBuffer buf(tx_ * ty_);
    for (std::size_t j = 0; j < ty_; ++j) {
        const double hy = static_cast<double>(std::min(j, ty_ - j)) * cell_;
        for (std::size_t i = 0; i < tx_; ++i) {
            const double hx = static_cast<double>(std::min(i, tx_ - i)) * cell_;
            buf.data[j * tx_ + i][0] = std::exp(-std::hypot(hx, hy) / beta_);
            buf.data[j * tx_ + i][1] = 0.0;
        }
    }
    forward_fft(buf, tx_, ty_);

    const double n = static_cast<double>(tx_ * ty_);
    sqrt_eigen_.resize(tx_ * ty_);
    double positive = 0.0;
    double negative = 0.0;
    for (std::size_t k = 0; k < tx_ * ty_; ++k) {
        const double lambda = buf.data[k][0];
        if (lambda < 0.0) {
            negative -= lambda;
        } else {
            positive += lambda;
        }
        sqrt_eigen_[k] = std::sqrt(std::max(lambda, 0.0) / n);
    }
    clipped_fraction_ = positive > 0.0 ? negative / positive : 0.0;
    return clipped_fraction_;
}

ExponentialFieldSampler::ExponentialFieldSampler(std::span<const Point2D> points, double sigma,
                                                 double beta)
    : sigma_(sigma), beta_(beta), cell_(beta / 4.0) {
    if (!(beta > 0.0) || !(sigma >= 0.0)) {
        throw std::invalid_argument("ExponentialFieldSampler: need beta > 0 and sigma >= 0");
    }
    double x1 = 0.0;
    double y1 = 0.0;
    if (!points.empty()) {
        x0_ = x1 = points[0].x;
        y0_ = y1 = points[0].y;
        for (const auto& p : points) {
            x0_ = std::min(x0_, p.x);
            x1 = std::max(x1, p.x);
            y0_ = std::min(y0_, p.y);
            y1 = std::max(y1, p.y);
        }
    }
    nx_ = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((x1 - x0_) / cell_)) + 1);
    ny_ = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((y1 - y0_) / cell_)) + 1);
    // Small domains need extra periodic padding before the embedding is PSD.
    const auto pad_unit = static_cast<std::size_t>(std::ceil(2.0 * beta_ / cell_));
    for (std::size_t pad = 0;; pad += pad_unit) {
        tx_ = smooth_size(2 * nx_ + pad);
        ty_ = smooth_size(2 * ny_ + pad);
        if (embed() <= 1e-3) break;
        if (pad > 64 * pad_unit) {
            throw std::runtime_error("ExponentialFieldSampler: circulant embedding not PSD (clipped " +
                                     std::to_string(clipped_fraction_) + " of the spectrum)");
        }
    }

    const double rho1 = std::exp(-cell_ / beta_);
    const double rho2 = std::exp(-std::sqrt(2.0) * cell_ / beta_);
    stencils_.reserve(points.size());
    for (const auto& p : points) {
        const double u = (p.x - x0_) / cell_;
        const double v = (p.y - y0_) / cell_;
        Stencil s;
        s.i = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(u))), nx_ - 2);
        s.j = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(v))), ny_ - 2);
        const double fx = std::clamp(u - static_cast<double>(s.i), 0.0, 1.0);
        const double fy = std::clamp(v - static_cast<double>(s.j), 0.0, 1.0);
        // Corners: (i,j) (i+1,j) (i,j+1) (i+1,j+1).
        double* w = s.w;
        w[0] = (1 - fx) * (1 - fy);
        w[1] = fx * (1 - fy);
        w[2] = (1 - fx) * fy;
        w[3] = fx * fy;
        const double var = w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3] +
                           2.0 * (rho1 * (w[0] * w[1] + w[0] * w[2] + w[1] * w[3] + w[2] * w[3]) +
                                  rho2 * (w[0] * w[3] + w[1] * w[2]));
        const double scale = 1.0 / std::sqrt(var);
        for (double& wk : s.w) wk *= scale;
        stencils_.push_back(s);
    }
}

std::pair<std::vector<double>, std::vector<double>> ExponentialFieldSampler::sample_pair(
    Rng& rng) const {
    std::normal_distribution<double> normal;
    FftwBuffer buf(tx_ * ty_);
    for (std::size_t k = 0; k < tx_ * ty_; ++k) {
        buf.data[k][0] = sqrt_eigen_[k] * normal(rng);
        buf.data[k][1] = sqrt_eigen_[k] * normal(rng);
    }
    forward_fft(buf, tx_, ty_);

    std::vector<double> a(stencils_.size());
    std::vector<double> b(stencils_.size());
    for (std::size_t p = 0; p < stencils_.size(); ++p) {
        const auto& s = stencils_[p];
        const std::size_t k00 = s.j * tx_ + s.i;
        const std::size_t idx[4] = {k00, k00 + 1, k00 + tx_, k00 + tx_ + 1};
        double re = 0.0;
        double im = 0.0;
        for (int c = 0; c < 4; ++c) {
            re += s.w[c] * buf.data[idx[c]][0];
            im += s.w[c] * buf.data[idx[c]][1];
        }
        a[p] = sigma_ * re;
        b[p] = sigma_ * im;
    }
    return {std::move(a), std::move(b)};
}

ExactFieldFactor factor_exponential_kernel(std::span<const Point2D> points, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("factor_exponential_kernel: beta <= 0");
    ExactFieldFactor out;
    std::map<std::pair<double, double>, std::size_t> seen;
    std::vector<Point2D> unique;
    out.point_to_unique.reserve(points.size());
    for (const auto& p : points) {
        auto [it, inserted] = seen.try_emplace({p.x, p.y}, unique.size());
        if (inserted) unique.push_back(p);
        out.point_to_unique.push_back(it->second);
    }

    const auto n = static_cast<Eigen::Index>(unique.size());
    Eigen::MatrixXd kernel(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        kernel(a, a) = 1.0;
        for (Eigen::Index b = 0; b < a; ++b) {
            const double c = std::exp(-distance(unique[static_cast<std::size_t>(a)],
                                                unique[static_cast<std::size_t>(b)]) /
                                      beta);
            kernel(a, b) = c;
            kernel(b, a) = c;
        }
    }

    for (double jitter : {0.0, 1e-12, 1e-10, 1e-8}) {
        Eigen::MatrixXd k = kernel;
        k.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() == Eigen::Success) {
            out.lower = llt.matrixL();
            return out;
        }
    }
    throw std::runtime_error("factor_exponential_kernel: kernel over " + std::to_string(n) +
                             " points is not positive definite even with 1e-8 jitter");
}

std::vector<double> ExactFieldFactor::sample(Rng& rng) const {
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(lower.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    const Eigen::VectorXd field = lower.triangularView<Eigen::Lower>() * z;
    std::vector<double> out(point_to_unique.size());
    for (std::size_t p = 0; p < out.size(); ++p) {
        out[p] = field(static_cast<Eigen::Index>(point_to_unique[p]));
    }
    return out;
}

}  // namespace unb
