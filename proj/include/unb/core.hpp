#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace unb {

// Bands and BSs are 0-based throughout the C++ and Python APIs. Text formats
// (CSV, stats tables, assignment strings) use 1-based indices.

struct Point2D {
    double x = 0.0;
    double y = 0.0;
};

double distance(Point2D a, Point2D b);

/// Band (0-based) containing a carrier frequency. A frequency on an internal
/// band edge belongs to the upper band; phi == M*W maps to the top band.
/// Throws std::domain_error when phi lies outside [0, M*W].
int band_of_frequency(double phi, double band_width, int num_bands);

/// Binary B x M matrix, row-major. A valid assignment has exactly one 1 per row.
class Assignment {
public:
    Assignment() = default;
    Assignment(int num_bs, int num_bands);

    static Assignment from_bands(const std::vector<int>& bands, int num_bands);

    int num_bs() const { return num_bs_; }
    int num_bands() const { return num_bands_; }

    std::uint8_t operator()(int b, int m) const { return x_[index(b, m)]; }
    std::uint8_t& operator()(int b, int m) { return x_[index(b, m)]; }

    /// Listening band of each BS. Requires a valid (one-hot) assignment.
    std::vector<int> bands() const;

    /// Bitmask per band of the BSs listening on it. Requires num_bs <= 64.
    std::vector<std::uint64_t> band_masks() const;

    bool operator==(const Assignment&) const = default;

private:
    std::size_t index(int b, int m) const {
        return static_cast<std::size_t>(b) * static_cast<std::size_t>(num_bands_) +
               static_cast<std::size_t>(m);
    }

    int num_bs_ = 0;
    int num_bands_ = 0;
    std::vector<std::uint8_t> x_;
};

/// Returns the first row that is not one-hot, or nullopt when the matrix is a
/// valid B x M assignment. A dimension mismatch reports row 0.
std::optional<int> validate_assignment(const Assignment& x, int num_bs, int num_bands);

/// "1-3-2": hyphen-joined 1-based band per BS.
std::string format_assignment(const Assignment& x);
Assignment parse_assignment(const std::string& text, int num_bands);

}  // namespace unb
