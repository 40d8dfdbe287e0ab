#include "unb/core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace unb {

double distance(Point2D a, Point2D b) { return std::hypot(a.x - b.x, a.y - b.y); }

int band_of_frequency(double phi, double band_width, int num_bands) {
    if (!(band_width > 0.0) || num_bands < 1) {
        throw std::invalid_argument("band_of_frequency: need W > 0 and M >= 1");
    }
    const double top = band_width * num_bands;
    if (!(phi >= 0.0 && phi <= top)) {
        throw std::domain_error("band_of_frequency: phi outside [0, M*W]");
    }
    const auto band = static_cast<int>(std::floor(phi / band_width));
    return band < num_bands ? band : num_bands - 1;
}

Assignment::Assignment(int num_bs, int num_bands)
    : num_bs_(num_bs),
      num_bands_(num_bands),
      x_(static_cast<std::size_t>(num_bs) * static_cast<std::size_t>(num_bands), 0) {
    if (num_bs < 0 || num_bands < 0) {
        throw std::invalid_argument("Assignment: negative dimension");
    }
}

Assignment Assignment::from_bands(const std::vector<int>& bands, int num_bands) {
    Assignment x(static_cast<int>(bands.size()), num_bands);
    for (std::size_t b = 0; b < bands.size(); ++b) {
        if (bands[b] < 0 || bands[b] >= num_bands) {
            throw std::out_of_range("Assignment::from_bands: band index out of range");
        }
        x(static_cast<int>(b), bands[b]) = 1;
    }
    return x;
}

std::vector<int> Assignment::bands() const {
    if (auto bad = validate_assignment(*this, num_bs_, num_bands_)) {
        throw std::logic_error("Assignment::bands: row " + std::to_string(*bad) +
                               " is not one-hot");
    }
    std::vector<int> out(static_cast<std::size_t>(num_bs_));
    for (int b = 0; b < num_bs_; ++b) {
        for (int m = 0; m < num_bands_; ++m) {
            if ((*this)(b, m)) out[static_cast<std::size_t>(b)] = m;
        }
    }
    return out;
}

std::vector<std::uint64_t> Assignment::band_masks() const {
    if (num_bs_ > 64) throw std::length_error("band_masks: more than 64 BSs");
    std::vector<std::uint64_t> masks(static_cast<std::size_t>(num_bands_), 0);
    const auto rows = bands();
    for (int b = 0; b < num_bs_; ++b) {
        masks[static_cast<std::size_t>(rows[static_cast<std::size_t>(b)])] |=
            std::uint64_t{1} << b;
    }
    return masks;
}

std::optional<int> validate_assignment(const Assignment& x, int num_bs, int num_bands) {
    if (x.num_bs() != num_bs || x.num_bands() != num_bands) return 0;
    for (int b = 0; b < num_bs; ++b) {
        int ones = 0;
        for (int m = 0; m < num_bands; ++m) {
            const auto v = x(b, m);
            if (v > 1) return b;
            ones += v;
        }
        if (ones != 1) return b;
    }
    return std::nullopt;
}

std::string format_assignment(const Assignment& x) {
    std::string out;
    for (int band : x.bands()) {
        if (!out.empty()) out += '-';
        out += std::to_string(band + 1);
    }
    return out;
}

Assignment parse_assignment(const std::string& text, int num_bands) {
    std::vector<int> bands;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, '-')) {
        std::size_t used = 0;
        const int band = std::stoi(token, &used);
        if (used != token.size()) {
            throw std::invalid_argument("parse_assignment: bad token '" + token + "'");
        }
        bands.push_back(band - 1);
    }
    return Assignment::from_bands(bands, num_bands);
}

}  // namespace unb
