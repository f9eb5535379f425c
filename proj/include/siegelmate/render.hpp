#pragma once

#include "siegelmate/complex_util.hpp"
#include "siegelmate/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace siegelmate {

struct ImageSpec {
    int width = 256;
    int height = 256;
    cplx center{0.0, 0.0};
    double span = 4.0;          // width of the view in the plane
    int max_iter = 400;
    std::size_t points = 100000;  // inverse-iteration samples
    std::uint64_t seed = 1;

    cplx pixel(int x, int y) const;
    bool to_pixel(cplx z, int& x, int& y) const;
};

struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Raster(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}
    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
    /// Binary P6 bytes.
    std::string ppm() const;
    void write_ppm(const std::string& path) const;
};

/// Escape-time raster of z^2 + c.
Raster render_polynomial(cplx c, const ImageSpec& spec);

/// Julia set of z^2 + c by random inverse iteration from the beta fixed point.
std::vector<cplx> julia_points(cplx c, std::size_t n, std::uint64_t seed);

Raster plot_points(const std::vector<cplx>& pts, const ImageSpec& spec);

/// Pixel fates of a candidate map: Siegel basin (orbit enters the inner
/// Siegel disk), basin of the superattracting cycle, or neither.
struct FateCounts {
    std::size_t siegel = 0;
    std::size_t cycle = 0;
    std::size_t undecided = 0;
    nlohmann::json to_json() const;
};

Raster render_rational(const RationalMapParams& G, const ImageSpec& spec, FateCounts* counts = nullptr);

}  // namespace siegelmate
