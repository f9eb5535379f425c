#include "siegelmate/render.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <stdexcept>
#include <thread>

namespace siegelmate {

namespace {

std::size_t threads() {
    if (const char* env = std::getenv("SIEGELMATE_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs row(y) for every row; rows are independent so the result does not
// depend on the split.
template <class F>
void for_rows(int height, F row) {
    const std::size_t n = std::min<std::size_t>(threads(), static_cast<std::size_t>(height));
    if (n <= 1) {
        for (int y = 0; y < height; ++y) row(y);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t)
        pool.emplace_back([&, t] {
            for (int y = static_cast<int>(t); y < height; y += static_cast<int>(n)) row(y);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

cplx ImageSpec::pixel(int x, int y) const {
    const double h = span / width;
    return center + cplx((x + 0.5 - width / 2.0) * h, (height / 2.0 - y - 0.5) * h);
}

bool ImageSpec::to_pixel(cplx z, int& x, int& y) const {
    const double h = span / width;
    double fx = (z.real() - center.real()) / h + width / 2.0;
    double fy = height / 2.0 - (z.imag() - center.imag()) / h;
    if (!(fx >= 0 && fx < width && fy >= 0 && fy < height)) return false;
    x = static_cast<int>(fx);
    y = static_cast<int>(fy);
    return true;
}

void Raster::set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    auto i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
}

std::string Raster::ppm() const {
    std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
    return out;
}

void Raster::write_ppm(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << ppm();
}

Raster render_polynomial(cplx c, const ImageSpec& spec) {
    Raster r(spec.width, spec.height);
    for_rows(spec.height, [&](int y) {
        for (int x = 0; x < spec.width; ++x) {
            cplx z = spec.pixel(x, y);
            int n = 0;
            while (n < spec.max_iter && std::norm(z) <= 1e6) {
                z = z * z + c;
                ++n;
            }
            if (n == spec.max_iter) continue;  // filled Julia set stays black
            auto shade = static_cast<std::uint8_t>(255 - std::min(255, 8 * n));
            r.set(x, y, shade, shade, 255);
        }
    });
    return r;
}

std::vector<cplx> julia_points(cplx c, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    cplx z = 0.5 + std::sqrt(0.25 - c);  // beta lies on the Julia set
    std::vector<cplx> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        z = std::sqrt(z - c);
        if (coin(rng)) z = -z;
        pts.push_back(z);
    }
    return pts;
}

Raster plot_points(const std::vector<cplx>& pts, const ImageSpec& spec) {
    Raster r(spec.width, spec.height);
    std::fill(r.rgb.begin(), r.rgb.end(), 255);
    for (cplx z : pts) {
        int x, y;
        if (spec.to_pixel(z, x, y)) r.set(x, y, 0, 0, 0);
    }
    return r;
}

nlohmann::json FateCounts::to_json() const {
    return {{"siegel", siegel}, {"cycle", cycle}, {"undecided", undecided}};
}

Raster render_rational(const RationalMapParams& G, const ImageSpec& spec, FateCounts* counts) {
    const auto& g = G.map;
    // inner disk of the Siegel disk: below the smallest modulus on the c1 orbit
    double inner = 1e300;
    cplx z = G.siegel_critical;
    for (int i = 0; i < 4000; ++i) inner = std::min(inner, std::abs(z = g(z)));
    inner *= 0.9;
    // superattracting cycle, if the postcritical orbit closes up at c2
    std::vector<cplx> cycle;
    z = G.pcf_critical;
    for (int i = 0; i < 64; ++i) {
        cycle.push_back(z);
        z = g(z);
        if (std::abs(z - G.pcf_critical) < 1e-9) break;
        if (i == 63) cycle.clear();
    }
    if (!cycle.empty() && std::abs(z - G.pcf_critical) >= 1e-9) cycle.clear();

    Raster r(spec.width, spec.height);
    std::vector<int> fate(static_cast<std::size_t>(spec.width) * spec.height, 0);
    for_rows(spec.height, [&](int y) {
        for (int x = 0; x < spec.width; ++x) {
            cplx w = spec.pixel(x, y);
            int f = 0, n = 0;
            for (; n < spec.max_iter && f == 0; ++n) {
                if (std::abs(w) < inner) f = 1;
                for (cplx p : cycle)
                    if (std::abs(w - p) < 1e-4) f = 2;
                if (f == 0) w = g(w);
                if (!std::isfinite(w.real())) break;
            }
            fate[static_cast<std::size_t>(y) * spec.width + x] = f;
            auto shade = static_cast<std::uint8_t>(255 - std::min(200, 4 * n));
            if (f == 1) r.set(x, y, shade, static_cast<std::uint8_t>(shade * 0.6), 0);
            else if (f == 2) r.set(x, y, 0, static_cast<std::uint8_t>(shade * 0.5), shade);
        }
    });
    if (counts) {
        *counts = {};
        for (int f : fate) (f == 1 ? counts->siegel : f == 2 ? counts->cycle : counts->undecided)++;
    }
    return r;
}

}  // namespace siegelmate
