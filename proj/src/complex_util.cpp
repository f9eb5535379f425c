#include "siegelmate/complex_util.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace siegelmate {

double chordal(cplx z, cplx w) {
    return 2.0 * std::abs(z - w) / std::sqrt((1.0 + std::norm(z)) * (1.0 + std::norm(w)));
}

double chordal_to_infinity(cplx z) { return 2.0 / std::sqrt(1.0 + std::norm(z)); }

double chordal_diameter(const std::vector<cplx>& pts) {
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, chordal(pts[i], pts[j]));
    return best;
}

cplx unit(double turns) { return std::polar(1.0, 2.0 * std::numbers::pi * turns); }

std::pair<cplx, cplx> QuadPoly::preimages(cplx w) const {
    cplx s = std::sqrt(lambda * lambda - 4.0 * (c - w));
    return {(-lambda + s) / 2.0, (-lambda - s) / 2.0};
}

std::pair<cplx, cplx> QuadPoly::iterate(cplx z, std::size_t n) const {
    cplx d{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        d *= deriv(z);
        z = (*this)(z);
    }
    return {z, d};
}

double round12(double x) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return std::strtod(buf, nullptr);
}

}  // namespace siegelmate
