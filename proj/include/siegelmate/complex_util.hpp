#pragma once

#include <complex>
#include <string>
#include <vector>

namespace siegelmate {

using cplx = std::complex<double>;

/// Chordal metric on the Riemann sphere, 2|z-w| / sqrt((1+|z|^2)(1+|w|^2)).
double chordal(cplx z, cplx w);
/// Chordal distance from z to infinity.
double chordal_to_infinity(cplx z);
/// Largest pairwise chordal distance of a sample.
double chordal_diameter(const std::vector<cplx>& pts);

/// e^{2 pi i x} for x given in turns.
cplx unit(double turns);

/// z^2 + lambda z + c.  lambda = 0 is the usual P_c; c = 0, lambda = e^{2 pi i theta}
/// is the Siegel polynomial P_theta.
struct QuadPoly {
    cplx lambda{0.0, 0.0};
    cplx c{0.0, 0.0};

    cplx operator()(cplx z) const { return z * (z + lambda) + c; }
    cplx deriv(cplx z) const { return 2.0 * z + lambda; }
    cplx critical_point() const { return -lambda / 2.0; }
    /// The two solutions of P(z) = w.
    std::pair<cplx, cplx> preimages(cplx w) const;
    /// P^n(z) together with (P^n)'(z).
    std::pair<cplx, cplx> iterate(cplx z, std::size_t n) const;
    /// Constant of the centred monic conjugate w^2 + c'.
    cplx centred_c() const { return c + lambda / 2.0 - lambda * lambda / 4.0; }
};

/// Rounds to 12 significant digits so reports are byte-stable.
double round12(double x);

}  // namespace siegelmate
