#pragma once

#include "siegelmate/angle.hpp"
#include "siegelmate/complex_util.hpp"
#include "siegelmate/lamination.hpp"

#include <optional>
#include <string>
#include <vector>

namespace siegelmate {

struct RayOptions {
    std::size_t levels = 40;   // potential halvings below R0
    std::size_t substeps = 4;  // points per halving
    double R0 = 16.0;
    double newton_tol = 1e-3;  // abort when the Newton step leaves this local scale
};

/// A known point a with P^k(landing) = a, used to pin the landing point of a
/// ray whose orbit runs into a non-repelling region.
struct LandingAnchor {
    std::size_t k = 0;
    cplx point;
};

struct RayTrace {
    Angle angle;
    std::vector<cplx> points;       // from potential ln R0 downwards
    std::vector<double> potentials;
    cplx deep_point;                // last reliable ray point
    cplx landing_estimate;
    bool landed = false;
    std::string method;             // "periodic-refinement", "anchor-pullback" or "raw"
    double multiplier = 0.0;        // |(P^n)'| at the periodic point, when refined
    std::string note;
};

/// Traces R_t for z^2 + lambda z + c by Newton continuation on
/// P^n(z) = Phi^{-1}(exp(2^n (g + 2 pi i t))) and refines the landing point:
/// through `anchor` when given, otherwise through the repelling periodic
/// point the ray's orbit lands on.
RayTrace trace_ray(const QuadPoly& P, const Angle& t, const RayOptions& opts = {},
                   const std::optional<LandingAnchor>& anchor = std::nullopt);

RayTrace trace_ray_poly(cplx c, const Angle& t, const RayOptions& opts = {});

/// Ray of P_theta(z) = lambda z + z^2.  Angles on the Siegel lamination's
/// critical leaves are anchored at the critical point -lambda/2.
RayTrace trace_ray_siegel(cplx lambda, const Angle& t, const SiegelLanding* landing,
                          const RayOptions& opts = {});

/// Pulls a point back k times along the orbit of `guide`, choosing each
/// preimage nearest to the corresponding orbit point.
cplx guided_pullback(const QuadPoly& P, cplx point, std::size_t k, cplx guide);

}  // namespace siegelmate
