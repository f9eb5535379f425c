#include "siegelmate/rays.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace siegelmate {

namespace {

// Inverse Boettcher map near infinity for z^2 + lambda z + c.
cplx phi_inverse(const QuadPoly& P, cplx W) {
    return W - P.lambda / 2.0 - P.centred_c() / (2.0 * W);
}

double frac_turns(const Angle& t) { return t.to_double(); }

}  // namespace

cplx guided_pullback(const QuadPoly& P, cplx point, std::size_t k, cplx guide) {
    std::vector<cplx> orbit{guide};
    for (std::size_t j = 1; j < k; ++j) orbit.push_back(P(orbit.back()));
    cplx z = point;
    for (std::size_t j = k; j-- > 0;) {
        auto [a, b] = P.preimages(z);
        z = std::abs(a - orbit[j]) <= std::abs(b - orbit[j]) ? a : b;
    }
    return z;
}

RayTrace trace_ray(const QuadPoly& P, const Angle& t, const RayOptions& opts,
                   const std::optional<LandingAnchor>& anchor) {
    RayTrace rt;
    rt.angle = t;
    const double logR = std::log(opts.R0);
    const std::size_t total = opts.levels * opts.substeps;

    auto target = [&](double s, std::size_t& n) {
        n = static_cast<std::size_t>(std::ceil(s - 1e-12));
        double g = logR * std::exp2(-s);
        Angle tn(t.num() << n, t.den());
        cplx W = std::exp(cplx(std::ldexp(g, static_cast<int>(n)),
                               2.0 * std::numbers::pi * frac_turns(tn)));
        return phi_inverse(P, W);
    };
    auto solve = [&](double s, cplx z) -> std::optional<cplx> {
        std::size_t n = 0;
        cplx goal = target(s, n);
        double last = INFINITY;
        for (int it = 0; it < 40; ++it) {
            auto [f, d] = P.iterate(z, n);
            if (!std::isfinite(std::abs(f)) || std::abs(d) == 0.0) return std::nullopt;
            cplx step = (f - goal) / d;
            z -= step;
            last = std::abs(step);
            if (last < 1e-14 * (1.0 + std::abs(z))) return z;
        }
        // Rounding in P^n can stall the last digits.
        if (last < 1e-10 * (1.0 + std::abs(z))) return z;
        return std::nullopt;
    };

    // Continuation in s = log2(ln R0 / g).  A step is accepted when the Newton
    // root stays close to the linear prediction; otherwise it is halved.
    double s_cur = 0.0;
    std::size_t n0 = 0;
    cplx z_cur = target(0.0, n0);
    cplx velocity{};
    bool have_velocity = false;
    std::function<bool(double, int)> advance = [&](double s_next, int depth) -> bool {
        double ds = s_next - s_cur;
        cplx guess = have_velocity ? z_cur + velocity * ds : z_cur;
        auto z = solve(s_next, guess);
        bool ok = z.has_value();
        if (ok && have_velocity)
            ok = std::abs(*z - guess) <= 0.5 * std::abs(velocity * ds) + 1e-12 * (1.0 + std::abs(*z));
        if (ok) {
            velocity = (*z - z_cur) / ds;
            have_velocity = true;
            z_cur = *z;
            s_cur = s_next;
            return true;
        }
        if (depth >= 12) return false;
        double mid = 0.5 * (s_cur + s_next);
        return advance(mid, depth + 1) && advance(s_next, depth + 1);
    };

    rt.points.push_back(z_cur);
    rt.potentials.push_back(logR);
    for (std::size_t m = 1; m <= total; ++m) {
        double s = static_cast<double>(m) / static_cast<double>(opts.substeps);
        if (!advance(s, 0)) {
            rt.note = "Newton stopped at step " + std::to_string(m);
            break;
        }
        rt.points.push_back(z_cur);
        rt.potentials.push_back(logR * std::exp2(-s));
    }
    rt.deep_point = rt.points.back();
    rt.landing_estimate = rt.deep_point;
    rt.method = "raw";

    if (anchor) {
        rt.landing_estimate = guided_pullback(P, anchor->point, anchor->k, rt.deep_point);
        rt.method = "anchor-pullback";
        rt.landed = true;
        return rt;
    }

    OrbitInfo info = orbit_info(t);
    auto [w0, d0] = P.iterate(rt.deep_point, info.preperiod);
    (void)d0;
    cplx w = w0;
    bool converged = false;
    cplx mult{};
    for (int it = 0; it < 60; ++it) {
        auto [f, d] = P.iterate(w, info.period);
        cplx step = (f - w) / (d - 1.0);
        w -= step;
        mult = d;
        if (!std::isfinite(std::abs(w))) break;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(w))) {
            converged = true;
            mult = P.iterate(w, info.period).second;
            break;
        }
    }
    // Accept only a repelling point near the ray's tail.
    double tail = std::abs(w0 - P.iterate(rt.points[rt.points.size() > 9 ? rt.points.size() - 9 : 0],
                                          info.preperiod).first);
    if (converged && std::abs(mult) > 1.0 + 1e-9 && std::abs(w - w0) < std::max(0.05, 20.0 * tail)) {
        rt.multiplier = std::abs(mult);
        rt.landing_estimate = guided_pullback(P, w, info.preperiod, rt.deep_point);
        rt.method = "periodic-refinement";
        rt.landed = true;
    } else {
        rt.note += (rt.note.empty() ? "" : "; ") + std::string("periodic refinement rejected");
        // Fall back to the raw tail when it has settled over the last 5 levels.
        std::size_t back = 5 * opts.substeps;
        if (rt.points.size() > back &&
            std::abs(rt.points.back() - rt.points[rt.points.size() - 1 - back]) < 1e-6)
            rt.landed = true;
    }
    return rt;
}

RayTrace trace_ray_poly(cplx c, const Angle& t, const RayOptions& opts) {
    return trace_ray(QuadPoly{{0.0, 0.0}, c}, t, opts);
}

RayTrace trace_ray_siegel(cplx lambda, const Angle& t, const SiegelLanding* landing,
                          const RayOptions& opts) {
    QuadPoly P{lambda, {0.0, 0.0}};
    if (landing) {
        if (auto k = landing->critical_level(t))
            return trace_ray(P, t, opts, LandingAnchor{*k, P.critical_point()});
    }
    return trace_ray(P, t, opts);
}

}  // namespace siegelmate
