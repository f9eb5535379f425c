#include "siegelmate/rational.hpp"

#include "siegelmate/mating.hpp"

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>

namespace siegelmate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

cplx infinity() { return {kInf, kInf}; }

nlohmann::json cjson(cplx z) {
    if (!finite(z)) return "inf";
    return nlohmann::json::array({round12(z.real()), round12(z.imag())});
}

// Stable roots of A z^2 + B z + C.
std::pair<cplx, cplx> quadratic_roots(cplx A, cplx B, cplx C) {
    cplx s = std::sqrt(B * B - 4.0 * A * C);
    if (std::real(std::conj(B) * s) < 0.0) s = -s;
    cplx q = -0.5 * (B + s);
    if (std::abs(q) == 0.0) return {0.0, 0.0};
    return {q / A, C / q};
}

// Orbit of 0 under z^2 + c with d/dc.
struct QuadOrbit {
    std::vector<cplx> z, dz;
};
QuadOrbit quad_orbit(cplx c, std::size_t n) {
    QuadOrbit o;
    o.z.assign(n + 1, 0.0);
    o.dz.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        o.z[i + 1] = o.z[i] * o.z[i] + c;
        o.dz[i + 1] = 2.0 * o.z[i] * o.dz[i] + 1.0;
    }
    return o;
}

constexpr double kMinimalSep = 1e-6;

// Nonzero when the relation already holds at a smaller period or preperiod.
bool quad_minimal(const PcfSpec& spec, cplx c) {
    const std::size_t p = spec.period, l = spec.preperiod;
    auto o = quad_orbit(c, l + p + 2);
    if (spec.superattracting()) {
        for (std::size_t j = 1; j < p; ++j)
            if (std::abs(o.z[j]) < kMinimalSep) return false;
        return true;
    }
    if (std::abs(c) < kMinimalSep) return false;
    for (std::size_t j = 1; j < p; ++j)
        if (std::abs(o.z[l + 1 + j] - o.z[l + 1]) < kMinimalSep) return false;
    return std::abs(o.z[l + p] - o.z[l]) > kMinimalSep;
}

// Orbit of the critical point under g_a with derivatives in a.
struct RatRelation {
    cplx F, dF;
    bool ok = true;
};

RatRelation rat_relation(const PcfSpec& spec, cplx lambda, cplx a, cplx c, cplx dc) {
    const std::size_t p = spec.period, l = spec.preperiod;
    const std::size_t n = spec.superattracting() ? p : l + p + 1;
    cplx z = c, dz = dc;
    cplx zl, dzl;
    for (std::size_t i = 1; i <= n; ++i) {
        cplx den = 1.0 + a * z;
        cplx den2 = den * den;
        cplx gz = lambda * (1.0 + 2.0 * z + a * z * z) / den2;
        cplx ga = -lambda * z * z * (1.0 + z) / den2;
        cplx nz = lambda * z * (1.0 + z) / den;
        dz = gz * dz + ga;
        z = nz;
        if (!finite(z) || !finite(dz)) return {0.0, 0.0, false};
        if (!spec.superattracting() && i == l + 1) {
            zl = z;
            dzl = dz;
        }
    }
    if (spec.superattracting()) return {z - c, dz - dc, true};
    return {z - zl, dz - dzl, true};
}

std::vector<cplx> rat_orbit(const RationalMap& g, cplx z, std::size_t n) {
    std::vector<cplx> out{z};
    for (std::size_t i = 0; i < n; ++i) out.push_back(z = g(z));
    return out;
}

bool rat_minimal(const PcfSpec& spec, const RationalMap& g, cplx c) {
    const std::size_t p = spec.period, l = spec.preperiod;
    auto o = rat_orbit(g, c, l + p + 2);
    auto sep = [](cplx x, cplx y) { return chordal(x, y) > kMinimalSep; };
    if (spec.superattracting()) {
        for (std::size_t j = 1; j < p; ++j)
            if (!sep(o[j], c)) return false;
        return true;
    }
    if (!sep(o[1], c)) return false;
    for (std::size_t j = 1; j < p; ++j)
        if (!sep(o[l + 1 + j], o[l + 1])) return false;
    return sep(o[l + p], o[l]);
}

std::string classify(cplx mult) {
    double m = std::abs(mult);
    if (m < 1e-9) return "superattracting";
    if (m < 1.0 - 1e-9) return "attracting";
    if (m > 1.0 + 1e-9) return "repelling";
    return "neutral";
}

std::size_t thread_count() {
    if (const char* env = std::getenv("SIEGELMATE_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

// solve_pcf_c ----------------------------------------------------------------

PcfSolution solve_pcf_c(const PcfSpec& spec, cplx seed, const NewtonOptions& opts) {
    const std::size_t p = spec.period, l = spec.preperiod;
    auto relation = [&](cplx c) -> std::pair<cplx, cplx> {
        if (spec.superattracting()) {
            auto o = quad_orbit(c, p);
            return {o.z[p], o.dz[p]};
        }
        auto o = quad_orbit(c, l + p + 1);
        return {o.z[l + p + 1] - o.z[l + 1], o.dz[l + p + 1] - o.dz[l + 1]};
    };
    PcfSolution sol;
    cplx c = seed;
    for (int it = 0; it < opts.max_iter; ++it) {
        auto [F, dF] = relation(c);
        sol.residual_trace.push_back(std::abs(F));
        if (!finite(F) || !finite(dF) || std::abs(dF) == 0.0)
            throw NumericError("Newton in c diverged from seed " + std::to_string(seed.real()));
        cplx step = F / dF;
        c -= step;
        sol.iterations = it + 1;
        if (std::abs(step) < opts.tol * (1.0 + std::abs(c))) break;
    }
    auto [F, dF] = relation(c);
    sol.c = c;
    sol.residual = std::abs(F);
    sol.residual_trace.push_back(sol.residual);
    if (!(sol.residual < 1e-12))
        throw NumericError("Newton in c did not converge (residual " + std::to_string(sol.residual) + ")");
    if (!quad_minimal(spec, c))
        throw NumericError("root has a smaller period or preperiod than " + spec.label());
    return sol;
}

// RationalMap ----------------------------------------------------------------

cplx RationalMap::operator()(cplx z) const {
    if (!finite(z)) return infinity();
    cplx den = 1.0 + a * z;
    if (std::abs(den) == 0.0) return infinity();
    return lambda * z * (1.0 + z) / den;
}

cplx RationalMap::deriv(cplx z) const {
    cplx den = 1.0 + a * z;
    return lambda * (1.0 + 2.0 * z + a * z * z) / (den * den);
}

std::pair<cplx, cplx> RationalMap::critical_points() const {
    if (std::abs(a) < 1e-300) return {-0.5, infinity()};
    return quadratic_roots(a, 2.0, 1.0);
}

std::pair<cplx, cplx> RationalMap::preimages(cplx w) const {
    if (!finite(w)) return {-1.0 / a, infinity()};
    return quadratic_roots(lambda, lambda - w * a, -w);
}

bool RationalMap::degenerate() const { return std::abs(a - 1.0) < 1e-6 || std::abs(a) < 1e-6; }

nlohmann::json RationalMapParams::to_json() const {
    return {{"theta", theta_name},
            {"theta_value", round12(theta)},
            {"lambda", cjson(map.lambda)},
            {"a", cjson(map.a)},
            {"pcf_critical", cjson(pcf_critical)},
            {"siegel_critical", cjson(siegel_critical)},
            {"portrait", portrait},
            {"residual", residual},
            {"siegel_orbit_max", round12(siegel_orbit_max)},
            {"siegel_rotation", round12(siegel_rotation)},
            {"deriv_error", deriv_error}};
}

nlohmann::json CandidateResult::to_json() const {
    nlohmann::json acc = nlohmann::json::array(), rej = nlohmann::json::array();
    for (const auto& g : accepted) acc.push_back(g.to_json());
    for (const auto& [a, why] : rejected) rej.push_back({{"a", cjson(a)}, {"reason", why}});
    return {{"accepted", acc},
            {"rejected", rej},
            {"newton_roots", newton_roots},
            {"expected_repelling_fixed", expected_repelling_fixed}};
}

// Candidate search -----------------------------------------------------------

namespace {

struct RawRoot {
    cplx a;
    cplx c2;
    double residual;
};

std::optional<RawRoot> newton_a(const PcfSpec& spec, cplx lambda, cplx a, int choice) {
    auto pick = [](const RationalMap& g, int which) {
        auto [u, v] = g.critical_points();
        return which == 0 ? u : v;
    };
    RationalMap g0{lambda, a};
    if (g0.degenerate()) return std::nullopt;
    cplx c = pick(g0, choice);
    for (int it = 0; it < 100; ++it) {
        RationalMap g{lambda, a};
        if (g.degenerate()) return std::nullopt;
        auto [u, v] = g.critical_points();
        c = std::abs(u - c) <= std::abs(v - c) ? u : v;  // continuity
        if (!finite(c)) return std::nullopt;
        cplx dc = -c * c / (2.0 * a * c + 2.0);
        auto r = rat_relation(spec, lambda, a, c, dc);
        if (!r.ok || std::abs(r.dF) == 0.0) return std::nullopt;
        cplx step = r.F / r.dF;
        if (std::abs(step) > 0.5) step *= 0.5 / std::abs(step);
        a -= step;
        if (!finite(a) || std::abs(a) > 1e6) return std::nullopt;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(a))) break;
    }
    RationalMap g{lambda, a};
    if (g.degenerate()) return RawRoot{a, 0.0, 0.0};
    auto [u, v] = g.critical_points();
    c = std::abs(u - c) <= std::abs(v - c) ? u : v;
    auto r = rat_relation(spec, lambda, a, c, -c * c / (2.0 * a * c + 2.0));
    if (!r.ok || !(std::abs(r.F) < 1e-10)) return std::nullopt;
    return RawRoot{a, c, std::abs(r.F)};
}

std::size_t fixed_ray_classes(const Theta& theta, const PcfSpec& spec) {
    auto rsd = critical_angle_pair(theta, 48);
    SiegelLanding siegel(rsd.critical_leaf());
    auto pcf = landing_model(spec);
    return periodic_ray_classes(1, siegel, *pcf, 12).size();
}

// Rotation number p/q of the rays at the alpha fixed point: the limb whose
// closed wake (shortest gap of the p/q rotation set) holds the angle.
std::optional<double> alpha_rotation(const Angle& t) {
    for (unsigned q = 2; q <= 24; ++q)
        for (unsigned p = 1; p < q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            auto rs = rotation_set_rational(p, q);
            const auto& o = rs.orbit;
            for (std::size_t i = 0; i + 1 < o.size(); ++i)
                if (o[i + 1] - o[i] == Angle(1, (1LL << q) - 1) && o[i] <= t && t <= o[i + 1])
                    return static_cast<double>(p) / q;
        }
    return std::nullopt;
}

// For a critical value landing on a fixed point: whether that point is beta.
std::optional<bool> lands_on_beta(const PcfSpec& spec) {
    if (spec.superattracting() || spec.period != 1) return std::nullopt;
    Angle t = spec.characteristic_angle;
    for (std::size_t i = 0; i <= spec.preperiod + 1; ++i, t = doubled(t))
        if (t.is_zero()) return true;
    return false;
}

double turn_distance(double x, double y) {
    double d = std::fmod(std::abs(x - y), 1.0);
    return std::min(d, 1.0 - d);
}

}  // namespace

CandidateResult solve_candidate_G(const Theta& theta, const PcfSpec& spec, const std::vector<cplx>& seeds,
                                  const CandidateOptions& opts) {
    const cplx lambda = theta.lambda();
    std::vector<cplx> grid = seeds;
    if (grid.empty()) {
        const double R = opts.grid_radius, h = opts.grid_step;
        const int n = static_cast<int>(std::floor(R / h + 1e-9));
        for (int i = -n; i <= n; ++i)
            for (int j = -n; j <= n; ++j) {
                // half-step offset keeps seeds off the degenerate a = 0 and a = 1
                cplx a(i * h + h / 3.0, j * h + h / 7.0);
                if (std::abs(a) <= R) grid.push_back(a);
            }
    }
    std::vector<RawRoot> roots;
    for (cplx seed : grid)
        for (int choice = 0; choice < 2; ++choice) {
            auto r = newton_a(spec, lambda, seed, choice);
            if (!r) continue;
            bool dup = std::any_of(roots.begin(), roots.end(), [&](const RawRoot& x) {
                return std::abs(x.a - r->a) < 1e-7 && std::abs(x.c2 - r->c2) < 1e-6;
            });
            if (!dup) roots.push_back(*r);
        }
    std::sort(roots.begin(), roots.end(), [](const RawRoot& x, const RawRoot& y) {
        if (x.a.real() != y.a.real()) return x.a.real() < y.a.real();
        return x.a.imag() < y.a.imag();
    });

    CandidateResult out;
    out.newton_roots = roots.size();
    out.expected_repelling_fixed = opts.expected_repelling_fixed ? *opts.expected_repelling_fixed
                                                                : fixed_ray_classes(theta, spec);
    for (const auto& r : roots) {
        RationalMap g{lambda, r.a};
        if (g.degenerate()) {
            out.rejected.emplace_back(r.a, "degenerate map");
            continue;
        }
        if (!rat_minimal(spec, g, r.c2)) {
            out.rejected.emplace_back(r.a, "portrait not minimal");
            continue;
        }
        auto post = rat_orbit(g, r.c2, spec.preperiod + spec.period + 1);
        if (std::any_of(post.begin() + 1, post.end(), [](cplx z) { return finite(z) && std::abs(z) < 1e-8; })) {
            out.rejected.emplace_back(r.a, "critical orbit meets the Siegel centre");
            continue;
        }
        auto [u, v] = g.critical_points();
        cplx c1 = std::abs(u - r.c2) <= std::abs(v - r.c2) ? v : u;
        std::vector<cplx> orbit;
        orbit.reserve(opts.orbit_iterations);
        cplx z = c1;
        bool escaped = false;
        double zmax = 0.0;
        for (std::size_t i = 0; i < opts.orbit_iterations; ++i) {
            z = g(z);
            if (!finite(z) || std::abs(z) > opts.escape_radius) {
                escaped = true;
                break;
            }
            zmax = std::max(zmax, std::abs(z));
            orbit.push_back(z);
        }
        if (escaped) {
            out.rejected.emplace_back(r.a, "Siegel-side orbit escapes");
            continue;
        }
        double rot = orbit_rotation_number(orbit, 0.0);
        double th = theta.to_double();
        double drot = std::abs(rot - th);
        drot = std::min(drot, 1.0 - drot);
        if (drot > opts.rotation_tol) {
            out.rejected.emplace_back(r.a, "rotation number mismatch");
            continue;
        }
        std::size_t repelling = 0;
        if (std::abs(r.a / lambda) > 1.0 + 1e-9) ++repelling;
        cplx zs = g.third_fixed_point();
        if (finite(zs) && std::abs(g.deriv(zs)) > 1.0 + 1e-9) ++repelling;
        if (repelling != out.expected_repelling_fixed) {
            out.rejected.emplace_back(r.a, "repelling fixed-point count");
            continue;
        }
        // Normal form.  The two normalisations of one map swap infinity and
        // z*; alpha is taken to be the less repelling of the two.
        const double mu_inf = std::abs(r.a / lambda), mu_star = std::abs(g.deriv(zs));
        const bool alpha_at_inf = mu_inf < mu_star;
        if (auto beta = lands_on_beta(spec)) {
            // the critical orbit lands on z*, so z* must carry the right class
            if (*beta != alpha_at_inf) {
                out.rejected.emplace_back(r.a, "critical orbit lands on the wrong fixed class");
                continue;
            }
        } else if (!alpha_at_inf) {
            out.rejected.emplace_back(r.a, "normal form: alpha not at infinity");
            continue;
        }
        RationalMapParams P;
        P.theta_name = theta.name;
        P.theta = th;
        P.map = g;
        P.pcf_critical = r.c2;
        P.siegel_critical = c1;
        P.portrait = spec.label();
        P.residual = r.residual;
        P.siegel_orbit_max = zmax;
        P.siegel_rotation = rot;
        P.deriv_error = std::abs(g.deriv(0.0) - lambda);
        out.accepted.push_back(P);
    }

    // Among maps of the same period, the one whose alpha multiplier turns by
    // the alpha rotation of the polynomial.
    if (auto rho = alpha_rotation(spec.characteristic_angle); rho && out.accepted.size() > 1) {
        auto dist = [&](const RationalMapParams& P) {
            const auto& g = P.map;
            cplx mi = g.a / g.lambda, ms = g.deriv(g.third_fixed_point());
            cplx mu = std::abs(mi) < std::abs(ms) ? mi : ms;
            return turn_distance(std::arg(mu) / (2.0 * std::numbers::pi), *rho);
        };
        double best = 1.0;
        for (const auto& P : out.accepted) best = std::min(best, dist(P));
        std::vector<RationalMapParams> kept;
        for (const auto& P : out.accepted) {
            if (dist(P) <= best + 0.02) kept.push_back(P);
            else out.rejected.emplace_back(P.map.a, "alpha multiplier turns away from the alpha rotation");
        }
        out.accepted = std::move(kept);
    }
    return out;
}

// Periodic points ------------------------------------------------------------

std::vector<Cycle> periodic_cycles(const RationalMap& g, std::size_t q) {
    using Poly = std::vector<cplx>;
    auto add = [](const Poly& x, const Poly& y) {
        Poly r(std::max(x.size(), y.size()), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) r[i] += x[i];
        for (std::size_t i = 0; i < y.size(); ++i) r[i] += y[i];
        return r;
    };
    auto mul = [](const Poly& x, const Poly& y) {
        Poly r(x.size() + y.size() - 1, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < y.size(); ++j) r[i + j] += x[i] * y[j];
        return r;
    };
    auto scale = [](Poly x, cplx s) {
        for (auto& v : x) v *= s;
        return x;
    };
    // g^k = N_k / D_k
    Poly N{0.0, g.lambda, g.lambda}, D{1.0, g.a};
    for (std::size_t k = 1; k < q; ++k) {
        Poly Nn = scale(mul(N, add(D, N)), g.lambda);
        Poly Dn = mul(D, add(D, scale(N, g.a)));
        N = std::move(Nn);
        D = std::move(Dn);
    }
    Poly F = add(N, scale(mul(Poly{0.0, 1.0}, D), -1.0));
    double big = 0.0;
    for (auto v : F) big = std::max(big, std::abs(v));
    while (F.size() > 1 && std::abs(F.back()) < 1e-12 * big) F.pop_back();

    std::vector<cplx> roots;
    if (F.size() > 1) {
        Eigen::Matrix<cplx, Eigen::Dynamic, 1> coeffs(F.size());
        for (std::size_t i = 0; i < F.size(); ++i) coeffs[static_cast<Eigen::Index>(i)] = F[i];
        Eigen::PolynomialSolver<cplx, Eigen::Dynamic> solver(coeffs);
        for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
            cplx z = solver.roots()[i];
            // polish on g^q(z) - z
            for (int it = 0; it < 30; ++it) {
                cplx w = z, dw = 1.0;
                for (std::size_t k = 0; k < q; ++k) {
                    dw *= g.deriv(w);
                    w = g(w);
                }
                if (!finite(w) || std::abs(dw - 1.0) < 1e-14) break;
                cplx step = (w - z) / (dw - 1.0);
                if (!finite(step) || std::abs(step) > 1e-2 * (1.0 + std::abs(z))) break;
                z -= step;
                if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
            }
            roots.push_back(z);
        }
    }
    if (q == 1 && std::abs(g.a) > 0.0) roots.push_back(infinity());

    auto same = [](cplx x, cplx y) {
        if (!finite(x) || !finite(y)) return !finite(x) && !finite(y);
        return chordal(x, y) < 1e-7;
    };
    std::vector<Cycle> cycles;
    std::vector<char> used(roots.size(), 0);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        cplx z = roots[i];
        std::size_t exact = 0;
        cplx w = z;
        for (std::size_t j = 1; j <= q; ++j) {
            w = g(w);
            if (same(w, z)) {
                exact = j;
                break;
            }
        }
        used[i] = 1;
        if (exact != q) continue;
        Cycle c;
        cplx mult = 1.0;
        w = z;
        for (std::size_t j = 0; j < q; ++j) {
            c.points.push_back(w);
            for (std::size_t k = 0; k < roots.size(); ++k)
                if (!used[k] && same(roots[k], w)) used[k] = 1;
            mult *= finite(w) ? g.deriv(w) : g.a / g.lambda;
            w = g(w);
        }
        c.multiplier = mult;
        c.kind = classify(mult);
        cycles.push_back(std::move(c));
    }
    return cycles;
}

nlohmann::json PeriodicMatch::to_json() const {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : cycles) {
        nlohmann::json pts = nlohmann::json::array();
        for (auto z : c.points) pts.push_back(cjson(z));
        cs.push_back({{"points", pts}, {"multiplier_abs", round12(std::abs(c.multiplier))}, {"kind", c.kind}});
    }
    return {{"q", q},
            {"cycles", cs},
            {"repelling_cycles", repelling_cycles},
            {"ray_class_cycles", ray_class_cycles},
            {"match", match}};
}

std::vector<PeriodicMatch> periodic_point_match(const RationalMapParams& G, const PcfSpec& spec,
                                                std::size_t q_max, std::size_t angle_bits) {
    auto rsd = critical_angle_pair(Theta::parse(G.theta_name), angle_bits);
    SiegelLanding siegel(rsd.critical_leaf());
    auto pcf = landing_model(spec);
    std::vector<PeriodicMatch> out;
    for (std::size_t q = 1; q <= q_max; ++q) {
        PeriodicMatch m;
        m.q = q;
        m.cycles = periodic_cycles(G.map, q);
        for (const auto& c : m.cycles)
            if (c.kind == "repelling") ++m.repelling_cycles;
        // rays landing on a q-cycle have period a multiple of q; 2q + 4 covers
        // the valences that occur for quadratic pairs at these periods
        unsigned bound = static_cast<unsigned>(std::min<std::size_t>(2 * q + 4, 16));
        m.ray_class_cycles = periodic_ray_classes(q, siegel, *pcf, bound).size() / q;
        m.match = m.repelling_cycles == m.ray_class_cycles;
        out.push_back(std::move(m));
    }
    return out;
}

// Diameter probe -------------------------------------------------------------

bool DiameterProbe::tail_non_increasing(std::size_t lo, std::size_t hi, double jitter) const {
    hi = std::min(hi, max_diameter.empty() ? 0 : max_diameter.size() - 1);
    for (std::size_t k = lo; k < hi; ++k)
        if (max_diameter[k + 1] > (1.0 + jitter) * max_diameter[k]) return false;
    return true;
}

nlohmann::json DiameterProbe::to_json() const {
    nlohmann::json d = nlohmann::json::array();
    for (double x : max_diameter) d.push_back(round12(x));
    return {{"base_center", cjson(base_center)},
            {"base_radius", round12(base_radius)},
            {"depth", depth},
            {"samples", samples},
            {"max_diameter", d},
            {"components", components},
            {"split_warnings", split_warnings},
            {"postcritical_margin", round12(postcritical_margin)}};
}

std::vector<cplx> postcritical_samples(const RationalMapParams& G, std::size_t n) {
    const auto& g = G.map;
    std::vector<cplx> out;
    cplx z = G.pcf_critical;
    for (int i = 0; i < 64; ++i) {
        z = g(z);
        bool seen = std::any_of(out.begin(), out.end(), [&](cplx w) {
            return finite(w) && finite(z) ? std::abs(w - z) < 1e-9 : !finite(w) && !finite(z);
        });
        if (seen) break;
        out.push_back(z);
    }
    z = G.siegel_critical;
    for (std::size_t i = 0; i < n; ++i) out.push_back(z = g(z));
    return out;
}

namespace {

struct ProbeStats {
    std::vector<double> maxd;
    std::vector<std::size_t> count;
    std::size_t warnings = 0;
};

double approx_diameter(const std::vector<cplx>& pts) {
    // double sweep, exact only when it matters to the caller
    std::size_t far = 0;
    double best = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double d = chordal(pts[0], pts[i]);
        if (d > best) best = d, far = i;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) best = std::max(best, chordal(pts[far], pts[i]));
    return best;
}

struct Puller {
    const RationalMap& g;
    std::size_t depth;

    // Pullback of a closed curve: two components, or one double-length
    // component (thinned back to the input size) when the curve surrounds a
    // critical value and the lift closes up through the other preimage.
    std::vector<std::vector<cplx>> split(const std::vector<cplx>& poly, std::size_t& warnings) const {
        const std::size_t K = poly.size();
        std::vector<std::pair<cplx, cplx>> pre(K);
        for (std::size_t i = 0; i < K; ++i) pre[i] = g.preimages(poly[i]);
        auto follow = [&](cplx start, std::vector<cplx>& out) {
            out.resize(K);
            out[0] = start;
            for (std::size_t i = 1; i < K; ++i) {
                auto [u, v] = pre[i];
                double du = std::abs(u - out[i - 1]), dv = std::abs(v - out[i - 1]);
                out[i] = du <= dv ? u : v;
                if (std::min(du, dv) > 0.5 * std::abs(u - v)) ++warnings;
            }
            auto [u, v] = pre[0];
            return std::abs(u - out[K - 1]) <= std::abs(v - out[K - 1]) ? u : v;
        };
        std::vector<std::vector<cplx>> out(2);
        cplx next = follow(pre[0].first, out[0]);
        follow(pre[0].second, out[1]);
        if (std::abs(next - pre[0].first) <= std::abs(next - pre[0].second)) return out;
        std::vector<cplx> joined;
        joined.reserve(K);
        for (std::size_t i = 0; i < 2 * K; i += 2) joined.push_back(i < K ? out[0][i] : out[1][i - K]);
        return {std::move(joined)};
    }

    void run(const std::vector<cplx>& poly, std::size_t level, ProbeStats& st) const {
        double d = approx_diameter(poly);
        if (d > 0.45 * st.maxd[level]) d = chordal_diameter(poly);
        st.maxd[level] = std::max(st.maxd[level], d);
        ++st.count[level];
        if (level == depth) return;
        for (const auto& child : split(poly, st.warnings)) run(child, level + 1, st);
    }
};

}  // namespace

std::pair<cplx, double> repelling_base_disk(const RationalMapParams& G, double fraction) {
    auto post = postcritical_samples(G);
    auto clearance = [&](cplx z) {
        double d = kInf;
        for (cplx p : post)
            if (finite(p)) d = std::min(d, std::abs(p - z));
        return d;
    };
    cplx zs = G.map.third_fixed_point();
    if (finite(zs) && std::abs(G.map.deriv(zs)) > 1.0 && clearance(zs) > 1e-6) return {zs, fraction * clearance(zs)};
    std::optional<cplx> best;
    double best_d = 0.0;
    for (const auto& c : periodic_cycles(G.map, 2)) {
        if (c.kind != "repelling") continue;
        for (cplx z : c.points)
            if (finite(z) && clearance(z) > best_d) best = z, best_d = clearance(z);
    }
    if (!best) throw NumericError("no repelling base point away from the postcritical set");
    return {*best, fraction * best_d};
}

DiameterProbe pullback_diameter_probe(const RationalMapParams& G, cplx center, double radius, std::size_t depth,
                                      std::size_t samples) {
    if (radius <= 0.0 || samples < 8) throw std::invalid_argument("diameter probe needs radius > 0 and >= 8 samples");
    auto post = postcritical_samples(G);
    double margin = kInf, inner = kInf;
    for (std::size_t i = 0; i < post.size(); ++i) {
        if (!finite(post[i])) continue;
        margin = std::min(margin, std::abs(post[i] - center) - radius);
    }
    // Siegel disk: the c1 orbit closes around 0; its minimal modulus bounds an inner disk
    auto ring = rat_orbit(G.map, G.siegel_critical, 2000);
    for (std::size_t i = 1; i < ring.size(); ++i) inner = std::min(inner, std::abs(ring[i]));
    if (!(margin > 0.0)) throw std::invalid_argument("base disk meets the postcritical samples");
    if (std::abs(center) + radius < inner || std::abs(center) < inner)
        throw std::invalid_argument("base disk lies in the Siegel disk");

    DiameterProbe P;
    P.base_center = center;
    P.base_radius = radius;
    P.depth = depth;
    P.samples = samples;
    P.postcritical_margin = margin;

    std::vector<cplx> base(samples);
    for (std::size_t i = 0; i < samples; ++i)
        base[i] = center + radius * unit(static_cast<double>(i) / static_cast<double>(samples));

    Puller puller{G.map, depth};
    // split the top of the tree into independent subtrees
    ProbeStats head;
    head.maxd.assign(depth + 1, 0.0);
    head.count.assign(depth + 1, 0);
    std::vector<std::pair<std::vector<cplx>, std::size_t>> tasks;
    const std::size_t split = std::min<std::size_t>(depth, 4);
    std::function<void(const std::vector<cplx>&, std::size_t)> expand = [&](const std::vector<cplx>& poly,
                                                                           std::size_t level) {
        if (level == split) {
            tasks.emplace_back(poly, level);
            return;
        }
        double d = chordal_diameter(poly);
        head.maxd[level] = std::max(head.maxd[level], d);
        ++head.count[level];
        for (const auto& child : puller.split(poly, head.warnings)) expand(child, level + 1);
    };
    expand(base, 0);

    const std::size_t nt = std::min(thread_count(), tasks.size());
    std::vector<ProbeStats> stats(std::max<std::size_t>(nt, 1));
    for (auto& s : stats) {
        s.maxd.assign(depth + 1, 0.0);
        s.count.assign(depth + 1, 0);
    }
    auto work = [&](std::size_t t) {
        for (std::size_t i = t; i < tasks.size(); i += stats.size()) puller.run(tasks[i].first, tasks[i].second, stats[t]);
    };
    if (stats.size() == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < stats.size(); ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    P.max_diameter = head.maxd;
    P.components = head.count;
    P.split_warnings = head.warnings;
    for (const auto& s : stats) {
        for (std::size_t k = 0; k <= depth; ++k) {
            P.max_diameter[k] = std::max(P.max_diameter[k], s.maxd[k]);
            P.components[k] += s.count[k];
        }
        P.split_warnings += s.warnings;
    }
    return P;
}

}  // namespace siegelmate
