#pragma once

#include "siegelmate/complex_util.hpp"
#include "siegelmate/pcf.hpp"
#include "siegelmate/siegel.hpp"

#include "json.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace siegelmate {

/// Divergence, failed root finding or a solution violating minimality.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NewtonOptions {
    double tol = 1e-13;
    int max_iter = 100;
};

struct PcfSolution {
    cplx c;
    double residual = 0.0;
    int iterations = 0;
    std::vector<double> residual_trace;
};

/// Newton in c on P_c^p(0) = 0, or on P_c^(l+k+1)(0) = P_c^(l+1)(0) where
/// (l, k) describe the critical value.  Throws NumericError on divergence, on
/// residual >= 1e-12 or when the root has a smaller period or preperiod.
PcfSolution solve_pcf_c(const PcfSpec& spec, cplx seed, const NewtonOptions& opts = {});

/// g_a(z) = lambda z (1 + z) / (1 + a z).  Fixes 0 with multiplier lambda
/// and infinity with multiplier a / lambda.
struct RationalMap {
    cplx lambda;
    cplx a;

    cplx operator()(cplx z) const;
    cplx deriv(cplx z) const;
    /// Both critical points, roots of 1 + 2z + a z^2.
    std::pair<cplx, cplx> critical_points() const;
    /// The two solutions of g(z) = w.
    std::pair<cplx, cplx> preimages(cplx w) const;
    /// Finite fixed point other than 0.
    cplx third_fixed_point() const { return (1.0 - lambda) / (lambda - a); }
    bool degenerate() const;
};

struct RationalMapParams {
    std::string theta_name;
    double theta = 0.0;
    RationalMap map;
    cplx pcf_critical;      // c2: satisfies the postcritically finite relation
    cplx siegel_critical;   // c1: orbit accumulates on the Siegel boundary
    std::string portrait;
    double residual = 0.0;
    double siegel_orbit_max = 0.0;
    double siegel_rotation = 0.0;
    double deriv_error = 0.0;  // |g'(0) - lambda|

    nlohmann::json to_json() const;
};

struct CandidateOptions {
    double grid_radius = 4.0;
    double grid_step = 0.25;
    std::size_t orbit_iterations = 10000;
    double escape_radius = 1e4;
    double rotation_tol = 1e-2;
    /// Expected number of repelling fixed points (fixed ray classes); computed
    /// from the laminations when unset.
    std::optional<std::size_t> expected_repelling_fixed;
};

struct CandidateResult {
    std::vector<RationalMapParams> accepted;
    std::vector<std::pair<cplx, std::string>> rejected;  // root and failing filter
    std::size_t newton_roots = 0;
    std::size_t expected_repelling_fixed = 0;

    nlohmann::json to_json() const;
};

/// Newton in a from a seed grid (or the given seeds), then dynamical filters:
/// minimal portrait, bounded Siegel-side orbit rotating by theta, and the
/// repelling fixed-point count.
CandidateResult solve_candidate_G(const Theta& theta, const PcfSpec& spec,
                                  const std::vector<cplx>& seeds = {}, const CandidateOptions& opts = {});

struct Cycle {
    std::vector<cplx> points;  // infinity appears as a non-finite value
    cplx multiplier;
    std::string kind;  // "repelling", "attracting", "superattracting", "neutral"
};

struct PeriodicMatch {
    std::size_t q = 0;
    std::vector<Cycle> cycles;
    std::size_t repelling_cycles = 0;
    std::size_t ray_class_cycles = 0;
    bool match = false;

    nlohmann::json to_json() const;
};

/// Cycles of exact period q from the roots of the numerator of g^q(z) - z.
std::vector<Cycle> periodic_cycles(const RationalMap& g, std::size_t q);

/// Compares repelling q-cycles of G with periodic ray-class cycles for q <= q_max.
std::vector<PeriodicMatch> periodic_point_match(const RationalMapParams& G, const PcfSpec& spec,
                                                std::size_t q_max, std::size_t angle_bits = 40);

struct DiameterProbe {
    cplx base_center;
    double base_radius = 0.0;
    std::size_t depth = 0;
    std::size_t samples = 0;
    std::vector<double> max_diameter;   // spherical, per level (level 0 = base)
    std::vector<std::size_t> components;
    std::size_t split_warnings = 0;
    double postcritical_margin = 0.0;

    /// Levels lo..hi: d_{k+1} <= (1 + jitter) d_k.
    bool tail_non_increasing(std::size_t lo, std::size_t hi, double jitter = 0.05) const;
    nlohmann::json to_json() const;
};

/// Postcritical samples of G: the finite orbit of c2 and n points of the c1 orbit.
std::vector<cplx> postcritical_samples(const RationalMapParams& G, std::size_t n = 2000);

/// Base disk for the probe: the finite repelling fixed point when it is not
/// postcritical, otherwise the repelling 2-cycle point farthest from the
/// postcritical samples.  Radius is `fraction` of that distance.
std::pair<cplx, double> repelling_base_disk(const RationalMapParams& G, double fraction = 0.25);

/// Pulls the base circle back through every inverse branch `depth` times and
/// records the largest component per level.  Throws std::invalid_argument when
/// the base disk meets the postcritical samples or lies in the Siegel disk.
DiameterProbe pullback_diameter_probe(const RationalMapParams& G, cplx center, double radius,
                                      std::size_t depth, std::size_t samples = 96);

}  // namespace siegelmate
