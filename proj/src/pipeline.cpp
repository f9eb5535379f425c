#include "siegelmate/pipeline.hpp"

#include "siegelmate/mating.hpp"
#include "siegelmate/rational.hpp"

#include <cmath>

namespace siegelmate {

namespace {

ImageSpec image_spec(const JobConfig& cfg) {
    ImageSpec s;
    s.width = static_cast<int>(cfg.count("render.width"));
    s.height = static_cast<int>(cfg.count("render.height"));
    s.span = cfg.number("render.span");
    s.center = {cfg.number("render.center_re"), cfg.number("render.center_im")};
    s.max_iter = static_cast<int>(cfg.count("render.max_iter"));
    s.points = cfg.count("render.points");
    s.seed = cfg.seed();
    return s;
}

nlohmann::json check(const std::string& name, bool pass, nlohmann::json detail = nlohmann::json::object()) {
    return {{"name", name}, {"pass", pass}, {"detail", std::move(detail)}};
}

// |g^p(c2) - c2|, or the preperiodic analogue.
double critical_relation(const RationalMapParams& G, const PcfSpec& spec) {
    const auto& g = G.map;
    std::vector<cplx> orbit{G.pcf_critical};
    for (std::size_t i = 0; i < spec.preperiod + spec.period + 1; ++i) orbit.push_back(g(orbit.back()));
    if (spec.superattracting()) return std::abs(orbit[spec.period] - orbit[0]);
    return std::abs(orbit[spec.preperiod + spec.period + 1] - orbit[spec.preperiod + 1]);
}

}  // namespace

std::optional<cplx> parameter_for_spec(const PcfSpec& spec) {
    static const std::vector<cplx> seeds = {{-1.0, 0.0}, {-1.75487766624669, 0.0}, {-0.122561166876654, 0.744861766619744},
                                            {-2.0, 0.0}, {-1.54368901269208, 0.0}};
    for (cplx c : seeds) {
        auto s = spec_for_parameter(c);
        if (s && s->mode == spec.mode && s->characteristic_angle == spec.characteristic_angle)
            return solve_pcf_c(spec, c).c;
    }
    return std::nullopt;
}

CommandOutput run_rayclass(const JobConfig& cfg, const Angle& t) {
    auto rsd = critical_angle_pair(cfg.theta(), cfg.count("depths.angle_bits"));
    SiegelLanding siegel(rsd.critical_leaf());
    auto spec = cfg.spec();
    auto pcf = landing_model(spec);
    auto cls = ray_class(t, siegel, *pcf);
    auto loops = detect_loops(cls);
    auto x1 = class_of_x1_guard(cls, siegel);
    CommandOutput out;
    out.result = {{"angle", t.str()},
                  {"theta", cfg.theta().name},
                  {"spec", spec.label()},
                  {"class", cls.to_json()},
                  {"loops", loops.to_json()},
                  {"x1", x1.to_json()}};
    return out;
}

CommandOutput run_t_graph(const JobConfig& cfg) {
    auto spec = cfg.spec();
    auto tree = build_hubbard_tree(spec);
    auto rsd = critical_angle_pair(cfg.theta(), cfg.count("depths.angle_bits"));
    DropTree drops(rsd, cfg.count("depths.drops"));
    auto T = build_T(tree, &drops);
    CommandOutput out;
    out.result = {{"spec", spec.label()}, {"hubbard", tree.to_json()}, {"t_graph", T.to_json()}};
    out.texts.emplace_back("t_graph.dot", T.to_dot());
    if (auto c = parameter_for_spec(spec)) {
        auto img = image_spec(cfg);
        auto raster = render_polynomial(*c, img);
        // mark the landing points of the rays of T
        for (const auto& r : T.rays) {
            auto trace = trace_ray_poly(*c, r.c_angle);
            int x, y;
            if (trace.landed && img.to_pixel(trace.landing_estimate, x, y))
                for (int dx = -1; dx <= 1; ++dx)
                    for (int dy = -1; dy <= 1; ++dy)
                        if (x + dx >= 0 && x + dx < img.width && y + dy >= 0 && y + dy < img.height)
                            raster.set(x + dx, y + dy, 255, 0, 0);
        }
        out.rasters.emplace_back("t_graph.ppm", std::move(raster));
        out.result["raster"] = "t_graph.ppm";
    } else {
        out.result["raster"] = "skipped: parameter not in the fixture table";
    }
    return out;
}

CommandOutput run_mate(const JobConfig& cfg) {
    const auto theta = cfg.theta();
    const auto spec = cfg.spec();
    CandidateOptions opts;
    opts.orbit_iterations = cfg.count("tolerances.orbit_iterations");
    opts.escape_radius = cfg.number("tolerances.escape_radius");
    opts.rotation_tol = cfg.number("tolerances.rotation");
    auto cand = solve_candidate_G(theta, spec, {}, opts);

    CommandOutput out;
    nlohmann::json checks = nlohmann::json::array();
    out.result = {{"theta", theta.name}, {"spec", spec.label()}, {"candidates", cand.to_json()}};
    checks.push_back(check("unique filtered root", cand.accepted.size() == 1, {{"count", cand.accepted.size()}}));

    if (cand.accepted.size() == 1) {
        const auto& G = cand.accepted.front();
        double rel = critical_relation(G, spec);
        checks.push_back(check("critical relation", rel < cfg.number("tolerances.residual"), {{"residual", rel}}));
        checks.push_back(check("multiplier at 0", G.deriv_error < 1e-12, {{"error", G.deriv_error}}));

        FateCounts fates;
        out.rasters.emplace_back("mate_G.ppm", render_rational(G, image_spec(cfg), &fates));
        bool basins = fates.siegel > 0 && (!spec.superattracting() || fates.cycle > 0);
        checks.push_back(check("raster basins", basins, fates.to_json()));
        out.result["raster"] = "mate_G.ppm";

        try {
            auto [center, radius] = repelling_base_disk(G, cfg.number("tolerances.probe_radius_fraction"));
            const std::size_t depth = cfg.count("depths.probe");
            auto probe = pullback_diameter_probe(G, center, radius, depth, cfg.count("depths.probe_samples"));
            double ratio = probe.max_diameter.back() / probe.max_diameter.front();
            checks.push_back(check("probe shrink", ratio < cfg.number("tolerances.probe_ratio"), {{"ratio", round12(ratio)}}));
            std::size_t lo = std::min<std::size_t>(10, depth);
            checks.push_back(check("probe tail", probe.tail_non_increasing(lo, depth, cfg.number("tolerances.probe_jitter")),
                                   {{"levels", {lo, depth}}}));
            out.result["probe"] = probe.to_json();
        } catch (const std::exception& e) {
            checks.push_back(check("probe shrink", false, {{"error", e.what()}}));
        }

        auto match = periodic_point_match(G, spec, cfg.count("depths.match_q"), cfg.count("depths.angle_bits"));
        nlohmann::json mj = nlohmann::json::array();
        bool all = true;
        for (const auto& m : match) {
            mj.push_back(m.to_json());
            all = all && m.match;
        }
        checks.push_back(check("periodic matching", all));
        out.result["periodic_match"] = mj;
    }

    bool yes = true;
    nlohmann::json failing = nlohmann::json::array();
    for (const auto& c : checks)
        if (!c["pass"].get<bool>()) {
            yes = false;
            failing.push_back(c["name"]);
        }
    out.result["checks"] = checks;
    out.result["failing"] = failing;
    out.result["verdict"] = yes ? "mating-consistent: yes" : "mating-consistent: no";
    return out;
}

}  // namespace siegelmate
