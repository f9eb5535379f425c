#include "siegelmate/config.hpp"
#include "siegelmate/mating.hpp"
#include "siegelmate/pipeline.hpp"
#include "siegelmate/rational.hpp"
#include "siegelmate/render.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

using namespace siegelmate;
using json = nlohmann::json;

namespace {

struct Globals {
    std::string config_file;
    std::vector<std::string> sets;
    std::string theta, angle, mode, c, out_dir;
    std::optional<std::uint64_t> seed;
};

JobConfig make_config(const Globals& g) {
    JobConfig cfg = g.config_file.empty() ? JobConfig() : JobConfig::load(g.config_file);
    if (!g.theta.empty()) cfg.set("job.theta", g.theta);
    if (!g.mode.empty()) cfg.set("job.mode", g.mode);
    if (!g.angle.empty()) cfg.set("job.angle", g.angle);
    if (!g.c.empty()) cfg.set("job.c", g.c);
    if (g.seed) cfg.set("job.seed", std::to_string(*g.seed));
    if (!g.out_dir.empty()) cfg.set("job.output", g.out_dir);
    for (const auto& kv : g.sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ValidationError("--set expects key=value, got " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

Angle parse_angle(const std::string& text) {
    try {
        return Angle::parse(text);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("angle: ") + e.what());
    }
}

json angle_list(const std::vector<Angle>& xs) {
    json j = json::array();
    for (const auto& a : xs) j.push_back(a.str());
    return j;
}

// Prints the report and, with --out, writes it with its side files.  The
// wall-clock goes to a separate file so reports stay byte-stable.
void emit(const std::string& command, const JobConfig& cfg, const Globals& g, CommandOutput out, double seconds) {
    json report = report_envelope(command, cfg, std::move(out.result));
    const bool write = !g.out_dir.empty() || !out.rasters.empty();
    std::string name = command;
    if (write) report["wall_clock_file"] = name + ".timing.json";
    if (write) {
        // files first, so a write error leaves stdout with a single JSON object
        std::filesystem::path dir = cfg.get("job.output");
        std::filesystem::create_directories(dir);
        std::ofstream(dir / (name + ".json")) << report.dump(2) << "\n";
        std::ofstream(dir / (name + ".timing.json")) << json{{"wall_clock_seconds", seconds}}.dump(2) << "\n";
        for (const auto& [file, raster] : out.rasters) raster.write_ppm((dir / file).string());
        for (const auto& [file, text] : out.texts) std::ofstream(dir / file) << text;
    }
    std::cout << report.dump(2) << "\n";
}

CommandOutput cmd_angles(const Angle& t) {
    auto info = orbit_info(t);
    return {{{"angle", t.str()},
             {"preperiod", info.preperiod},
             {"period", info.period},
             {"orbit", angle_list(info.orbit)},
             {"conjugate", conjugate(t).str()},
             {"halves", {halves(t).first.str(), halves(t).second.str()}}},
            {},
            {}};
}

CommandOutput cmd_kneading(const Angle& t) {
    auto k = kneading(t);
    return {{{"angle", t.str()}, {"kneading", k.symbols}, {"preperiod", k.preperiod}, {"period", k.period}}, {}, {}};
}

CommandOutput cmd_rotation_set(const JobConfig& cfg, const std::string& pq) {
    CommandOutput out;
    if (!pq.empty()) {
        auto slash = pq.find('/');
        if (slash == std::string::npos) throw ValidationError("--pq expects p/q");
        unsigned p = static_cast<unsigned>(std::stoul(pq.substr(0, slash)));
        unsigned q = static_cast<unsigned>(std::stoul(pq.substr(slash + 1)));
        if (q < 2 || p == 0 || p >= q || q > 62) throw ValidationError("--pq needs 0 < p < q <= 62");
        auto rs = rotation_set_rational(p, q);
        out.result = {{"rotation", pq},
                      {"orbit", angle_list(rs.orbit)},
                      {"v_plus", rs.v_plus.str()},
                      {"v_minus", rs.v_minus.str()},
                      {"major_gap", {rs.gap_start.str(), rs.gap_end.str()}}};
        return out;
    }
    auto theta = cfg.theta();
    auto rsd = critical_angle_pair(theta, cfg.count("depths.angle_bits"));
    auto cf = continued_fraction(theta, 40);
    auto digits = [](const std::vector<int>& d) {
        std::string s;
        for (int x : d) s += static_cast<char>('0' + x);
        return s;
    };
    out.result = {{"theta", theta.name},
                  {"bits", rsd.bits},
                  {"t_plus", rsd.t_plus.str()},
                  {"t_minus", rsd.t_minus.str()},
                  {"digits_plus", digits(rsd.digits_plus)},
                  {"digits_minus", digits(rsd.digits_minus)},
                  {"critical_value", rsd.critical_value.str()},
                  {"min_margin_log2", round12(rsd.min_margin_log2)},
                  {"continued_fraction",
                   {{"coefficients", cf.coefficients},
                    {"bound", cf.bound},
                    {"bound_limit", cf.bound_limit},
                    {"within_limit", cf.within_limit},
                    {"status", cf.status}}}};
    return out;
}

CommandOutput cmd_drops(const JobConfig& cfg) {
    auto rsd = critical_angle_pair(cfg.theta(), cfg.count("depths.angle_bits"));
    DropTree tree(rsd, cfg.count("depths.drops"));
    json nodes = json::array(), counts = json::array();
    auto cj = [](cplx z) { return json::array({round12(z.real()), round12(z.imag())}); };
    for (const auto& n : tree.nodes()) {
        json j = {{"address", n.address}, {"depth", n.depth}, {"parent", n.parent}, {"center", cj(n.center)}};
        if (n.leaf) j["leaf"] = {n.leaf->a.str(), n.leaf->b.str()};
        if (n.depth > 0) j["attach_point"] = cj(n.attach_point);
        nodes.push_back(j);
    }
    for (std::size_t d = 0; d <= tree.max_depth(); ++d) counts.push_back(tree.count_at_depth(d));
    return {{{"theta", cfg.theta().name}, {"max_depth", tree.max_depth()}, {"counts", counts}, {"drops", nodes}}, {}, {}};
}

CommandOutput cmd_hubbard(const JobConfig& cfg) {
    auto tree = build_hubbard_tree(cfg.spec());
    return {{{"spec", cfg.spec().label()}, {"hubbard", tree.to_json()}}, {}, {}};
}

CommandOutput cmd_solve_c(const JobConfig& cfg, const std::string& seed_text) {
    auto spec = cfg.spec();
    cplx seed;
    if (!seed_text.empty()) {
        std::istringstream in(seed_text);
        double re = 0, im = 0;
        char sep = 0;
        if (!(in >> re)) throw ValidationError("--start expects re or re,im");
        if (in >> sep >> im && sep != ',') throw ValidationError("--start expects re or re,im");
        seed = {re, im};
    } else if (auto c = parameter_for_spec(spec)) {
        seed = *c + cplx(0.05, 0.0);
    } else {
        throw ValidationError("solve-c needs --start for specs outside the fixture table");
    }
    NewtonOptions opts;
    opts.tol = cfg.number("tolerances.newton");
    auto sol = solve_pcf_c(spec, seed, opts);
    json trace = json::array();
    for (double r : sol.residual_trace) trace.push_back(r);
    return {{{"spec", spec.label()},
             {"start", {seed.real(), seed.imag()}},
             {"c", {round12(sol.c.real()), round12(sol.c.imag())}},
             {"residual", sol.residual},
             {"iterations", sol.iterations},
             {"residual_trace", trace}},
            {},
            {}};
}

CommandOutput cmd_solve_g(const JobConfig& cfg) {
    CandidateOptions opts;
    opts.orbit_iterations = cfg.count("tolerances.orbit_iterations");
    opts.escape_radius = cfg.number("tolerances.escape_radius");
    opts.rotation_tol = cfg.number("tolerances.rotation");
    auto r = solve_candidate_G(cfg.theta(), cfg.spec(), {}, opts);
    json j = r.to_json();
    j["unique"] = r.accepted.size() == 1;
    return {j, {}, {}};
}

CommandOutput cmd_render(const JobConfig& cfg, const std::string& map, bool points) {
    ImageSpec img;
    img.width = static_cast<int>(cfg.count("render.width"));
    img.height = static_cast<int>(cfg.count("render.height"));
    img.span = cfg.number("render.span");
    img.center = {cfg.number("render.center_re"), cfg.number("render.center_im")};
    img.max_iter = static_cast<int>(cfg.count("render.max_iter"));
    img.points = cfg.count("render.points");
    img.seed = cfg.seed();
    CommandOutput out;
    if (map == "rational") {
        auto r = solve_candidate_G(cfg.theta(), cfg.spec());
        if (r.accepted.empty()) throw NumericError("no candidate map passes the filters");
        FateCounts fates;
        out.rasters.emplace_back("render.ppm", render_rational(r.accepted.front(), img, &fates));
        out.result = {{"map", "rational"}, {"a", {round12(r.accepted.front().map.a.real()), round12(r.accepted.front().map.a.imag())}},
                      {"fates", fates.to_json()}};
    } else {
        auto c = parameter_for_spec(cfg.spec());
        if (!c) throw ValidationError("render: parameter not in the fixture table");
        if (points) out.rasters.emplace_back("render.ppm", plot_points(julia_points(*c, img.points, img.seed), img));
        else out.rasters.emplace_back("render.ppm", render_polynomial(*c, img));
        out.result = {{"map", "polynomial"}, {"c", {round12(c->real()), round12(c->imag())}},
                      {"method", points ? "inverse-iteration" : "escape-time"}};
    }
    out.result["file"] = "render.ppm";
    return out;
}

// Class laws over sampled angles.  Any violation is a combinatorial error.
CommandOutput cmd_verify(const JobConfig& cfg, std::size_t samples) {
    auto rsd = critical_angle_pair(cfg.theta(), cfg.count("depths.angle_bits"));
    SiegelLanding siegel(rsd.critical_leaf());
    auto pcf = landing_model(cfg.spec());
    std::mt19937_64 rng(cfg.seed());
    std::uniform_int_distribution<long long> den(2, 255);
    json failures = json::array();
    std::size_t checked = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        long long q = den(rng);
        long long p = std::uniform_int_distribution<long long>(1, q - 1)(rng);
        Angle t(p, q);
        auto cls = ray_class(t, siegel, *pcf);
        auto again = ray_class(cls.rays.back().t, siegel, *pcf);
        bool ok = cls.is_tree() && cls.rays.size() <= 2 * cls.m && class_of_x1_guard(cls, siegel).ok &&
                  again.angles() == cls.angles();
        ++checked;
        if (!ok) failures.push_back(t.str());
    }
    if (!failures.empty()) throw CombinatorialError("class laws fail for " + failures.dump());
    return {{{"spec", cfg.spec().label()}, {"checked", checked}, {"failures", failures}}, {}, {}};
}

int fail(int code, const std::string& type, const std::string& message) {
    std::cout << json{{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}}.dump(2) << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Siegel / postcritically finite mating workbench"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_file, "TOML-like job file");
    app.add_option("--set", g.sets, "override a config key: section.key=value");
    app.add_option("--theta", g.theta, "golden, silver, cbrt(1/4) or a decimal");
    app.add_option("--angle", g.angle, "characteristic angle of the PCF polynomial");
    app.add_option("--mode", g.mode, "superattracting or misiurewicz");
    app.add_option("--c", g.c, "fixture parameter c (re or re,im)");
    app.add_option("--seed", g.seed, "seed for sampled angles and point clouds");
    app.add_option("--out", g.out_dir, "write reports and images to this directory");

    std::string t_text, pq, start, map = "polynomial";
    bool points = false;
    std::size_t samples = 100;
    auto* angles = app.add_subcommand("angles", "doubling orbit of an angle");
    angles->add_option("t", t_text)->required();
    auto* kneading_cmd = app.add_subcommand("kneading", "kneading sequence of an angle");
    kneading_cmd->add_option("t", t_text)->required();
    auto* hubbard = app.add_subcommand("hubbard", "Hubbard tree of the PCF polynomial");
    auto* rotation = app.add_subcommand("rotation-set", "rotation set digits or a rational rotation set");
    rotation->add_option("--pq", pq, "rational rotation number p/q");
    auto* drops = app.add_subcommand("drops", "drop tree of the Siegel polynomial");
    auto* rayclass = app.add_subcommand("rayclass", "ray-equivalence class of a theta-side angle");
    rayclass->add_option("t", t_text)->required();
    auto* tgraph = app.add_subcommand("t-graph", "the graph T with regions");
    auto* solve_c = app.add_subcommand("solve-c", "Newton for the PCF parameter");
    solve_c->add_option("--start", start, "Newton start re or re,im");
    auto* solve_g = app.add_subcommand("solve-g", "candidate rational map");
    auto* render = app.add_subcommand("render", "Julia set raster");
    render->add_option("--map", map, "polynomial or rational")->check(CLI::IsMember({"polynomial", "rational"}));
    render->add_flag("--points", points, "inverse iteration instead of escape time");
    auto* mate = app.add_subcommand("mate", "end-to-end mating check");
    auto* verify = app.add_subcommand("verify", "class laws over sampled angles");
    verify->add_option("--samples", samples, "number of sampled angles");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "validation", e.what());
    }

    try {
        JobConfig cfg = make_config(g);
        auto t0 = std::chrono::steady_clock::now();
        CommandOutput out;
        std::string name;
        if (angles->parsed()) out = cmd_angles(parse_angle(t_text)), name = "angles";
        else if (kneading_cmd->parsed()) out = cmd_kneading(parse_angle(t_text)), name = "kneading";
        else if (hubbard->parsed()) out = cmd_hubbard(cfg), name = "hubbard";
        else if (rotation->parsed()) out = cmd_rotation_set(cfg, pq), name = "rotation-set";
        else if (drops->parsed()) out = cmd_drops(cfg), name = "drops";
        else if (rayclass->parsed()) out = run_rayclass(cfg, parse_angle(t_text)), name = "rayclass";
        else if (tgraph->parsed()) out = run_t_graph(cfg), name = "t-graph";
        else if (solve_c->parsed()) out = cmd_solve_c(cfg, start), name = "solve-c";
        else if (solve_g->parsed()) out = cmd_solve_g(cfg), name = "solve-g";
        else if (render->parsed()) out = cmd_render(cfg, map, points), name = "render";
        else if (mate->parsed()) out = run_mate(cfg), name = "mate";
        else if (verify->parsed()) out = cmd_verify(cfg, samples), name = "verify";
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        emit(name, cfg, g, std::move(out), seconds);
        return 0;
    } catch (const std::invalid_argument& e) {  // includes ValidationError
        return fail(2, "validation", e.what());
    } catch (const NumericError& e) {
        return fail(3, "numeric", e.what());
    } catch (const PrecisionError& e) {
        return fail(3, "numeric", e.what());
    } catch (const DepthError& e) {
        return fail(3, "numeric", e.what());
    } catch (const CombinatorialError& e) {
        return fail(4, "combinatorial", e.what());
    } catch (const LaminationError& e) {
        return fail(4, "combinatorial", e.what());
    } catch (const std::exception& e) {
        return fail(1, "internal", e.what());
    }
}
