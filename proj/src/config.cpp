#include "siegelmate/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace siegelmate {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

}  // namespace

JobConfig::JobConfig() {
    values_ = {
        {"job.theta", "golden"},
        {"job.mode", "superattracting"},
        {"job.angle", "1/3"},
        {"job.c", ""},
        {"job.period", ""},
        {"job.preperiod", ""},
        {"job.seed", "1"},
        {"job.output", "siegelmate-out"},
        {"depths.angle_bits", "64"},
        {"depths.lamination", "8"},
        {"depths.drops", "6"},
        {"depths.probe", "20"},
        {"depths.probe_samples", "96"},
        {"depths.match_q", "2"},
        {"tolerances.newton", "1e-13"},
        {"tolerances.residual", "1e-9"},
        {"tolerances.rotation", "0.01"},
        {"tolerances.orbit_iterations", "10000"},
        {"tolerances.escape_radius", "10000"},
        {"tolerances.probe_ratio", "0.1"},
        {"tolerances.probe_jitter", "0.05"},
        {"tolerances.probe_radius_fraction", "0.25"},
        {"render.width", "256"},
        {"render.height", "256"},
        {"render.span", "4"},
        {"render.center_re", "0"},
        {"render.center_im", "0"},
        {"render.max_iter", "400"},
        {"render.points", "100000"},
    };
}

JobConfig JobConfig::parse(const std::string& text) {
    JobConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError("config line " + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        cfg.set(key, unquote(trim(line.substr(eq + 1))));
    }
    return cfg;
}

JobConfig JobConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

void JobConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError("unknown config key " + key);
    it->second = value;
}

const std::string& JobConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError("unknown config key " + key);
    return it->second;
}

double JobConfig::number(const std::string& key) const {
    const auto& v = get(key);
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError(key + " is not a number: '" + v + "'");
    }
}

std::size_t JobConfig::count(const std::string& key) const {
    double x = number(key);
    if (x < 0 || x != std::floor(x)) throw ValidationError(key + " must be a non-negative integer");
    return static_cast<std::size_t>(x);
}

Theta JobConfig::theta() const {
    try {
        return Theta::parse(get("job.theta"));
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("job.theta: ") + e.what());
    }
}

std::optional<PcfSpec> spec_for_parameter(cplx c, double tol) {
    struct Known {
        cplx c;
        bool superattracting;
        Angle angle;
    };
    static const std::vector<Known> table = {
        {{-1.0, 0.0}, true, Angle(1, 3)},
        {{-1.75487766624669, 0.0}, true, Angle(3, 7)},
        {{-0.122561166876654, 0.744861766619744}, true, Angle(1, 7)},
        {{-2.0, 0.0}, false, Angle(1, 2)},
        {{-1.54368901269208, 0.0}, false, Angle(5, 12)},
    };
    for (const auto& k : table)
        if (std::abs(k.c - c) < tol)
            return k.superattracting ? PcfSpec::superattracting(k.angle) : PcfSpec::misiurewicz(k.angle);
    return std::nullopt;
}

PcfSpec JobConfig::spec() const {
    PcfSpec spec;
    try {
        if (!get("job.c").empty()) {
            cplx c;
            std::istringstream in(get("job.c"));
            double re = 0, im = 0;
            char sep = 0;
            in >> re;
            if (in >> sep >> im && sep != ',') throw ValidationError("job.c: expected 're' or 're,im'");
            c = {re, im};
            auto s = spec_for_parameter(c);
            if (!s) throw ValidationError("job.c: no fixture angle known for this parameter; give job.angle");
            spec = *s;
        } else {
            Angle t = Angle::parse(get("job.angle"));
            const auto& mode = get("job.mode");
            if (mode == "superattracting") spec = PcfSpec::superattracting(t);
            else if (mode == "misiurewicz") spec = PcfSpec::misiurewicz(t);
            else throw ValidationError("job.mode must be superattracting or misiurewicz");
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("pcf spec: ") + e.what());
    }
    if (!get("job.period").empty()) {
        std::size_t p = count("job.period");
        if (p == 0) throw ValidationError("job.period must be positive");
        if (p != spec.period)
            throw ValidationError("job.period " + std::to_string(p) + " disagrees with " + spec.label());
    }
    if (!get("job.preperiod").empty() && count("job.preperiod") != spec.preperiod)
        throw ValidationError("job.preperiod disagrees with " + spec.label());
    return spec;
}

void JobConfig::validate() const {
    theta();
    spec();
    for (const auto& [key, value] : values_) {
        if (key.starts_with("depths.") || key.starts_with("render.") || key == "job.seed") count(key);
        if (key.starts_with("tolerances.") && !(number(key) > 0)) throw ValidationError(key + " must be positive");
    }
    if (count("render.width") == 0 || count("render.height") == 0) throw ValidationError("render size must be positive");
}

nlohmann::json JobConfig::echo() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
}

namespace {

void round_floats(nlohmann::json& j) {
    if (j.is_number_float()) j = round12(j.get<double>());
    else if (j.is_structured())
        for (auto& v : j) round_floats(v);
}

}  // namespace

nlohmann::json report_envelope(const std::string& command, const JobConfig& cfg, nlohmann::json result) {
    round_floats(result);
    nlohmann::json depths = nlohmann::json::object(), tol = nlohmann::json::object();
    for (const auto& [k, v] : cfg.values()) {
        if (k.starts_with("depths.")) depths[k.substr(7)] = v;
        if (k.starts_with("tolerances.")) tol[k.substr(11)] = v;
    }
    return {{"command", command},
            {"config", cfg.echo()},
            {"depths", depths},
            {"angle_bits", cfg.get("depths.angle_bits")},
            {"tolerances", tol},
            {"versions",
             {{"siegelmate", kVersion},
              {"angle_core", kVersion},
              {"lamination", kVersion},
              {"pcf_comb", kVersion},
              {"siegel_comb", kVersion},
              {"mating_comb", kVersion},
              {"dynamics_num", kVersion},
              {"cli_reports", kVersion}}},
            {"result", std::move(result)}};
}

}  // namespace siegelmate
