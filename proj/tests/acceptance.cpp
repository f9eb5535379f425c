// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "siegelmate/config.hpp"
#include "siegelmate/mating.hpp"
#include "siegelmate/pipeline.hpp"
#include "siegelmate/rational.hpp"
#include "siegelmate/rays.hpp"
#include "siegelmate/siegel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace siegelmate;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

int failures = 0;

void criterion(int n, const std::function<void(Outcome&)>& body) {
    Outcome out;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail << "exception: " << e.what() << "; ";
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out.pass) ++failures;
    std::cout << "CRITERION " << n << ": " << (out.pass ? "PASS" : "FAIL") << " " << out.detail.str() << "(" << secs
              << " s)" << std::endl;
}

struct Fixture {
    const char* name;
    PcfSpec spec;
};

std::vector<Fixture> fixtures() {
    return {{"basilica", PcfSpec::superattracting(Angle(1, 3))},
            {"airplane", PcfSpec::superattracting(Angle(3, 7))},
            {"chebyshev", PcfSpec::misiurewicz(Angle(1, 2))},
            {"five-twelfths", PcfSpec::misiurewicz(Angle(5, 12))}};
}

std::vector<Angle> random_angles(std::uint64_t seed, long long max_den, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::vector<Angle> out;
    while (out.size() < n) {
        long long d = std::uniform_int_distribution<long long>(2, max_den)(rng);
        long long k = std::uniform_int_distribution<long long>(1, d - 1)(rng);
        out.emplace_back(k, d);
    }
    return out;
}

// Pairwise check: two traced rays land together iff the model puts them in one class.
std::size_t coherence_disagreements(const LandingModel& L, const std::vector<Angle>& sample,
                                    const std::function<RayTrace(const Angle&)>& trace, std::string& note) {
    std::map<Angle, cplx> land;
    for (const auto& t : sample)
        for (const auto& s : L.landing_class(t))
            if (!land.count(s)) {
                auto r = trace(s);
                if (!r.landed && note.empty()) note = "unlanded " + s.str();
                land[s] = r.landing_estimate;
            }
    std::vector<Angle> keys;
    for (const auto& [k, v] : land) keys.push_back(k);
    std::size_t bad = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        auto cls = L.landing_class(keys[i]);
        for (std::size_t j = i + 1; j < keys.size(); ++j) {
            bool same = std::find(cls.begin(), cls.end(), keys[j]) != cls.end();
            bool close = std::abs(land[keys[i]] - land[keys[j]]) < 1e-4;
            if (same != close) {
                if (note.empty()) note = keys[i].str() + " vs " + keys[j].str();
                ++bad;
            }
        }
    }
    return bad;
}

const RationalMapParams& golden_map(const PcfSpec& spec) {
    static std::map<std::string, RationalMapParams> cache;
    auto it = cache.find(spec.label());
    if (it == cache.end()) {
        auto r = solve_candidate_G(Theta::golden(), spec);
        if (r.accepted.size() != 1) throw std::runtime_error("no unique G for " + spec.label());
        it = cache.emplace(spec.label(), r.accepted.front()).first;
    }
    return it->second;
}

}  // namespace

int main() {
    std::cout.precision(4);

    criterion(1, [](Outcome& o) {
        auto bas = solve_pcf_c(PcfSpec::superattracting(Angle(1, 3)), -1.1);
        o.require(bas.c == cplx(-1.0, 0.0) && bas.residual < 1e-12, "basilica c = -1");
        auto air = solve_pcf_c(PcfSpec::superattracting(Angle(3, 7)), -1.7);
        o.require(std::abs(air.c - cplx(-1.75488, 0.0)) < 1e-5, "airplane c");
        auto mis = solve_pcf_c(PcfSpec::misiurewicz(Angle(5, 12)), -1.5);
        o.require(std::abs(mis.c - cplx(-1.54368, 0.0)) < 1e-5, "5/12 c");
        auto cheb = solve_pcf_c(PcfSpec::misiurewicz(Angle(1, 2)), -2.1);
        o.require(cheb.c == cplx(-2.0, 0.0), "chebyshev c = -2");
        o.detail << "airplane " << air.c.real() << ", 5/12 " << mis.c.real() << " ";
    });

    criterion(2, [](Outcome& o) {
        double worst = 0.0;
        int checked = 0;
        for (long long d = 3; d <= 255 && checked < 50; d += 7)
            for (long long n = 1; n < d && checked < 50; n += d / 3 + 1, ++checked) {
                Angle t(n, d);
                auto rt = trace_ray_poly({-2.0, 0.0}, t);
                double expect = 2.0 * std::cos(2.0 * std::numbers::pi * t.to_double());
                o.require(rt.landed, "ray " + t.str() + " landed");
                worst = std::max(worst, std::abs(rt.landing_estimate - cplx(expect, 0.0)));
            }
        o.require(checked == 50 && worst < 1e-6, "max error below 1e-6");
        o.detail << "50 rays, max error " << worst << " ";
    });

    criterion(3, [](Outcome& o) {
        auto sample = random_angles(7, 64, 100);
        std::size_t total = 0;
        for (const auto& fx : fixtures()) {
            auto model = landing_model(fx.spec);
            cplx c = parameter_for_spec(fx.spec).value();
            std::string note;
            auto bad = coherence_disagreements(*model, sample, [&](const Angle& t) { return trace_ray_poly(c, t); }, note);
            o.require(bad == 0, std::string(fx.name) + ": " + note);
            total += bad;
        }
        for (const auto& th : {Theta::golden(), Theta::silver()}) {
            auto rsd = critical_angle_pair(th, 24);
            SiegelLanding L(rsd.critical_leaf());
            // add leaf endpoints so that nontrivial Siegel classes are exercised
            auto withleaves = sample;
            auto lam = siegel_lamination(rsd, 4);
            for (std::size_t k = 0; k <= 4 && withleaves.size() < 120; ++k)
                for (const auto& lf : lam.leaves_at(k))
                    if (withleaves.size() < 120) withleaves.push_back(lf.a);
            std::string note;
            auto bad = coherence_disagreements(
                L, withleaves, [&](const Angle& t) { return trace_ray_siegel(th.lambda(), t, &L); }, note);
            o.require(bad == 0, th.name + ": " + note);
            total += bad;
        }
        o.detail << "4 parameters x 100 angles, 2 rotation numbers x 120 angles, " << total << " disagreements ";
    });

    criterion(4, [](Outcome& o) {
        std::size_t classes = 0;
        for (const char* name : {"golden", "silver"}) {
            auto rsd = critical_angle_pair(Theta::parse(name), 40);
            SiegelLanding L(rsd.critical_leaf());
            for (const auto& fx : fixtures()) {
                auto model = landing_model(fx.spec);
                for (const auto& t : random_angles(11, 255, 100)) {
                    auto cls = ray_class(t, L, *model);
                    std::string where = std::string(name) + "/" + fx.name + " " + t.str();
                    o.require(cls.rays.size() <= 2 * cls.m, "size bound at " + where);
                    o.require(detect_loops(cls).is_tree, "tree at " + where);
                    o.require(class_of_x1_guard(cls, L).ok && cls.x1_nodes <= 1, "X1 count at " + where);
                    for (const auto& r : cls.rays)
                        o.require(ray_class(r.t, L, *model).angles() == cls.angles(), "idempotence at " + where);
                    ++classes;
                }
            }
        }
        auto rsd = critical_angle_pair(Theta::cube_root_quarter(), 40);
        SiegelLanding L(rsd.critical_leaf());
        auto cls = ray_class(rsd.t_minus, L, *landing_model(PcfSpec::misiurewicz(Angle(1, 2))));
        std::multiset<std::size_t> tsizes, csizes;
        for (auto& n : cls.theta_nodes) tsizes.insert(n.size());
        for (auto& n : cls.c_nodes) csizes.insert(n.size());
        o.require(cls.rays.size() == 4 && cls.m == 2 && cls.x1_nodes == 1, "cube-root class has 4 rays, m = 2, one X1");
        o.require(tsizes == std::multiset<std::size_t>{1, 1, 2} && csizes == std::multiset<std::size_t>{2, 2},
                  "cube-root node pattern");
        o.detail << classes << " classes, cube-root class " << cls.rays.size() << " rays ";
    });

    criterion(5, [](Outcome& o) {
        auto rsd = critical_angle_pair(Theta::golden(), 40);
        DropTree T(rsd, 8);
        for (std::size_t n = 1; n <= 8; ++n)
            o.require(T.count_at_depth(n) == (std::size_t(1) << (n - 1)), "count at depth " + std::to_string(n));
        SiegelLanding L(rsd.critical_leaf());
        std::size_t longest = 0;
        for (long long k = 1; k <= 20; ++k) {
            Angle t(k * 37 % 255, 255);
            auto chain = drop_chain_of_angle(t, T, L);
            o.require(chain.nodes.size() >= 2 && chain.strictly_decreasing, "chain of " + t.str());
            longest = std::max(longest, chain.nodes.size());
        }
        o.detail << "depths 1..8, 20 chains, longest " << longest << " ";
    });

    criterion(6, [](Outcome& o) {
        o.require(rotation_set_rational(1, 2).orbit == std::vector<Angle>{Angle(1, 3), Angle(2, 3)}, "rotation 1/2");
        o.require(rotation_set_rational(1, 3).orbit == std::vector<Angle>{Angle(1, 7), Angle(2, 7), Angle(4, 7)},
                  "rotation 1/3");
        // brute force: the unique q-cycle on which doubling shifts circular order by p
        for (auto [p, q] : {std::pair<unsigned, unsigned>{1, 2}, {1, 3}}) {
            std::size_t found = 0;
            for (auto& t : angles_of_period_dividing(q)) {
                auto info = orbit_info(t);
                if (info.period != q || t != *std::min_element(info.orbit.begin(), info.orbit.end())) continue;
                auto orb = info.orbit;
                std::sort(orb.begin(), orb.end());
                bool ok = true;
                for (unsigned i = 0; i < q && ok; ++i) ok = doubled(orb[i]) == orb[(i + p) % q];
                if (ok) {
                    ++found;
                    o.require(orb == rotation_set_rational(p, q).orbit, "brute force agrees");
                }
            }
            o.require(found == 1, "brute force finds one cycle");
        }
        auto r = critical_angle_pair(Theta::golden(), 64);
        o.require(r.digits_plus.size() == 64 && r.t_plus - r.t_minus == Angle(1, 2), "golden digits at 64 bits");
        o.detail << "golden margin 2^" << r.min_margin_log2 << " ";
    });

    criterion(7, [](Outcome& o) {
        auto T = build_T(build_hubbard_tree(PcfSpec::superattracting(Angle(3, 7))));
        std::size_t jordan = 0;
        for (const auto& r : T.regions) jordan += r.jordan;
        o.require(T.regions.size() == 6 && jordan == 2 && T.count_regions("Ũ") == 2, "airplane regions");
        auto tree = build_hubbard_tree(PcfSpec::misiurewicz(Angle(1, 2)));
        auto fixed = tree.orbit_vertex(2);
        o.require(fixed && tree.vertices[*fixed].angles == std::vector<Angle>{Angle()}, "chebyshev fixed vertex");
        o.detail << "airplane " << T.regions.size() << " regions, " << jordan << " Jordan ";
    });

    criterion(8, [](Outcome& o) {
        const cplx lambda = Theta::golden().lambda();
        for (const auto& spec : {PcfSpec::superattracting(Angle(1, 3)), PcfSpec::misiurewicz(Angle(1, 2))}) {
            auto r = solve_candidate_G(Theta::golden(), spec);
            o.require(r.accepted.size() == 1, spec.label() + ": one filtered root");
            if (r.accepted.size() != 1) continue;
            const auto& G = r.accepted.front();
            o.require(G.residual < 1e-9, spec.label() + ": residual");
            o.require(std::abs(G.map.deriv(0.0) - lambda) < 1e-12, spec.label() + ": multiplier at 0");
            cplx z = G.siegel_critical;
            bool bounded = true;
            for (int i = 0; i < 10000 && bounded; ++i) bounded = std::abs(z = G.map(z)) < 1e4;
            o.require(bounded, spec.label() + ": Siegel-side orbit bounded");
            o.detail << spec.label() << " a = " << G.map.a << " ";
        }
    });

    criterion(9, [](Outcome& o) {
        const auto& G = golden_map(PcfSpec::superattracting(Angle(1, 3)));
        auto [center, radius] = repelling_base_disk(G);
        auto p = pullback_diameter_probe(G, center, radius, 20);
        double ratio = p.max_diameter[20] / p.max_diameter[0];
        o.require(ratio < 0.1, "depth 20 ratio below 0.1");
        o.require(p.tail_non_increasing(10, 20, 0.05), "tail 10..20 non-increasing within 5%");
        o.detail << "basilica ratio " << ratio << ", tail";
        for (std::size_t k = 10; k <= 20; ++k) o.detail << " " << p.max_diameter[k];
        o.detail << " ";
    });

    criterion(10, [](Outcome& o) {
        auto bas = PcfSpec::superattracting(Angle(1, 3));
        auto cheb = PcfSpec::misiurewicz(Angle(1, 2));
        for (const auto& m : periodic_point_match(golden_map(bas), bas, 2)) {
            o.require(m.match, "basilica q = " + std::to_string(m.q));
            o.detail << "basilica q=" << m.q << " " << m.repelling_cycles << "/" << m.ray_class_cycles << " ";
        }
        for (const auto& m : periodic_point_match(golden_map(cheb), cheb, 1)) {
            o.require(m.match, "chebyshev q = 1");
            o.detail << "chebyshev q=1 " << m.repelling_cycles << "/" << m.ray_class_cycles << " ";
        }
    });

    criterion(11, [](Outcome& o) {
        auto cfg = JobConfig::parse(
            "[job]\ntheta = golden\nmode = superattracting\nangle = 1/3\n"
            "[depths]\nprobe = 8\nprobe_samples = 32\nmatch_q = 1\n"
            "[render]\nwidth = 48\nheight = 48\npoints = 2000\n");
        auto run = [&] {
            auto out = run_mate(cfg);
            std::string bytes = report_envelope("mate", cfg, out.result).dump(2);
            for (const auto& [name, r] : out.rasters) bytes += name + r.ppm();
            for (const auto& [name, t] : out.texts) bytes += name + t;
            return bytes;
        };
        auto a = run(), b = run();
        o.require(a == b, "two mate runs are byte-identical");
        o.detail << a.size() << " bytes compared ";
    });

    std::cout << (failures ? "ACCEPTANCE: " + std::to_string(failures) + " FAIL" : std::string("ACCEPTANCE: ALL PASS"))
              << std::endl;
    return failures ? 1 : 0;
}
