#include "siegelmate/mating.hpp"

#include "siegelmate/siegel.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace siegelmate {

std::vector<Angle> RayClass::angles() const {
    std::vector<Angle> out;
    for (const auto& r : rays) out.push_back(r.t);
    return out;
}

nlohmann::json RayClass::to_json() const {
    nlohmann::json j;
    j["rays"] = angles_json(angles());
    auto tn = nlohmann::json::array(), cn = nlohmann::json::array(), ed = nlohmann::json::array();
    for (const auto& n : theta_nodes) tn.push_back(angles_json(n));
    for (const auto& n : c_nodes) cn.push_back(angles_json(n));
    for (std::size_t i = 0; i < edges.size(); ++i)
        ed.push_back({{"ray", rays[i].t.str()}, {"theta_node", edges[i].first}, {"c_node", edges[i].second}});
    j["theta_nodes"] = tn;
    j["c_nodes"] = cn;
    j["edges"] = ed;
    j["m"] = m;
    j["size"] = rays.size();
    j["bound_2m"] = 2 * m;
    j["tree"] = is_tree();
    j["x1_nodes"] = x1_nodes;
    j["period"] = period ? nlohmann::json(*period) : nlohmann::json("preperiodic");
    return j;
}

namespace {

std::optional<std::size_t> class_period(const std::vector<Angle>& rays, std::size_t bound) {
    std::vector<Angle> cur = rays;
    for (std::size_t q = 1; q <= bound; ++q) {
        for (auto& a : cur) a = doubled(a);
        std::sort(cur.begin(), cur.end());
        cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
        if (cur == rays) return q;
    }
    return std::nullopt;
}

}  // namespace

RayClass ray_class(const Angle& t, const SiegelLanding& siegel, const LandingModel& pcf, std::size_t cap) {
    std::map<Angle, std::size_t> theta_of, c_of;  // ray t -> node
    RayClass cls;
    std::set<Angle> seen{t};
    std::deque<Angle> queue{t};
    while (!queue.empty()) {
        Angle r = queue.front();
        queue.pop_front();
        if (!theta_of.count(r)) {
            auto node = siegel.landing_class(r);
            std::size_t id = cls.theta_nodes.size();
            cls.theta_nodes.push_back(node);
            for (const auto& a : node) {
                theta_of[a] = id;
                if (seen.insert(a).second) queue.push_back(a);
            }
        }
        if (!c_of.count(r)) {
            auto node = pcf.landing_class(conjugate(r));
            std::size_t id = cls.c_nodes.size();
            cls.c_nodes.push_back(node);
            for (const auto& u : node) {
                Angle a = conjugate(u);
                c_of[a] = id;
                if (seen.insert(a).second) queue.push_back(a);
            }
        }
        if (seen.size() > cap)
            throw CombinatorialError("ray class of " + t.str() + " exceeds " + std::to_string(cap) + " rays");
    }
    for (const auto& a : seen) {
        cls.rays.push_back({a});
        cls.edges.emplace_back(theta_of.at(a), c_of.at(a));
    }
    for (const auto& n : cls.c_nodes) cls.m = std::max(cls.m, n.size());
    for (const auto& n : cls.theta_nodes)
        if (siegel.critical_level(n.front())) ++cls.x1_nodes;
    if (cls.rays.size() > 2 * cls.m)
        throw CombinatorialError("ray class of " + t.str() + " has " + std::to_string(cls.rays.size()) +
                                 " rays, more than 2m = " + std::to_string(2 * cls.m));
    cls.period = class_period(cls.angles(), 64);
    return cls;
}

nlohmann::json LoopReport::to_json() const {
    auto cyc = nlohmann::json::array();
    for (const auto& c : cycles) cyc.push_back(angles_json(c));
    return {{"tree", is_tree}, {"cycles", cyc}};
}

LoopReport detect_loops(const RayClass& cls) {
    // Nodes: theta nodes first, then c nodes.
    const std::size_t nt = cls.theta_nodes.size(), n = nt + cls.c_nodes.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);  // (node, ray)
    LoopReport rep;
    for (std::size_t r = 0; r < cls.edges.size(); ++r) {
        std::size_t a = cls.edges[r].first, b = nt + cls.edges[r].second;
        if (find(a) != find(b)) {
            parent[find(a)] = find(b);
            adj[a].emplace_back(b, r);
            adj[b].emplace_back(a, r);
            continue;
        }
        // Closing ray: path from a to b in the spanning forest plus r.
        std::vector<std::optional<std::pair<std::size_t, std::size_t>>> from(n);
        std::deque<std::size_t> q{a};
        from[a] = std::make_pair(a, r);
        while (!q.empty()) {
            auto x = q.front();
            q.pop_front();
            for (auto [y, ray] : adj[x])
                if (!from[y]) {
                    from[y] = std::make_pair(x, ray);
                    q.push_back(y);
                }
        }
        std::vector<Angle> cyc{cls.rays[r].t};
        for (std::size_t x = b; x != a; x = from[x]->first) cyc.push_back(cls.rays[from[x]->second].t);
        rep.is_tree = false;
        rep.cycles.push_back(cyc);
    }
    return rep;
}

nlohmann::json X1Report::to_json() const {
    auto ns = nlohmann::json::array();
    for (const auto& c : nodes) ns.push_back(angles_json(c));
    return {{"x1_nodes", x1_nodes}, {"nodes", ns}, {"ok", ok}};
}

X1Report class_of_x1_guard(const RayClass& cls, const SiegelLanding& siegel) {
    X1Report rep;
    for (const auto& n : cls.theta_nodes)
        if (siegel.critical_level(n.front())) rep.nodes.push_back(n);
    rep.x1_nodes = rep.nodes.size();
    rep.ok = rep.x1_nodes <= 1;
    return rep;
}

std::vector<RayClass> periodic_ray_classes(std::size_t q, const SiegelLanding& siegel,
                                           const LandingModel& pcf, unsigned max_ray_period) {
    std::vector<RayClass> out;
    std::set<Angle> covered;
    for (unsigned n = 1; n <= max_ray_period; ++n) {
        if (n % q != 0) continue;  // rays of a period-q class have period a multiple of q
        for (const auto& t : angles_of_period_dividing(n)) {
            if (covered.count(t)) continue;
            auto cls = ray_class(t, siegel, pcf);
            for (const auto& r : cls.rays) covered.insert(r.t);
            if (cls.period && *cls.period == q) out.push_back(std::move(cls));
        }
    }
    return out;
}

// T-graph -------------------------------------------------------------------

std::size_t TGraph::count_regions(const std::string& prefix) const {
    return static_cast<std::size_t>(std::count_if(regions.begin(), regions.end(), [&](const TRegion& r) {
        return r.label.rfind(prefix, 0) == 0;
    }));
}

nlohmann::json TGraph::to_json() const {
    nlohmann::json j;
    j["spec"] = spec;
    auto rs = nlohmann::json::array();
    for (const auto& r : rays) {
        auto chain = nlohmann::json::array();
        for (const auto& a : r.chain) chain.push_back(a);
        rs.push_back({{"t", r.t.str()}, {"c_angle", r.c_angle.str()}, {"root", r.root}, {"drop_chain", chain}});
    }
    j["rays"] = rs;
    j["disks"] = disks;
    auto segs = nlohmann::json::array();
    for (const auto& [a, b] : segments) segs.push_back({a, b});
    j["segments"] = segs;
    auto regs = nlohmann::json::array();
    for (const auto& r : regions)
        regs.push_back({{"label", r.label}, {"rays", angles_json(r.rays)}, {"disks", r.disks},
                        {"touches_siegel", r.touches_siegel}, {"jordan", r.jordan}});
    j["regions"] = regs;
    j["connected"] = connected;
    j["notes"] = notes;
    return j;
}

std::string TGraph::to_dot() const {
    std::string out = "graph T {\n  siegel [label=\"D\", shape=doublecircle];\n";
    std::set<std::string> roots;
    for (const auto& r : rays) roots.insert(r.root);
    for (const auto& r : roots) out += "  \"" + r + "\" [shape=point];\n";
    for (const auto& d : disks) out += "  \"D_" + d + "\" [shape=circle];\n";
    for (const auto& r : rays) {
        std::string chain = "C_" + r.t.str();
        out += "  \"" + chain + "\" [shape=box, label=\"chain " + r.t.str() + "\"];\n";
        out += "  siegel -- \"" + chain + "\";\n";
        out += "  \"" + chain + "\" -- \"" + r.root + "\" [label=\"" + r.t.str() + "\"];\n";
    }
    for (const auto& [root, v] : segments) out += "  \"" + root + "\" -- \"D_" + v + "\" [style=dashed];\n";
    return out + "}\n";
}

namespace {

struct Edge {
    Angle t;       // theta-side angle
    Angle u;       // c-side angle
    std::size_t blob;
};

bool in_ccw_half_open(const Angle& s, const Angle& e, const Angle& x) {
    return x == s || cyclic_between(s, e, x);
}

}  // namespace

TGraph build_T(const HubbardTree& tree, const DropTree* drops) {
    TGraph T;
    T.spec = tree.spec.label();
    const bool super = tree.spec.superattracting();
    auto model = landing_model(tree.spec);
    const Angle theta1 = model->partition().critical_value();

    // Pieces on the c-side that collapse to one vertex: root points with their
    // segments and disks.  Root points are keyed by their landing class.
    std::map<std::vector<Angle>, std::size_t> blob_of_root;
    std::vector<std::size_t> parent;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<Edge> edges;
    std::map<Angle, std::string> root_name;

    struct Sector {
        Angle s, e;
    };
    // Omega sectors per Fatou vertex: one per root point.
    std::vector<std::pair<const HubbardVertex*, std::vector<Sector>>> fatou;

    if (super) {
        for (const auto& v : tree.vertices) {
            if (!v.fatou) continue;
            T.disks.push_back(v.id);
            // The vertex's Fatou gap lies just ccw after 2^(i-1) theta1 (x0 is i = p).
            std::size_t i = v.orbit_index == 0 ? tree.spec.period : static_cast<std::size_t>(v.orbit_index);
            Angle w = theta1;
            for (std::size_t k = 1; k < i; ++k) w = doubled(w);
            std::vector<Sector> secs;
            std::optional<std::size_t> first_blob;
            for (const auto& r : v.roots) {
                T.segments.emplace_back(r.id, v.id);
                auto key = r.class_angles;
                auto [it, fresh] = blob_of_root.emplace(key, parent.size());
                if (fresh) parent.push_back(parent.size());
                // A root point shared by several disks carries every facing pair.
                for (const Angle& u : {r.angles.first, r.angles.second})
                    if (root_name.emplace(u, r.id).second) edges.push_back({conjugate(u), u, it->second});
                if (first_blob) parent[find(it->second)] = find(*first_blob);
                first_blob = it->second;
                Angle a = std::min(r.angles.first, r.angles.second), b = std::max(r.angles.first, r.angles.second);
                secs.push_back(in_ccw_half_open(a, b, w) ? Sector{a, b} : Sector{b, a});
            }
            fatou.emplace_back(&v, secs);
        }
    } else {
        for (const auto& v : tree.vertices) {
            if (v.fatou) continue;
            parent.push_back(parent.size());
            Angle u = v.angles.front();  // smallest landing angle
            edges.push_back({conjugate(u), u, parent.size() - 1});
            root_name[u] = v.id;
        }
    }

    // Vertex 0 is the collapsed Siegel side; blobs are 1 + root of union-find.
    std::map<std::size_t, std::size_t> vid;
    for (auto& e : edges) {
        std::size_t r = find(e.blob);
        if (!vid.count(r)) vid[r] = vid.size() + 1;
        e.blob = vid[r];
    }
    const std::size_t V = vid.size() + 1, E = edges.size();
    std::vector<std::vector<std::size_t>> rot(V);
    for (std::size_t k = 0; k < E; ++k) {
        rot[0].push_back(k);
        rot[edges[k].blob].push_back(k);
    }
    std::sort(rot[0].begin(), rot[0].end(), [&](auto a, auto b) { return edges[a].t < edges[b].t; });
    for (std::size_t v = 1; v < V; ++v)
        std::sort(rot[v].begin(), rot[v].end(), [&](auto a, auto b) { return edges[a].u < edges[b].u; });
    auto succ = [&](std::size_t v, std::size_t e) {
        const auto& r = rot[v];
        auto it = std::find(r.begin(), r.end(), e);
        return r[(static_cast<std::size_t>(it - r.begin()) + 1) % r.size()];
    };

    for (const auto& e : edges) {
        TRay ray{e.t, e.u, root_name.at(e.u), {}};
        if (drops)
            for (const DropNode* d : drops->chain_of_angle(e.t))
                if (d->depth > 0) ray.chain.push_back(d->address);
        T.rays.push_back(ray);
    }

    // Faces: darts (edge, from-vertex), turning to the ccw successor at each arrival.
    std::set<std::pair<std::size_t, std::size_t>> used;
    struct Wedge {
        std::size_t v, e, f;
    };
    std::vector<std::vector<Wedge>> faces;
    std::vector<std::vector<std::size_t>> face_edges;
    for (std::size_t e0 = 0; e0 < E; ++e0)
        for (std::size_t from0 : {std::size_t(0), edges[e0].blob}) {
            if (used.count({e0, from0})) continue;
            std::vector<Wedge> wedges;
            std::vector<std::size_t> fe;
            std::size_t e = e0, from = from0;
            while (used.insert({e, from}).second) {
                fe.push_back(e);
                std::size_t to = from == 0 ? edges[e].blob : 0;
                std::size_t f = succ(to, e);
                wedges.push_back({to, e, f});
                e = f;
                from = to;
            }
            faces.push_back(wedges);
            face_edges.push_back(fe);
        }
    if (E == 0) {
        faces.emplace_back();
        face_edges.emplace_back();
    }
    if (V - E + faces.size() != 2 && E > 0)
        T.notes.push_back("face count disagrees with Euler's formula");

    // Labels: a face holding a vertex's Omega wedge is that vertex's U region.
    std::vector<TRegion> labelled, rest;
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        TRegion reg;
        std::set<Angle> rays;
        for (auto e : face_edges[fi]) rays.insert(edges[e].t);
        reg.rays.assign(rays.begin(), rays.end());
        std::vector<std::string> labels;
        for (const auto& w : faces[fi]) {
            if (w.v == 0) continue;
            const Angle &ue = edges[w.e].u, &uf = edges[w.f].u;
            for (const auto& [v, secs] : fatou) {
                if (edges.empty()) break;
                bool inside = std::all_of(secs.begin(), secs.end(), [&](const Sector& s) {
                    return ue != s.e && in_ccw_half_open(s.s, s.e, ue) && (uf == s.e || cyclic_between(s.s, s.e, uf));
                });
                if (!inside) continue;
                reg.disks.push_back(v->id);
                std::string idx = v->id.substr(1);
                if (v->roots.size() == 1) {
                    labels.push_back("U^" + idx);
                } else {
                    // U^{j1} carries the smaller ray of the first root point.
                    const auto& r1 = v->roots[0];
                    Angle u11 = std::min(r1.angles.first, r1.angles.second);
                    labels.push_back("U^" + idx + (ue == u11 || uf == u11 ? "1" : "2"));
                }
            }
        }
        std::set<std::size_t> es(face_edges[fi].begin(), face_edges[fi].end());
        reg.jordan = labels.empty() && es.size() == face_edges[fi].size();
        if (labels.size() > 1) T.notes.push_back("region holds several disk wedges");
        if (!labels.empty()) {
            reg.label = labels.front();
            labelled.push_back(reg);
        } else {
            rest.push_back(reg);
        }
    }
    std::sort(labelled.begin(), labelled.end(), [](auto& a, auto& b) { return a.label < b.label; });
    std::sort(rest.begin(), rest.end(), [](auto& a, auto& b) { return a.rays < b.rays; });
    if (!super && rest.size() == 1) {
        rest.front().label = "U";
    } else {
        for (std::size_t k = 0; k < rest.size(); ++k) rest[k].label = "Ũ^" + std::to_string(k + 1);
    }
    T.regions = labelled;
    T.regions.insert(T.regions.end(), rest.begin(), rest.end());
    return T;
}

}  // namespace siegelmate
