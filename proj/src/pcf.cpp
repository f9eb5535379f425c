#include "siegelmate/pcf.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>

namespace siegelmate {

KneadingSequence kneading(const Angle& t) {
    if (t.is_zero()) throw std::invalid_argument("kneading sequence of angle 0 is undefined");
    OrbitInfo info = orbit_info(t);
    CriticalPartition part(t, CriticalPartition::BoundaryRule::Star);
    return {part.itinerary(t, info.preperiod + info.period), info.preperiod, info.period};
}

namespace {

// The characteristic angle is the start of the short arc of the minor leaf.
// The half-open partition only works from that endpoint, so a caller passing
// the other endpoint is redirected through the mirror image.
Angle normalise_characteristic(const Angle& t) {
    PcfLanding direct(t, true);
    auto cls = direct.landing_class(t);
    if (cls.size() >= 2) return t;
    PcfLanding mirror(conjugate(t), true);
    auto mcls = mirror.landing_class(conjugate(t));
    if (mcls.size() < 2) throw std::invalid_argument("angle " + t.str() + " has no minor leaf");
    std::vector<Angle> back;
    for (const auto& a : mcls) back.push_back(conjugate(a));
    std::sort(back.begin(), back.end());
    auto it = std::find(back.begin(), back.end(), t);
    return it == back.begin() ? back.back() : *(it - 1);
}

std::vector<std::vector<Angle>> orbit_classes(const PcfLanding& model, const Angle& v,
                                              std::size_t count) {
    std::vector<std::vector<Angle>> out;
    Angle x = v;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(model.landing_class(x));
        x = doubled(x);
    }
    return out;
}

}  // namespace

PcfSpec PcfSpec::superattracting(const Angle& t) {
    PcfSpec s;
    s.mode = PcfMode::Superattracting;
    s.characteristic_angle = t;
    s.period = orbit_info(t).period;
    return s;
}

PcfSpec PcfSpec::misiurewicz(const Angle& t) {
    OrbitInfo info = orbit_info(t);
    if (info.preperiod == 0) throw std::invalid_argument("Misiurewicz angle must be preperiodic");
    PcfLanding model(t, false);
    auto classes = orbit_classes(model, t, info.preperiod + info.period + 1);
    // Smallest l, k with x_{l+k+1} = x_{l+1}, where x_1 is the critical value.
    for (std::size_t n = 1; n < classes.size(); ++n) {
        auto it = std::find(classes.begin(), classes.begin() + n, classes[n]);
        if (it != classes.begin() + n) {
            PcfSpec s;
            s.mode = PcfMode::Misiurewicz;
            s.characteristic_angle = t;
            s.preperiod = static_cast<std::size_t>(it - classes.begin());
            s.period = n - s.preperiod;
            return s;
        }
    }
    throw std::logic_error("critical value orbit did not close");
}

std::string PcfSpec::label() const {
    if (superattracting())
        return "superattracting(p=" + std::to_string(period) + ", " + characteristic_angle.str() + ")";
    return "misiurewicz(l=" + std::to_string(preperiod) + ", k=" + std::to_string(period) + ", " +
           characteristic_angle.str() + ")";
}

void PcfSpec::validate() const {
    if (characteristic_angle.is_zero())
        throw std::invalid_argument("characteristic angle 0 is degenerate");
    OrbitInfo info = orbit_info(characteristic_angle);
    if (superattracting()) {
        if (!info.periodic())
            throw std::invalid_argument("superattracting spec needs a periodic angle");
        if (info.period != period)
            throw std::invalid_argument("angle " + characteristic_angle.str() + " has period " +
                                        std::to_string(info.period) + ", spec says " +
                                        std::to_string(period));
        return;
    }
    if (info.preperiod == 0) throw std::invalid_argument("Misiurewicz spec needs l >= 1");
    PcfSpec derived = misiurewicz(characteristic_angle);
    if (derived.preperiod != preperiod || derived.period != period)
        throw std::invalid_argument("angle " + characteristic_angle.str() + " gives (l, k) = (" +
                                    std::to_string(derived.preperiod) + ", " +
                                    std::to_string(derived.period) + "), spec says (" +
                                    std::to_string(preperiod) + ", " + std::to_string(period) + ")");
}

std::string to_string(VertexKind kind) {
    switch (kind) {
        case VertexKind::Critical: return "critical";
        case VertexKind::Postcritical: return "postcritical";
        case VertexKind::Branch: return "branch";
    }
    return "?";
}

std::shared_ptr<PcfLanding> landing_model(const PcfSpec& spec) {
    if (spec.superattracting())
        return std::make_shared<PcfLanding>(normalise_characteristic(spec.characteristic_angle), true);
    return std::make_shared<PcfLanding>(spec.characteristic_angle, false);
}

namespace {

// Dual tree of a finite lamination: one node per complementary region and
// one per landing class, with an edge whenever the class bounds the region.
class DualTree {
public:
    explicit DualTree(std::vector<std::vector<Angle>> classes) : classes_(std::move(classes)) {
        for (std::size_t c = 0; c < classes_.size(); ++c)
            for (const auto& a : classes_[c]) ends_.push_back({a, c});
        std::sort(ends_.begin(), ends_.end());
        const std::size_t n = ends_.size();
        std::vector<std::size_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        // Sample i sits on the arc (E[i], E[i+1]).  Its region continues past
        // E[i+1] along the polygon edge back to the previous vertex.
        for (std::size_t i = 0; i < n; ++i) {
            const auto& [e, c] = ends_[(i + 1) % n];
            std::size_t j = index_of(prev_vertex(c, e));
            parent[find(i)] = find(j);
        }
        std::map<std::size_t, std::size_t> region_id;
        sample_region_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto r = find(i);
            auto [it, fresh] = region_id.emplace(r, region_id.size());
            sample_region_[i] = it->second;
        }
        regions_ = region_id.size();
        adj_.resize(regions_ + classes_.size());
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k : {i, (i + 1) % n}) {
                std::size_t r = sample_region_[i], c = regions_ + ends_[k].second;
                if (seen.insert({r, c}).second) {
                    adj_[r].push_back(c);
                    adj_[c].push_back(r);
                }
            }
        }
        edges_ = seen.size();
    }

    bool is_tree() const { return edges_ + 1 == adj_.size(); }
    std::size_t size() const { return adj_.size(); }
    bool is_region(std::size_t node) const { return node < regions_; }
    std::size_t class_node(std::size_t c) const { return regions_ + c; }
    const std::vector<Angle>& class_of(std::size_t node) const { return classes_[node - regions_]; }
    const std::vector<std::size_t>& adj(std::size_t node) const { return adj_[node]; }

    std::size_t index_of(const Angle& a) const {
        auto it = std::lower_bound(ends_.begin(), ends_.end(), std::make_pair(a, std::size_t(0)),
                                   [](const auto& x, const auto& y) { return x.first < y.first; });
        if (it == ends_.end() || it->first != a) throw std::logic_error("angle not in lamination");
        return static_cast<std::size_t>(it - ends_.begin());
    }
    bool has_endpoint(const Angle& a) const {
        auto it = std::lower_bound(ends_.begin(), ends_.end(), std::make_pair(a, std::size_t(0)),
                                   [](const auto& x, const auto& y) { return x.first < y.first; });
        return it != ends_.end() && it->first == a;
    }
    std::size_t class_index_of(const Angle& a) const { return ends_[index_of(a)].second; }

    /// Region just counterclockwise of endpoint a.
    std::size_t region_after(const Angle& a) const { return sample_region_[index_of(a)]; }
    /// Region containing a non-endpoint angle.
    std::size_t region_containing(const Angle& a) const {
        if (ends_.empty()) return 0;
        auto it = std::upper_bound(ends_.begin(), ends_.end(), a,
                                   [](const Angle& x, const auto& y) { return x < y.first; });
        std::size_t i = it == ends_.begin() ? ends_.size() - 1
                                            : static_cast<std::size_t>(it - ends_.begin()) - 1;
        return sample_region_[i];
    }

    /// The edge of class node c that faces region r.
    std::optional<std::pair<Angle, Angle>> facing_edge(std::size_t region, std::size_t cnode) const {
        std::size_t c = cnode - regions_;
        const std::size_t n = ends_.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (sample_region_[i] != region) continue;
            const auto& [e, ci] = ends_[(i + 1) % n];
            if (ci == c) return std::make_pair(prev_vertex(c, e), e);
        }
        return std::nullopt;
    }

private:
    const Angle& prev_vertex(std::size_t c, const Angle& e) const {
        const auto& cls = classes_[c];
        auto it = std::find(cls.begin(), cls.end(), e);
        return it == cls.begin() ? cls.back() : *(it - 1);
    }

    std::vector<std::vector<Angle>> classes_;
    std::vector<std::pair<Angle, std::size_t>> ends_;
    std::vector<std::size_t> sample_region_;
    std::size_t regions_ = 0;
    std::size_t edges_ = 0;
    std::vector<std::vector<std::size_t>> adj_;
};

// Every landing class with at least two rays among angles of period <= P and
// preperiod <= D.
std::vector<std::vector<Angle>> finite_classes(const PcfLanding& model, std::size_t P,
                                               std::size_t D) {
    std::set<std::vector<Angle>> out;
    std::set<Angle> done;
    for (std::size_t n = 1; n <= P; ++n) {
        BigInt odd = (BigInt(1) << n) - 1;
        for (std::size_t j = 0; j <= D; ++j) {
            BigInt den = odd << j;
            for (BigInt k = 0; k < den; ++k) {
                Angle t(k, den);
                if (done.count(t)) continue;
                auto cls = model.landing_class(t);
                for (const auto& a : cls) done.insert(a);
                if (cls.size() >= 2) out.insert(cls);
            }
        }
    }
    return {out.begin(), out.end()};
}

struct Marked {
    std::string id;
    VertexKind kind;
    int orbit_index;
    bool fatou;
    std::size_t node;
    std::vector<Angle> angles;  // landing class for Julia vertices
};

struct Attempt {
    bool ok = false;
    std::string reason;
    HubbardTree tree;
};

Attempt try_build(const PcfSpec& spec, const PcfLanding& model, const Angle& theta1,
                  std::size_t P, std::size_t D) {
    Attempt res;
    auto classes = finite_classes(model, P, D);
    DualTree dual(classes);
    if (!dual.is_tree()) throw LaminationError("dual graph of the lamination is not a tree");

    std::vector<Marked> marked;
    if (spec.superattracting()) {
        const std::size_t p = spec.period;
        Angle x = theta1;
        for (std::size_t i = 1; i <= p; ++i) {
            if (!dual.has_endpoint(x)) {
                res.reason = "root leaf missing";
                return res;
            }
            int idx = static_cast<int>(i % p);
            marked.push_back({"x" + std::to_string(idx),
                              idx == 0 ? VertexKind::Critical : VertexKind::Postcritical, idx, true,
                              dual.region_after(x), {}});
            x = doubled(x);
        }
    } else {
        const std::size_t m = spec.preperiod + spec.period;
        Angle x = spec.characteristic_angle;
        for (std::size_t i = 1; i <= m; ++i) {
            auto cls = model.landing_class(x);
            std::size_t node = cls.size() >= 2 ? dual.class_node(dual.class_index_of(x))
                                               : dual.region_containing(x);
            marked.push_back({"x" + std::to_string(i), VertexKind::Postcritical,
                              static_cast<int>(i), false, node, cls});
            x = doubled(x);
        }
    }
    std::set<std::size_t> marked_nodes;
    for (const auto& mk : marked) marked_nodes.insert(mk.node);
    if (marked_nodes.size() != marked.size()) {
        res.reason = "postcritical points not separated";
        return res;
    }

    // Prune unmarked leaves down to the minimal subtree spanning the marks.
    const std::size_t N = dual.size();
    std::vector<std::size_t> deg(N);
    std::vector<bool> alive(N, true);
    for (std::size_t v = 0; v < N; ++v) deg[v] = dual.adj(v).size();
    std::queue<std::size_t> q;
    for (std::size_t v = 0; v < N; ++v)
        if (deg[v] <= 1 && !marked_nodes.count(v)) q.push(v);
    while (!q.empty()) {
        std::size_t v = q.front();
        q.pop();
        if (!alive[v]) continue;
        alive[v] = false;
        for (auto w : dual.adj(v)) {
            if (!alive[w]) continue;
            if (--deg[w] <= 1 && !marked_nodes.count(w)) q.push(w);
        }
    }

    std::map<std::size_t, std::size_t> vertex_of;  // dual node -> tree vertex
    HubbardTree& tree = res.tree;
    tree.spec = spec;
    tree.lamination_period = P;
    tree.lamination_preperiod = D;
    for (const auto& mk : marked) {
        HubbardVertex hv;
        hv.id = mk.id;
        hv.kind = mk.kind;
        hv.orbit_index = mk.orbit_index;
        hv.fatou = mk.fatou;
        hv.angles = mk.angles;
        vertex_of[mk.node] = tree.vertices.size();
        tree.vertices.push_back(hv);
    }
    // A lone ray lands at an endpoint of the tree; more arms mean the region
    // still hides an unresolved branch point.
    for (const auto& mk : marked) {
        if (!mk.fatou && dual.is_region(mk.node) && deg[mk.node] > 1) {
            res.reason = "single-ray vertex is not an endpoint";
            return res;
        }
    }
    std::vector<std::pair<Angle, std::size_t>> branch_nodes;
    for (std::size_t v = 0; v < N; ++v) {
        if (!alive[v] || marked_nodes.count(v) || deg[v] < 3) continue;
        if (dual.is_region(v)) {
            res.reason = "unresolved branching inside a gap";
            return res;
        }
        branch_nodes.push_back({dual.class_of(v).front(), v});
    }
    std::sort(branch_nodes.begin(), branch_nodes.end());
    for (std::size_t b = 0; b < branch_nodes.size(); ++b) {
        HubbardVertex hv;
        hv.id = "b" + std::to_string(b);
        hv.kind = VertexKind::Branch;
        hv.angles = dual.class_of(branch_nodes[b].second);
        vertex_of[branch_nodes[b].second] = tree.vertices.size();
        tree.vertices.push_back(hv);
    }

    // Walk the alive subtree between vertices.
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& [node, vi] : vertex_of) {
        for (auto first : dual.adj(node)) {
            if (!alive[first]) continue;
            std::size_t prev = node, cur = first;
            while (!vertex_of.count(cur)) {
                std::size_t next = SIZE_MAX;
                for (auto w : dual.adj(cur))
                    if (alive[w] && w != prev) next = w;
                if (next == SIZE_MAX) break;
                prev = cur;
                cur = next;
            }
            if (!vertex_of.count(cur)) continue;
            std::size_t a = vi, b = vertex_of.at(cur);
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    }
    tree.edges.assign(edges.begin(), edges.end());
    for (auto& v : tree.vertices) v.nu = 0;
    for (auto [a, b] : tree.edges) {
        ++tree.vertices[a].nu;
        ++tree.vertices[b].nu;
    }

    // Root points of Fatou vertices: neighbouring classes in the subtree.
    for (const auto& mk : marked) {
        if (!mk.fatou) continue;
        auto& hv = tree.vertices[vertex_of.at(mk.node)];
        for (auto c : dual.adj(mk.node)) {
            if (!alive[c]) continue;
            auto edge = dual.facing_edge(mk.node, c);
            if (!edge) throw std::logic_error("region does not face its neighbour");
            RootPoint rp;
            rp.angles = {std::min(edge->first, edge->second), std::max(edge->first, edge->second)};
            rp.class_angles = dual.class_of(c);
            hv.roots.push_back(rp);
        }
        std::sort(hv.roots.begin(), hv.roots.end(),
                  [](const RootPoint& x, const RootPoint& y) { return x.angles.first < y.angles.first; });
        for (std::size_t r = 0; r < hv.roots.size(); ++r) {
            hv.roots[r].id = hv.id + "^" + std::to_string(r + 1);
            hv.angles.push_back(hv.roots[r].angles.first);
            hv.angles.push_back(hv.roots[r].angles.second);
        }
    }

    // Dynamics.
    tree.dynamics.assign(tree.vertices.size(), SIZE_MAX);
    const std::size_t m = marked.size();
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t next = i + 1 < m ? i + 1 : (spec.superattracting() ? 0 : spec.preperiod);
        tree.dynamics[vertex_of.at(marked[i].node)] = vertex_of.at(marked[next].node);
    }
    for (const auto& [angle, node] : branch_nodes) {
        auto image = model.landing_class(doubled(angle));
        bool found = false;
        for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
            const auto& hv = tree.vertices[v];
            if (!hv.fatou && hv.angles == image) {
                tree.dynamics[vertex_of.at(node)] = v;
                found = true;
            }
        }
        if (!found) {
            res.reason = "branch image outside the tree";
            return res;
        }
    }
    res.ok = true;
    return res;
}

}  // namespace

HubbardTree build_hubbard_tree(const PcfSpec& spec) {
    spec.validate();
    auto model = landing_model(spec);
    Angle theta1 = model->partition().critical_value();
    OrbitInfo info = orbit_info(spec.characteristic_angle);
    std::size_t P = std::max<std::size_t>(info.period, 2);
    std::size_t D = info.preperiod + 1;
    std::string reason;
    for (int round = 0; round < 12; ++round) {
        auto attempt = try_build(spec, *model, theta1, P, D);
        if (attempt.ok) return attempt.tree;
        reason = attempt.reason;
        if (round % 2 == 0) ++D;
        else ++P;
        if (P > 12) break;
    }
    throw DepthError("Hubbard tree unresolved: " + reason);
}

std::optional<std::size_t> HubbardTree::find(const std::string& id) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].id == id) return i;
    return std::nullopt;
}

std::size_t HubbardTree::index_of(const std::string& id) const {
    auto i = find(id);
    if (!i) throw std::invalid_argument("no vertex '" + id + "' in the Hubbard tree");
    return *i;
}

std::vector<std::size_t> HubbardTree::neighbours(std::size_t v) const {
    std::vector<std::size_t> out;
    for (auto [a, b] : edges) {
        if (a == v) out.push_back(b);
        if (b == v) out.push_back(a);
    }
    return out;
}

std::optional<std::size_t> HubbardTree::orbit_vertex(int i) const {
    for (std::size_t v = 0; v < vertices.size(); ++v)
        if (vertices[v].orbit_index == i) return v;
    return std::nullopt;
}

nlohmann::json angles_json(const std::vector<Angle>& xs) {
    auto out = nlohmann::json::array();
    for (const auto& a : xs) out.push_back(a.str());
    return out;
}

nlohmann::json HubbardTree::to_json() const {
    nlohmann::json j;
    j["spec"] = spec.label();
    j["lamination_resolution"] = {{"period", lamination_period}, {"preperiod", lamination_preperiod}};
    auto verts = nlohmann::json::array();
    for (const auto& v : vertices) {
        nlohmann::json jv{{"id", v.id}, {"kind", to_string(v.kind)}, {"nu", v.nu},
                          {"fatou", v.fatou}, {"angles", angles_json(v.angles)}};
        if (!v.roots.empty()) {
            auto roots = nlohmann::json::array();
            for (const auto& r : v.roots)
                roots.push_back({{"id", r.id},
                                 {"angles", angles_json({r.angles.first, r.angles.second})},
                                 {"class", angles_json(r.class_angles)}});
            jv["roots"] = roots;
        }
        verts.push_back(jv);
    }
    j["vertices"] = verts;
    auto edges_j = nlohmann::json::array();
    for (auto [a, b] : edges) edges_j.push_back({vertices[a].id, vertices[b].id});
    j["edges"] = edges_j;
    nlohmann::json dyn = nlohmann::json::object();
    for (std::size_t v = 0; v < vertices.size(); ++v)
        dyn[vertices[v].id] = dynamics[v] < vertices.size() ? vertices[dynamics[v]].id : "";
    j["dynamics"] = dyn;
    return j;
}

std::vector<RootPoint> root_angles(const HubbardTree& tree, const std::string& vertex) {
    if (!tree.spec.superattracting())
        throw std::invalid_argument("root_angles needs a superattracting tree; use misiurewicz_angles");
    const auto& v = tree.vertices[tree.index_of(vertex)];
    if (!v.fatou) throw std::invalid_argument("vertex " + vertex + " is not on the critical cycle");
    return v.roots;
}

std::vector<Angle> misiurewicz_angles(const HubbardTree& tree, const std::string& vertex) {
    if (tree.spec.superattracting())
        throw std::invalid_argument("misiurewicz_angles needs a Misiurewicz tree");
    auto out = tree.vertices[tree.index_of(vertex)].angles;
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace siegelmate
