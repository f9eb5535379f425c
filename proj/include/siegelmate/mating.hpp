#pragma once

#include "siegelmate/angle.hpp"
#include "siegelmate/lamination.hpp"
#include "siegelmate/pcf.hpp"

#include "json.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace siegelmate {

class DropTree;

/// Raised when a class violates a bound that only a broken lamination can violate.
class CombinatorialError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// R_t(P_theta) joined with R_{1-t}(P_c); t is the theta-side angle.
struct JoinedRay {
    Angle t;
    Angle c_angle() const { return conjugate(t); }
    friend bool operator==(const JoinedRay&, const JoinedRay&) = default;
    friend auto operator<=>(const JoinedRay& a, const JoinedRay& b) { return a.t <=> b.t; }
};

/// A ray-equivalence class as a bipartite graph: theta-side landing points and
/// c-side landing points, joined by rays.  Nodes are landing classes.
struct RayClass {
    std::vector<JoinedRay> rays;                  // sorted
    std::vector<std::vector<Angle>> theta_nodes;  // theta-side angles per node
    std::vector<std::vector<Angle>> c_nodes;      // c-side angles per node
    /// For each ray: (theta node, c node).
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t m = 0;                            // most c-side rays at one node
    std::optional<std::size_t> period;            // none for preperiodic classes
    std::size_t x1_nodes = 0;                     // theta nodes that map onto x_theta

    std::vector<Angle> angles() const;
    bool is_tree() const { return edges.size() + 1 == theta_nodes.size() + c_nodes.size(); }
    nlohmann::json to_json() const;
};

/// Breadth-first closure alternating the two landing relations, starting from
/// the theta-side angle t.  Throws CombinatorialError past `cap` rays or when
/// the class has more than 2m rays.
RayClass ray_class(const Angle& t, const SiegelLanding& siegel, const LandingModel& pcf,
                   std::size_t cap = 64);

struct LoopReport {
    bool is_tree = true;
    /// One witness per independent cycle: the rays around it.
    std::vector<std::vector<Angle>> cycles;
    nlohmann::json to_json() const;
};
LoopReport detect_loops(const RayClass& cls);

struct X1Report {
    std::size_t x1_nodes = 0;
    std::vector<std::vector<Angle>> nodes;
    bool ok = true;  // at most one node in X_1
    nlohmann::json to_json() const;
};
X1Report class_of_x1_guard(const RayClass& cls, const SiegelLanding& siegel);

/// Every class whose rays have period dividing some n <= max_ray_period and
/// whose class period is exactly q; one representative per class.
std::vector<RayClass> periodic_ray_classes(std::size_t q, const SiegelLanding& siegel,
                                           const LandingModel& pcf, unsigned max_ray_period);

// T-graph -------------------------------------------------------------------

struct TRay {
    Angle t;                                // theta-side angle
    Angle c_angle;
    std::string root;                       // c-side root point or vertex id
    std::vector<std::vector<int>> chain;    // drop addresses, outermost first
};

struct TRegion {
    std::string label;                   // U^i, U^{j1}, U^{j2}, Ũ^k, or U
    std::vector<Angle> rays;             // theta-side angles on the boundary
    std::vector<std::string> disks;      // Fatou vertices whose disk touches the region
    bool touches_siegel = true;
    bool jordan = false;
};

struct TGraph {
    std::string spec;
    std::vector<TRay> rays;
    std::vector<std::string> disks;                               // D_i by vertex id
    std::vector<std::pair<std::string, std::string>> segments;    // (root point, vertex)
    std::vector<TRegion> regions;
    bool connected = true;
    std::vector<std::string> notes;

    std::size_t count_regions(const std::string& prefix) const;
    nlohmann::json to_json() const;
    std::string to_dot() const;
};

/// T from the Hubbard tree: the Siegel disk, rays and drop chains at the root
/// points (or one ray per Julia vertex for dendrites), disks and segments.
/// Regions come from the cyclic order of rays around the collapsed pieces.
TGraph build_T(const HubbardTree& tree, const DropTree* drops = nullptr);

}  // namespace siegelmate
