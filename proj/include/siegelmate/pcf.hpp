#pragma once

#include "siegelmate/angle.hpp"
#include "siegelmate/lamination.hpp"

#include "json.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace siegelmate {

struct KneadingSequence {
    std::string symbols;  // over {A, B, *}
    std::size_t preperiod = 0;
    std::size_t period = 1;
};

/// Itinerary of t's doubling orbit relative to the diameter {t/2, (t+1)/2}.
/// Throws std::invalid_argument for t = 0.
KneadingSequence kneading(const Angle& t);

enum class PcfMode { Superattracting, Misiurewicz };

/// A postcritically finite quadratic given by one external angle of its
/// critical value.  Superattracting: the characteristic angle is periodic and
/// `period` is the period of the critical point.  Misiurewicz: the critical
/// value is strictly preperiodic and satisfies P^(l+k)(c) = P^l(c).
struct PcfSpec {
    PcfMode mode = PcfMode::Superattracting;
    Angle characteristic_angle;
    std::size_t period = 1;     // p, or k in Misiurewicz mode
    std::size_t preperiod = 0;  // l in Misiurewicz mode

    static PcfSpec superattracting(const Angle& t);
    /// Derives (l, k) from the landing pattern of the critical value orbit.
    static PcfSpec misiurewicz(const Angle& t);

    bool superattracting() const { return mode == PcfMode::Superattracting; }
    std::string label() const;
    /// Throws std::invalid_argument when mode, angle and (l, k)/p disagree.
    void validate() const;
};

enum class VertexKind { Critical, Postcritical, Branch };
std::string to_string(VertexKind kind);

/// A point where the tree leaves a Fatou vertex, with the two rays facing it.
struct RootPoint {
    std::string id;
    std::pair<Angle, Angle> angles;
    std::vector<Angle> class_angles;  // whole landing class of the root point
};

struct HubbardVertex {
    std::string id;
    VertexKind kind = VertexKind::Postcritical;
    /// Orbit index i for x_i (0 for the critical point), -1 for branch points.
    int orbit_index = -1;
    bool fatou = false;
    std::vector<Angle> angles;  // landing class (Julia vertices) or root angles (Fatou)
    std::size_t nu = 0;
    std::vector<RootPoint> roots;  // Fatou vertices only
};

struct HubbardTree {
    PcfSpec spec;
    std::vector<HubbardVertex> vertices;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::size_t> dynamics;
    /// Resolution of the lamination the tree was read from.
    std::size_t lamination_period = 0;
    std::size_t lamination_preperiod = 0;

    std::optional<std::size_t> find(const std::string& id) const;
    std::size_t index_of(const std::string& id) const;
    std::vector<std::size_t> neighbours(std::size_t v) const;
    /// Vertex x_i by orbit index (i = 0 is the critical point).
    std::optional<std::size_t> orbit_vertex(int i) const;
    nlohmann::json to_json() const;
};

/// Builds the abstract Hubbard tree from the dual tree of a finite lamination,
/// raising the lamination resolution until every branch point is resolved.
HubbardTree build_hubbard_tree(const PcfSpec& spec);

/// Landing relation of the polynomial described by spec.
std::shared_ptr<PcfLanding> landing_model(const PcfSpec& spec);

/// Root points of a Fatou vertex on the critical cycle (one for nu = 1, two
/// for nu = 2), ordered by smallest angle.
std::vector<RootPoint> root_angles(const HubbardTree& tree, const std::string& vertex);

/// Angles landing at a Julia vertex; the first one is the smallest.
std::vector<Angle> misiurewicz_angles(const HubbardTree& tree, const std::string& vertex);

nlohmann::json angles_json(const std::vector<Angle>& xs);

}  // namespace siegelmate
