#pragma once

#include "siegelmate/angle.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace siegelmate {

/// Raised when a lamination has not been pulled back far enough to answer a query.
class DepthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when leaf pullback finds no consistent (unlinked) preimage assignment.
class LaminationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unordered chord {a, b}, stored with a < b.
struct Leaf {
    Angle a;
    Angle b;

    Leaf() = default;
    Leaf(Angle x, Angle y);

    Leaf image() const { return Leaf(doubled(a), doubled(b)); }
    bool degenerate_image() const { return doubled(a) == doubled(b); }
    bool has_endpoint(const Angle& t) const { return a == t || b == t; }

    friend bool operator==(const Leaf&, const Leaf&) = default;
    friend auto operator<=>(const Leaf& x, const Leaf& y) {
        if (auto c = x.a <=> y.a; c != 0) return c;
        return x.b <=> y.b;
    }
};

/// True iff the chords are linked (cross in the open disk).  Leaves sharing an
/// endpoint never cross.
bool crosses(const Leaf& x, const Leaf& y);

enum class Side { A, B, Boundary };

/// The critical diameter {v/2, (v+1)/2} splitting the circle into the two
/// arcs on which doubling is injective.  A is the open arc from v/2 to
/// (v+1)/2; it contains v.
///
/// With BoundaryRule::Star the two endpoints get their own symbol (the
/// critical point lies on the Julia set).  With BoundaryRule::HalfOpen the
/// diameter is pushed slightly into the critical Fatou gap, so v/2 joins B
/// and (v+1)/2 joins A.
class CriticalPartition {
public:
    enum class BoundaryRule { Star, HalfOpen };

    CriticalPartition(Angle critical_value, BoundaryRule rule);

    const Angle& critical_value() const { return value_; }
    const Angle& low() const { return p0_; }
    const Angle& high() const { return p1_; }
    BoundaryRule rule() const { return rule_; }
    Leaf diameter() const { return Leaf(p0_, p1_); }

    Side side(const Angle& x) const;
    /// Itinerary symbols 'A', 'B', '*' for the first n iterates of x.
    std::string itinerary(const Angle& x, std::size_t n) const;

private:
    Angle value_;
    Angle p0_;
    Angle p1_;
    BoundaryRule rule_;
};

/// Record of a preimage leaf that was already present, or of a pullback
/// through the critical value.
struct Collision {
    Leaf source;
    Leaf preimage;
    std::string kind;  // "existing" or "critical"
};

/// A finite-depth invariant lamination: seed leaves at level 0 and their
/// iterated pullbacks.
class LaminationSet {
public:
    LaminationSet(std::vector<Leaf> seeds, CriticalPartition partition,
                  std::size_t max_seed_period = 0);

    const std::vector<Leaf>& seeds() const { return seeds_; }
    const CriticalPartition& partition() const { return partition_; }
    std::size_t depth() const { return depth_; }
    std::size_t max_seed_period() const { return max_seed_period_; }
    const std::map<Leaf, std::size_t>& leaves() const { return levels_; }
    std::vector<Leaf> leaves_at(std::size_t level) const;
    const std::vector<Collision>& collisions() const { return collisions_; }
    std::size_t size() const { return levels_.size(); }
    bool contains(const Leaf& leaf) const { return levels_.count(leaf) != 0; }
    std::optional<std::size_t> level_of(const Leaf& leaf) const;

    /// Pairs of crossing leaves (empty for a valid lamination).
    std::vector<std::pair<Leaf, Leaf>> linked_pairs() const;

private:
    friend LaminationSet pullback(const LaminationSet&, std::size_t);

    std::vector<Leaf> seeds_;
    CriticalPartition partition_;
    std::size_t max_seed_period_;
    std::size_t depth_ = 0;
    std::map<Leaf, std::size_t> levels_;
    std::vector<Collision> collisions_;
};

/// The two preimage leaves of `leaf` that stay within closed halves of the
/// partition.  Throws LaminationError when no such assignment exists and
/// returns nullopt when the leaf has the critical value as an endpoint
/// (the preimage is then a critical polygon).
std::optional<std::pair<Leaf, Leaf>> preimage_leaves(const Leaf& leaf,
                                                     const CriticalPartition& partition);

/// Adds `levels` rounds of preimages of the top-level leaves.
LaminationSet pullback(const LaminationSet& lam, std::size_t levels);

/// All angles sharing a landing point with t, following leaves that share
/// endpoints.  Throws DepthError if t's leaf could only appear deeper.
std::vector<Angle> colanding_partner(const LaminationSet& lam, const Angle& t);

/// Edges of the convex polygon spanned by a co-landing class (one leaf for
/// two angles, none for one).
std::vector<Leaf> polygon_leaves(std::vector<Angle> angles);

/// On-demand landing relation for rational angles.  Implementations pull a
/// class back along the orbit of the queried angle, so arbitrarily deep
/// angles are answered without materialising the full lamination.
class LandingModel {
public:
    virtual ~LandingModel() = default;
    /// Sorted class of angles landing together with t (always contains t).
    virtual std::vector<Angle> landing_class(const Angle& t) const = 0;
    virtual const CriticalPartition& partition() const = 0;
    /// Pullback depth needed to realise t's class in a materialised lamination.
    static std::size_t required_depth(const Angle& t);
};

/// Landing relation of a postcritically finite quadratic with characteristic
/// angle theta.  Periodic classes are itinerary classes; preperiodic classes
/// are pulled back along the orbit.
class PcfLanding final : public LandingModel {
public:
    PcfLanding(const Angle& characteristic_angle, bool superattracting,
               unsigned max_period = 18);

    std::vector<Angle> landing_class(const Angle& t) const override;
    const CriticalPartition& partition() const override { return partition_; }

    /// Every periodic class with more than one angle and ray period n.
    std::vector<std::vector<Angle>> periodic_classes(unsigned n) const;
    /// Materialised lamination: all periodic classes of ray period <= max_period,
    /// pulled back `depth` levels.
    LaminationSet lamination(unsigned max_period, std::size_t depth) const;

    bool superattracting() const { return superattracting_; }

private:
    const std::map<std::string, std::vector<Angle>>& classes_of_period(unsigned n) const;

    CriticalPartition partition_;
    bool superattracting_;
    unsigned max_period_;
    mutable std::mutex cache_mutex_;
    mutable std::map<unsigned, std::map<std::string, std::vector<Angle>>> cache_;
};

/// Landing relation of the Siegel polynomial at angle resolution N: the only
/// multi-ray classes are iterated preimages of the critical leaf.
class SiegelLanding final : public LandingModel {
public:
    explicit SiegelLanding(const Leaf& critical_leaf);

    std::vector<Angle> landing_class(const Angle& t) const override;
    const CriticalPartition& partition() const override { return partition_; }

    const Leaf& critical_leaf() const { return critical_leaf_; }
    /// Level k with 2^k t on the critical leaf, if any.
    std::optional<std::size_t> critical_level(const Angle& t) const;

private:
    Leaf critical_leaf_;
    CriticalPartition partition_;
};

}  // namespace siegelmate
