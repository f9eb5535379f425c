#pragma once

#include "siegelmate/angle.hpp"
#include "siegelmate/complex_util.hpp"
#include "siegelmate/lamination.hpp"
#include "siegelmate/rays.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace siegelmate {

using HighReal = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>;

class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rotation number of the Siegel disk, carried at 200 bits.
struct Theta {
    std::string name;  // "golden", "silver", "cbrt(1/4)" or the decimal text
    HighReal value;

    /// Accepts the three named constants or a decimal in (0, 1).
    static Theta parse(const std::string& text);
    static Theta golden();
    static Theta silver();
    static Theta cube_root_quarter();

    double to_double() const { return value.convert_to<double>(); }
    cplx lambda() const { return unit(to_double()); }
};

struct ContinuedFraction {
    std::vector<std::uint64_t> coefficients;
    std::uint64_t bound = 0;         // largest coefficient seen
    std::uint64_t bound_limit = 0;   // configured B
    bool within_limit = true;
    std::string status;

    /// Convergents p_k / q_k.
    std::vector<std::pair<BigInt, BigInt>> convergents() const;
};

/// Up to `terms` partial quotients.  Expansion stops early, with a status
/// note, when theta looks rational or the working precision runs out.
ContinuedFraction continued_fraction(const Theta& theta, std::size_t terms,
                                     std::uint64_t bound_limit = 1000);

/// Truncated critical angle pair of the Siegel polynomial.  The critical value
/// angle is v = 0.d1 d2 ... with d_k = 1 iff frac(k theta) lies in [1 - theta, 1);
/// the critical leaf is {t_minus, t_plus} = {0.0 d1 d2 ..., 0.1 d1 d2 ...}.
/// For irrational theta the plus and minus conventions give the same digits.
struct RotationSetDigits {
    Theta theta;
    std::size_t bits = 0;              // N, the denominator of t_plus and t_minus is 2^N
    std::vector<int> digits_plus;      // N binary digits of t_plus
    std::vector<int> digits_minus;     // N binary digits of t_minus
    Angle t_plus;
    Angle t_minus;
    Angle critical_value;              // doubled(t_minus), N - 1 digits
    double min_margin_log2 = 0.0;      // log2 of the smallest certified digit margin

    Leaf critical_leaf() const { return Leaf(t_minus, t_plus); }
};

/// Certifies every digit: frac(k theta) must stay 2^-100 away from 0 and 1 - theta.
RotationSetDigits critical_angle_pair(const Theta& theta, std::size_t bits);

/// Exact minimal rotation set for rational rotation number p/q.
struct RationalRotationSet {
    std::vector<Angle> orbit;  // sorted
    Angle v_plus;              // digits from [1 - p/q, 1)
    Angle v_minus;             // digits from (1 - p/q, 1]
    Angle gap_start;           // major gap is the ccw arc gap_start -> gap_end
    Angle gap_end;
};
RationalRotationSet rotation_set_rational(unsigned p, unsigned q);

/// Siegel lamination: the critical leaf pulled back `depth` levels.
LaminationSet siegel_lamination(const RotationSetDigits& rsd, std::size_t depth);

// Drops ---------------------------------------------------------------------

struct DropNode {
    std::vector<int> address;      // birth indices along the parent chain
    std::size_t depth = 0;         // n for an n-drop; 0 for the Siegel disk
    std::vector<int> parent;       // parent's address
    std::size_t parent_depth = 0;
    std::optional<Leaf> leaf;      // attaching leaf (none for the Siegel disk)
    cplx center;
    cplx attach_point;
    std::vector<cplx> boundary;    // ordered from the attach point
};

struct DropOptions {
    std::size_t boundary_samples = 1500;
    RayOptions ray{24, 4, 16.0, 1e-3};
};

/// All drops of depth <= max_depth.  Depth-n drops correspond to level n-1
/// leaves of the Siegel lamination; the parent is the innermost drop whose
/// limb contains the leaf.
class DropTree {
public:
    DropTree(const RotationSetDigits& rsd, std::size_t max_depth, const DropOptions& opts = {});

    const std::vector<DropNode>& nodes() const { return nodes_; }
    std::size_t count_at_depth(std::size_t n) const;
    const DropNode& root() const { return nodes_.front(); }
    const DropNode& by_address(const std::vector<int>& address) const;
    std::size_t max_depth() const { return max_depth_; }
    const LaminationSet& lamination() const { return lam_; }
    const RotationSetDigits& digits() const { return rsd_; }
    cplx lambda() const { return lambda_; }

    /// Nested drops whose limbs contain t, from the Siegel disk down.
    std::vector<const DropNode*> chain_of_angle(const Angle& t) const;
    /// Chordal distance from z to the closed drop (0 inside).
    double distance_to_drop(const DropNode& d, cplx z) const;

private:
    bool limb_contains(const Leaf& leaf, const Angle& t) const;

    RotationSetDigits rsd_;
    std::size_t max_depth_;
    LaminationSet lam_;
    cplx lambda_;
    std::vector<DropNode> nodes_;
};

struct DropChain {
    Angle angle;
    std::vector<DropNode> nodes;
    cplx landing_point;
    std::vector<double> distances;  // closure distance to the landing point
    bool strictly_decreasing = false;
};

DropChain drop_chain_of_angle(const Angle& t, const DropTree& tree, const SiegelLanding& landing,
                              const RayOptions& ray = {});

/// Forward orbit of the critical point, `samples` points starting at P(x_theta).
std::vector<cplx> siegel_disk_boundary(const Theta& theta, std::size_t samples);

/// Rotation number of a sampled circle orbit from its circular order.
double orbit_rotation_number(const std::vector<cplx>& orbit, cplx center);

}  // namespace siegelmate
