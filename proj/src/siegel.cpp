#include "siegelmate/siegel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <numbers>

namespace siegelmate {

namespace mp = boost::multiprecision;

Theta Theta::golden() { return {"golden", (mp::sqrt(HighReal(5)) - 1) / 2}; }
Theta Theta::silver() { return {"silver", mp::sqrt(HighReal(2)) - 1}; }
Theta Theta::cube_root_quarter() { return {"cbrt(1/4)", mp::cbrt(HighReal(1) / 4)}; }

Theta Theta::parse(const std::string& text) {
    if (text == "golden") return golden();
    if (text == "silver") return silver();
    if (text == "cbrt(1/4)" || text == "cbrt") return cube_root_quarter();
    HighReal v;
    try {
        v = HighReal(text);
    } catch (const std::exception&) {
        throw std::invalid_argument("theta: expected golden, silver, cbrt(1/4) or a decimal, got '" + text + "'");
    }
    if (!(v > 0 && v < 1)) throw std::invalid_argument("theta must lie in (0, 1): " + text);
    return {text, v};
}

std::vector<std::pair<BigInt, BigInt>> ContinuedFraction::convergents() const {
    std::vector<std::pair<BigInt, BigInt>> out;
    // theta < 1, so the expansion starts at [0; a1, ...].
    BigInt p0 = 1, q0 = 0, p1 = 0, q1 = 1;
    for (auto a : coefficients) {
        BigInt p = BigInt(a) * p1 + p0, q = BigInt(a) * q1 + q0;
        out.emplace_back(p, q);
        p0 = p1; q0 = q1; p1 = p; q1 = q;
    }
    return out;
}

ContinuedFraction continued_fraction(const Theta& theta, std::size_t terms, std::uint64_t bound_limit) {
    ContinuedFraction cf;
    cf.bound_limit = bound_limit;
    HighReal x = theta.value;
    // Each step multiplies the inherited error by about q_k^2; stop well inside
    // the working precision.
    const HighReal budget = mp::ldexp(HighReal(1), 140);
    BigInt q0 = 1, q1 = 0;
    cf.status = "complete";
    for (std::size_t k = 0; k < terms; ++k) {
        if (x < mp::ldexp(HighReal(1), -150)) {
            cf.status = "terminated: rational at working precision";
            break;
        }
        x = 1 / x;
        HighReal a = mp::floor(x);
        x -= a;
        auto ai = a.convert_to<std::uint64_t>();
        cf.coefficients.push_back(ai);
        cf.bound = std::max(cf.bound, ai);
        BigInt q = BigInt(ai) * q1 + q0;
        q0 = q1; q1 = q;
        if (HighReal(q1) * HighReal(q1) > budget && k + 1 < terms) {
            cf.status = "unknown beyond computed depth";
            break;
        }
    }
    cf.within_limit = cf.bound <= bound_limit;
    return cf;
}

RotationSetDigits critical_angle_pair(const Theta& theta, std::size_t bits) {
    if (bits < 2) throw std::invalid_argument("critical_angle_pair: need at least 2 bits");
    RotationSetDigits r;
    r.theta = theta;
    r.bits = bits;
    const HighReal one(1), cut = one - theta.value;
    const HighReal eps = mp::ldexp(one, -100);
    HighReal margin = one;
    std::vector<int> d;  // d_1 .. d_{N-1}
    for (std::size_t k = 1; k < bits; ++k) {
        HighReal f = theta.value * k;
        f -= mp::floor(f);
        HighReal m = std::min({mp::abs(f - cut), f, one - f});
        if (m <= eps)
            throw PrecisionError("digit " + std::to_string(k) + " of the critical value is not certified");
        margin = std::min(margin, m);
        d.push_back(f >= cut ? 1 : 0);
    }
    BigInt tail = 0;
    for (int b : d) tail = (tail << 1) | b;
    r.digits_minus.push_back(0);
    r.digits_plus.push_back(1);
    for (int b : d) {
        r.digits_minus.push_back(b);
        r.digits_plus.push_back(b);
    }
    const unsigned n = static_cast<unsigned>(bits);
    r.t_minus = Angle::dyadic(tail, n);
    r.t_plus = Angle::dyadic((BigInt(1) << (n - 1)) + tail, n);
    r.critical_value = doubled(r.t_minus);
    r.min_margin_log2 = mp::log2(margin).convert_to<double>();
    return r;
}

RationalRotationSet rotation_set_rational(unsigned p, unsigned q) {
    if (q < 2 || p == 0 || p >= q || std::gcd(p, q) != 1)
        throw std::invalid_argument("rotation_set_rational: need 0 < p < q coprime");
    if (q > 62) throw std::invalid_argument("rotation_set_rational: q too large");
    BigInt plus = 0, minus = 0;
    for (unsigned k = 1; k <= q; ++k) {
        unsigned r = (k * p) % q;  // frac(k p/q) = r/q
        plus = (plus << 1) | (r >= q - p ? 1 : 0);
        minus = (minus << 1) | (r > q - p || r == 0 ? 1 : 0);
    }
    BigInt den = (BigInt(1) << q) - 1;
    RationalRotationSet s;
    s.v_plus = Angle(plus, den);
    s.v_minus = Angle(minus, den);
    Angle t = s.v_plus;
    for (unsigned j = 0; j < q; ++j, t = doubled(t)) s.orbit.push_back(t);
    std::sort(s.orbit.begin(), s.orbit.end());
    s.gap_start = halves(s.v_minus).second;
    s.gap_end = halves(s.v_plus).first;
    return s;
}

LaminationSet siegel_lamination(const RotationSetDigits& rsd, std::size_t depth) {
    LaminationSet base({rsd.critical_leaf()},
                       CriticalPartition(rsd.critical_value, CriticalPartition::BoundaryRule::Star));
    return pullback(base, depth);
}

std::vector<cplx> siegel_disk_boundary(const Theta& theta, std::size_t samples) {
    QuadPoly P{theta.lambda(), {0.0, 0.0}};
    std::vector<cplx> out;
    cplx z = P.critical_point();
    for (std::size_t k = 0; k < samples; ++k) out.push_back(z = P(z));
    return out;
}

double orbit_rotation_number(const std::vector<cplx>& orbit, cplx center) {
    if (orbit.size() < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < orbit.size(); ++j) {
        double d = std::arg((orbit[j + 1] - center) / (orbit[j] - center)) / (2.0 * std::numbers::pi);
        sum += d < 0 ? d + 1.0 : d;
    }
    return sum / static_cast<double>(orbit.size() - 1);
}

// Drops ---------------------------------------------------------------------

namespace {

bool inside_polygon(const std::vector<cplx>& poly, cplx z) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const cplx a = poly[i], b = poly[j];
        if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
            double x = a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
            if (z.real() < x) in = !in;
        }
    }
    return in;
}

// Open ccw arc (start, end) of the leaf that avoids v.
std::pair<Angle, Angle> limb_arc(const Leaf& leaf, const Angle& v) {
    if (cyclic_between(leaf.a, leaf.b, v)) return {leaf.b, leaf.a};
    return {leaf.a, leaf.b};
}

}  // namespace

bool DropTree::limb_contains(const Leaf& leaf, const Angle& t) const {
    auto [s, e] = limb_arc(leaf, rsd_.critical_value);
    return t == s || t == e || cyclic_between(s, e, t);
}

DropTree::DropTree(const RotationSetDigits& rsd, std::size_t max_depth, const DropOptions& opts)
    : rsd_(rsd),
      max_depth_(max_depth),
      lam_(max_depth == 0 ? LaminationSet({rsd.critical_leaf()},
                                          CriticalPartition(rsd.critical_value,
                                                            CriticalPartition::BoundaryRule::Star))
                          : siegel_lamination(rsd, max_depth - 1)),
      lambda_(rsd.theta.lambda()) {
    const Angle& v = rsd_.critical_value;
    const QuadPoly P{lambda_, {0.0, 0.0}};
    const cplx x = P.critical_point();
    const SiegelLanding landing(rsd_.critical_leaf());

    // Siegel disk: critical orbit ordered by internal angle, starting at x.
    const std::size_t M = std::max<std::size_t>(opts.boundary_samples, 16);
    std::vector<std::pair<double, cplx>> orbit;
    {
        const double th = rsd_.theta.to_double();
        cplx z = x;
        for (std::size_t k = 0; k < M; ++k) {
            double f = std::fmod(th * static_cast<double>(k), 1.0);
            orbit.emplace_back(f, z);
            z = P(z);
        }
        std::sort(orbit.begin(), orbit.end(), [](auto& a, auto& b) { return a.first < b.first; });
    }
    DropNode root;
    root.center = 0.0;
    root.attach_point = x;
    for (auto& [f, z] : orbit) root.boundary.push_back(z);
    nodes_.push_back(root);
    if (max_depth == 0) return;

    // Leaves by level, then by position.
    std::vector<std::pair<Leaf, std::size_t>> leaves(lam_.leaves().begin(), lam_.leaves().end());
    std::stable_sort(leaves.begin(), leaves.end(),
                     [](auto& a, auto& b) { return a.second < b.second; });

    std::map<Leaf, std::size_t> index;  // leaf -> node index
    std::vector<std::vector<std::size_t>> children(leaves.size() + 1);
    std::vector<std::size_t> parent_of(leaves.size() + 1, 0);
    auto arc_length = [&](const Leaf& l) {
        auto [s, e] = limb_arc(l, v);
        return e - s;
    };
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const auto& [leaf, level] = leaves[i];
        std::size_t best = 0;
        std::optional<Angle> best_len;
        for (std::size_t j = 0; j < i; ++j) {
            const auto& [other, olevel] = leaves[j];
            if (olevel >= level) break;
            if (!limb_contains(other, leaf.a) || !limb_contains(other, leaf.b)) continue;
            Angle len = arc_length(other);
            if (!best_len || len < *best_len) {
                best_len = len;
                best = j + 1;
            }
        }
        parent_of[i + 1] = best;
        children[best].push_back(i + 1);
    }

    // Addresses: siblings in ccw order from the start of the parent's limb
    // (from t_plus for the Siegel disk, so U_1 is the first child).
    std::vector<std::vector<int>> address(leaves.size() + 1);
    for (std::size_t node = 0; node <= leaves.size(); ++node) {
        // Parents precede children because levels increase.
        Angle ref = node == 0 ? rsd_.t_plus : limb_arc(leaves[node - 1].first, v).first;
        auto& ch = children[node];
        std::sort(ch.begin(), ch.end(), [&](std::size_t a, std::size_t b) {
            return limb_arc(leaves[a - 1].first, v).first - ref <
                   limb_arc(leaves[b - 1].first, v).first - ref;
        });
        for (std::size_t r = 0; r < ch.size(); ++r) {
            address[ch[r]] = address[node];
            address[ch[r]].push_back(static_cast<int>(r + 1));
        }
    }

    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const auto& [leaf, level] = leaves[i];
        DropNode d;
        d.address = address[i + 1];
        d.depth = level + 1;
        d.parent = address[parent_of[i + 1]];
        d.parent_depth = parent_of[i + 1] == 0 ? 0 : leaves[parent_of[i + 1] - 1].second + 1;
        d.leaf = leaf;
        if (level == 0) {
            d.center = -lambda_;
            d.attach_point = x;
            for (auto& [f, z] : orbit) d.boundary.push_back(-lambda_ - z);
        } else {
            const DropNode& image = nodes_.at(index.at(leaf.image()));
            d.attach_point = trace_ray_siegel(lambda_, leaf.a, &landing, opts.ray).landing_estimate;
            // Boundary by continuity from the attach point.
            cplx prev = d.attach_point;
            d.boundary.push_back(prev);
            for (std::size_t k = 1; k < image.boundary.size(); ++k) {
                auto [a, b] = P.preimages(image.boundary[k]);
                prev = std::abs(a - prev) <= std::abs(b - prev) ? a : b;
                d.boundary.push_back(prev);
            }
            auto [c1, c2] = P.preimages(image.center);
            bool in1 = inside_polygon(d.boundary, c1), in2 = inside_polygon(d.boundary, c2);
            if (in1 != in2) {
                d.center = in1 ? c1 : c2;
            } else {
                cplx mean{};
                for (auto z : d.boundary) mean += z;
                mean /= static_cast<double>(d.boundary.size());
                d.center = std::abs(c1 - mean) <= std::abs(c2 - mean) ? c1 : c2;
            }
        }
        index[leaf] = nodes_.size();
        nodes_.push_back(std::move(d));
    }
}

std::size_t DropTree::count_at_depth(std::size_t n) const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [n](const DropNode& d) { return d.depth == n; }));
}

const DropNode& DropTree::by_address(const std::vector<int>& address) const {
    for (const auto& d : nodes_)
        if (d.address == address) return d;
    throw std::out_of_range("no drop with this address");
}

std::vector<const DropNode*> DropTree::chain_of_angle(const Angle& t) const {
    std::vector<const DropNode*> chain{&nodes_.front()};
    for (const auto& d : nodes_)
        if (d.leaf && limb_contains(*d.leaf, t)) chain.push_back(&d);
    std::stable_sort(chain.begin() + 1, chain.end(),
                     [](const DropNode* a, const DropNode* b) { return a->depth < b->depth; });
    return chain;
}

double DropTree::distance_to_drop(const DropNode& d, cplx z) const {
    if (inside_polygon(d.boundary, z)) return 0.0;
    double best = INFINITY;
    for (auto w : d.boundary) best = std::min(best, chordal(w, z));
    return best;
}

DropChain drop_chain_of_angle(const Angle& t, const DropTree& tree, const SiegelLanding& landing,
                              const RayOptions& ray) {
    DropChain out;
    out.angle = t;
    out.landing_point = trace_ray_siegel(tree.lambda(), t, &landing, ray).landing_estimate;
    for (const DropNode* d : tree.chain_of_angle(t)) {
        out.nodes.push_back(*d);
        out.distances.push_back(tree.distance_to_drop(*d, out.landing_point));
    }
    out.strictly_decreasing = true;
    for (std::size_t i = 1; i < out.distances.size(); ++i)
        if (!(out.distances[i] < out.distances[i - 1]))
            out.strictly_decreasing = false;
    return out;
}

}  // namespace siegelmate
