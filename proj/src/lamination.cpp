#include "siegelmate/lamination.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <unordered_map>

namespace siegelmate {

Leaf::Leaf(Angle x, Angle y) {
    if (x == y) throw std::invalid_argument("leaf endpoints must differ: " + x.str());
    if (y < x) std::swap(x, y);
    a = std::move(x);
    b = std::move(y);
}

bool crosses(const Leaf& x, const Leaf& y) {
    if (x.has_endpoint(y.a) || x.has_endpoint(y.b)) return false;
    bool in_a = x.a < y.a && y.a < x.b;
    bool in_b = x.a < y.b && y.b < x.b;
    return in_a != in_b;
}

CriticalPartition::CriticalPartition(Angle critical_value, BoundaryRule rule)
    : value_(std::move(critical_value)), rule_(rule) {
    auto [lo, hi] = halves(value_);
    p0_ = lo;
    p1_ = hi;
}

Side CriticalPartition::side(const Angle& x) const {
    if (x == p0_) return rule_ == BoundaryRule::Star ? Side::Boundary : Side::B;
    if (x == p1_) return rule_ == BoundaryRule::Star ? Side::Boundary : Side::A;
    return (p0_ < x && x < p1_) ? Side::A : Side::B;
}

std::string CriticalPartition::itinerary(const Angle& x, std::size_t n) const {
    std::string out;
    out.reserve(n);
    Angle y = x;
    for (std::size_t i = 0; i < n; ++i) {
        Side s = side(y);
        out.push_back(s == Side::A ? 'A' : s == Side::B ? 'B' : '*');
        y = doubled(y);
    }
    return out;
}

std::optional<std::pair<Leaf, Leaf>> preimage_leaves(const Leaf& leaf,
                                                     const CriticalPartition& partition) {
    if (partition.rule() == CriticalPartition::BoundaryRule::Star &&
        leaf.has_endpoint(partition.critical_value()))
        return std::nullopt;
    auto [a0, a1] = halves(leaf.a);
    auto [b0, b1] = halves(leaf.b);
    // Antipodal halves sit on opposite sides, so exactly one pairing keeps
    // both preimages inside a half.
    Side sa = partition.side(a0);
    Side sb = partition.side(b0);
    if (sa == Side::Boundary || sb == Side::Boundary || partition.side(a1) == sa ||
        partition.side(b1) == sb)
        throw LaminationError("no unlinked preimage pair for leaf {" + leaf.a.str() + ", " +
                              leaf.b.str() + "}");
    if (sa == sb) return std::make_pair(Leaf(a0, b0), Leaf(a1, b1));
    return std::make_pair(Leaf(a0, b1), Leaf(a1, b0));
}

LaminationSet::LaminationSet(std::vector<Leaf> seeds, CriticalPartition partition,
                             std::size_t max_seed_period)
    : seeds_(std::move(seeds)), partition_(std::move(partition)),
      max_seed_period_(max_seed_period) {
    for (const auto& s : seeds_) {
        if (s.a.is_zero() || s.b.is_zero())
            throw std::invalid_argument("seed leaves with the fixed endpoint 0 are not allowed");
        levels_.emplace(s, 0);
    }
}

std::vector<Leaf> LaminationSet::leaves_at(std::size_t level) const {
    std::vector<Leaf> out;
    for (const auto& [leaf, lv] : levels_)
        if (lv == level) out.push_back(leaf);
    return out;
}

std::optional<std::size_t> LaminationSet::level_of(const Leaf& leaf) const {
    auto it = levels_.find(leaf);
    if (it == levels_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::pair<Leaf, Leaf>> LaminationSet::linked_pairs() const {
    std::vector<Leaf> all;
    for (const auto& kv : levels_) all.push_back(kv.first);
    std::vector<std::pair<Leaf, Leaf>> out;
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (crosses(all[i], all[j])) out.emplace_back(all[i], all[j]);
    return out;
}

std::vector<Leaf> polygon_leaves(std::vector<Angle> angles) {
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    std::vector<Leaf> out;
    if (angles.size() < 2) return out;
    if (angles.size() == 2) return {Leaf(angles[0], angles[1])};
    for (std::size_t i = 0; i < angles.size(); ++i)
        out.emplace_back(angles[i], angles[(i + 1) % angles.size()]);
    return out;
}

namespace {

std::size_t min_seed_preperiod(const LaminationSet& lam) {
    std::size_t best = SIZE_MAX;
    for (const auto& s : lam.seeds())
        for (const auto& e : {s.a, s.b}) best = std::min(best, orbit_info(e).preperiod);
    return best == SIZE_MAX ? 0 : best;
}

}  // namespace

LaminationSet pullback(const LaminationSet& lam, std::size_t levels) {
    LaminationSet out = lam;
    const auto& part = out.partition_;
    for (std::size_t step = 0; step < levels; ++step) {
        std::size_t level = out.depth_ + 1;
        std::vector<Leaf> top = out.leaves_at(out.depth_);
        auto add = [&](const Leaf& src, const Leaf& pre, const char* kind) {
            if (!out.levels_.emplace(pre, level).second)
                out.collisions_.push_back({src, pre, "existing"});
            else if (kind)
                out.collisions_.push_back({src, pre, kind});
        };
        std::vector<Angle> critical_class;
        std::vector<Leaf> critical_sources;
        for (const auto& leaf : top) {
            auto pre = preimage_leaves(leaf, part);
            if (!pre) {
                critical_sources.push_back(leaf);
                continue;
            }
            add(leaf, pre->first, nullptr);
            add(leaf, pre->second, nullptr);
        }
        if (!critical_sources.empty()) {
            // All leaves through the critical value pull back to one polygon.
            for (const auto& leaf : critical_sources) {
                for (const auto& e : {leaf.a, leaf.b}) {
                    auto [h0, h1] = halves(e);
                    critical_class.push_back(h0);
                    critical_class.push_back(h1);
                }
            }
            for (const auto& edge : polygon_leaves(critical_class))
                add(critical_sources.front(), edge, "critical");
        } else if (part.rule() == CriticalPartition::BoundaryRule::Star) {
            // A critical value landing alone still yields the critical leaf,
            // at the level where angles of its preperiod first appear.
            std::size_t base = min_seed_preperiod(out);
            std::size_t pre = orbit_info(part.low()).preperiod;
            Leaf diam = part.diameter();
            if (pre >= base && pre - base == level && !out.contains(diam))
                add(diam, diam, "critical");
        }
        out.depth_ = level;
    }
    return out;
}

std::vector<Angle> colanding_partner(const LaminationSet& lam, const Angle& t) {
    OrbitInfo info = orbit_info(t);
    if (lam.max_seed_period() > 0 && info.period > lam.max_seed_period())
        throw DepthError("angle " + t.str() + " has period " + std::to_string(info.period) +
                         " beyond the seeded periods");
    std::size_t base = min_seed_preperiod(lam);
    std::size_t needed = info.preperiod > base ? info.preperiod - base : 0;
    if (needed > lam.depth())
        throw DepthError("angle " + t.str() + " needs depth " + std::to_string(needed) +
                         ", lamination has " + std::to_string(lam.depth()));

    std::unordered_map<Angle, std::vector<Angle>, AngleHash> adj;
    for (const auto& [leaf, lv] : lam.leaves()) {
        adj[leaf.a].push_back(leaf.b);
        adj[leaf.b].push_back(leaf.a);
    }
    std::set<Angle> seen{t};
    std::vector<Angle> stack{t};
    while (!stack.empty()) {
        Angle x = stack.back();
        stack.pop_back();
        auto it = adj.find(x);
        if (it == adj.end()) continue;
        for (const auto& y : it->second)
            if (seen.insert(y).second) stack.push_back(y);
    }
    seen.erase(t);
    return {seen.begin(), seen.end()};
}

std::size_t LandingModel::required_depth(const Angle& t) { return orbit_info(t).preperiod; }

namespace {

// Pull a class C (image of target's class) back one step, keeping the half
// that contains target.  Classes through the critical value keep all halves.
std::vector<Angle> pull_class(const std::vector<Angle>& cls, const Angle& target,
                              const CriticalPartition& part) {
    bool critical = part.rule() == CriticalPartition::BoundaryRule::Star &&
                    std::find(cls.begin(), cls.end(), part.critical_value()) != cls.end();
    std::vector<Angle> out;
    Side want = part.side(target);
    for (const auto& x : cls) {
        auto [h0, h1] = halves(x);
        for (const auto& h : {h0, h1})
            if (critical || part.side(h) == want) out.push_back(h);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Every angle of exact period n sharing u's n-symbol itinerary, found digit by
// digit: a binary prefix of length L pins 2^j x to an interval of width
// 2^-(L-j), which must still meet the closed half named by symbol j.
std::vector<Angle> itinerary_class(const CriticalPartition& part, const Angle& u, std::size_t n) {
    const std::string itin = part.itinerary(u, n);
    const Angle& p0 = part.low();
    const Angle& p1 = part.high();
    // Is num/2^bits <= a (or >= a)?
    auto le = [](const BigInt& num, std::size_t bits, const Angle& a) {
        return num * a.den() <= a.num() << bits;
    };
    auto ge = [](const BigInt& num, std::size_t bits, const Angle& a) {
        return num * a.den() >= a.num() << bits;
    };
    auto feasible = [&](const BigInt& prefix, std::size_t L) {
        for (std::size_t j = 0; j < L; ++j) {
            std::size_t w = L - j;  // interval [lo, hi] = [r, r + 1] / 2^w
            BigInt r = prefix & ((BigInt(1) << w) - 1);
            BigInt r1 = r + 1;
            bool meetsA = le(r, w, p1) && ge(r1, w, p0);
            bool meetsB = ge(r1, w, p1) || le(r, w, p0);
            bool ok = itin[j] == 'A'   ? meetsA
                      : itin[j] == 'B' ? meetsB
                                       : (le(r, w, p0) && ge(r1, w, p0)) || (le(r, w, p1) && ge(r1, w, p1));
            if (!ok) return false;
        }
        return true;
    };
    const BigInt m = (BigInt(1) << n) - 1;
    std::vector<Angle> out;
    std::vector<std::pair<BigInt, std::size_t>> stack{{BigInt(0), 0}};
    while (!stack.empty()) {
        auto [prefix, L] = stack.back();
        stack.pop_back();
        if (L == n) {
            if (prefix == 0 || prefix == m) continue;
            Angle x(prefix, m);
            OrbitInfo info = orbit_info(x);
            if (info.preperiod == 0 && info.period == n && part.itinerary(x, n) == itin) out.push_back(x);
            continue;
        }
        for (int b : {1, 0}) {
            BigInt next = (prefix << 1) | b;
            if (feasible(next, L + 1)) stack.emplace_back(next, L + 1);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

PcfLanding::PcfLanding(const Angle& characteristic_angle, bool superattracting,
                       unsigned max_period)
    : partition_(characteristic_angle, superattracting
                                           ? CriticalPartition::BoundaryRule::HalfOpen
                                           : CriticalPartition::BoundaryRule::Star),
      superattracting_(superattracting), max_period_(max_period) {
    if (characteristic_angle.is_zero())
        throw std::invalid_argument("characteristic angle 0 is degenerate");
    if (max_period_ > 40) throw std::invalid_argument("max_period above 40 is not supported");
}

const std::map<std::string, std::vector<Angle>>& PcfLanding::classes_of_period(unsigned n) const {
    std::lock_guard lock(cache_mutex_);
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;

    using u64 = std::uint64_t;
    const u64 m = (u64(1) << n) - 1;
    // x/m compared with p = P/Q through the integer part of P*m/Q.
    struct Cut {
        u64 whole;
        bool exact;
    };
    auto cut = [&](const Angle& p) {
        BigInt prod = p.num() * BigInt(m);
        return Cut{static_cast<u64>(prod / p.den()), prod % p.den() == 0};
    };
    Cut c0 = cut(partition_.low());
    Cut c1 = cut(partition_.high());
    auto less = [](u64 x, const Cut& c) { return x < c.whole || (x == c.whole && !c.exact); };
    auto equal = [](u64 x, const Cut& c) { return c.exact && x == c.whole; };
    const bool star = partition_.rule() == CriticalPartition::BoundaryRule::Star;

    std::map<std::string, std::vector<Angle>> classes;
    std::string itin(n, ' ');
    for (u64 k = 1; k < m; ++k) {
        u64 x = k;
        bool exact = true;
        for (unsigned i = 0; i < n; ++i) {
            if (i > 0 && x == k) {
                exact = false;
                break;
            }
            char s;
            if (equal(x, c0)) s = star ? '*' : 'B';
            else if (equal(x, c1)) s = star ? '*' : 'A';
            else s = (!less(x, c0) && less(x, c1)) ? 'A' : 'B';
            itin[i] = s;
            x = (x << 1) % m;
        }
        if (exact) classes[itin].emplace_back(BigInt(k), BigInt(m));
    }
    if (n == 1) classes[partition_.itinerary(Angle(), 1)].emplace_back();
    return cache_.emplace(n, std::move(classes)).first->second;
}

std::vector<std::vector<Angle>> PcfLanding::periodic_classes(unsigned n) const {
    if (n == 0 || n > max_period_) throw DepthError("period outside supported range");
    std::vector<std::vector<Angle>> out;
    for (const auto& [itin, cls] : classes_of_period(n))
        if (cls.size() > 1) out.push_back(cls);
    return out;
}

std::vector<Angle> PcfLanding::landing_class(const Angle& t) const {
    OrbitInfo info = orbit_info(t);
    const Angle& u = info.orbit[info.preperiod];
    std::vector<Angle> cls;
    if (info.period <= max_period_) {
        cls = classes_of_period(static_cast<unsigned>(info.period)).at(partition_.itinerary(u, info.period));
    } else {
        // Long cycles: search instead of enumerating 2^n angles.
        cls = itinerary_class(partition_, u, info.period);
    }
    for (std::size_t j = info.preperiod; j-- > 0;) cls = pull_class(cls, info.orbit[j], partition_);
    return cls;
}

LaminationSet PcfLanding::lamination(unsigned max_period, std::size_t depth) const {
    std::vector<Leaf> seeds;
    for (unsigned n = 1; n <= max_period; ++n)
        for (const auto& cls : periodic_classes(n))
            for (const auto& e : polygon_leaves(cls)) seeds.push_back(e);
    return pullback(LaminationSet(seeds, partition_, max_period), depth);
}

SiegelLanding::SiegelLanding(const Leaf& critical_leaf)
    : critical_leaf_(critical_leaf),
      partition_(doubled(critical_leaf.a), CriticalPartition::BoundaryRule::Star) {
    if (!critical_leaf.degenerate_image())
        throw std::invalid_argument("critical leaf endpoints must be antipodal");
}

std::optional<std::size_t> SiegelLanding::critical_level(const Angle& t) const {
    const BigInt& d = t.den();
    if ((d & (d - 1)) != 0) return std::nullopt;
    std::size_t bits = boost::multiprecision::msb(d);
    std::size_t base = boost::multiprecision::msb(critical_leaf_.a.den());
    if (bits < base) return std::nullopt;
    std::size_t k = bits - base;
    Angle s(t.num() << k, t.den());
    if (critical_leaf_.has_endpoint(s)) return k;
    return std::nullopt;
}

std::vector<Angle> SiegelLanding::landing_class(const Angle& t) const {
    auto level = critical_level(t);
    if (!level) return {t};
    std::vector<Angle> orbit{t};
    for (std::size_t j = 1; j < *level; ++j) orbit.push_back(doubled(orbit.back()));
    std::vector<Angle> cls{critical_leaf_.a, critical_leaf_.b};
    for (std::size_t j = *level; j-- > 0;) cls = pull_class(cls, orbit[j], partition_);
    return cls;
}

}  // namespace siegelmate
