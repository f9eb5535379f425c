#include "siegelmate/angle.hpp"

#include <boost/functional/hash.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace siegelmate {

namespace {

BigInt mod_floor(const BigInt& a, const BigInt& m) {
    BigInt r = a % m;
    if (r < 0) r += m;
    return r;
}

}  // namespace

Angle::Angle(BigInt num, BigInt den) {
    if (den <= 0) throw std::invalid_argument("angle denominator must be positive");
    num = mod_floor(num, den);
    if (num == 0) {
        num_ = 0;
        den_ = 1;
        return;
    }
    BigInt g = boost::multiprecision::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

Angle Angle::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Angle(BigInt(text), BigInt(1));
        return Angle(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("malformed angle '" + text + "'");
    }
}

Angle Angle::dyadic(const BigInt& k, unsigned bits) {
    return Angle(k, BigInt(1) << bits);
}

double Angle::to_double() const {
    // Scale down so the conversion keeps the leading 64 bits.
    std::size_t bits = boost::multiprecision::msb(den_) + 1;
    if (bits <= 60) return num_.convert_to<double>() / den_.convert_to<double>();
    unsigned shift = static_cast<unsigned>(bits - 60);
    BigInt n = num_ >> shift;
    BigInt d = den_ >> shift;
    return n.convert_to<double>() / d.convert_to<double>();
}

std::string Angle::str() const { return num_.str() + "/" + den_.str(); }

std::strong_ordering operator<=>(const Angle& a, const Angle& b) {
    BigInt lhs = a.num_ * b.den_;
    BigInt rhs = b.num_ * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Angle operator+(const Angle& a, const Angle& b) {
    return Angle(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Angle operator-(const Angle& a, const Angle& b) {
    return Angle(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

Angle doubled(const Angle& t) { return Angle(t.num() * 2, t.den()); }

std::pair<Angle, Angle> halves(const Angle& t) {
    return {Angle(t.num(), t.den() * 2), Angle(t.num() + t.den(), t.den() * 2)};
}

Angle conjugate(const Angle& t) { return Angle(t.den() - t.num(), t.den()); }

OrbitInfo orbit_info(const Angle& t) {
    // The odd part of den fixes the period; the power of two fixes the preperiod.
    OrbitInfo info;
    BigInt odd = t.den();
    std::size_t twos = 0;
    while (odd % 2 == 0) {
        odd /= 2;
        ++twos;
    }
    info.preperiod = twos;
    info.period = odd == 1 ? 1 : order_of_two(odd);
    Angle x = t;
    for (std::size_t i = 0; i < info.preperiod + info.period; ++i) {
        info.orbit.push_back(x);
        x = doubled(x);
    }
    return info;
}

bool cyclic_between(const Angle& a, const Angle& b, const Angle& x) {
    if (a == b) throw std::invalid_argument("cyclic_between: degenerate arc");
    if (a < b) return a < x && x < b;
    return x > a || x < b;
}

std::size_t order_of_two(const BigInt& n) {
    if (n <= 1 || n % 2 == 0) throw std::invalid_argument("order_of_two needs odd n > 1");
    BigInt x = 2 % n;
    std::size_t k = 1;
    while (x != 1) {
        x = (x * 2) % n;
        ++k;
    }
    return k;
}

std::vector<Angle> angles_of_period_dividing(unsigned n) {
    BigInt den = (BigInt(1) << n) - 1;
    std::vector<Angle> out;
    for (BigInt k = 0; k < den; ++k) out.emplace_back(k, den);
    return out;
}

std::size_t AngleHash::operator()(const Angle& a) const {
    // Residues modulo a Mersenne prime keep hashing cheap for huge fractions.
    static const BigInt prime = (BigInt(1) << 61) - 1;
    std::size_t seed = 0;
    boost::hash_combine(seed, static_cast<std::uint64_t>(a.num() % prime));
    boost::hash_combine(seed, static_cast<std::uint64_t>(a.den() % prime));
    return seed;
}

}  // namespace siegelmate
