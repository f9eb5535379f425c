#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace siegelmate {

using BigInt = boost::multiprecision::cpp_int;

/// A point of the circle R/Z stored as an exact reduced fraction num/den
/// with 0 <= num < den.  Angle 0 is 0/1.
class Angle {
public:
    Angle() : num_(0), den_(1) {}
    Angle(BigInt num, BigInt den);
    Angle(long long num, long long den) : Angle(BigInt(num), BigInt(den)) {}

    /// Parses "num/den" (also accepts a bare integer, reduced mod 1).
    static Angle parse(const std::string& text);
    /// k / 2^bits.
    static Angle dyadic(const BigInt& k, unsigned bits);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    double to_double() const;
    std::string str() const;

    friend bool operator==(const Angle& a, const Angle& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Angle& a, const Angle& b);

    friend Angle operator+(const Angle& a, const Angle& b);
    friend Angle operator-(const Angle& a, const Angle& b);

private:
    BigInt num_;
    BigInt den_;
};

struct OrbitInfo {
    std::size_t preperiod = 0;
    std::size_t period = 1;
    std::vector<Angle> orbit;  // preperiod + period distinct angles

    bool periodic() const { return preperiod == 0; }
};

/// m_2(t) = 2t mod 1.
Angle doubled(const Angle& t);
/// The two preimages (t/2, (t+1)/2) under doubling.
std::pair<Angle, Angle> halves(const Angle& t);
/// 1 - t mod 1.
Angle conjugate(const Angle& t);
OrbitInfo orbit_info(const Angle& t);

/// True iff x lies in the open counterclockwise arc from a to b.
/// Throws std::invalid_argument when a == b.
bool cyclic_between(const Angle& a, const Angle& b, const Angle& x);

/// Multiplicative order of 2 modulo an odd n > 1.
std::size_t order_of_two(const BigInt& n);

/// All angles k/(2^n - 1), k = 0 .. 2^n - 2: every angle whose period divides n.
std::vector<Angle> angles_of_period_dividing(unsigned n);

struct AngleHash {
    std::size_t operator()(const Angle& a) const;
};

}  // namespace siegelmate
