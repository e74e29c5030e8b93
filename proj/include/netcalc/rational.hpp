#pragma once
// Exact rational numbers with a distinguished +infinity.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace netcalc {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class Rational {
public:
    Rational() = default;
    Rational(long v) : q_(v) {}
    Rational(int v) : q_(v) {}
    Rational(long num, long den);
    explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

    static Rational infinity();

    /// Parses "3", "-3/4", "1.25", "2e-3", "inf".
    static Rational parse(const std::string& text);

    [[nodiscard]] bool isInf() const { return inf_; }
    [[nodiscard]] bool isFinite() const { return !inf_; }
    [[nodiscard]] const mpq_class& raw() const;
    [[nodiscard]] int sign() const { return inf_ ? 1 : sgn(q_); }
    [[nodiscard]] bool isZero() const { return !inf_ && sgn(q_) == 0; }
    [[nodiscard]] bool isInteger() const;

    [[nodiscard]] std::string str() const;             // "p/q", "p" or "inf"
    [[nodiscard]] std::string decimal(int sigDigits = 9) const;
    [[nodiscard]] double toDouble() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b);
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    mpq_class q_{0};
    bool inf_ = false;
};

using Q = Rational;

std::ostream& operator<<(std::ostream& os, const Rational& r);

Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);
Rational abs(const Rational& a);
/// Largest integer <= a (finite only).
Rational floor(const Rational& a);
Rational ceil(const Rational& a);
/// Least common multiple of two positive rationals.
Rational lcm(const Rational& a, const Rational& b);
/// (a)+ = max(a, 0).
inline Rational pos(const Rational& a) { return max(a, Rational(0)); }

}  // namespace netcalc
