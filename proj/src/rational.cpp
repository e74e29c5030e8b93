#include "netcalc/rational.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

namespace netcalc {

namespace {

mpz_class pow10(long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
    return r;
}

mpq_class pow10q(long e) {
    if (e >= 0) return mpq_class(pow10(e));
    return mpq_class(mpz_class(1), pow10(-e));
}

}  // namespace

Rational::Rational(long num, long den) {
    if (den == 0) throw DomainError("zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

Rational Rational::infinity() {
    Rational r;
    r.inf_ = true;
    return r;
}

const mpq_class& Rational::raw() const {
    if (inf_) throw DomainError("infinite value has no rational representation");
    return q_;
}

bool Rational::isInteger() const { return !inf_ && q_.get_den() == 1; }

Rational Rational::parse(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw DomainError("empty number");
    std::string low = s;
    std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
    if (low == "inf" || low == "+inf" || low == "infinity") return infinity();

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational a = parse(s.substr(0, slash));
        Rational b = parse(s.substr(slash + 1));
        if (a.isInf() || b.isInf()) throw DomainError("bad rational: " + text);
        if (b.isZero()) throw DomainError("zero denominator: " + text);
        return a / b;
    }

    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    std::string intPart, fracPart;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) intPart.push_back(s[i++]);
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) fracPart.push_back(s[i++]);
    }
    if (intPart.empty() && fracPart.empty()) throw DomainError("bad number: " + text);
    long exp10 = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        std::string e;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) e.push_back(s[i++]);
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) e.push_back(s[i++]);
        if (e.empty() || e == "+" || e == "-") throw DomainError("bad exponent: " + text);
        exp10 = std::stol(e);
    }
    if (i != s.size()) throw DomainError("bad number: " + text);
    mpz_class mant(intPart + fracPart, 10);
    mpq_class q(mant);
    q *= pow10q(exp10 - static_cast<long>(fracPart.size()));
    if (neg) q = -q;
    return Rational(q);
}

std::string Rational::str() const {
    if (inf_) return "inf";
    return q_.get_str();
}

std::string Rational::decimal(int sig) const {
    if (inf_) return "inf";
    if (sgn(q_) == 0) return "0";
    if (sig < 1) sig = 1;
    mpq_class a = abs(q_);
    // exponent e with 10^e <= a < 10^(e+1)
    long e = static_cast<long>(mpz_sizeinbase(a.get_num_mpz_t(), 10)) -
             static_cast<long>(mpz_sizeinbase(a.get_den_mpz_t(), 10));
    while (a < pow10q(e)) --e;
    while (a >= pow10q(e + 1)) ++e;
    auto roundAt = [&](long ee) {
        mpq_class scaled = a * pow10q(sig - 1 - ee);
        mpz_class n = scaled.get_num() / scaled.get_den();
        mpq_class rem = scaled - mpq_class(n);
        if (rem * 2 >= 1) n += 1;
        return n;
    };
    mpz_class n = roundAt(e);
    if (n >= pow10(sig)) {
        ++e;
        n = roundAt(e);
    }
    std::string digits = n.get_str();
    long pointPos = e + 1;  // digits before the decimal point
    std::string out;
    if (e > 20 || e < -12) {
        out = digits.substr(0, 1);
        std::string rest = digits.substr(1);
        while (!rest.empty() && rest.back() == '0') rest.pop_back();
        if (!rest.empty()) out += "." + rest;
        out += "e" + std::to_string(e);
    } else if (pointPos <= 0) {
        out = "0." + std::string(static_cast<std::size_t>(-pointPos), '0') + digits;
    } else if (pointPos >= static_cast<long>(digits.size())) {
        out = digits + std::string(static_cast<std::size_t>(pointPos - static_cast<long>(digits.size())), '0');
    } else {
        out = digits.substr(0, static_cast<std::size_t>(pointPos)) + "." + digits.substr(static_cast<std::size_t>(pointPos));
    }
    if (out.find('.') != std::string::npos && out.find('e') == std::string::npos) {
        while (out.back() == '0') out.pop_back();
        if (out.back() == '.') out.pop_back();
    }
    return sgn(q_) < 0 ? "-" + out : out;
}

double Rational::toDouble() const {
    if (inf_) return std::numeric_limits<double>::infinity();
    return q_.get_d();
}

Rational Rational::operator-() const {
    if (inf_) throw DomainError("negation of +inf");
    return Rational(mpq_class(-q_));
}

Rational& Rational::operator+=(const Rational& o) {
    if (inf_ || o.inf_) {
        inf_ = true;
        q_ = 0;
        return *this;
    }
    q_ += o.q_;
    return *this;
}

Rational& Rational::operator-=(const Rational& o) {
    if (o.inf_) throw DomainError("subtraction of +inf");
    if (inf_) return *this;
    q_ -= o.q_;
    return *this;
}

Rational& Rational::operator*=(const Rational& o) {
    if (inf_ || o.inf_) {
        int s = inf_ ? o.sign() : sign();
        if (s < 0) throw DomainError("+inf times a negative number");
        if (s == 0) {
            // 0 * inf = 0 (used for zero-length intervals)
            inf_ = false;
            q_ = 0;
            return *this;
        }
        inf_ = true;
        q_ = 0;
        return *this;
    }
    q_ *= o.q_;
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.inf_) {
        if (inf_) throw DomainError("inf / inf");
        q_ = 0;
        return *this;
    }
    if (sgn(o.q_) == 0) throw DomainError("division by zero");
    if (inf_) {
        if (sgn(o.q_) < 0) throw DomainError("+inf divided by a negative number");
        return *this;
    }
    q_ /= o.q_;
    return *this;
}

bool operator==(const Rational& a, const Rational& b) {
    if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
    return a.q_ == b.q_;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.inf_ || b.inf_) {
        if (a.inf_ && b.inf_) return std::strong_ordering::equal;
        return a.inf_ ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    int c = cmp(a.q_, b.q_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }

Rational floor(const Rational& a) {
    if (a.isInf()) throw DomainError("floor of +inf");
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), a.raw().get_num_mpz_t(), a.raw().get_den_mpz_t());
    return Rational(mpq_class(r));
}

Rational ceil(const Rational& a) {
    if (a.isInf()) throw DomainError("ceil of +inf");
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), a.raw().get_num_mpz_t(), a.raw().get_den_mpz_t());
    return Rational(mpq_class(r));
}

Rational lcm(const Rational& a, const Rational& b) {
    if (a.sign() <= 0 || b.sign() <= 0 || a.isInf() || b.isInf()) throw DomainError("lcm needs positive finite values");
    mpz_class n, d;
    mpz_lcm(n.get_mpz_t(), a.raw().get_num_mpz_t(), b.raw().get_num_mpz_t());
    mpz_gcd(d.get_mpz_t(), a.raw().get_den_mpz_t(), b.raw().get_den_mpz_t());
    return Rational(mpq_class(n, d));
}

}  // namespace netcalc
