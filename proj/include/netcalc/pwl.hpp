#pragma once
// Finite piecewise-affine functions on a closed interval [x0, xn].
// Internal working type for the operator kernel; values outside the
// domain (or on an interval flagged absent) are treated as missing.

#include "netcalc/rational.hpp"

#include <optional>
#include <vector>

namespace netcalc::detail {

struct PNode {
    Q x;
    bool hasValue = true;
    Q value;          // value at x
    bool hasSeg = false;  // affine piece on (x, next.x)
    Q right;          // right limit at x
    Q slope;
};

struct Pwl {
    std::vector<PNode> nodes;

    [[nodiscard]] bool empty() const { return nodes.empty(); }
    [[nodiscard]] const Q& lo() const { return nodes.front().x; }
    [[nodiscard]] const Q& hi() const { return nodes.back().x; }

    /// Value at x, nullopt when missing.
    [[nodiscard]] std::optional<Q> at(const Q& x) const;
    /// Right limit at x.
    [[nodiscard]] std::optional<Q> rightAt(const Q& x) const;
    /// Left limit at x.
    [[nodiscard]] std::optional<Q> leftAt(const Q& x) const;

    /// Merge collinear continuous neighbours.
    void simplify();
    /// Set every value at x > lo to its left limit when that exists.
    void makeLeftContinuous();
    /// Restrict to [a, b] (a <= b inside the domain).
    [[nodiscard]] Pwl restrict(const Q& a, const Q& b) const;
    /// Translate by dx horizontally and dy vertically.
    [[nodiscard]] Pwl shifted(const Q& dx, const Q& dy) const;
    /// Infimum / supremum over the domain, including one-sided limits.
    [[nodiscard]] std::optional<Q> infimum() const;
    [[nodiscard]] std::optional<Q> supremum() const;
    /// True iff all present values and segments are identically zero.
    [[nodiscard]] bool isZero() const;

    friend bool operator==(const Pwl&, const Pwl&);
};

/// Continuous piecewise-affine function through the given points (sorted x).
Pwl polyline(const std::vector<std::pair<Q, Q>>& pts);

/// Pointwise min (takeMin) or max of two functions; a missing side is ignored.
Pwl envelope(const Pwl& a, const Pwl& b, bool takeMin);
/// Reduction of many functions by envelope, balanced.
Pwl envelopeAll(std::vector<Pwl> parts, bool takeMin);
/// Pointwise a + sign*b on the common domain.
Pwl combine(const Pwl& a, const Pwl& b, int sign);
/// Pointwise max(a, 0).
Pwl clipBelowZero(const Pwl& a);
/// Concatenate b after a (b.lo == a.hi; the value at the joint comes from a).
Pwl concat(const Pwl& a, const Pwl& b);

/// Affine pieces used by convolution style operators.
struct Piece {
    Q x;   // start
    Q v;   // value at start
    Q s;   // slope
    Q len; // length (0 for a single point)
};
std::vector<Piece> pieces(const Pwl& f);

/// inf_{0<=s<=t} a(s) + b(t-s) for t in [0, horizon]; both must be left-continuous.
Pwl convolveFinite(const Pwl& a, const Pwl& b, const Q& horizon);
/// sup_{u} f(t+u) - g(u) over u in g's domain with t+u in f's domain, for t in [0, horizon].
/// Returned with values at breakpoints set to left limits.
Pwl deconvolveFinite(const Pwl& f, const Pwl& g, const Q& horizon);

}  // namespace netcalc::detail
