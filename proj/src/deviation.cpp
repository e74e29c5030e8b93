// Horizontal and vertical deviations between an arrival and a service curve.
#include "netcalc/upp.hpp"

#include <algorithm>

namespace netcalc {

using detail::Pwl;

namespace {

Q hyperPeriod(const UppFunction& f, const UppFunction& g) {
    bool af = f.affineTail(), ag = g.affineTail();
    if (af && ag) return Q(1);
    if (af) return g.period();
    if (ag) return f.period();
    return lcm(f.period(), g.period());
}

// First abscissa s within the listed segments with beta(s) >= y (strict: > y),
// segments taken on (start, next] with the given vertical offset.
std::optional<Q> scan(const std::vector<Segment>& segs, const Q& end, const Q& y, bool strict) {
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const Segment& s = segs[k];
        Q next = k + 1 < segs.size() ? segs[k + 1].start : end;
        Q rv = s.valueAtStartRight;
        Q atEnd = rv + s.slope * (next - s.start);
        bool hitStart = strict ? rv > y : rv >= y;
        if (hitStart) return s.start;
        bool hitEnd = strict ? atEnd > y : atEnd >= y;
        if (s.slope.sign() > 0 && hitEnd) return s.start + (y - rv) / s.slope;
    }
    return std::nullopt;
}

// inf { s >= 0 : beta(s) >= y }  (strict: beta(s) > y)
Q lowerInverse(const UppFunction& beta, const Q& y, bool strict) {
    if (y.isInf()) {
        if (beta.eventuallyInfinite()) return beta.rank();
        return Q::infinity();
    }
    const Q& b0 = beta.valueAtZero();
    if (strict ? b0 > y : b0 >= y) return Q(0);
    if (beta.eventuallyInfinite()) {
        auto s = scan(beta.segments(), beta.rank(), y, strict);
        return s ? *s : beta.rank();
    }
    Q r = beta.rank(), d = beta.period(), c = beta.increment();
    Q topLevel = beta.eval(r + d);
    bool within = strict ? y < topLevel : y <= topLevel;
    if (within) return *scan(beta.segments(), r + d, y, strict);
    if (c.isZero()) return Q::infinity();
    Q k = strict ? floor((y - topLevel) / c) + Q(1) : ceil((y - topLevel) / c);
    Q y2 = y - k * c;
    auto ps = beta.periodSegments();
    auto s = scan(ps, r + d, y2, strict);
    return *s + k * d;
}

}  // namespace

Q verticalDeviation(const UppFunction& alpha, const UppFunction& beta) {
    if (alpha.isTop()) return Q::infinity();
    if (beta.isTop()) return Q(0);
    Q h;
    if (beta.eventuallyInfinite()) {
        h = beta.rank();
        if (alpha.eventuallyInfinite() && alpha.rank() < h) return Q::infinity();
    } else {
        if (alpha.eventuallyInfinite()) return Q::infinity();
        if (alpha.longRunRate() > beta.longRunRate()) return Q::infinity();
        h = max(alpha.rank(), beta.rank()) + hyperPeriod(alpha, beta);
    }
    Pwl diff = detail::combine(alpha.unroll(h), beta.unroll(h), -1);
    return pos(*diff.supremum());
}

Q horizontalDeviation(const UppFunction& alpha, const UppFunction& beta) {
    if (alpha.isTop()) return Q::infinity();
    if (beta.isTop()) return Q(0);
    Q tmax;
    if (alpha.eventuallyInfinite()) {
        if (!beta.eventuallyInfinite()) return Q::infinity();
        tmax = alpha.rank();
    } else if (beta.eventuallyInfinite()) {
        tmax = beta.rank();
    } else {
        if (alpha.longRunRate() > beta.longRunRate()) return Q::infinity();
        Q D = hyperPeriod(alpha, beta);
        Q level = beta.evalRight(beta.rank());
        Q t0 = alpha.rank();
        Q reach = lowerInverse(alpha, level, false);
        if (reach.isFinite()) t0 = max(t0, reach);
        tmax = t0 + D;
    }
    Pwl a = alpha.unroll(tmax);
    Q best = 0;
    auto consider = [&](const Q& t) {
        if (t.sign() < 0 || t > tmax) return;
        Q y = alpha.eval(t);
        best = max(best, lowerInverse(beta, y, false) - t);
        if (best.isInf()) return;
        // limit from the right of the delay at t
        Q yr = alpha.evalRight(t);
        Q slopeAfter = 0;
        auto it = std::upper_bound(a.nodes.begin(), a.nodes.end(), t,
                                   [](const Q& v, const detail::PNode& n) { return v < n.x; });
        if (it != a.nodes.begin() && (it - 1)->hasSeg && t < a.hi()) slopeAfter = (it - 1)->slope;
        if (yr > y || slopeAfter.sign() > 0) best = max(best, lowerInverse(beta, yr, slopeAfter.sign() > 0) - t);
    };
    // abscissae where alpha crosses one of beta's levels
    Q topLevel = alpha.evalRight(tmax);
    Q hb = lowerInverse(beta, topLevel, false);
    std::vector<Q> levels;
    if (hb.isFinite() && !beta.isTop()) {
        Q lim = beta.eventuallyInfinite() ? min(hb, beta.rank()) : hb;
        Pwl b = beta.unroll(lim);
        for (const auto& n : b.nodes) {
            levels.push_back(n.value);
            if (n.hasSeg) levels.push_back(n.right);
        }
    }
    for (std::size_t k = 0; k < a.nodes.size(); ++k) {
        const auto& n = a.nodes[k];
        consider(n.x);
        if (best.isInf()) return best;
        if (n.hasSeg && n.slope.sign() > 0) {
            Q xEnd = a.nodes[k + 1].x;
            for (const Q& y : levels) {
                Q t = n.x + (y - n.right) / n.slope;
                if (t > n.x && t < xEnd) consider(t);
            }
        }
    }
    return best;
}

}  // namespace netcalc
