// Pointwise minimum, sum and truncated difference of UPP functions.
#include "netcalc/upp.hpp"

namespace netcalc {

using detail::PNode;
using detail::Pwl;

namespace {

Q hyperPeriod(const UppFunction& f, const UppFunction& g) {
    bool af = f.affineTail(), ag = g.affineTail();
    if (af && ag) return Q(1);
    if (af) return g.period();
    if (ag) return f.period();
    return lcm(f.period(), g.period());
}

// Increment over D for a pseudo-periodic function.
Q incrementOver(const UppFunction& f, const Q& D) { return f.increment() * D / f.period(); }

// inf / sup of p over (p.lo, p.hi]
Q infOpenLeft(Pwl p) {
    p.nodes.front().hasValue = false;
    return *p.infimum();
}
Q supOpenLeft(Pwl p) {
    p.nodes.front().hasValue = false;
    return *p.supremum();
}

Pwl zeroOn(const Q& a, const Q& b) {
    return detail::polyline({{a, Q(0)}, {b, Q(0)}});
}

}  // namespace

UppFunction minimum(const UppFunction& f, const UppFunction& g) {
    if (f.isTop()) return g;
    if (g.isTop()) return f;
    if (f.eventuallyInfinite() && g.eventuallyInfinite())
        return UppFunction::fromPwlFinite(detail::envelope(f.unroll(f.rank()), g.unroll(g.rank()), true));
    if (f.eventuallyInfinite() || g.eventuallyInfinite()) {
        const UppFunction& fin = f.eventuallyInfinite() ? f : g;
        const UppFunction& per = f.eventuallyInfinite() ? g : f;
        Q r = max(fin.rank(), per.rank());
        Pwl p = detail::envelope(fin.unroll(fin.rank()), per.unroll(r + per.period()), true);
        return UppFunction::fromPwl(p, r, per.period(), per.increment());
    }
    Q D = hyperPeriod(f, g);
    Q r = max(f.rank(), g.rank());
    Q cf = incrementOver(f, D), cg = incrementOver(g, D);
    if (cf == cg) {
        Pwl p = detail::envelope(f.unroll(r + D), g.unroll(r + D), true);
        return UppFunction::fromPwl(p, r, D, cf);
    }
    const UppFunction& low = cf < cg ? f : g;
    const UppFunction& high = cf < cg ? g : f;
    Q cl = min(cf, cg), ch = max(cf, cg);
    Pwl diff = detail::combine(high.unroll(r + D).restrict(r, r + D), low.unroll(r + D).restrict(r, r + D), -1);
    Q m = infOpenLeft(diff);
    Q k = m.sign() < 0 ? ceil(-m / (ch - cl)) : Q(0);
    Q r2 = r + k * D;
    Pwl p = detail::envelope(f.unroll(r2 + D), g.unroll(r2 + D), true);
    return UppFunction::fromPwl(p, r2, D, cl);
}

UppFunction add(const UppFunction& f, const UppFunction& g) {
    if (f.isTop() || g.isTop()) return UppFunction::top();
    if (f.eventuallyInfinite() || g.eventuallyInfinite()) {
        Q x = f.eventuallyInfinite() ? f.rank() : g.rank();
        if (f.eventuallyInfinite() && g.eventuallyInfinite()) x = min(f.rank(), g.rank());
        return UppFunction::fromPwlFinite(detail::combine(f.unroll(x), g.unroll(x), 1));
    }
    Q D = hyperPeriod(f, g);
    Q r = max(f.rank(), g.rank());
    Pwl p = detail::combine(f.unroll(r + D), g.unroll(r + D), 1);
    return UppFunction::fromPwl(p, r, D, incrementOver(f, D) + incrementOver(g, D));
}

UppFunction addConstant(const UppFunction& f, const Q& c) {
    if (f.isTop()) return f;
    auto segs = f.segments();
    for (auto& s : segs) s.valueAtStartRight += c;
    if (f.eventuallyInfinite()) return UppFunction::finiteThenInfinite(f.valueAtZero(), segs, f.rank());
    return UppFunction::periodic(f.valueAtZero(), segs, f.rank(), f.period(), f.increment());
}

UppFunction monus(const UppFunction& f, const UppFunction& g, bool hull) {
    auto finish = [&](UppFunction r) { return hull ? lowerNonDecreasingHull(r) : r; };
    if (f.isTop()) return UppFunction::top();
    if (g.isTop()) return UppFunction();
    auto clipped = [](const UppFunction& a, const UppFunction& b, const Q& h) {
        return detail::clipBelowZero(detail::combine(a.unroll(h), b.unroll(h), -1));
    };
    if (f.eventuallyInfinite()) {
        Q xf = f.rank();
        if (g.eventuallyInfinite() && g.rank() < xf) {
            Pwl p = detail::concat(clipped(f, g, g.rank()), zeroOn(g.rank(), xf));
            return finish(UppFunction::fromPwlFinite(p));
        }
        return finish(UppFunction::fromPwlFinite(clipped(f, g, xf)));
    }
    if (g.eventuallyInfinite()) {
        Q xg = g.rank();
        Pwl p = detail::concat(clipped(f, g, xg), zeroOn(xg, xg + Q(1)));
        return finish(UppFunction::fromPwl(p, xg, Q(1), Q(0)));
    }
    Q D = hyperPeriod(f, g);
    Q r = max(f.rank(), g.rank());
    Q cf = incrementOver(f, D), cg = incrementOver(g, D);
    if (cf == cg) return finish(UppFunction::fromPwl(clipped(f, g, r + D), r, D, Q(0)));
    Pwl diff = detail::combine(f.unroll(r + D).restrict(r, r + D), g.unroll(r + D).restrict(r, r + D), -1);
    Q k = 0, inc = 0;
    if (cf > cg) {
        Q m = infOpenLeft(diff);
        if (m.sign() < 0) k = ceil(-m / (cf - cg));
        inc = cf - cg;
    } else {
        Q M = supOpenLeft(diff);
        if (M.sign() > 0) k = ceil(M / (cg - cf));
    }
    Q r2 = r + k * D;
    return finish(UppFunction::fromPwl(clipped(f, g, r2 + D), r2, D, inc));
}

UppFunction lowerNonDecreasingHull(const UppFunction& f) {
    if (f.isTop()) return f;
    Q end = f.eventuallyInfinite() ? f.rank() : f.rank() + f.period();
    Pwl p = f.unroll(end);
    Q beyond = Q::infinity();
    if (!f.eventuallyInfinite()) beyond = infOpenLeft(p.restrict(f.rank(), end)) + f.increment();

    std::vector<PNode> rev;
    const auto& n = p.nodes;
    PNode last = n.back();
    Q M = min(last.value, beyond);
    last.value = M;
    last.hasSeg = false;
    rev.push_back(last);
    for (std::size_t i = n.size() - 1; i-- > 0;) {
        const PNode& a = n[i];
        Q len = n[i + 1].x - a.x;
        Q aLeft = a.right, aRight = a.right + a.slope * len;
        PNode node;
        node.x = a.x;
        node.hasSeg = true;
        if (a.slope.sign() >= 0) {
            if (aLeft >= M) {
                node.right = M;
                node.slope = 0;
            } else if (aRight <= M) {
                node.right = aLeft;
                node.slope = a.slope;
            } else {
                Q tc = a.x + (M - aLeft) / a.slope;
                PNode mid;
                mid.x = tc;
                mid.value = M;
                mid.hasSeg = true;
                mid.right = M;
                mid.slope = 0;
                rev.push_back(mid);
                node.right = aLeft;
                node.slope = a.slope;
            }
        } else {
            node.right = min(aRight, M);
            node.slope = 0;
        }
        node.value = min(a.value, node.right);
        M = node.value;
        rev.push_back(node);
    }
    Pwl h;
    h.nodes.assign(rev.rbegin(), rev.rend());
    h.makeLeftContinuous();
    h.simplify();
    if (f.eventuallyInfinite()) return UppFunction::fromPwlFinite(h);
    return UppFunction::fromPwl(h, f.rank(), f.period(), f.increment());
}

bool lessOrEqual(const UppFunction& f, const UppFunction& g) { return minimum(f, g) == f; }

}  // namespace netcalc
