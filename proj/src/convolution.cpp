// (min,plus) convolution and deconvolution of UPP functions.
#include "netcalc/upp.hpp"

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

// k supported on [0, len] convolved with pseudo-periodic h.
UppFunction finiteStar(const Pwl& k, const Q& len, const UppFunction& h) {
    Q r = len + h.rank();
    Q hor = r + h.period();
    Pwl p = detail::convolveFinite(k, h.unroll(hor), hor);
    return UppFunction::fromPwl(p, r, h.period(), h.increment());
}

Pwl withValueAtZero(Pwl p, const Q& v) {
    p.nodes.front().value = v;
    p.nodes.front().hasValue = true;
    return p;
}

}  // namespace

UppFunction convolve(const UppFunction& f, const UppFunction& g) {
    if (f.isTop() || g.isTop()) return UppFunction::top();
    if (f.eventuallyInfinite() && g.eventuallyInfinite()) {
        Q h = f.rank() + g.rank();
        return UppFunction::fromPwlFinite(detail::convolveFinite(f.unroll(f.rank()), g.unroll(g.rank()), h));
    }
    if (f.eventuallyInfinite()) return finiteStar(f.unroll(f.rank()), f.rank(), g);
    if (g.eventuallyInfinite()) return finiteStar(g.unroll(g.rank()), g.rank(), f);
    Q D = hyperPeriod(f, g);
    Q rf = f.longRunRate(), rg = g.longRunRate();
    if (rf == rg) {
        // a pair with both arguments past rank + D can trade a hyper-period either way
        Q lf = f.rank() + D, lg = g.rank() + D;
        return minimum(finiteStar(f.unroll(lf), lf, g), finiteStar(g.unroll(lg), lg, f));
    }
    const UppFunction& lo = rf < rg ? f : g;
    const UppFunction& hi = rf < rg ? g : f;
    // Pairs using the periodic part of the slower function and a long piece of
    // the faster one are dominated by moving one hyper-period across.
    UppFunction a = finiteStar(lo.unroll(lo.rank()), lo.rank(), hi);
    Q len = hi.rank() + D;
    UppFunction b = finiteStar(hi.unroll(len), len, lo);
    return minimum(a, b);
}

UppFunction deconvolve(const UppFunction& f, const UppFunction& g) {
    if (f.isTop()) return UppFunction::top();
    if (g.isTop()) return UppFunction();
    auto finish = [&](Pwl p, bool finite, const Q& rank, const Q& period, const Q& inc) {
        p = detail::clipBelowZero(p);
        p = withValueAtZero(std::move(p), f.valueAtZero());
        if (finite) return UppFunction::fromPwlFinite(p);
        return UppFunction::fromPwl(p, rank, period, inc);
    };
    if (g.eventuallyInfinite()) {
        Q u = g.rank();
        if (f.eventuallyInfinite()) {
            if (f.rank() < u) return UppFunction::top();
            Q h = f.rank() - u;
            return finish(detail::deconvolveFinite(f.unroll(f.rank()), g.unroll(u), h), true, h, Q(0), Q(0));
        }
        Q h = f.rank() + f.period();
        return finish(detail::deconvolveFinite(f.unroll(h + u), g.unroll(u), h), false, f.rank(), f.period(), f.increment());
    }
    if (f.eventuallyInfinite()) return UppFunction::top();
    if (f.longRunRate() > g.longRunRate()) return UppFunction::top();
    Q D = hyperPeriod(f, g);
    Q u = max(f.rank(), g.rank()) + D;
    Q h = f.rank() + f.period();
    return finish(detail::deconvolveFinite(f.unroll(h + u), g.unroll(u), h), false, f.rank(), f.period(), f.increment());
}

bool isSubadditive(const UppFunction& f) {
    if (f.isTop()) return true;
    if (f.valueAtZero() < Q(0)) return false;
    if (f.valueAtZero().isZero()) return deconvolve(f, f) == f;
    // with f(0) >= 0 the value at 0 never breaks the inequality; test the rest with f(0) = 0
    UppFunction g = f.eventuallyInfinite() ? UppFunction::finiteThenInfinite(Q(0), f.segments(), f.rank())
                                           : UppFunction::periodic(Q(0), f.segments(), f.rank(), f.period(), f.increment());
    return deconvolve(g, g) == g;
}

}  // namespace netcalc
