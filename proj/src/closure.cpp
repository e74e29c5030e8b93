// Sub-additive closure.
#include "netcalc/upp.hpp"

#include <algorithm>
#include <set>

namespace netcalc {

using detail::PNode;
using detail::Pwl;

namespace {

UppFunction withZeroAtZero(const UppFunction& f) {
    if (f.eventuallyInfinite()) return UppFunction::finiteThenInfinite(Q(0), f.segments(), f.rank());
    return UppFunction::periodic(Q(0), f.segments(), f.rank(), f.period(), f.increment());
}

// inf_{t > 0} f(t) / t
Q bestRatio(const UppFunction& f) {
    Q best = f.eventuallyInfinite() ? Q::infinity() : f.longRunRate();
    const auto& segs = f.segments();
    Q end = f.eventuallyInfinite() ? f.rank() : f.rank() + f.period();
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const Segment& s = segs[k];
        Q next = k + 1 < segs.size() ? segs[k + 1].start : end;
        if (s.start.sign() == 0) {
            if (s.valueAtStartRight.sign() == 0) best = min(best, s.slope);
        } else {
            best = min(best, s.valueAtStartRight / s.start);
        }
        best = min(best, (s.valueAtStartRight + s.slope * (next - s.start)) / next);
    }
    return best;
}

// Sup of abscissae where a(t + d) - a(t) - c is not zero, for t in [0, a.hi - d].
Q lastMismatch(const Pwl& a, const Q& d, const Q& c) {
    Pwl later = a.restrict(d, a.hi()).shifted(-d, -c);
    Pwl diff = detail::combine(later, a.restrict(Q(0), a.hi() - d), -1);
    Q r = 0;
    for (std::size_t k = 0; k < diff.nodes.size(); ++k) {
        const PNode& n = diff.nodes[k];
        if (n.hasSeg && (!n.right.isZero() || !n.slope.isZero())) r = diff.nodes[k + 1].x;
        if (k > 0 && n.hasValue && !n.value.isZero()) r = max(r, n.x);
    }
    return r;
}

bool matchesWindowPattern(const UppFunction& f, Q& W, Q& R, Q& T) {
    if (f.eventuallyInfinite() || !f.valueAtZero().isZero()) return false;
    const auto& s = f.segments();
    if (s.size() != 2 || !f.affineTail()) return false;
    if (!s[0].slope.isZero() || s[1].valueAtStartRight != s[0].valueAtStartRight || s[1].start != f.rank()) return false;
    W = s[0].valueAtStartRight;
    T = s[1].start;
    R = s[1].slope;
    return W.sign() > 0 && T.sign() > 0 && R.sign() > 0;
}

// beyond this a doubling costs seconds; give up and fall through to the fallback
constexpr std::size_t kMaxWorkingNodes = 600;

}  // namespace

ClosureResult subadditiveClosureDetailed(const UppFunction& input, int cap) {
    ClosureResult res;
    if (input.isTop() || (input.eventuallyInfinite() && input.rank().isZero())) {
        res.fn = UppFunction::finiteThenInfinite(Q(0), {}, Q(0));
        return res;
    }
    UppFunction f = withZeroAtZero(input);
    if (isSubadditive(f)) {
        res.fn = f;
        return res;
    }

    Q rho = bestRatio(f);
    Q base = f.eventuallyInfinite() ? f.rank() : f.rank() + (f.affineTail() ? Q(0) : f.period());
    // periods of the closure are built from breakpoints of f, segment ends included
    std::set<Q> cands;
    Q reach = f.eventuallyInfinite() ? f.rank() : f.rank() + Q(2) * f.period();
    if (reach.sign() > 0) {
        for (const auto& n : f.unroll(reach).nodes)
            if (n.x.sign() > 0) cands.insert(n.x);
    }
    if (!f.eventuallyInfinite() && !f.affineTail()) cands.insert(f.period());
    for (const auto& s : f.segments()) base = max(base, s.start);
    if (base.isZero()) base = Q(1);
    std::vector<Q> candidates;
    for (const Q& c : cands)
        for (long m = 1; m <= 4; ++m) candidates.push_back(c * Q(m));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    Q H = base * Q(6);
    for (int attempt = 0; attempt < 8 && res.doublings < cap; ++attempt) {
        Pwl g = f.unroll(H);
        bool stable = false;
        while (res.doublings < cap) {
            Pwl g2 = detail::convolveFinite(g, g, H);
            ++res.doublings;
            if (g2 == g) {
                stable = true;
                break;
            }
            g = std::move(g2);
        }
        if (!stable || g.nodes.size() > kMaxWorkingNodes) break;
        if (g.hi() == H) {
            for (const Q& d : candidates) {
                if (Q(3) * d > H) break;
                Q c = rho * d;
                Q r = lastMismatch(g, d, c);
                if (H - d - r < Q(2) * d) continue;
                UppFunction cand = UppFunction::fromPwl(g.restrict(Q(0), r + d), r, d, c);
                if (!lessOrEqual(cand, f)) continue;
                if (!(convolve(cand, cand) == cand)) continue;
                res.fn = cand;
                return res;
            }
        }
        H = H * Q(2);
    }
    Q W, R, T;
    if (matchesWindowPattern(f, W, R, T)) {
        Q rate = min(R, W / T);
        res.fn = UppFunction::periodic(Q(0), {{Q(0), W, Q(0)}, {T, W, rate}}, T, Q(1), rate);
        res.approximate = true;
        return res;
    }
    throw ResourceError("sub-additive closure did not stabilise within " + std::to_string(cap) + " doublings");
}

UppFunction subadditiveClosure(const UppFunction& f) { return subadditiveClosureDetailed(f).fn; }

}  // namespace netcalc
