#pragma once
// Random instance generators and brute-force checks shared by the test binaries.
#include "netcalc/curves.hpp"
#include "netcalc/trajectory.hpp"
#include "netcalc/upp.hpp"

#include <random>
#include <vector>

namespace nctest {

using netcalc::Q;
using netcalc::Segment;
using netcalc::UppFunction;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(unsigned long seed) : gen(seed) {}
    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen); }
    bool coin(int percent = 50) { return integer(1, 100) <= percent; }
    /// k/den with k in [lo*den, hi*den].
    Q frac(long lo, long hi, long den) { return Q(integer(lo * den, hi * den), den); }
};

/// Non-decreasing UPP function with integer breakpoints and rank + period <= maxSpan.
/// With jumps, valueAtZero is 0 or a small non-negative number and any breakpoint may jump;
/// without, the function is 0 at 0 and continuous after 0+.
inline UppFunction randomUpp(Rng& rng, long maxSpan = 24, bool jumps = true) {
    long period = rng.integer(1, maxSpan / 3);
    long rank = rng.integer(0, maxSpan - period);
    Q v0 = (!jumps || rng.coin(70)) ? Q(0) : rng.frac(0, 2, 2);
    std::vector<Segment> segs;
    Q value = v0;
    long x = 0;
    const long end = rank + period;
    while (x < end) {
        long len = std::min(end - x, rng.integer(1, 4));
        if (x < rank && x + len > rank) len = rank - x;
        Q jump = (jumps || x == 0) && rng.coin(35) ? rng.frac(0, 3, 2) : Q(0);
        Q slope = rng.coin(25) ? Q(0) : rng.frac(0, 3, 4);
        segs.push_back({Q(x), value + jump, slope});
        value = value + jump + slope * Q(len);
        x += len;
    }
    // first value after the rank, to size the increment
    Q atRank = rank == 0 ? segs.front().valueAtStartRight : Q(0);
    if (rank > 0) {
        for (const auto& s : segs)
            if (s.start == Q(rank)) atRank = s.valueAtStartRight;
    }
    Q extra = jumps && rng.coin(50) ? rng.frac(0, 2, 2) : Q(0);
    Q inc = value - atRank + extra;
    if (inc < Q(0)) inc = Q(0);
    return UppFunction::periodic(v0, segs, Q(rank), Q(period), inc);
}

/// Concave-like piecewise function 0 -> b then decreasing slopes: sub-additive by construction.
inline UppFunction randomConcave(Rng& rng) {
    Q b = rng.frac(0, 3, 2);
    int pieces = static_cast<int>(rng.integer(1, 4));
    std::vector<Segment> segs;
    Q slope = rng.frac(1, 4, 2), value = b;
    long x = 0;
    for (int i = 0; i < pieces; ++i) {
        long len = rng.integer(1, 5);
        segs.push_back({Q(x), value, slope});
        value = value + slope * Q(len);
        x += len;
        slope = slope * rng.frac(0, 1, 4);
    }
    segs.push_back({Q(x), value, slope});
    return UppFunction::periodic(Q(0), segs, Q(x), Q(1), slope);
}

/// Exact sub-additivity check through grid values and one-sided limits.
/// Valid for functions whose breakpoints are integers, whose rank + period is below
/// `span` and whose period divides into the search range [0, 2 span].
inline bool sampledSubadditive(const UppFunction& f, long span) {
    // value (0), right limit (+1) and left limit (-1) at every integer point
    const long n = 2 * span + 1;
    std::vector<Q> val, right, left;
    for (long k = 0; k <= n; ++k) {
        val.push_back(f.eval(Q(k)));
        right.push_back(f.evalRight(Q(k)));
        if (k == 0) {
            left.push_back(Q(0));
        } else {
            Q t = Q(k) - Q(1, 2);
            // piecewise affine on (k-1, k): left limit by extrapolating the midpoints
            Q a = f.eval(t), b = f.eval(Q(k) - Q(1, 4));
            left.push_back(b + (b - a));
        }
    }
    auto at = [&](long k, int dir) -> const Q& { return dir == 0 ? val[k] : (dir > 0 ? right[k] : left[k]); };
    for (long s = 0; s <= span + 1 && s <= n; ++s) {
        for (long t = 0; s + t <= n; ++t) {
            for (int ds = -1; ds <= 1; ++ds) {
                if (s == 0 && ds < 0) continue;
                for (int dt = -1; dt <= 1; ++dt) {
                    if (t == 0 && dt < 0) continue;
                    // sign of ds*e1 + dt*e2 over all e1, e2 > 0
                    std::vector<int> sums;
                    if (ds == 0 || dt == 0 || ds == dt) sums.push_back(ds != 0 ? ds : dt);
                    else sums = {-1, 0, 1};
                    for (int dsum : sums) {
                        if (s + t == 0 && dsum < 0) continue;
                        if (s + t == n && dsum > 0) continue;
                        if (at(s + t, dsum) > at(s, ds) + at(t, dt)) return false;
                    }
                }
            }
        }
    }
    return true;
}

inline netcalc::GridTrajectory grid(const UppFunction& f, const Q& step, const Q& horizon) {
    return netcalc::sample(f, step, horizon);
}

/// Random non-decreasing trajectory below alpha on the grid (alpha-constrained, starting at 0).
inline netcalc::GridTrajectory randomTrajectory(Rng& rng, const UppFunction& alpha, const Q& step, std::size_t n) {
    netcalc::GridTrajectory a{step, {Q(0)}};
    auto env = netcalc::sample(alpha, step, step * Q(static_cast<long>(n - 1)));
    for (std::size_t k = 1; k < n; ++k) {
        // largest value keeping A(k) - A(i) <= alpha(k - i) for every i < k
        Q cap = Q::infinity();
        for (std::size_t i = 0; i < k; ++i) cap = netcalc::min(cap, a.values[i] + env.values[k - i]);
        Q lo = a.values[k - 1];
        Q pick = cap;
        if (rng.coin(40)) pick = lo;
        else if (rng.coin(50)) pick = lo + (cap - lo) * rng.frac(0, 1, 4);
        a.values.push_back(pick);
    }
    return a;
}

}  // namespace nctest
