#pragma once
// Ultimately pseudo-periodic piecewise-affine functions on [0, +inf).

#include "netcalc/pwl.hpp"
#include "netcalc/rational.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace netcalc {

class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maximum number of segments an intermediate result may hold.
/// Default 100000, overridden by the NETCALC_MAX_SEGMENTS environment variable.
std::size_t maxSegments();

/// Affine piece on (start, next start]; value tends to valueAtStartRight as t -> start+.
struct Segment {
    Q start;
    Q valueAtStartRight;
    Q slope;
    friend bool operator==(const Segment&, const Segment&) = default;
};

class UppFunction {
public:
    /// The zero function.
    UppFunction();

    /// Pseudo-periodic: segments cover (0, rank + period] and f(t + period) = f(t) + increment for t > rank.
    static UppFunction periodic(Q valueAtZero, std::vector<Segment> segments, Q rank, Q period, Q increment);
    /// Finite on [0, end], +inf after.
    static UppFunction finiteThenInfinite(Q valueAtZero, std::vector<Segment> segments, Q end);
    /// 0 at 0 then affine: jump to valueRight, slope rate.
    static UppFunction affine(Q valueAtZero, Q valueRight, Q rate);
    /// +inf everywhere, 0 included.
    static UppFunction top();

    [[nodiscard]] Q eval(const Q& t) const;
    /// lim f(s) as s -> t+.
    [[nodiscard]] Q evalRight(const Q& t) const;

    [[nodiscard]] const Q& valueAtZero() const { return v0_; }
    [[nodiscard]] const std::vector<Segment>& segments() const { return segs_; }
    [[nodiscard]] std::vector<Segment> transientSegments() const;
    [[nodiscard]] std::vector<Segment> periodSegments() const;
    /// For eventually infinite functions: the last finite abscissa.
    [[nodiscard]] const Q& rank() const { return rank_; }
    [[nodiscard]] const Q& period() const { return period_; }
    [[nodiscard]] const Q& increment() const { return inc_; }
    [[nodiscard]] bool eventuallyInfinite() const { return evInf_; }
    [[nodiscard]] bool isTop() const { return v0_.isInf(); }
    /// Long-run growth rate increment / period (+inf for eventually infinite).
    [[nodiscard]] Q longRunRate() const;
    /// True when the periodic part is a single affine piece.
    [[nodiscard]] bool affineTail() const;
    [[nodiscard]] bool isNonDecreasing() const;
    [[nodiscard]] std::size_t size() const { return segs_.size(); }

    /// Finite restriction to [0, h] (h <= rank for eventually infinite functions).
    [[nodiscard]] detail::Pwl unroll(const Q& h) const;
    /// Builds from a finite prefix on [0, rank + period].
    static UppFunction fromPwl(const detail::Pwl& p, Q rank, Q period, Q increment);
    static UppFunction fromPwlFinite(const detail::Pwl& p);

    /// Plain text listing, parsed back by fromText.
    [[nodiscard]] std::string toText() const;
    static UppFunction fromText(const std::string& text);

    friend bool operator==(const UppFunction&, const UppFunction&) = default;

private:
    void canonicalize();
    void checkInvariants() const;

    Q v0_{0};
    std::vector<Segment> segs_;
    Q rank_{0};
    Q period_{1};
    Q inc_{0};
    bool evInf_ = false;
};

std::ostream& operator<<(std::ostream& os, const UppFunction& f);

UppFunction minimum(const UppFunction& f, const UppFunction& g);
UppFunction add(const UppFunction& f, const UppFunction& g);
/// Pointwise (f - g)+. With nonDecreasingHull, returns the largest non-decreasing
/// function below it instead (t -> inf_{s >= t} (f - g)+(s)).
UppFunction monus(const UppFunction& f, const UppFunction& g, bool nonDecreasingHull = false);
/// t -> inf_{s >= t} f(s), made left-continuous.
UppFunction lowerNonDecreasingHull(const UppFunction& f);
/// f shifted up by a constant for t > 0 (value at 0 unchanged).
UppFunction addConstant(const UppFunction& f, const Q& c);

UppFunction convolve(const UppFunction& f, const UppFunction& g);
/// sup_{u >= 0} f(t + u) - g(u) for t > 0; the value at 0 is kept at f(0).
/// Returns top() when the supremum diverges.
UppFunction deconvolve(const UppFunction& f, const UppFunction& g);

struct ClosureResult {
    UppFunction fn;
    bool approximate = false;  // true when the analytic lower bound was returned
    int doublings = 0;
};

/// Default cap on doubling steps.
inline constexpr int kClosureDoublingCap = 64;

UppFunction subadditiveClosure(const UppFunction& f);
ClosureResult subadditiveClosureDetailed(const UppFunction& f, int doublingCap = kClosureDoublingCap);
bool isSubadditive(const UppFunction& f);

Q horizontalDeviation(const UppFunction& alpha, const UppFunction& beta);
Q verticalDeviation(const UppFunction& alpha, const UppFunction& beta);

/// f <= g everywhere.
bool lessOrEqual(const UppFunction& f, const UppFunction& g);

}  // namespace netcalc
