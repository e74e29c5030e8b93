#pragma once
// Grid trajectories and brute-force (min,plus) operators used to check the exact algebra.

#include "netcalc/upp.hpp"

#include <vector>

namespace netcalc {

struct GridTrajectory {
    Q step;
    std::vector<Q> values;  // at 0, step, 2 step, ..., horizon

    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] bool hasInfinite() const;
    [[nodiscard]] bool nonDecreasing() const;
    [[nodiscard]] Q at(std::size_t k) const { return values.at(k); }
    [[nodiscard]] Q time(std::size_t k) const { return step * Q(static_cast<long>(k)); }
};

GridTrajectory sample(const UppFunction& f, const Q& step, const Q& horizon);

/// c[k] = min_{i <= k} a[i] + b[k - i].
GridTrajectory convOracle(const GridTrajectory& a, const GridTrajectory& b);

struct DeconvOracle {
    GridTrajectory values;  // sup over u within the horizon, clipped at 0
    std::size_t validUpTo;  // last index where the truncated sup is exact
};
/// sup_u a(t + u) - b(u) over grid u; exact for t <= horizon - window.
DeconvOracle deconvOracle(const GridTrajectory& a, const GridTrajectory& b, const Q& window);

/// Closure on the grid (0 at 0); exact on the whole horizon.
GridTrajectory closureOracle(const GridTrajectory& f);

/// Minimal departure A * beta.
GridTrajectory simulateMinimalDeparture(const GridTrajectory& A, const UppFunction& beta);

struct TwoFlowRun {
    GridTrajectory d1, d2;
};
/// Aggregate departures pinned to (A1 + A2) * beta, flow 2 served first.
TwoFlowRun simulatePriorityStarvation(const GridTrajectory& A1, const GridTrajectory& A2, const UppFunction& beta);

struct WeakVsMinplus {
    GridTrajectory arrival, weakStrict, minPlus;
    long witness = -1;  // grid index with minPlus < weakStrict, or -1
    long emptyAt = 0;   // grid index where both servers are forced empty
};
/// Arrivals follow alpha; both departures follow beta and empty at about tau/2, where tau
/// is the end of the first interval with alpha > beta. `offset` shifts the emptying
/// instant by that many grid steps.
WeakVsMinplus simulateWeakVsMinplus(const UppFunction& alpha, const UppFunction& beta, const Q& step, const Q& horizon,
                                    long offset = 0);

struct FeedbackRun {
    GridTrajectory gated;  // A'
    GridTrajectory departure;
    int iterations = 0;
};
/// Largest solution of A' = A ^ (A' * beta + W), by decreasing iteration from A' = A.
FeedbackRun simulateWindowLoop(const GridTrajectory& A, const UppFunction& beta, const Q& W);

struct RuleHRun {
    GridTrajectory gated;    // A1' = A1 ^ (D2 + W)
    GridTrajectory backlog;  // A1 - A1'
    GridTrajectory d2;
};
RuleHRun simulateRuleHCounterexample(const GridTrajectory& A1, const GridTrajectory& A2, const UppFunction& beta2,
                                     const Q& W);

}  // namespace netcalc
