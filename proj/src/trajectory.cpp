#include "netcalc/trajectory.hpp"

#include <algorithm>

namespace netcalc {

namespace {

void sameGrid(const GridTrajectory& a, const GridTrajectory& b) {
    if (a.step != b.step || a.size() != b.size()) throw DomainError("trajectories are on different grids");
}

std::size_t steps(const Q& step, const Q& horizon) {
    if (step.isInf() || step.sign() <= 0) throw DomainError("grid step must be positive");
    if (horizon.isInf() || horizon.sign() < 0) throw DomainError("grid horizon must be finite");
    Q n = floor(horizon / step);
    if (n > Q(10000000)) throw ResourceError("grid has too many points");
    return static_cast<std::size_t>(n.toDouble());
}

}  // namespace

bool GridTrajectory::hasInfinite() const {
    return std::any_of(values.begin(), values.end(), [](const Q& v) { return v.isInf(); });
}

bool GridTrajectory::nonDecreasing() const {
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] < values[k - 1]) return false;
    return true;
}

GridTrajectory sample(const UppFunction& f, const Q& step, const Q& horizon) {
    std::size_t n = steps(step, horizon);
    GridTrajectory g{step, {}};
    g.values.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) g.values.push_back(f.eval(step * Q(static_cast<long>(k))));
    return g;
}

GridTrajectory convOracle(const GridTrajectory& a, const GridTrajectory& b) {
    sameGrid(a, b);
    GridTrajectory c{a.step, std::vector<Q>(a.size(), Q::infinity())};
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i <= k; ++i) c.values[k] = min(c.values[k], a.values[i] + b.values[k - i]);
    return c;
}

DeconvOracle deconvOracle(const GridTrajectory& a, const GridTrajectory& b, const Q& window) {
    sameGrid(a, b);
    const std::size_t n = a.size();
    GridTrajectory d{a.step, std::vector<Q>(n, Q(0))};
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t u = 0; k + u < n; ++u) {
            const Q& x = a.values[k + u];
            const Q& y = b.values[u];
            if (y.isInf()) continue;
            if (x.isInf()) {
                d.values[k] = Q::infinity();
                break;
            }
            d.values[k] = max(d.values[k], x - y);
        }
    }
    std::size_t w = steps(a.step, window);
    return {std::move(d), w >= n ? 0 : n - 1 - w};
}

GridTrajectory closureOracle(const GridTrajectory& f) {
    GridTrajectory g = f;
    if (!g.values.empty()) g.values[0] = 0;
    for (;;) {
        GridTrajectory h = convOracle(g, g);
        for (std::size_t k = 0; k < h.size(); ++k) h.values[k] = min(h.values[k], g.values[k]);
        if (h.values == g.values) return g;
        g = std::move(h);
    }
}

GridTrajectory simulateMinimalDeparture(const GridTrajectory& A, const UppFunction& beta) {
    Q horizon = A.time(A.size() - 1);
    return convOracle(A, sample(beta, A.step, horizon));
}

TwoFlowRun simulatePriorityStarvation(const GridTrajectory& A1, const GridTrajectory& A2, const UppFunction& beta) {
    sameGrid(A1, A2);
    GridTrajectory total{A1.step, {}};
    for (std::size_t k = 0; k < A1.size(); ++k) total.values.push_back(A1.values[k] + A2.values[k]);
    GridTrajectory D = simulateMinimalDeparture(total, beta);
    TwoFlowRun r{{A1.step, {}}, {A1.step, {}}};
    for (std::size_t k = 0; k < D.size(); ++k) {
        Q d2 = min(A2.values[k], D.values[k]);
        r.d2.values.push_back(d2);
        r.d1.values.push_back(D.values[k] - d2);
    }
    return r;
}

WeakVsMinplus simulateWeakVsMinplus(const UppFunction& alpha, const UppFunction& beta, const Q& step, const Q& horizon,
                                    long offset) {
    WeakVsMinplus w;
    w.arrival = sample(alpha, step, horizon);
    GridTrajectory b = sample(beta, step, horizon);
    const long n = static_cast<long>(w.arrival.size());
    long tau = 0;
    while (tau + 1 < n && w.arrival.values[tau + 1] > b.values[tau + 1]) ++tau;
    GridTrajectory conv = convOracle(w.arrival, b);
    if (tau == 0) {
        w.weakStrict = w.minPlus = conv;
        return w;
    }
    w.emptyAt = std::clamp(tau / 2 + offset, 1L, tau);
    const std::size_t m = static_cast<std::size_t>(w.emptyAt);
    const Q& Am = w.arrival.values[m];
    w.weakStrict = w.minPlus = GridTrajectory{step, std::vector<Q>(n, Q(0))};
    for (long k = 0; k < n; ++k) {
        const Q& A = w.arrival.values[k];
        if (k < w.emptyAt) {
            w.weakStrict.values[k] = w.minPlus.values[k] = b.values[k];
        } else if (k == w.emptyAt) {
            w.weakStrict.values[k] = w.minPlus.values[k] = Am;
        } else {
            // weakly strict: service restarts at the end of the first backlogged period
            w.weakStrict.values[k] = min(A, Am + b.values[k - m]);
            // (min,plus): only A * beta and monotonicity are owed
            w.minPlus.values[k] = min(A, max(conv.values[k], w.minPlus.values[k - 1]));
        }
    }
    for (long k = 0; k < n; ++k)
        if (w.minPlus.values[k] < w.weakStrict.values[k]) {
            w.witness = k;
            break;
        }
    return w;
}

FeedbackRun simulateWindowLoop(const GridTrajectory& A, const UppFunction& beta, const Q& W) {
    FeedbackRun r;
    GridTrajectory b = sample(beta, A.step, A.time(A.size() - 1));
    r.gated = A;
    const int cap = static_cast<int>(4 * A.size() + 16);
    for (r.iterations = 1; r.iterations <= cap; ++r.iterations) {
        r.departure = convOracle(r.gated, b);
        GridTrajectory next{A.step, {}};
        for (std::size_t k = 0; k < A.size(); ++k) next.values.push_back(min(A.values[k], r.departure.values[k] + W));
        if (next.values == r.gated.values) return r;
        r.gated = std::move(next);
    }
    throw ResourceError("window loop iteration did not settle");
}

RuleHRun simulateRuleHCounterexample(const GridTrajectory& A1, const GridTrajectory& A2, const UppFunction& beta2,
                                     const Q& W) {
    sameGrid(A1, A2);
    RuleHRun r;
    r.d2 = simulateMinimalDeparture(A2, beta2);
    r.gated = r.backlog = GridTrajectory{A1.step, {}};
    for (std::size_t k = 0; k < A1.size(); ++k) {
        Q g = min(A1.values[k], r.d2.values[k] + W);
        r.gated.values.push_back(g);
        r.backlog.values.push_back(A1.values[k] - g);
    }
    return r;
}

}  // namespace netcalc
