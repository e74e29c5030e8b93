#include "netcalc/tandem.hpp"

#include <algorithm>
#include <future>
#include <thread>
#include <sstream>

namespace netcalc {

namespace {

bool pmooKind(ServiceKind k) {
    return k == ServiceKind::TransmissionDelay || k == ServiceKind::Strict || k == ServiceKind::SubAdditiveMinPlus;
}

void requirePmooKinds(const TandemNetwork& net) {
    for (int j = 0; j < net.size(); ++j) {
        if (!pmooKind(net.servers[j].kind)) {
            throw KindError("server " + std::to_string(j + 1) + " is a plain (min,plus) server; PMOO needs delay, strict or "
                            "sub-additive servers",
                            residualMinplusUnsafe(net.servers[j], Curve{}).witness);
        }
    }
}

Q totalOffset(const TandemNetwork& net) {
    Q m = 0;
    for (const auto& s : net.servers) m += s.delayOffset;
    return m;
}

Q sumOr0(const std::vector<Q>& v) {
    Q s = 0;
    for (const auto& x : v) s += x;
    return s;
}

}  // namespace

void TandemNetwork::validate(bool requireFullPath) const {
    int n = size();
    if (n == 0) throw DomainError("tandem has no servers");
    std::vector<bool> used(n, false);
    for (const auto& s : servers)
        if (!s.isService()) throw KindError("tandem servers must be service curves");
    for (const auto& f : flows) {
        if (f.first < 1 || f.last > n || f.first > f.last) throw DomainError("flow " + f.id + " has a bad path");
        if (f.alpha.role != Role::Arrival) throw KindError("flow " + f.id + " needs an arrival curve");
        if (f.minAlpha && f.minAlpha->rate > f.alpha.fn.longRunRate())
            throw DomainError("flow " + f.id + ": minimum arrival rate above its long-run rate");
        for (const auto& t : f.throttles)
            if (!t.isService()) throw KindError("flow " + f.id + ": throttles must be service curves");
        for (int j = f.first; j <= f.last; ++j) used[j - 1] = true;
    }
    for (int j = 0; j < n; ++j)
        if (!used[j]) throw DomainError("server " + std::to_string(j + 1) + " is crossed by no flow");
    const auto& foi = flows[foiIndex()];
    if (requireFullPath && (foi.first != 1 || foi.last != n))
        throw DomainError("flow of interest must cross every server");
}

std::size_t TandemNetwork::foiIndex() const {
    for (std::size_t i = 0; i < flows.size(); ++i)
        if (flows[i].id == flowOfInterest) return i;
    throw DomainError("unknown flow of interest '" + flowOfInterest + "'");
}

std::vector<StabilityMargin> stabilityMargins(const TandemNetwork& net) {
    std::vector<StabilityMargin> out;
    for (int j = 1; j <= net.size(); ++j) {
        StabilityMargin m;
        m.server = j;
        m.arrivalRate = 0;
        for (const auto& f : net.flows)
            if (f.crosses(j)) m.arrivalRate += f.alpha.fn.longRunRate();
        m.serviceRate = net.servers[j - 1].fn.longRunRate();
        m.label = "server " + std::to_string(j);
        out.push_back(m);
    }
    for (const auto& f : net.flows) {
        for (const auto& t : f.throttles) {
            StabilityMargin m;
            m.label = "throttle of flow " + f.id;
            m.arrivalRate = f.alpha.fn.longRunRate();
            m.serviceRate = t.fn.longRunRate();
            out.push_back(m);
        }
    }
    return out;
}

namespace {

bool onGrid(const Q& x, const Q& step) { return (x / step).isInteger(); }

// Every breakpoint of f is a multiple of step.
bool gridAligned(const UppFunction& f, const Q& step) {
    if (f.isTop()) return true;
    if (!onGrid(f.rank(), step)) return false;
    if (!f.eventuallyInfinite() && !onGrid(f.period(), step)) return false;
    return std::all_of(f.segments().begin(), f.segments().end(), [&](const Segment& s) { return onGrid(s.start, step); });
}

}  // namespace

SampledCurve pmooCurveNumeric(const TandemNetwork& net, const GridSpec& grid, int maxServers) {
    net.validate();
    requirePmooKinds(net);
    const int n = net.size();
    if (n > maxServers)
        throw ResourceError("PMOO grid search is limited to " + std::to_string(maxServers) + " servers, got " +
                            std::to_string(n));
    if (grid.step.sign() <= 0 || grid.step.isInf()) throw DomainError("grid step must be positive");
    const Q stepsQ = floor(grid.horizon / grid.step);
    const long K = stepsQ.toDouble() > 1e7 ? throw ResourceError("grid too fine") : static_cast<long>(stepsQ.toDouble());

    std::vector<std::vector<Q>> beta(n);
    for (int j = 0; j < n; ++j)
        for (long k = 0; k <= K; ++k) beta[j].push_back(net.servers[j].fn.eval(grid.step * Q(k)));

    const std::size_t foi = net.foiIndex();
    // With all breakpoints on the grid the vertices of the split polytope are grid points
    // (its constraint rows are intervals), so grid splits with right limits of the arrival
    // curves are exact. Otherwise each real split is rounded down, one step per server.
    bool aligned = true;
    for (const auto& sv : net.servers) aligned = aligned && gridAligned(sv.fn, grid.step);
    for (std::size_t i = 0; i < net.flows.size(); ++i)
        if (i != foi) aligned = aligned && gridAligned(net.flows[i].alpha.fn, grid.step);
    struct Cross {
        int first, last;
        std::vector<Q> a;
    };
    std::vector<Cross> cross;
    for (std::size_t i = 0; i < net.flows.size(); ++i) {
        if (i == foi) continue;
        Cross c{net.flows[i].first - 1, net.flows[i].last - 1, {}};
        const auto& a = net.flows[i].alpha.fn;
        if (aligned) {
            for (long k = 0; k <= K; ++k) c.a.push_back(a.evalRight(grid.step * Q(k)));
        } else {
            for (long k = 0; k <= K + n; ++k) c.a.push_back(a.eval(grid.step * Q(k)));
        }
        cross.push_back(std::move(c));
    }

    // best[s]: min objective over grid splits whose indices sum to s
    std::vector<Q> best(K + 1, Q::infinity());
    std::vector<long> l(n, 0);
    std::vector<long> prefix(n + 1, 0);
    auto evalSplit = [&](long s) {
        Q v = 0;
        for (int j = 0; j < n && !v.isInf(); ++j) v += beta[j][l[j]];
        if (!v.isInf()) {
            for (const auto& c : cross) {
                long span = prefix[c.last + 1] - prefix[c.first];
                v -= c.a[aligned ? span : span + (c.last - c.first + 1)];
            }
        }
        if (v < best[s]) best[s] = v;
    };
    // enumerate l_0..l_{n-1} >= 0 with sum <= K
    auto rec = [&](auto& self, int j, long remaining) -> void {
        if (j == n - 1) {
            for (long x = 0; x <= remaining; ++x) {
                l[j] = x;
                prefix[j + 1] = prefix[j] + x;
                evalSplit(prefix[n]);
            }
            return;
        }
        for (long x = 0; x <= remaining; ++x) {
            l[j] = x;
            prefix[j + 1] = prefix[j] + x;
            self(self, j + 1, remaining - x);
        }
    };
    rec(rec, 0, K);

    // rounded down, real splits of t land on grid splits whose sum lies in (t - n step, t]
    SampledCurve out;
    out.step = grid.step;
    out.values.assign(K + 1, Q::infinity());
    const long reach = aligned ? 0 : n - 1;
    for (long k = 0; k <= K; ++k) {
        for (long s = std::max(0L, k - reach); s <= k; ++s) out.values[k] = min(out.values[k], best[s]);
        out.values[k] = pos(out.values[k]);
    }
    out.values[0] = 0;
    for (long k = K - 1; k >= 0; --k) out.values[k] = min(out.values[k], out.values[k + 1]);
    return out;
}

bool asTokenBucket(const UppFunction& f, Q& r, Q& b) {
    if (f.eventuallyInfinite()) return false;
    r = f.longRunRate();
    b = f.evalRight(Q(0));
    return !b.isInf() && f == tokenBucketFn(r, b);
}

bool asRateLatency(const Curve& c, Q& R, Q& T) {
    const UppFunction& f = c.fn;
    if (f.isTop()) return false;
    if (f.eventuallyInfinite()) {
        R = Q::infinity();
        T = f.rank();
        return f == pureDelayFn(T);
    }
    R = f.longRunRate();
    if (R.isZero()) return false;
    Q t = f.rank() + f.period() + Q(1);
    T = t - f.eval(t) / R;
    if (T.sign() < 0) return false;
    return f == rateLatencyFn(R, T);
}

RateLatencyParams pmooClosedFormParams(const TandemNetwork& net) {
    net.validate();
    requirePmooKinds(net);
    const int n = net.size();
    const std::size_t foi = net.foiIndex();
    std::vector<Q> R(n), T(n);
    for (int j = 0; j < n; ++j)
        if (!asRateLatency(net.servers[j], R[j], T[j]))
            throw DomainError("server " + std::to_string(j + 1) + " is not rate-latency");
    std::vector<Q> crossRate(n, Q(0));
    Q num = 0;
    for (std::size_t i = 0; i < net.flows.size(); ++i) {
        if (i == foi) continue;
        const auto& f = net.flows[i];
        Q r, b;
        if (!asTokenBucket(f.alpha.fn, r, b)) throw DomainError("flow " + f.id + " is not a token bucket");
        Q pathLatency = 0;
        for (int j = f.first; j <= f.last; ++j) {
            crossRate[j - 1] += r;
            pathLatency += T[j - 1];
        }
        num += b + r * pathLatency;
    }
    RateLatencyParams p{Q::infinity(), sumOr0(T)};
    for (int j = 0; j < n; ++j)
        if (!R[j].isInf()) p.rate = min(p.rate, R[j] - crossRate[j]);
    if (p.rate.sign() <= 0) {
        p.rate = 0;
        p.latency = Q::infinity();
        return p;
    }
    p.latency += num / p.rate;
    return p;
}

Curve pmooClosedForm(const TandemNetwork& net) {
    RateLatencyParams p = pmooClosedFormParams(net);
    Curve c;
    c.role = Role::Service;
    c.kind = ServiceKind::MinPlus;
    c.delayOffset = totalOffset(net);
    if (p.latency.isInf()) {
        c.fn = UppFunction();
        c.unstable = true;
    } else if (p.rate.isInf()) {
        c.fn = pureDelayFn(p.latency);
    } else {
        c.fn = rateLatencyFn(p.rate, p.latency);
    }
    return c;
}

Q sampledDelayBound(const UppFunction& alpha, const SampledCurve& beta) {
    const long K = static_cast<long>(beta.values.size()) - 1;
    Q worst = 0;
    long m = 0;
    for (long k = 0; k < K; ++k) {
        Q need = alpha.eval(beta.step * Q(k + 1));
        if (m < k) m = k;
        while (m <= K && beta.values[m] < need) ++m;
        if (m > K) return Q::infinity();
        worst = max(worst, beta.step * Q(m - k));
    }
    return worst;
}

Q sampledBacklogBound(const UppFunction& alpha, const SampledCurve& beta) {
    const long K = static_cast<long>(beta.values.size()) - 1;
    Q worst = 0;
    for (long k = 0; k < K; ++k) worst = max(worst, alpha.eval(beta.step * Q(k + 1)) - beta.values[k]);
    return worst;
}

Q e2eDelayBound(const TandemNetwork& net) {
    Curve c = pmooClosedForm(net);
    if (c.unstable) return Q::infinity();
    return horizontalDeviation(net.flows[net.foiIndex()].alpha.fn, c.fn) + c.delayOffset;
}

Q e2eBacklogBound(const TandemNetwork& net) {
    Curve c = pmooClosedForm(net);
    if (c.unstable) return Q::infinity();
    return verticalDeviation(net.flows[net.foiIndex()].alpha.fn, c.fn);
}

AnalysisReport pmooAnalysis(const TandemNetwork& net, const std::optional<GridSpec>& grid) {
    net.validate();
    requirePmooKinds(net);
    AnalysisReport rep;
    rep.margins = stabilityMargins(net);
    for (const auto& m : rep.margins) {
        if (!m.stable()) {
            rep.unstable = true;
            rep.diagnostics.push_back(m.label + ": aggregate rate " + m.arrivalRate.decimal() +
                                      " is not below service rate " + m.serviceRate.decimal());
        }
    }
    const UppFunction& alpha = net.flows[net.foiIndex()].alpha.fn;
    bool linear = true;
    try {
        pmooClosedFormParams(net);
    } catch (const DomainError&) {
        linear = false;
    }
    const auto& own = net.flows[net.foiIndex()].throttles;
    if (linear) {
        rep.e2e = pmooClosedForm(net);
        rep.diagnostics.push_back("closed form (all curves linear)");
        for (const auto& t : own) rep.e2e.fn = convolve(rep.e2e.fn, t.fn);
        if (!own.empty()) rep.diagnostics.push_back("per-flow throttles folded into the e2e curve");
        if (rep.e2e.unstable) {
            rep.unstable = true;
            rep.diagnostics.push_back("cross traffic leaves no residual rate");
        }
        if (rep.unstable) {
            rep.delayBound = rep.backlogBound = Q::infinity();
            return rep;
        }
        rep.delayBound = horizontalDeviation(alpha, rep.e2e.fn) + rep.e2e.delayOffset;
        rep.backlogBound = verticalDeviation(alpha, rep.e2e.fn);
        return rep;
    }
    if (!own.empty()) throw DomainError("numeric PMOO curve does not take per-flow throttles");
    if (!grid) throw DomainError("network is not linear; a grid step and horizon are needed for the numeric PMOO curve");
    SampledCurve s = pmooCurveNumeric(net, *grid);
    rep.diagnostics.push_back("numeric PMOO curve, step " + grid->step.decimal() + ", horizon " + grid->horizon.decimal());
    rep.e2e.role = Role::Service;
    rep.e2e.kind = ServiceKind::MinPlus;
    rep.e2e.delayOffset = totalOffset(net);
    // step lower bound of the sampled curve on the horizon only
    std::vector<Segment> segs;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        if (s.values[k].isInf()) break;
        Q v = k + 1 < s.values.size() ? s.values[k] : s.values[k];
        segs.push_back({s.step * Q(static_cast<long>(k)), v, Q(0)});
    }
    Q end = s.step * Q(static_cast<long>(segs.size()));
    rep.e2e.fn = UppFunction::finiteThenInfinite(Q(0), segs, end);
    if (rep.unstable) {
        rep.delayBound = rep.backlogBound = Q::infinity();
        return rep;
    }
    rep.delayBound = sampledDelayBound(alpha, s);
    rep.backlogBound = sampledBacklogBound(alpha, s);
    if (rep.delayBound.isInf()) rep.diagnostics.push_back("horizon too short to bound the delay");
    else rep.delayBound += rep.e2e.delayOffset;
    rep.diagnostics.push_back("numeric bounds cover arrivals within the horizon");
    return rep;
}

Q unconventionalDelayBound(const UnconventionalParams& p) {
    if (p.minRate.sign() <= 0) return Q::infinity();
    if (!(p.crossRate < p.serviceRate)) return Q::infinity();
    Q carried = p.crossBurst + p.crossRate * p.latency;
    Q first = p.latency + (carried + p.flowBurst) / (p.serviceRate - p.crossRate);
    Q second = p.latency + p.minLatency + carried / p.minRate;
    return max(first, second);
}

Q unconventionalDelayBound(const TandemNetwork& net) {
    net.validate();
    const int n = net.size();
    const std::size_t foi = net.foiIndex();
    const auto& f1 = net.flows[foi];
    if (!f1.minAlpha) throw DomainError("flow of interest has no minimum arrival curve");
    UnconventionalParams p;
    p.serviceRate = Q::infinity();
    p.latency = 0;
    for (int j = 0; j < n; ++j) {
        Q R, T;
        if (!asRateLatency(net.servers[j], R, T)) throw DomainError("server " + std::to_string(j + 1) + " is not rate-latency");
        p.serviceRate = min(p.serviceRate, R);
        p.latency += T;
    }
    Q r1;
    if (!asTokenBucket(f1.alpha.fn, r1, p.flowBurst)) throw DomainError("flow of interest is not a token bucket");
    std::vector<Q> perServer(n, Q(0));
    p.crossBurst = 0;
    for (std::size_t i = 0; i < net.flows.size(); ++i) {
        if (i == foi) continue;
        Q r, b;
        if (!asTokenBucket(net.flows[i].alpha.fn, r, b)) throw DomainError("flow " + net.flows[i].id + " is not a token bucket");
        p.crossBurst += b;
        for (int j = net.flows[i].first; j <= net.flows[i].last; ++j) perServer[j - 1] += r;
    }
    p.crossRate = *std::max_element(perServer.begin(), perServer.end());
    p.minRate = f1.minAlpha->rate;
    p.minLatency = f1.minAlpha->latency;
    return unconventionalDelayBound(p) + totalOffset(net);
}

Curve groupService(const std::vector<Curve>& servers, const std::vector<FlowSpec>& flows,
                   const std::vector<std::string>& group, std::vector<std::string>* diagnostics, int from, int to) {
    auto inGroup = [&](const FlowSpec& f) { return std::find(group.begin(), group.end(), f.id) != group.end(); };
    std::vector<Curve> arrivals;
    for (const auto& f : flows) arrivals.push_back(f.alpha);
    std::vector<Curve> chain;
    const int n = static_cast<int>(servers.size());
    if (to < 0) to = n;
    for (int j = 1; j <= n; ++j) {
        const Curve& beta = servers[j - 1];
        std::vector<std::size_t> here;
        bool groupHere = false;
        for (std::size_t i = 0; i < flows.size(); ++i) {
            if (!flows[i].crosses(j)) continue;
            here.push_back(i);
            groupHere = groupHere || inGroup(flows[i]);
        }
        auto sumOf = [&](auto pick) {
            UppFunction acc;
            for (std::size_t k : here)
                if (pick(k)) acc = add(acc, arrivals[k].fn);
            return arrivalCurve(acc);
        };
        if (groupHere && j >= from && j <= to) {
            Curve cross = sumOf([&](std::size_t k) { return !inGroup(flows[k]); });
            bool none = std::none_of(here.begin(), here.end(), [&](std::size_t k) { return !inGroup(flows[k]); });
            if (none) {
                chain.push_back(beta);
            } else {
                Curve res = residual(beta, cross);
                if (diagnostics)
                    diagnostics->push_back("server " + std::to_string(j) + ": residual " + kindName(beta.kind) + " -> " +
                                           kindName(res.kind));
                chain.push_back(res);
            }
        }
        std::vector<Curve> next = arrivals;
        for (std::size_t i : here) {
            if (!flows[i].crosses(j + 1)) continue;
            bool alone = here.size() == 1;
            Curve own = alone ? beta : residual(beta, sumOf([&](std::size_t k) { return k != i; }));
            next[i] = outputArrival(arrivals[i], own);
        }
        arrivals = std::move(next);
    }
    if (chain.empty()) throw DomainError("group crosses none of the selected servers");
    return concatenate(chain);
}

AnalysisReport sequentialAnalysis(const TandemNetwork& net) {
    net.validate();
    const int n = net.size();
    for (int j = 0; j < n; ++j) {
        auto k = net.servers[j].kind;
        if (k != ServiceKind::Strict && k != ServiceKind::SubAdditiveMinPlus) {
            Refusal r = residualMinplusUnsafe(net.servers[j], Curve{});
            throw KindError("server " + std::to_string(j + 1) + " (" + kindName(k) + "): " + r.reason, r.witness);
        }
    }
    AnalysisReport rep;
    rep.margins = stabilityMargins(net);
    for (const auto& m : rep.margins) {
        if (!m.stable()) {
            rep.unstable = true;
            rep.diagnostics.push_back(m.label + ": aggregate rate " + m.arrivalRate.decimal() + " is not below service rate " +
                                      m.serviceRate.decimal());
        }
    }
    const auto& foi = net.flows[net.foiIndex()];
    rep.e2e = groupService(net.servers, net.flows, {foi.id}, &rep.diagnostics);
    for (const auto& t : foi.throttles) rep.e2e.fn = convolve(rep.e2e.fn, t.fn);
    if (rep.unstable || rep.e2e.unstable) {
        rep.unstable = true;
        rep.delayBound = rep.backlogBound = Q::infinity();
        return rep;
    }
    rep.delayBound = horizontalDeviation(foi.alpha.fn, rep.e2e.fn) + rep.e2e.delayOffset;
    rep.backlogBound = verticalDeviation(foi.alpha.fn, rep.e2e.fn);
    return rep;
}

TandemNetwork useCaseNetwork(const UseCaseParams& p) {
    if (p.hops < 1) throw DomainError("use case needs at least one hop");
    TandemNetwork net;
    for (int h = 0; h < p.hops; ++h) {
        net.servers.push_back(transmissionDelay(Q(0), p.delay));
        net.servers.push_back(constantRate(p.rate, ServiceKind::Strict));
    }
    int n = 2 * p.hops;
    FlowSpec f1{"1", tokenBucket(p.r1, p.b1), 1, n, MinArrival{p.minRate, p.minLatency}, {}};
    FlowSpec f2{"2", tokenBucket(p.r2, p.b2), 1, n, std::nullopt, {}};
    net.flows = {f1, f2};
    for (int h = 0; h < p.hops; ++h)
        net.flows.push_back({"3." + std::to_string(h + 1), tokenBucket(p.r3, p.b3), 2 * h + 1, 2 * h + 2, std::nullopt, {}});
    net.flowOfInterest = "1";
    return net;
}

Q useCaseDelay(const UseCaseParams& p) { return e2eDelayBound(useCaseNetwork(p)); }

Q useCaseUnconventionalDelay(const UseCaseParams& p) { return unconventionalDelayBound(useCaseNetwork(p)); }

UseCaseParams defaultUseCase() {
    // seconds and Mb
    UseCaseParams p;
    p.hops = 1;
    p.rate = 20;
    p.delay = Q::parse("0.05");
    p.r1 = p.r2 = p.r3 = 5;
    p.b1 = p.b2 = p.b3 = 1;
    p.minRate = 5;
    p.minLatency = Q::parse("0.05");
    return p;
}

std::vector<ComparisonRow> compareTandem(int nMax, const std::vector<Q>& minRates, UseCaseParams base) {
    if (nMax < 1) throw DomainError("n-max must be at least 1");
    const std::size_t perHop = minRates.size();
    std::vector<ComparisonRow> rows(static_cast<std::size_t>(nMax) * perHop);
    // rows land in fixed slots, so the output order does not depend on scheduling
    auto work = [&](int first, int stride) {
        UseCaseParams p = base;
        for (int n = first; n <= nMax; n += stride) {
            p.hops = n;
            Q d = useCaseDelay(p);
            for (std::size_t i = 0; i < perHop; ++i) {
                p.minRate = minRates[i];
                rows[(n - 1) * perHop + i] = {n, minRates[i], d, useCaseUnconventionalDelay(p)};
            }
        }
    };
    int workers = static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
    workers = std::min(workers, nMax);
    std::vector<std::future<void>> tasks;
    for (int w = 1; w <= workers; ++w) tasks.push_back(std::async(std::launch::async, work, w, workers));
    for (auto& t : tasks) t.get();
    return rows;
}

}  // namespace netcalc
