#include "netcalc/feedback.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace netcalc {

namespace {

bool nestedOrDisjoint(int a1, int b1, int a2, int b2) {
    if (b1 < a2 || b2 < a1) return true;
    return (a1 <= a2 && b2 <= b1) || (a2 <= a1 && b1 <= b2);
}

bool inScope(const FeedbackTriple& t, const std::string& id) {
    return std::find(t.scope.begin(), t.scope.end(), id) != t.scope.end();
}

std::string range(int a, int b) { return "[" + std::to_string(a) + "," + std::to_string(b) + "]"; }

// Open-loop layout of shared throttles: before server j, throttles starting at j by
// decreasing u, then server j. Positions are 1-based.
struct Layout {
    std::vector<int> serverPos;    // per original server
    std::vector<int> throttlePos;  // per normalized triple
    int size = 0;
};

Layout layout(int n, const std::vector<FeedbackTriple>& triples) {
    Layout L;
    L.serverPos.assign(n, 0);
    L.throttlePos.assign(triples.size(), 0);
    int pos = 0;
    for (int j = 1; j <= n; ++j) {
        std::vector<std::size_t> here;
        for (std::size_t i = 0; i < triples.size(); ++i)
            if (triples[i].s == j) here.push_back(i);
        std::sort(here.begin(), here.end(), [&](std::size_t a, std::size_t b) { return triples[a].u > triples[b].u; });
        for (std::size_t i : here) L.throttlePos[i] = ++pos;
        L.serverPos[j - 1] = ++pos;
    }
    L.size = pos;
    return L;
}

// Remapped path of a flow; empty message when contiguous.
std::string remapPath(const FlowSpec& f, const std::vector<FeedbackTriple>& triples, const Layout& L, int& first,
                      int& last) {
    last = L.serverPos[f.last - 1];
    first = L.serverPos[f.first - 1];
    std::vector<std::pair<int, bool>> atStart;  // throttles at f.first: position, in scope
    for (std::size_t i = 0; i < triples.size(); ++i) {
        const auto& t = triples[i];
        bool in = inScope(t, f.id);
        if (t.s > f.first && t.s <= f.last && !in)
            return "flow " + f.id + " would bypass the throttle of window " + range(t.s, t.u);
        if (t.s == f.first) atStart.emplace_back(L.throttlePos[i], in);
    }
    std::sort(atStart.begin(), atStart.end());
    bool entered = false;
    for (const auto& [p, in] : atStart) {
        if (in && !entered) {
            entered = true;
            first = p;
        } else if (!in && entered) {
            return "flow " + f.id + " would bypass a throttle at server " + std::to_string(f.first);
        }
    }
    return {};
}

UppFunction chainOf(const std::vector<UppFunction>& fs) {
    UppFunction acc = pureDelayFn(Q(0));
    for (const auto& f : fs) acc = convolve(acc, f);
    return acc;
}

Curve asThrottle(UppFunction fn) {
    Curve c;
    c.fn = std::move(fn);
    c.role = Role::Service;
    c.kind = ServiceKind::SubAdditiveMinPlus;
    return c;
}

}  // namespace

void FeedbackNetwork::validate() const {
    base.validate(false);
    const int n = base.size();
    for (const auto& t : triples) {
        if (t.s < 1 || t.u > n || t.s > t.u) throw DomainError("window " + range(t.s, t.u) + " has bad server indices");
        if (t.W.isInf() || t.W.sign() <= 0) throw DomainError("window sizes must be positive");
        for (const auto& id : t.scope) {
            bool known = std::any_of(base.flows.begin(), base.flows.end(), [&](const FlowSpec& f) { return f.id == id; });
            if (!known) throw DomainError("window " + range(t.s, t.u) + " gates unknown flow '" + id + "'");
        }
    }
}

FeedbackNetwork FeedbackNetwork::withScopes() const {
    FeedbackNetwork out = *this;
    for (auto& t : out.triples) {
        if (!t.scope.empty()) continue;
        for (const auto& f : base.flows)
            if (f.first <= t.u && f.last >= t.s) t.scope.push_back(f.id);
    }
    return out;
}

std::vector<FeedbackTriple> normalizeTriples(std::vector<FeedbackTriple> triples) {
    std::stable_sort(triples.begin(), triples.end(), [](const FeedbackTriple& a, const FeedbackTriple& b) {
        if (a.s != b.s) return a.s > b.s;
        if (a.u != b.u) return a.u < b.u;
        return a.W < b.W;
    });
    std::vector<FeedbackTriple> out;
    for (auto& t : triples) {
        if (!out.empty() && out.back().s == t.s && out.back().u == t.u) continue;  // larger W
        out.push_back(std::move(t));
    }
    return out;
}

std::string structureName(StructureKind k) {
    switch (k) {
        case StructureKind::SingleFlow: return "single-flow";
        case StructureKind::PerFlowWindows: return "per-flow-windows";
        case StructureKind::NestedSingleGroup: return "nested";
        case StructureKind::Interleaved: return "interleaved (unsupported)";
        case StructureKind::RuleHViolation: return "rule-H violation";
    }
    return "?";
}

StructureClass classifyStructure(const FeedbackNetwork& input) {
    input.validate();
    const FeedbackNetwork net = input.withScopes();
    const int n = net.base.size();
    const auto& flows = net.base.flows;
    auto triples = normalizeTriples(net.triples);
    StructureClass cls;

    if (flows.size() == 1 && flows[0].first == 1 && flows[0].last == n) {
        cls.kind = StructureKind::SingleFlow;
        return cls;
    }

    bool perFlow = std::all_of(triples.begin(), triples.end(), [&](const FeedbackTriple& t) {
        if (t.scope.size() != 1) return false;
        for (const auto& f : flows)
            if (f.id == t.scope[0]) return f.first <= t.s && t.u <= f.last;
        return false;
    });
    if (perFlow) {
        cls.kind = StructureKind::PerFlowWindows;
        return cls;
    }

    std::set<std::string> controlled;
    for (const auto& t : triples) controlled.insert(t.scope.begin(), t.scope.end());
    for (std::size_t i = 0; i < triples.size(); ++i) {
        const auto& t = triples[i];
        for (const auto& f : flows) {
            if (controlled.count(f.id) || f.last < t.s || f.first > t.u) continue;
            if (f.first > t.s || f.last < t.u) {
                cls.kind = StructureKind::RuleHViolation;
                cls.triple = static_cast<int>(i);
                cls.flow = f.id;
                cls.witness = "uncontrolled flow " + f.id + " " + (f.first > t.s ? "enters" : "leaves") +
                              " the window over servers " + range(t.s, t.u) + " at server " +
                              std::to_string(f.first > t.s ? f.first : f.last) +
                              "; the window is not driven by the flows entering the loop";
                return cls;
            }
        }
        for (const auto& id : t.scope) {
            const auto& f = *std::find_if(flows.begin(), flows.end(), [&](const FlowSpec& x) { return x.id == id; });
            if (f.first > t.s || f.last < t.u) {
                cls.kind = StructureKind::RuleHViolation;
                cls.triple = static_cast<int>(i);
                cls.flow = f.id;
                cls.witness = "gated flow " + f.id + " path " + range(f.first, f.last) + " does not cover the window " +
                              range(t.s, t.u);
                return cls;
            }
        }
    }

    cls.kind = StructureKind::Interleaved;
    for (std::size_t a = 0; a < flows.size(); ++a)
        for (std::size_t b = a + 1; b < flows.size(); ++b)
            if (!nestedOrDisjoint(flows[a].first, flows[a].last, flows[b].first, flows[b].last)) {
                cls.witness = "flows " + flows[a].id + " and " + flows[b].id + " overlap without nesting";
                return cls;
            }
    for (std::size_t a = 0; a < triples.size(); ++a)
        for (std::size_t b = a + 1; b < triples.size(); ++b)
            if (!nestedOrDisjoint(triples[a].s, triples[a].u, triples[b].s, triples[b].u)) {
                cls.triple = static_cast<int>(a);
                cls.witness = "windows " + range(triples[a].s, triples[a].u) + " and " + range(triples[b].s, triples[b].u) +
                              " overlap without nesting";
                return cls;
            }
    Layout L = layout(n, triples);
    for (const auto& f : flows) {
        int first, last;
        std::string why = remapPath(f, triples, L, first, last);
        if (!why.empty()) {
            cls.witness = why;
            return cls;
        }
    }
    cls.kind = StructureKind::NestedSingleGroup;
    return cls;
}

ThrottleResult throttleCurveDetailed(const Curve& inner, const Q& W) {
    if (!inner.isService()) throw KindError("throttle needs a service curve inside the loop");
    if (W.isInf() || W.sign() <= 0) throw DomainError("window must be positive");
    UppFunction loop = inner.fn;
    if (inner.delayOffset.sign() > 0) loop = convolve(loop, pureDelayFn(inner.delayOffset));
    ClosureResult cr = subadditiveClosureDetailed(convolve(loop, windowFn(W)));
    return {asThrottle(std::move(cr.fn)), cr.approximate};
}

Curve throttleCurve(const Curve& inner, const Q& W) { return throttleCurveDetailed(inner, W).curve; }

Curve throttleLowerBound(const Q& R, const Q& T, const Q& W) {
    if (R.sign() <= 0 || T.sign() <= 0 || W.sign() <= 0) throw DomainError("throttle bound needs R, T, W > 0");
    return asThrottle(wfcFn(W, min(R, W / T), T));
}

OpenLoopResult openLoopTransform(const FeedbackNetwork& input) {
    const FeedbackNetwork net = input.withScopes();
    OpenLoopResult out;
    out.structure = classifyStructure(net);
    if (!out.structure.supported())
        throw StructureError("no open-loop equivalent: " + structureName(out.structure.kind) +
                                 (out.structure.witness.empty() ? "" : " (" + out.structure.witness + ")"),
                             out.structure);
    out.triples = normalizeTriples(net.triples);
    const auto& triples = out.triples;
    const int n = net.base.size();
    out.throttles.resize(triples.size());
    auto note = [&](std::size_t i, bool approx) {
        out.diagnostics.push_back("window " + range(triples[i].s, triples[i].u) +
                                  (approx ? ": closure cap hit, using the rate-latency lower bound" : ": exact closure"));
    };

    if (out.structure.kind == StructureKind::PerFlowWindows) {
        out.network = net.base;
        for (std::size_t i = 0; i < triples.size(); ++i) {
            const auto& t = triples[i];
            Curve inner = groupService(net.base.servers, net.base.flows, t.scope, nullptr, t.s, t.u);
            std::vector<UppFunction> parts{inner.fn};
            for (std::size_t j = 0; j < i; ++j)
                if (triples[j].scope == t.scope && t.s < triples[j].s && triples[j].s <= t.u)
                    parts.push_back(out.throttles[j].fn);
            Curve loop = inner;
            loop.fn = chainOf(parts);
            ThrottleResult r = throttleCurveDetailed(loop, t.W);
            out.throttles[i] = r.curve;
            note(i, r.approximate);
            for (auto& f : out.network.flows)
                if (f.id == t.scope[0]) f.throttles.push_back(r.curve);
        }
        return out;
    }

    Layout L = layout(n, triples);
    std::vector<Curve> servers(L.size);
    for (int j = 0; j < n; ++j) servers[L.serverPos[j] - 1] = net.base.servers[j];
    for (std::size_t i = 0; i < triples.size(); ++i) servers[L.throttlePos[i] - 1] = asThrottle(pureDelayFn(Q(0)));
    std::vector<FlowSpec> flows = net.base.flows;
    for (auto& f : flows) {
        int first, last;
        std::string why = remapPath(f, triples, L, first, last);
        if (!why.empty()) throw StructureError(why, out.structure);
        f.first = first;
        f.last = last;
    }

    for (std::size_t i = 0; i < triples.size(); ++i) {
        const auto& t = triples[i];
        Curve inner;
        if (out.structure.kind == StructureKind::SingleFlow) {
            std::vector<UppFunction> parts;
            Q offset = 0;
            for (int j = t.s; j <= t.u; ++j) {
                parts.push_back(net.base.servers[j - 1].fn);
                offset += net.base.servers[j - 1].delayOffset;
            }
            for (std::size_t j = 0; j < i; ++j)
                if (t.s < triples[j].s && triples[j].s <= t.u) parts.push_back(out.throttles[j].fn);
            inner = serviceCurve(chainOf(parts), ServiceKind::MinPlus);
            inner.delayOffset = offset;
        } else {
            std::vector<std::string> ds;
            inner = groupService(servers, flows, t.scope, &ds, L.throttlePos[i] + 1, L.serverPos[t.u - 1]);
        }
        ThrottleResult r = throttleCurveDetailed(inner, t.W);
        out.throttles[i] = r.curve;
        servers[L.throttlePos[i] - 1] = r.curve;
        note(i, r.approximate);
    }
    out.network.servers = std::move(servers);
    out.network.flows = std::move(flows);
    out.network.flowOfInterest = net.base.flowOfInterest;
    return out;
}

StabilityReport stabilityCheck(const TandemNetwork& net) {
    StabilityReport r;
    if (net.servers.empty()) return r;
    r.margins = stabilityMargins(net);
    r.stable = std::all_of(r.margins.begin(), r.margins.end(), [](const StabilityMargin& m) { return m.stable(); });
    return r;
}

StabilityReport stabilityCheck(const FeedbackNetwork& net) { return stabilityCheck(openLoopTransform(net).network); }

Q InstabilityWitness::backlogLowerBound(const Q& t) const {
    return pos(gatedArrival.eval(t) - uncontrolledArrival.eval(t) - window);
}

InstabilityWitness instabilityWitness(const FeedbackNetwork& input) {
    const FeedbackNetwork net = input.withScopes();
    StructureClass cls = classifyStructure(net);
    if (cls.kind != StructureKind::RuleHViolation)
        throw DomainError("instability witness needs a rule-H violation, got " + structureName(cls.kind));
    auto triples = normalizeTriples(net.triples);
    const auto& t = triples[cls.triple];
    const auto& flows = net.base.flows;
    auto find = [&](const std::string& id) -> const FlowSpec& {
        return *std::find_if(flows.begin(), flows.end(), [&](const FlowSpec& f) { return f.id == id; });
    };
    const FlowSpec& other = find(cls.flow);
    if (inScope(t, other.id)) throw DomainError("instability witness needs an uncontrolled flow inside the window");

    InstabilityWitness w;
    w.window = t.W;
    w.uncontrolledFlow = other.id;
    UppFunction gated;
    for (const auto& id : t.scope) {
        gated = add(gated, find(id).alpha.fn);
        w.gatedFlows += (w.gatedFlows.empty() ? "" : ",") + id;
    }
    Q r1, b1, r2, b2;
    if (!asTokenBucket(gated, r1, b1) || !asTokenBucket(other.alpha.fn, r2, b2))
        throw DomainError("instability witness needs token-bucket flows");
    w.gatedArrival = gated;
    w.uncontrolledArrival = other.alpha.fn;

    std::vector<Curve> path;
    for (int j = std::max(other.first, t.s); j <= std::min(other.last, t.u); ++j) path.push_back(net.base.servers[j - 1]);
    Curve beta2 = concatenate(path);

    w.growthRate = pos(r1 - r2);
    w.hasGrowth = r1 > r2;
    if (w.hasGrowth) {
        w.onset = (b1 - t.W - b2) / (r1 - r2);
        w.lines.push_back("(a) backlog before the window grows at rate >= " + w.growthRate.decimal() +
                          "; displayed bound abscissa " + w.onset.decimal());
    } else {
        w.lines.push_back("(a) no growth witness: gated rate " + r1.decimal() + " <= uncontrolled rate " + r2.decimal());
    }
    w.uncontrolledBacklog = verticalDeviation(other.alpha.fn, beta2.fn);
    w.exceedsWindow = w.uncontrolledBacklog > t.W;
    w.lines.push_back("(b) uncontrolled flow " + other.id + " backlog bound " + w.uncontrolledBacklog.decimal() +
                      (w.exceedsWindow ? " > " : " <= ") + "W = " + t.W.decimal());
    return w;
}

}  // namespace netcalc
