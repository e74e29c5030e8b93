#pragma once
// Window flow control: throttle curves, structure classification, open-loop
// transformation, stability and instability witnesses.

#include "netcalc/tandem.hpp"

#include <string>
#include <vector>

namespace netcalc {

struct FeedbackTriple {
    int s = 1;  // first server inside the loop (1-based)
    int u = 1;  // last server inside the loop
    Q W;
    /// Flow ids gated (and counted) by this window; empty means every flow
    /// crossing one of its servers.
    std::vector<std::string> scope;
};

struct FeedbackNetwork {
    TandemNetwork base;
    std::vector<FeedbackTriple> triples;

    /// Bad indices, W <= 0 or unknown scope ids throw DomainError.
    void validate() const;
    /// Copy with empty scopes filled in.
    [[nodiscard]] FeedbackNetwork withScopes() const;
};

/// Sorted by decreasing s, then increasing u; duplicates on (s, u) keep the smallest W.
std::vector<FeedbackTriple> normalizeTriples(std::vector<FeedbackTriple> triples);

enum class StructureKind { SingleFlow, PerFlowWindows, NestedSingleGroup, Interleaved, RuleHViolation };
std::string structureName(StructureKind k);

struct StructureClass {
    StructureKind kind = StructureKind::SingleFlow;
    int triple = -1;   // index into the normalized triple list, when relevant
    std::string flow;  // offending flow for RuleHViolation
    std::string witness;

    [[nodiscard]] bool supported() const {
        return kind == StructureKind::SingleFlow || kind == StructureKind::PerFlowWindows ||
               kind == StructureKind::NestedSingleGroup;
    }
};

StructureClass classifyStructure(const FeedbackNetwork& net);

struct ThrottleResult {
    Curve curve;
    bool approximate = false;
};
/// (inner * phi_W)*, tagged sub-additive. On closure cap hit falls back to the
/// rate-latency lower bound when it applies.
ThrottleResult throttleCurveDetailed(const Curve& inner, const Q& W);
Curve throttleCurve(const Curve& inner, const Q& W);
/// 0 at 0, W + min(R, W/T) (t - T)+ after.
Curve throttleLowerBound(const Q& R, const Q& T, const Q& W);

/// Raised for structures without an open-loop equivalent.
class StructureError : public std::runtime_error {
public:
    StructureError(const std::string& what, StructureClass cls) : std::runtime_error(what), cls_(std::move(cls)) {}
    [[nodiscard]] const StructureClass& classification() const { return cls_; }

private:
    StructureClass cls_;
};

struct OpenLoopResult {
    TandemNetwork network;
    StructureClass structure;
    /// Throttle curve per normalized triple.
    std::vector<Curve> throttles;
    std::vector<FeedbackTriple> triples;
    std::vector<std::string> diagnostics;
};
/// Open-loop equivalent. Shared throttles are inserted as servers before their first
/// server (larger u first); per-flow windows become throttles of their flow.
OpenLoopResult openLoopTransform(const FeedbackNetwork& net);

struct StabilityReport {
    std::vector<StabilityMargin> margins;
    bool stable = true;
};
StabilityReport stabilityCheck(const TandemNetwork& net);
/// Checked on the open-loop equivalent.
StabilityReport stabilityCheck(const FeedbackNetwork& net);

struct InstabilityWitness {
    /// (a): lower bound on the rate at which data accumulates before the window; 0 if none.
    Q growthRate;
    /// Abscissa (b1 - W - b2)/(r1 - r2) of the displayed bound; meaningful when growthRate > 0.
    Q onset;
    bool hasGrowth = false;
    /// (b): backlog bound of the uncontrolled flow in its servers, against W.
    Q uncontrolledBacklog;
    Q window;
    bool exceedsWindow = false;
    std::string gatedFlows;
    std::string uncontrolledFlow;
    std::vector<std::string> lines;

    /// (A1 - A1')(t) >= (alpha1(t) - alpha2(t) - W)+ for greedy sources.
    [[nodiscard]] Q backlogLowerBound(const Q& t) const;
    UppFunction gatedArrival;
    UppFunction uncontrolledArrival;
};
InstabilityWitness instabilityWitness(const FeedbackNetwork& net);

}  // namespace netcalc
