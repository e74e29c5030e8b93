#pragma once
// Tandem networks: PMOO analysis, closed form, sequential analysis and the
// comparison bound built from a minimum arrival curve.

#include "netcalc/curves.hpp"

#include <optional>
#include <string>
#include <vector>

namespace netcalc {

/// Lower arrival envelope r' (t - tau)+.
struct MinArrival {
    Q rate;
    Q latency;
};

struct FlowSpec {
    std::string id;
    Curve alpha;
    int first = 1;  // 1-based, inclusive
    int last = 1;
    std::optional<MinArrival> minAlpha;
    /// Throttles serving this flow alone (per-flow windows); folded into its e2e curve.
    std::vector<Curve> throttles;

    [[nodiscard]] bool crosses(int server) const { return first <= server && server <= last; }
};

struct TandemNetwork {
    std::vector<Curve> servers;
    std::vector<FlowSpec> flows;
    std::string flowOfInterest;

    /// Throws DomainError on bad indices or a missing flow of interest.
    void validate(bool requireFullPath = true) const;
    [[nodiscard]] std::size_t foiIndex() const;
    [[nodiscard]] int size() const { return static_cast<int>(servers.size()); }
};

struct StabilityMargin {
    int server = 0;  // 0 for a per-flow throttle
    std::string label;
    Q arrivalRate;
    Q serviceRate;
    [[nodiscard]] bool stable() const { return arrivalRate < serviceRate; }
    [[nodiscard]] Q margin() const { return serviceRate.isInf() ? Q::infinity() : serviceRate - arrivalRate; }
};

struct AnalysisReport {
    Curve e2e;
    Q delayBound;
    Q backlogBound;
    std::vector<StabilityMargin> margins;
    std::vector<std::string> diagnostics;
    bool unstable = false;
};

/// Per server: total long-run arrival rate of crossing flows against the server's rate.
std::vector<StabilityMargin> stabilityMargins(const TandemNetwork& net);

struct GridSpec {
    Q step;
    Q horizon;
};

struct SampledCurve {
    Q step;
    std::vector<Q> values;  // at 0, step, 2 step, ...
};

/// Lower bound of the PMOO curve on a grid, by exhaustive search over split points.
SampledCurve pmooCurveNumeric(const TandemNetwork& net, const GridSpec& grid, int maxServers = 4);

struct RateLatencyParams {
    Q rate;
    Q latency;
};
bool asTokenBucket(const UppFunction& f, Q& r, Q& b);
/// Rate-latency reading of a server (pure delay servers read as rate +inf).
bool asRateLatency(const Curve& c, Q& R, Q& T);

RateLatencyParams pmooClosedFormParams(const TandemNetwork& net);
Curve pmooClosedForm(const TandemNetwork& net);

/// Delay and backlog bounds of the flow of interest from its PMOO curve.
Q e2eDelayBound(const TandemNetwork& net);
Q e2eBacklogBound(const TandemNetwork& net);
/// Full PMOO report. Uses the closed form when every curve is linear,
/// otherwise the numeric curve on the given grid.
AnalysisReport pmooAnalysis(const TandemNetwork& net, const std::optional<GridSpec>& grid = std::nullopt);

/// Delay bound from a grid lower bound of the service curve; +inf when the horizon is too short.
Q sampledDelayBound(const UppFunction& alpha, const SampledCurve& beta);
Q sampledBacklogBound(const UppFunction& alpha, const SampledCurve& beta);

struct UnconventionalParams {
    Q serviceRate;   // R
    Q latency;       // T
    Q crossRate;     // r of the aggregated cross traffic
    Q crossBurst;    // b of the aggregated cross traffic
    Q flowBurst;     // burst of the flow of interest
    Q minRate;       // r'
    Q minLatency;    // tau
};
/// max(T + (bc + rc T + b)/(R - rc), T + tau + (bc + rc T)/r').
Q unconventionalDelayBound(const UnconventionalParams& p);
/// Same bound on a linear tandem: aggregated curve beta_{min R, sum T}, cross burst
/// sum of bursts, cross rate the largest per-server cross rate.
Q unconventionalDelayBound(const TandemNetwork& net);

/// Service seen by the aggregate of `group` across servers [from, to] (to = -1: last): per-hop residuals
/// against the other flows, whose arrival curves are propagated hop by hop.
Curve groupService(const std::vector<Curve>& servers, const std::vector<FlowSpec>& flows,
                   const std::vector<std::string>& group, std::vector<std::string>* diagnostics = nullptr,
                   int from = 1, int to = -1);

/// Server-by-server analysis with per-hop residuals and output arrival curves.
AnalysisReport sequentialAnalysis(const TandemNetwork& net);

/// Delay servers followed by constant-rate servers, one pair per hop; flow 1 and
/// flow 2 cross everything, one extra flow per hop.
struct UseCaseParams {
    int hops = 1;
    Q rate;          // R
    Q delay;         // T
    Q r1, r2, r3;
    Q b1, b2, b3;
    Q minRate;       // r'_1
    Q minLatency;    // tau_1
};
TandemNetwork useCaseNetwork(const UseCaseParams& p);
/// Closed-form delay of the use case network.
Q useCaseDelay(const UseCaseParams& p);
Q useCaseUnconventionalDelay(const UseCaseParams& p);

struct ComparisonRow {
    int hops;
    Q minRate;
    Q conventional;
    Q unconventional;
};
/// Sweep n = 1..nMax for each r'. Rows ordered by n then by the given r' order.
std::vector<ComparisonRow> compareTandem(int nMax, const std::vector<Q>& minRates, UseCaseParams base);
UseCaseParams defaultUseCase();

}  // namespace netcalc
