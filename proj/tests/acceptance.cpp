// Acceptance checks, one PASS/FAIL line per criterion.
// usage: netcalc_acceptance CLI_BINARY NETWORK_DIR
#include "netcalc/feedback.hpp"
#include "netcalc/netfile.hpp"
#include "netcalc/tandem.hpp"
#include "netcalc/trajectory.hpp"
#include "support.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace netcalc;
using nctest::Rng;

namespace {

std::string g_cli, g_nets;

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects the first few failures of a criterion.
struct Check {
    Outcome out;
    int failures = 0;
    void require(bool ok, const std::string& what) {
        if (ok) return;
        out.pass = false;
        if (failures++ < 3) out.detail += (out.detail.empty() ? "" : "; ") + what;
    }
};

struct Run {
    int status = -1;
    std::string output;
};

Run runCli(const std::string& args) {
    Run r;
    std::string cmd = "'" + g_cli + "' " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

// ---- 1 ----------------------------------------------------------------------

Outcome closedForms() {
    Check c;
    struct P {
        Q R1, T1, R2, T2, r, b;
    };
    std::vector<P> cases = {{3, 1, 2, Q(1, 2), 1, 2},         {Q(5, 2), 0, 7, 3, Q(5, 2), 0},
                            {20, Q(1, 20), 10, Q(3, 10), 5, 1}, {1, 1, 1, 1, Q(1, 3), Q(7, 4)}};
    for (const auto& p : cases) {
        auto conc = convolve(rateLatencyFn(p.R1, p.T1), rateLatencyFn(p.R2, p.T2));
        c.require(conc == rateLatencyFn(min(p.R1, p.R2), p.T1 + p.T2), "concatenation");
        auto cat = concatenate({rateLatency(p.R1, p.T1), rateLatency(p.R2, p.T2)});
        c.require(cat.fn == rateLatencyFn(min(p.R1, p.R2), p.T1 + p.T2), "concatenate()");
        auto out = outputArrival(tokenBucket(p.r, p.b), rateLatency(p.R1, p.T1));
        c.require(out.fn == tokenBucketFn(p.r, p.b + p.r * p.T1), "output curve");
        c.require(verticalDeviation(tokenBucketFn(p.r, p.b), rateLatencyFn(p.R1, p.T1)) == p.b + p.r * p.T1, "backlog");
        c.require(horizontalDeviation(tokenBucketFn(p.r, p.b), rateLatencyFn(p.R1, p.T1)) == p.T1 + p.b / p.R1, "delay");
    }
    c.require(verticalDeviation(tokenBucketFn(3, 1), rateLatencyFn(2, 1)).isInf(), "r > R backlog");
    c.require(horizontalDeviation(tokenBucketFn(3, 1), rateLatencyFn(2, 1)).isInf(), "r > R delay");
    if (c.out.pass) c.out.detail = std::to_string(cases.size()) + " parameter sets";
    return c.out;
}

// ---- 2 ----------------------------------------------------------------------

// Common grid step for the breakpoints of f, or nothing when f does not fit in 128 points.
std::optional<Q> fittingStep(const UppFunction& f) {
    if (f.eventuallyInfinite() || f.isTop()) return std::nullopt;
    mpz_class den = 1;
    auto use = [&](const Q& x) { den = lcm(den, mpz_class(x.raw().get_den())); };
    use(f.rank());
    use(f.period());
    for (const auto& s : f.segments()) use(s.start);
    Q step(mpq_class(mpz_class(1), den));
    if ((f.rank() + f.period()) / step > Q(31)) return std::nullopt;
    return step;
}

UppFunction scaled(const UppFunction& f, const Q& step) {
    // same function with time measured in grid steps
    std::vector<Segment> segs;
    for (const auto& s : f.segments()) segs.push_back({s.start / step, s.valueAtStartRight, s.slope * step});
    return UppFunction::periodic(f.valueAtZero(), segs, f.rank() / step, f.period() / step, f.increment());
}

Outcome subadditivity() {
    Check c;
    Rng rng(2024);
    int tested = 0, positive = 0, attempts = 0;
    while (tested < 500 && attempts < 5000) {
        ++attempts;
        UppFunction f;
        switch (attempts % 6) {
            case 0: f = nctest::randomConcave(rng); break;
            case 1: f = subadditiveClosure(nctest::randomUpp(rng, 12)); break;
            case 2: f = wfcFn(rng.frac(0, 4, 2), rng.frac(0, 3, 2), rng.frac(0, 3, 1)); break;
            case 3: f = minimum(nctest::randomConcave(rng), nctest::randomUpp(rng, 16)); break;
            default: f = nctest::randomUpp(rng, 24); break;
        }
        auto step = fittingStep(f);
        if (!step) continue;
        bool direct = nctest::sampledSubadditive(scaled(f, *step), 63);
        bool viaDeconv = isSubadditive(f);
        c.require(direct == viaDeconv, "disagreement on " + f.toText());
        ++tested;
        positive += direct;
    }
    c.require(tested == 500, "only " + std::to_string(tested) + " functions fitted the grid");
    c.require(positive > 50 && positive < 450, "unbalanced sample: " + std::to_string(positive) + " sub-additive");
    // wfc boundary, W = RT included
    std::vector<std::pair<Q, Q>> rt = {{1, 1}, {Q(3, 2), 2}, {20, Q(1, 20)}, {Q(7, 3), Q(5, 4)}};
    for (const auto& [R, T] : rt) {
        for (const Q& dW : {Q(-1, 1000), Q(0), Q(1, 1000), Q(1)}) {
            Q W = R * T + dW;
            bool expect = W >= R * T;
            c.require(isSubadditive(wfcFn(W, R, T)) == expect, "wfc W=" + W.str());
            c.require((wfcCurve(W, R, T).kind == ServiceKind::SubAdditiveMinPlus) == expect, "wfc kind W=" + W.str());
        }
    }
    if (c.out.pass)
        c.out.detail = std::to_string(tested) + " functions (" + std::to_string(positive) + " sub-additive), wfc boundary";
    return c.out;
}

// ---- 3 ----------------------------------------------------------------------

Outcome closures() {
    Check c;
    Rng rng(77);
    const Q dt(1, 16);
    int staircases = 0;
    for (int i = 0; i < 100; ++i) {
        Q R = rng.frac(1, 4, 4);
        Q T = Q(rng.integer(1, 24), 16);
        Q W = R * Q(rng.integer(1, 40), 16);
        auto inner = convolve(rateLatencyFn(R, T), windowFn(W));
        auto exact = subadditiveClosure(inner);
        Q period = max(exact.period(), T);
        Q horizon = exact.rank() + Q(8) * period;
        auto oracle = closureOracle(sample(inner, dt, horizon));
        auto grid = sample(exact, dt, horizon);
        std::string tag = "R=" + R.str() + " T=" + T.str() + " W=" + W.str();
        c.require(grid.values == oracle.values, "grid mismatch " + tag);
        c.require(lessOrEqual(throttleLowerBound(R, T, W).fn, exact), "lower bound above closure " + tag);
        c.require(exact == throttleCurve(rateLatency(R, T), W).fn, "throttle curve differs " + tag);
        staircases += R * T > W;
    }
    if (c.out.pass) c.out.detail = "100 inputs, " + std::to_string(staircases) + " with R T > W";
    return c.out;
}

// ---- 4 ----------------------------------------------------------------------

UppFunction randomSubadditiveService(Rng& rng) {
    switch (rng.integer(0, 3)) {
        case 0: return constantRateFn(rng.frac(1, 3, 4));
        case 1: {
            Q R = rng.frac(1, 3, 4), T = rng.frac(0, 2, 4);
            return wfcFn(R * T + rng.frac(0, 2, 4), R, T);
        }
        case 2: return subadditiveClosure(convolve(rateLatencyFn(rng.frac(1, 3, 4), rng.frac(1, 2, 4)), windowFn(rng.frac(1, 3, 4))));
        default: {
            // concave service: min of two token-bucket shaped pieces through 0
            auto f = minimum(constantRateFn(rng.frac(2, 4, 4)), UppFunction::affine(Q(0), rng.frac(0, 2, 4), rng.frac(1, 2, 4)));
            return f;
        }
    }
}

GridTrajectory randomFlow(Rng& rng, const UppFunction& alpha, const Q& step, std::size_t n) {
    switch (rng.integer(0, 2)) {
        case 0: return sample(alpha, step, step * Q(static_cast<long>(n - 1)));  // greedy
        case 1: {
            // silent for a while, then greedy from the last-silent instant
            std::size_t start = static_cast<std::size_t>(rng.integer(1, static_cast<long>(n / 2)));
            auto g = sample(alpha, step, step * Q(static_cast<long>(n - 1)));
            GridTrajectory a{step, std::vector<Q>(n, Q(0))};
            for (std::size_t k = start + 1; k < n; ++k) a.values[k] = g.values[k - start];
            return a;
        }
        default: return nctest::randomTrajectory(rng, alpha, step, n);
    }
}

Outcome residualSoundness() {
    Check c;
    Rng rng(4242);
    const Q dt(1, 4), H(16);
    const std::size_t n = 65;
    int checkedPoints = 0;
    for (int i = 0; i < 200; ++i) {
        auto beta = randomSubadditiveService(rng);
        if (!isSubadditive(beta)) {
            c.require(false, "generator produced a non-sub-additive service");
            continue;
        }
        Q rate = beta.longRunRate();
        auto alpha2 = tokenBucketFn(rate * rng.frac(0, 1, 8) * Q(7, 8), rng.frac(0, 3, 4));
        auto alpha1 = tokenBucketFn(rng.frac(0, 2, 4), rng.frac(0, 4, 4));
        auto A2 = sample(alpha2, dt, H);  // greedy cross traffic
        auto A1 = randomFlow(rng, alpha1, dt, n);
        auto run = simulatePriorityStarvation(A1, A2, beta);
        auto bound = convOracle(A1, sample(monus(beta, alpha2), dt, H));
        auto libBound = convOracle(A1, sample(residualSubadditive(serviceCurve(beta, ServiceKind::SubAdditiveMinPlus),
                                                                  arrivalCurve(alpha2)).fn,
                                              dt, H));
        for (std::size_t k = 0; k < n; ++k) {
            c.require(run.d1.values[k] >= bound.values[k], "violation at scenario " + std::to_string(i) + " t=" +
                                                                run.d1.time(k).str());
            c.require(run.d1.values[k] >= libBound.values[k], "library residual violated");
            ++checkedPoints;
        }
    }
    // counter-suite: rate-latency service is not sub-additive and starves flow 1
    int starved = 0;
    for (int i = 0; i < 200; ++i) {
        Q R = rng.frac(1, 3, 4), T = rng.frac(1, 2, 4);
        auto beta = rateLatencyFn(R, T);
        auto alpha2 = tokenBucketFn(R * (Q(1, 2) + rng.frac(0, 1, 8) / Q(2)), rng.frac(1, 3, 4));
        auto A2 = sample(alpha2, dt, H);
        auto A1 = randomFlow(rng, tokenBucketFn(rng.frac(1, 2, 4), rng.frac(1, 3, 4)), dt, n);
        auto run = simulatePriorityStarvation(A1, A2, beta);
        bool zero = std::all_of(run.d1.values.begin(), run.d1.values.end(), [](const Q& v) { return v.isZero(); });
        starved += zero && A1.values.back() > Q(0);
    }
    // starvation instance: beta_{1,1}, alpha2 = gamma_{1,1}
    auto fixed = simulatePriorityStarvation(sample(tokenBucketFn(1, 1), dt, H), sample(tokenBucketFn(1, 1), dt, H),
                                            rateLatencyFn(1, 1));
    bool fixedStarved =
        std::all_of(fixed.d1.values.begin(), fixed.d1.values.end(), [](const Q& v) { return v.isZero(); });
    c.require(fixedStarved, "beta_{1,1} instance not starved");
    c.require(starved > 0, "counter-suite never starved flow 1");
    if (c.out.pass)
        c.out.detail = "200 scenarios, " + std::to_string(checkedPoints) + " grid points, 0 violations; counter-suite starved " +
                       std::to_string(starved) + "/200";
    return c.out;
}

// ---- 5 ----------------------------------------------------------------------

Outcome comparison() {
    Check c;
    Run r = runCli("compare-tandem --exact");
    c.require(r.status == 0, "compare-tandem exit " + std::to_string(r.status));
    auto lines = split(r.output, '\n');
    c.require(!lines.empty() && lines[0] == "n,r_prime,D_conventional,D_unconventional", "header");
    std::vector<ComparisonRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split(lines[i], ',');
        if (f.size() != 4) {
            c.require(false, "bad row " + lines[i]);
            continue;
        }
        rows.push_back({std::stoi(f[0]), Q::parse(f[1]), Q::parse(f[2]), Q::parse(f[3])});
    }
    c.require(rows.size() == 100, std::to_string(rows.size()) + " rows");
    auto lib = compareTandem(20, {Q(1, 2), Q(5, 4), Q(5, 2), Q(15, 4), Q(5)}, defaultUseCase());
    for (std::size_t i = 0; i < rows.size() && i < lib.size(); ++i) {
        const auto& row = rows[i];
        c.require(row.unconventional >= row.conventional, "D_nc < D at row " + std::to_string(i + 1));
        c.require(row.conventional == lib[i].conventional && row.unconventional == lib[i].unconventional,
                  "CLI and library disagree at row " + std::to_string(i + 1));
        if (i >= 5) c.require(row.conventional > rows[i - 5].conventional, "D not increasing in n");
        if (i % 5) {
            c.require(row.conventional == rows[i - 1].conventional, "D depends on r'");
            c.require(row.unconventional <= rows[i - 1].unconventional, "D_nc not worse for smaller r'");
        }
    }
    bool d1 = rows.size() >= 5;
    for (std::size_t i = 0; i < 5 && i < rows.size(); ++i) d1 = d1 && rows[i].hops == 1 && rows[i].conventional == Q(2, 5);
    c.require(d1, "D(1, .) != 2/5");
    c.require(rows.size() >= 5 && rows[4].minRate == Q(5) && rows[4].unconventional == Q(3, 5), "D_nc(1, 5) != 3/5");
    // cross-check on constructed curves: gamma_{5,1} against beta_{10, 0.3}
    Q viaCurves = horizontalDeviation(tokenBucketFn(5, 1), rateLatencyFn(10, Q(3, 10)));
    c.require(viaCurves == Q(2, 5), "horizontal deviation cross-check");
    // the first term of D_nc is D: aggregated cross gamma_{2, 10} over beta_{20, 0.05}
    Q first = Q(1, 20) + (Q(2) + Q(10) * Q(1, 20) + Q(1)) / Q(10);
    c.require(first == Q(2, 5), "first term of D_nc");
    Q second = Q(1, 20) + Q(1, 20) + (Q(2) + Q(10) * Q(1, 20)) / Q(5);
    c.require(second == Q(3, 5), "second term of D_nc");
    if (c.out.pass) c.out.detail = "100 rows, D(1)=2/5, D_nc(1,5)=3/5";
    return c.out;
}

// ---- 6 ----------------------------------------------------------------------

Outcome feedbackEquivalence() {
    Check c;
    Rng rng(606);
    const Q dt(1, 4), H(12);
    const std::size_t n = 49;
    int stable = 0;
    for (int i = 0; i < 50; ++i) {
        FeedbackNetwork net;
        int servers = static_cast<int>(rng.integer(1, 2));
        for (int j = 0; j < servers; ++j) net.base.servers.push_back(rateLatency(rng.frac(1, 3, 4), rng.frac(1, 3, 4)));
        Q r = rng.frac(0, 2, 4), b = rng.frac(0, 3, 4);
        net.base.flows = {{"f", tokenBucket(r, b), 1, servers, std::nullopt, {}}};
        net.base.flowOfInterest = "f";
        Q W = rng.frac(1, 4, 4);
        net.triples = {{1, servers, W, {}}};
        auto ol = openLoopTransform(net);
        c.require(ol.structure.kind == StructureKind::SingleFlow, "not single-flow");
        const auto& psi = ol.throttles.at(0);
        auto loop = concatenate(net.base.servers).fn;
        auto A = randomFlow(rng, tokenBucketFn(r, b), dt, n);
        auto run = simulateWindowLoop(A, loop, W);
        auto bound = convOracle(A, sample(psi.fn, dt, H));
        for (std::size_t k = 0; k < n; ++k)
            c.require(run.gated.values[k] >= bound.values[k], "A' < A * Psi at instance " + std::to_string(i));
        if (r < psi.fn.longRunRate()) {
            ++stable;
            c.require(outputArrival(tokenBucket(r, b), psi).fn == tokenBucketFn(r, b),
                      "output of the throttle changed at instance " + std::to_string(i));
        }
    }
    c.require(stable > 0, "no stable instance");
    if (c.out.pass) c.out.detail = "50 instances, invariance on " + std::to_string(stable) + " stable ones";
    return c.out;
}

// ---- 7 ----------------------------------------------------------------------

Outcome refusals() {
    Check c;
    NetFile cex = loadNetFile(g_nets + "/net-cex.net");
    auto cls = classifyStructure(cex.network);
    c.require(cls.kind == StructureKind::RuleHViolation, "net-cex not rule-H");
    auto w = instabilityWitness(cex.network);
    // the file is in Mb and s: r1 = 2, b1 = 5, r2 = 1, b2 = 1, W = 1 (Mb units)
    const Q mb = dataUnit("Mb");
    Q r1 = 2 * mb, b1 = 5 * mb, r2 = mb, b2 = mb, W = mb;
    c.require(w.hasGrowth && w.growthRate == r1 - r2, "growth rate " + w.growthRate.str());
    c.require(w.onset == (b1 - W - b2) / (r1 - r2), "onset " + w.onset.str());
    c.require(w.onset == Q(3), "onset is not 3 s");
    // grid simulation of A1' = A1 ^ (D2 + W) with greedy sources, in Mb
    const Q dt(1, 4), H(40);
    auto run = simulateRuleHCounterexample(sample(tokenBucketFn(2, 5), dt, H), sample(tokenBucketFn(1, 1), dt, H),
                                           rateLatencyFn(2, 1), 1);
    const auto& bl = run.backlog.values;
    for (std::size_t k = 0; k < bl.size(); ++k) {
        Q t = run.backlog.time(k);
        Q lower = w.backlogLowerBound(t) / mb;
        c.require(bl[k] >= lower, "backlog below the witness bound at t=" + t.str());
    }
    std::size_t half = bl.size() / 2;
    Q slope = (bl.back() - bl[half]) / (run.backlog.time(bl.size() - 1) - run.backlog.time(half));
    c.require(slope == Q(1), "backlog slope " + slope.str() + " on the second half");
    c.require(bl.back() > Q(30), "backlog did not grow past 30 Mb");
    Run cexCli = runCli("analyze '" + g_nets + "/net-cex.net'");
    c.require(cexCli.status == 2, "net-cex exit " + std::to_string(cexCli.status));

    NetFile inter = loadNetFile(g_nets + "/interleave.net");
    auto ic = classifyStructure(inter.network);
    c.require(ic.kind == StructureKind::Interleaved && !ic.supported(), "interleave not refused");
    bool threw = false;
    try {
        openLoopTransform(inter.network);
    } catch (const StructureError& e) {
        threw = e.classification().kind == StructureKind::Interleaved;
    }
    c.require(threw, "open-loop transform accepted the interleaved network");
    for (const char* fmt : {"text", "csv"}) {
        Run ir = runCli("analyze '" + g_nets + "/interleave.net' --format " + fmt);
        c.require(ir.status == 2, std::string("interleave exit ") + std::to_string(ir.status));
        c.require(ir.output.find("delay") == std::string::npos, "interleave output mentions a delay");
    }
    if (c.out.pass) c.out.detail = "rule-H growth 1 Mbps from t=3 s, slope 1 on the grid; interleaved exit 2";
    return c.out;
}

// ---- 8 ----------------------------------------------------------------------

Outcome weakStrict() {
    Check c;
    // arrivals: 2 at 0+, then +1 at 1, 5/2, 4, ...; service lambda_1
    auto alpha = UppFunction::periodic(Q(0), {{Q(0), Q(2), Q(0)}, {Q(1), Q(3), Q(0)}}, Q(1), Q(3, 2), Q(1));
    auto beta = constantRateFn(1);
    // alpha = 4 on (5/2, 4] touches t at 4, so the first backlogged interval ends at tau = 4
    const Q halfTau(2);
    int runs = 0;
    bool aligned = false, unaligned = false;
    for (const Q& dt : {Q(1, 4), Q(1, 3), Q(3, 8)}) {
        for (long offset : {0L, 1L}) {
            auto w = simulateWeakVsMinplus(alpha, beta, dt, Q(8), offset);
            long tau = 0;
            while (tau + 1 < static_cast<long>(w.arrival.size()) && w.arrival.values[tau + 1] > beta.eval(w.arrival.time(tau + 1)))
                ++tau;
            ++runs;
            (w.arrival.time(w.emptyAt) == halfTau ? aligned : unaligned) = true;
            std::string tag = "dt=" + dt.str() + " offset=" + std::to_string(offset);
            c.require(w.witness > w.emptyAt && w.witness <= tau, "no witness in (tau/2, tau] " + tag);
            if (w.witness > 0) c.require(w.minPlus.values[w.witness] < w.weakStrict.values[w.witness], "witness not strict " + tag);
        }
    }
    c.require(aligned && unaligned, "did not cover aligned and unaligned tau/2");
    if (c.out.pass) c.out.detail = std::to_string(runs) + " runs, D_mp < D_ws in each";
    return c.out;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: netcalc_acceptance CLI_BINARY NETWORK_DIR\n";
        return 1;
    }
    g_cli = argv[1];
    g_nets = argv[2];
    struct Criterion {
        int id;
        const char* name;
        double limit;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all = {
        {1, "closed-form golden values", 1, closedForms},
        {2, "sub-additivity test agrees with direct check", 30, subadditivity},
        {3, "exact closure against grid oracle", 60, closures},
        {4, "sub-additive residual soundness and starvation", 120, residualSoundness},
        {5, "tandem comparison sweep", 10, comparison},
        {6, "feedback equivalence and output invariance", 120, feedbackEquivalence},
        {7, "refusal of unsupported feedback structures", 30, refusals},
        {8, "weakly strict separation", 5, weakStrict},
    };
    int failed = 0;
    for (const auto& cr : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > cr.limit) {
            o.pass = false;
            o.detail += " (over the " + std::to_string(static_cast<int>(cr.limit)) + " s limit)";
        }
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2f s", secs);
        std::cout << (o.pass ? "PASS" : "FAIL") << " AC" << cr.id << " " << cr.name << " [" << timing << "] " << o.detail
                  << "\n";
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
