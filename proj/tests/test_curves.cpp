#include "doctest.h"
#include "netcalc/curves.hpp"
#include "netcalc/feedback.hpp"

using namespace netcalc;

TEST_CASE("catalog constructors") {
    CHECK(tokenBucket(0, 0).fn == UppFunction());
    CHECK(wfcCurve(2, 1, 2).kind == ServiceKind::SubAdditiveMinPlus);
    CHECK(wfcCurve(3, 1, 2).kind == ServiceKind::SubAdditiveMinPlus);
    CHECK(wfcCurve(1, 1, 2).kind == ServiceKind::MinPlus);
    CHECK(rateLatency(1, 1).kind == ServiceKind::Strict);
    CHECK(constantRate(1).kind == ServiceKind::SubAdditiveMinPlus);
    CHECK(pureDelay(1).kind == ServiceKind::MinPlus);
    auto d0 = pureDelay(0);
    CHECK(convolve(d0.fn, rateLatencyFn(2, 1)) == rateLatencyFn(2, 1));
    auto td = transmissionDelay(Q(1, 10), Q(1, 2));
    CHECK(td.kind == ServiceKind::TransmissionDelay);
    CHECK(td.fn == pureDelayFn(Q(2, 5)));
    CHECK(td.delayOffset == Q(1, 10));
    CHECK(windowCurve(3).fn.eval(0) == Q(3));
    CHECK(windowCurve(3).fn.eval(Q(1, 100)).isInf());
    CHECK_THROWS_AS(tokenBucket(-1, 0), DomainError);
    CHECK_THROWS_AS(rateLatency(1, -1), DomainError);
    CHECK_THROWS_AS(transmissionDelay(2, 1), DomainError);
    CHECK_THROWS_AS(serviceCurve(rateLatencyFn(1, 1), ServiceKind::SubAdditiveMinPlus), KindError);
    CHECK_THROWS_AS(arrivalCurve(windowFn(1)), DomainError);
}

TEST_CASE("output arrival curves") {
    Q r = 1, b = 2, R = 3, T = Q(1, 2);
    CHECK(outputArrival(tokenBucket(r, b), rateLatency(R, T)).fn == tokenBucketFn(r, b + r * T));
    auto a = tokenBucket(Q(3, 4), 5);
    CHECK(outputArrival(a, pureDelay(0)).fn == a.fn);
    // through a throttle with r < W / T nothing changes
    auto th = throttleCurve(rateLatency(2, 2), 1);
    CHECK(outputArrival(tokenBucket(Q(1, 4), 3), th).fn == tokenBucketFn(Q(1, 4), 3));
    auto bad = outputArrival(tokenBucket(3, 1), constantRate(2));
    CHECK(bad.unstable);
    CHECK(bad.fn.isTop());
    CHECK_THROWS_AS(outputArrival(rateLatency(1, 1), rateLatency(1, 1)), KindError);
}

TEST_CASE("concatenation") {
    auto c = concatenate({rateLatency(4, 1), rateLatency(3, 2)});
    CHECK(c.fn == rateLatencyFn(3, 3));
    CHECK(c.kind == ServiceKind::MinPlus);
    auto single = concatenate({rateLatency(4, 1)});
    CHECK(single.fn == rateLatencyFn(4, 1));
    CHECK(single.kind == ServiceKind::MinPlus);
    auto lam = concatenate({constantRate(5), constantRate(2)});
    CHECK(lam.fn == constantRateFn(2));
    CHECK(lam.kind == ServiceKind::SubAdditiveMinPlus);
    auto empty = concatenate({});
    CHECK(empty.fn == pureDelayFn(0));
    auto withDelay = concatenate({transmissionDelay(1, 3), rateLatency(1, 1)});
    CHECK(withDelay.fn == rateLatencyFn(1, 3));
    CHECK(withDelay.delayOffset == Q(1));
}

TEST_CASE("strict residual") {
    Q R = 5, T = 1, r = 2, b = 3;
    auto res = residualStrict(rateLatency(R, T), tokenBucket(r, b));
    CHECK(res.fn == rateLatencyFn(R - r, T + (b + r * T) / (R - r)));
    CHECK_FALSE(res.unstable);
    CHECK(residualStrict(rateLatency(R, T), tokenBucket(0, 0)).fn == rateLatencyFn(R, T));
    auto starved = residualStrict(constantRate(1, ServiceKind::Strict), tokenBucket(2, 0));
    CHECK(starved.fn == UppFunction());
    CHECK(starved.unstable);
    CHECK_THROWS_AS(residualStrict(constantRate(1), tokenBucket(0, 0)), KindError);
}

TEST_CASE("sub-additive residual") {
    auto alphaH = tokenBucket(1, 2);
    auto lam = constantRate(3);
    CHECK(residualSubadditive(lam, alphaH).fn == monus(lam.fn, alphaH.fn, true));
    auto th = throttleCurve(rateLatency(1, 2), 1);
    CHECK(residualSubadditive(th, tokenBucket(0, 0)).fn == th.fn);
    auto res = residualSubadditive(wfcCurve(2, 1, 1), tokenBucket(Q(1, 2), Q(1, 2)));
    // 2 - 1/2 - t/2 until 1, then 3/2 + (t - 1)/2 - 0: non-decreasing hull of (beta - alpha)+
    CHECK(res.fn.eval(0) == Q(0));
    CHECK(res.fn.eval(1) == Q(1));
    CHECK(res.fn.eval(3) == Q(2));
    CHECK(res.fn.isNonDecreasing());
    try {
        residualSubadditive(rateLatency(1, 1, ServiceKind::MinPlus), tokenBucket(1, 1));
        FAIL("expected a kind error");
    } catch (const KindError& e) {
        CHECK(e.witness().find("starvation") != std::string::npos);
    }
    CHECK_THROWS_AS(residualSubadditive(transmissionDelay(0, 1), tokenBucket(1, 1)), KindError);
}

TEST_CASE("plain (min,plus) residual refusals") {
    auto r1 = residualMinplusUnsafe(rateLatency(1, 1, ServiceKind::MinPlus), tokenBucket(1, 1));
    CHECK(r1.witness.find("priority starvation") != std::string::npos);
    auto r2 = residualMinplusUnsafe(serviceCurve(pureDelayFn(0), ServiceKind::MinPlus), tokenBucket(0, 0));
    CHECK_FALSE(r2.reason.empty());
    auto r3 = residualMinplusUnsafe(constantRate(2, ServiceKind::MinPlus), tokenBucket(1, 1));
    CHECK(r3.reason.find("reclassify") != std::string::npos);
    CHECK_THROWS_AS(residual(constantRate(2, ServiceKind::MinPlus), tokenBucket(1, 1)), KindError);
    CHECK(residual(constantRate(2), tokenBucket(1, 1)).fn == monus(constantRateFn(2), tokenBucketFn(1, 1), true));
    CHECK(residual(rateLatency(2, 1), tokenBucket(1, 1)).fn == rateLatencyFn(1, 3));
}
