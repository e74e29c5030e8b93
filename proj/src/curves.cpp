#include "netcalc/curves.hpp"

namespace netcalc {

namespace {

void nonNegative(const Q& v, const char* name) {
    if (v.isInf() || v.sign() < 0) throw DomainError(std::string(name) + " must be finite and >= 0");
}

void requireService(const Curve& c) {
    if (!c.isService()) throw KindError("a service curve is required");
}

void requireArrival(const Curve& c) {
    if (c.role != Role::Arrival) throw KindError("an arrival curve is required");
}

const char* kStarvation =
    "priority starvation: aggregate departures pinned to (A1+A2)*beta with the cross flow served first "
    "leave D1 = 0 while the cross flow keeps the server busy";

Curve residualCommon(const Curve& beta, const Curve& cross) {
    Curve out = serviceCurve(monus(beta.fn, cross.fn, true), ServiceKind::MinPlus);
    out.delayOffset = beta.delayOffset;
    Q sr = beta.fn.longRunRate(), cr = cross.fn.longRunRate();
    out.unstable = !(cr < sr);
    return out;
}

}  // namespace

std::string kindName(ServiceKind k) {
    switch (k) {
        case ServiceKind::MinPlus: return "minplus";
        case ServiceKind::SubAdditiveMinPlus: return "subadditive";
        case ServiceKind::Strict: return "strict";
        case ServiceKind::TransmissionDelay: return "delay";
    }
    return "?";
}

Curve arrivalCurve(UppFunction fn) {
    if (!fn.valueAtZero().isZero()) throw DomainError("arrival curves must be 0 at 0");
    Curve c;
    c.fn = std::move(fn);
    c.role = Role::Arrival;
    return c;
}

Curve serviceCurve(UppFunction fn, ServiceKind kind) {
    Curve c;
    c.fn = std::move(fn);
    c.role = Role::Service;
    c.kind = kind;
    if (kind == ServiceKind::SubAdditiveMinPlus && !isSubadditive(c.fn)) throw KindError("function is not sub-additive");
    return c;
}

UppFunction tokenBucketFn(const Q& r, const Q& b) {
    nonNegative(r, "rate");
    nonNegative(b, "burst");
    return UppFunction::affine(Q(0), b, r);
}

UppFunction rateLatencyFn(const Q& R, const Q& T) {
    nonNegative(R, "rate");
    nonNegative(T, "latency");
    if (T.isZero()) return UppFunction::affine(Q(0), Q(0), R);
    return UppFunction::periodic(Q(0), {{Q(0), Q(0), Q(0)}, {T, Q(0), R}}, T, Q(1), R);
}

UppFunction pureDelayFn(const Q& d) {
    nonNegative(d, "delay");
    if (d.isZero()) return UppFunction::finiteThenInfinite(Q(0), {}, Q(0));
    return UppFunction::finiteThenInfinite(Q(0), {{Q(0), Q(0), Q(0)}}, d);
}

UppFunction constantRateFn(const Q& R) {
    nonNegative(R, "rate");
    return UppFunction::affine(Q(0), Q(0), R);
}

UppFunction windowFn(const Q& W) {
    nonNegative(W, "window");
    return UppFunction::finiteThenInfinite(W, {}, Q(0));
}

UppFunction wfcFn(const Q& W, const Q& R, const Q& T) {
    nonNegative(W, "window");
    nonNegative(R, "rate");
    nonNegative(T, "latency");
    if (T.isZero()) return UppFunction::affine(Q(0), W, R);
    return UppFunction::periodic(Q(0), {{Q(0), W, Q(0)}, {T, W, R}}, T, Q(1), R);
}

Curve tokenBucket(const Q& r, const Q& b) { return arrivalCurve(tokenBucketFn(r, b)); }

Curve rateLatency(const Q& R, const Q& T, ServiceKind kind) {
    if (kind == ServiceKind::TransmissionDelay) throw KindError("use transmissionDelay for delay servers");
    return serviceCurve(rateLatencyFn(R, T), kind);
}

Curve pureDelay(const Q& d) {
    UppFunction f = pureDelayFn(d);
    return serviceCurve(f, d.isZero() ? ServiceKind::SubAdditiveMinPlus : ServiceKind::MinPlus);
}

Curve transmissionDelay(const Q& m, const Q& M) {
    nonNegative(m, "minimum delay");
    nonNegative(M, "maximum delay");
    if (M < m) throw DomainError("transmission delay needs m <= M");
    Curve c = serviceCurve(pureDelayFn(M - m), ServiceKind::TransmissionDelay);
    c.minDelay = m;
    c.maxDelay = M;
    c.delayOffset = m;
    return c;
}

Curve constantRate(const Q& R, ServiceKind kind) {
    if (kind == ServiceKind::TransmissionDelay) throw KindError("constant-rate servers cannot be delay servers");
    return serviceCurve(constantRateFn(R), kind);
}

Curve windowCurve(const Q& W) { return serviceCurve(windowFn(W), ServiceKind::MinPlus); }

Curve wfcCurve(const Q& W, const Q& R, const Q& T) {
    UppFunction f = wfcFn(W, R, T);
    return serviceCurve(f, W >= R * T ? ServiceKind::SubAdditiveMinPlus : ServiceKind::MinPlus);
}

Curve outputArrival(const Curve& alpha, const Curve& beta) {
    requireArrival(alpha);
    requireService(beta);
    Curve out;
    out.role = Role::Arrival;
    out.fn = deconvolve(alpha.fn, beta.fn);
    out.unstable = out.fn.isTop() || alpha.unstable;
    return out;
}

Curve concatenate(const std::vector<Curve>& servers) {
    UppFunction acc = pureDelayFn(Q(0));
    Q offset = 0;
    bool unstable = false;
    for (const auto& s : servers) {
        requireService(s);
        acc = convolve(acc, s.fn);
        offset += s.delayOffset;
        unstable = unstable || s.unstable;
    }
    Curve out;
    out.fn = acc;
    out.role = Role::Service;
    out.kind = isSubadditive(acc) ? ServiceKind::SubAdditiveMinPlus : ServiceKind::MinPlus;
    out.delayOffset = offset;
    out.unstable = unstable;
    return out;
}

Curve residualStrict(const Curve& beta, const Curve& cross) {
    requireService(beta);
    requireArrival(cross);
    if (beta.kind != ServiceKind::Strict)
        throw KindError("residual for strict servers applied to a " + kindName(beta.kind) + " curve", kStarvation);
    return residualCommon(beta, cross);
}

Curve residualSubadditive(const Curve& beta, const Curve& cross) {
    requireService(beta);
    requireArrival(cross);
    if (beta.kind == ServiceKind::TransmissionDelay)
        throw KindError("no residual is defined for transmission-delay servers");
    if (!isSubadditive(beta.fn))
        throw KindError("residual needs a sub-additive service curve; a plain (min,plus) curve can starve the flow",
                        kStarvation);
    return residualCommon(beta, cross);
}

Refusal residualMinplusUnsafe(const Curve& beta, const Curve&) {
    Refusal r;
    r.reason = "a plain (min,plus) service curve guarantees no per-flow service after subtracting cross traffic";
    if (isSubadditive(beta.fn)) r.reason += "; this curve is sub-additive, reclassify it to use residualSubadditive";
    r.witness = kStarvation;
    return r;
}

Curve residual(const Curve& beta, const Curve& cross) {
    if (beta.kind == ServiceKind::Strict) return residualStrict(beta, cross);
    if (beta.kind == ServiceKind::SubAdditiveMinPlus) return residualSubadditive(beta, cross);
    if (beta.kind == ServiceKind::TransmissionDelay) throw KindError("no residual is defined for transmission-delay servers");
    Refusal r = residualMinplusUnsafe(beta, cross);
    throw KindError(r.reason, r.witness);
}

}  // namespace netcalc
