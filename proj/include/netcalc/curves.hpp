#pragma once
// Named curves, curve kinds and per-server transformations.

#include "netcalc/upp.hpp"

#include <string>
#include <vector>

namespace netcalc {

enum class Role { Arrival, Service };
enum class ServiceKind { MinPlus, SubAdditiveMinPlus, Strict, TransmissionDelay };

std::string kindName(ServiceKind k);

/// Raised when an operation is asked for on a curve kind it is not valid for.
class KindError : public std::logic_error {
public:
    KindError(const std::string& what, std::string witness = {})
        : std::logic_error(what), witness_(std::move(witness)) {}
    [[nodiscard]] const std::string& witness() const { return witness_; }

private:
    std::string witness_;
};

struct Curve {
    UppFunction fn;
    Role role = Role::Arrival;
    ServiceKind kind = ServiceKind::MinPlus;
    Q minDelay = 0;  // TransmissionDelay: m
    Q maxDelay = 0;  // TransmissionDelay: M
    /// Constant delay to add to any delay bound computed with this curve.
    Q delayOffset = 0;
    bool unstable = false;

    [[nodiscard]] bool isService() const { return role == Role::Service; }
};

Curve arrivalCurve(UppFunction fn);
Curve serviceCurve(UppFunction fn, ServiceKind kind);

/// gamma_{r,b}: 0 at 0, b + r t after.
Curve tokenBucket(const Q& r, const Q& b);
/// beta_{R,T} = R (t - T)+, strict by default.
Curve rateLatency(const Q& R, const Q& T, ServiceKind kind = ServiceKind::Strict);
/// delta_d: 0 on [0, d], +inf after.
Curve pureDelay(const Q& d);
/// Server whose transmission delay lies in [m, M].
Curve transmissionDelay(const Q& m, const Q& M);
/// lambda_R = R t.
Curve constantRate(const Q& R, ServiceKind kind = ServiceKind::SubAdditiveMinPlus);
/// phi_W: W at 0, +inf after, so that f * phi_W = f + W.
Curve windowCurve(const Q& W);
/// 0 at 0, W + R (t - T)+ after; sub-additive iff W >= R T.
Curve wfcCurve(const Q& W, const Q& R, const Q& T);

UppFunction tokenBucketFn(const Q& r, const Q& b);
UppFunction rateLatencyFn(const Q& R, const Q& T);
UppFunction pureDelayFn(const Q& d);
UppFunction constantRateFn(const Q& R);
UppFunction windowFn(const Q& W);
UppFunction wfcFn(const Q& W, const Q& R, const Q& T);

/// Arrival curve of the departures of a flow with arrival curve alpha through beta.
Curve outputArrival(const Curve& alpha, const Curve& beta);
/// End-to-end curve of servers in sequence. Always MinPlus unless the result is
/// sub-additive, in which case it is tagged SubAdditiveMinPlus.
Curve concatenate(const std::vector<Curve>& servers);
/// (beta - alpha)+ hull for a strict server.
Curve residualStrict(const Curve& beta, const Curve& cross);
/// (beta - alpha)+ hull for a sub-additive (min,plus) server.
Curve residualSubadditive(const Curve& beta, const Curve& cross);

struct Refusal {
    std::string reason;
    std::string witness;
};
/// A plain (min,plus) server gives no per-flow guarantee; always refuses.
Refusal residualMinplusUnsafe(const Curve& beta, const Curve& cross);

/// Picks residualStrict / residualSubadditive by kind, throws KindError otherwise.
Curve residual(const Curve& beta, const Curve& cross);

}  // namespace netcalc
