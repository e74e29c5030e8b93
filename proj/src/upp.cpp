#include "netcalc/upp.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace netcalc {

using detail::PNode;
using detail::Pwl;

std::size_t maxSegments() {
    if (const char* env = std::getenv("NETCALC_MAX_SEGMENTS")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return 100000;
}

namespace {

void guard(std::size_t n) {
    if (n > maxSegments())
        throw ResourceError("segment count " + std::to_string(n) + " exceeds the limit of " + std::to_string(maxSegments()) +
                            " (set NETCALC_MAX_SEGMENTS to raise it)");
}

// Segments of p on [0, upTo]; a breakpoint is forced at `forced` when given.
std::vector<Segment> segmentsOf(const Pwl& p, const Q& upTo, const Q* forced) {
    std::vector<Segment> out;
    for (std::size_t k = 0; k + 1 < p.nodes.size() && p.nodes[k].x < upTo; ++k) {
        const PNode& n = p.nodes[k];
        if (!n.hasSeg) throw DomainError("internal: gap in a finite prefix");
        out.push_back({n.x, n.right, n.slope});
        if (forced && n.x < *forced && p.nodes[k + 1].x > *forced)
            out.push_back({*forced, n.right + n.slope * (*forced - n.x), n.slope});
    }
    return out;
}

Q leftLimit(const Segment& s, const Q& x) { return s.valueAtStartRight + s.slope * (x - s.start); }

}  // namespace

UppFunction::UppFunction() { segs_.push_back({Q(0), Q(0), Q(0)}); }

UppFunction UppFunction::periodic(Q v0, std::vector<Segment> segments, Q rank, Q period, Q increment) {
    if (period.sign() <= 0 || period.isInf()) throw DomainError("period must be positive and finite");
    if (rank.sign() < 0 || rank.isInf()) throw DomainError("rank must be non-negative and finite");
    if (increment.isInf() || increment.sign() < 0) throw DomainError("increment must be finite and non-negative");
    if (v0.isInf()) throw DomainError("value at zero of a periodic function must be finite");
    UppFunction f;
    f.v0_ = std::move(v0);
    f.segs_ = std::move(segments);
    f.rank_ = std::move(rank);
    f.period_ = std::move(period);
    f.inc_ = std::move(increment);
    f.evInf_ = false;
    // force a breakpoint at rank
    for (std::size_t k = 0; k < f.segs_.size(); ++k) {
        if (f.segs_[k].start == f.rank_) break;
        bool lastBefore = k + 1 == f.segs_.size() || f.segs_[k + 1].start > f.rank_;
        if (f.segs_[k].start < f.rank_ && lastBefore) {
            f.segs_.insert(f.segs_.begin() + static_cast<long>(k) + 1, {f.rank_, leftLimit(f.segs_[k], f.rank_), f.segs_[k].slope});
            break;
        }
    }
    f.checkInvariants();
    f.canonicalize();
    return f;
}

UppFunction UppFunction::finiteThenInfinite(Q v0, std::vector<Segment> segments, Q end) {
    if (end.sign() < 0 || end.isInf()) throw DomainError("end must be non-negative and finite");
    UppFunction f;
    f.v0_ = std::move(v0);
    f.segs_ = std::move(segments);
    f.rank_ = std::move(end);
    f.period_ = 0;
    f.inc_ = 0;
    f.evInf_ = true;
    f.checkInvariants();
    f.canonicalize();
    return f;
}

UppFunction UppFunction::affine(Q v0, Q valueRight, Q rate) {
    return periodic(std::move(v0), {{Q(0), std::move(valueRight), rate}}, Q(0), Q(1), rate);
}

UppFunction UppFunction::top() {
    UppFunction f;
    f.v0_ = Q::infinity();
    f.segs_.clear();
    f.rank_ = 0;
    f.period_ = 0;
    f.inc_ = 0;
    f.evInf_ = true;
    return f;
}

void UppFunction::checkInvariants() const {
    if (isTop()) return;
    Q end = evInf_ ? rank_ : rank_ + period_;
    if (segs_.empty()) {
        if (end.sign() != 0) throw DomainError("segments must cover (0, end]");
        return;
    }
    if (segs_.front().start.sign() != 0) throw DomainError("first segment must start at 0");
    for (std::size_t k = 0; k < segs_.size(); ++k) {
        const Segment& s = segs_[k];
        if (s.valueAtStartRight.isInf() || s.slope.isInf()) throw DomainError("segments must be finite");
        if (k && !(segs_[k - 1].start < s.start)) throw DomainError("segment starts must increase strictly");
        if (!(s.start < end)) throw DomainError("segment starts beyond the described range");
    }
    if (!evInf_) {
        bool found = std::any_of(segs_.begin(), segs_.end(), [&](const Segment& s) { return s.start == rank_; });
        if (!found) throw DomainError("a segment must start at rank");
    }
}

std::vector<Segment> UppFunction::transientSegments() const {
    std::vector<Segment> out;
    for (const auto& s : segs_)
        if (evInf_ || s.start < rank_) out.push_back(s);
    return out;
}

std::vector<Segment> UppFunction::periodSegments() const {
    std::vector<Segment> out;
    if (evInf_) return out;
    for (const auto& s : segs_)
        if (s.start >= rank_) out.push_back(s);
    return out;
}

Q UppFunction::longRunRate() const {
    if (evInf_) return Q::infinity();
    return inc_ / period_;
}

bool UppFunction::affineTail() const {
    if (evInf_) return false;
    auto ps = periodSegments();
    return ps.size() == 1 && ps.front().slope * period_ == inc_;
}

bool UppFunction::isNonDecreasing() const {
    if (isTop()) return true;
    if (segs_.empty()) return true;
    if (segs_.front().valueAtStartRight < v0_) return false;
    for (std::size_t k = 0; k < segs_.size(); ++k) {
        if (segs_[k].slope.sign() < 0) return false;
        if (k && segs_[k].valueAtStartRight < leftLimit(segs_[k - 1], segs_[k].start)) return false;
    }
    if (!evInf_) {
        Q lastLeft = leftLimit(segs_.back(), rank_ + period_);
        auto first = std::find_if(segs_.begin(), segs_.end(), [&](const Segment& s) { return s.start == rank_; });
        if (first->valueAtStartRight + inc_ < lastLeft) return false;
    }
    return true;
}

Q UppFunction::eval(const Q& t) const {
    if (t.isInf() || t.sign() < 0) throw DomainError("eval needs a finite t >= 0");
    if (t.sign() == 0) return v0_;
    if (isTop()) return Q::infinity();
    Q tt = t, add = 0;
    if (evInf_) {
        if (t > rank_) return Q::infinity();
    } else if (t > rank_ + period_) {
        Q k = ceil((t - rank_) / period_) - Q(1);
        tt = t - k * period_;
        add = k * inc_;
    }
    auto it = std::lower_bound(segs_.begin(), segs_.end(), tt, [](const Segment& s, const Q& v) { return s.start < v; });
    const Segment& s = *(it - 1);
    return leftLimit(s, tt) + add;
}

Q UppFunction::evalRight(const Q& t) const {
    if (t.isInf() || t.sign() < 0) throw DomainError("evalRight needs a finite t >= 0");
    if (isTop()) return Q::infinity();
    Q tt = t, add = 0;
    if (evInf_) {
        if (t >= rank_) return Q::infinity();
    } else if (t >= rank_ + period_) {
        Q k = floor((t - rank_) / period_);
        tt = t - k * period_;
        add = k * inc_;
    }
    auto it = std::upper_bound(segs_.begin(), segs_.end(), tt, [](const Q& v, const Segment& s) { return v < s.start; });
    const Segment& s = *(it - 1);
    return leftLimit(s, tt) + add;
}

Pwl UppFunction::unroll(const Q& h) const {
    Pwl p;
    if (isTop()) throw DomainError("cannot unroll +inf");
    Q end = h;
    if (evInf_ && end > rank_) end = rank_;
    PNode first;
    first.x = 0;
    first.value = v0_;
    p.nodes.push_back(first);
    if (end.sign() <= 0) return p;
    auto emit = [&](const Segment& s, const Q& dx, const Q& dy) {
        PNode n;
        n.x = s.start + dx;
        if (n.x.sign() != 0) {
            const PNode& prev = p.nodes.back();
            n.value = prev.right + prev.slope * (n.x - prev.x);
        } else {
            n.value = v0_;
        }
        n.hasSeg = true;
        n.right = s.valueAtStartRight + dy;
        n.slope = s.slope;
        if (n.x.sign() == 0) p.nodes.back() = n;
        else p.nodes.push_back(n);
        guard(p.nodes.size());
    };
    bool done = false;
    for (const auto& s : segs_) {
        if (!evInf_ && s.start >= rank_) break;
        if (s.start >= end) {
            done = true;
            break;
        }
        emit(s, Q(0), Q(0));
    }
    if (!evInf_ && !done) {
        auto ps = periodSegments();
        for (long k = 0; !done; ++k) {
            Q dx = period_ * Q(k), dy = inc_ * Q(k);
            for (const auto& s : ps) {
                if (s.start + dx >= end) {
                    done = true;
                    break;
                }
                emit(s, dx, dy);
            }
        }
    }
    PNode last;
    last.x = end;
    const PNode& prev = p.nodes.back();
    last.value = prev.right + prev.slope * (end - prev.x);
    p.nodes.push_back(last);
    return p;
}

UppFunction UppFunction::fromPwl(const Pwl& p, Q rank, Q period, Q increment) {
    if (p.empty() || p.lo().sign() != 0 || p.hi() < rank + period) throw DomainError("internal: prefix does not cover the range");
    Q upTo = rank + period;
    auto segs = segmentsOf(p, upTo, &rank);
    return periodic(p.nodes.front().value, std::move(segs), std::move(rank), std::move(period), std::move(increment));
}

UppFunction UppFunction::fromPwlFinite(const Pwl& p) {
    if (p.empty() || p.lo().sign() != 0) throw DomainError("internal: prefix does not start at 0");
    return finiteThenInfinite(p.nodes.front().value, segmentsOf(p, p.hi(), nullptr), p.hi());
}

void UppFunction::canonicalize() {
    if (isTop()) return;
    auto mergeCollinear = [this]() {
        std::vector<Segment> out;
        for (const auto& s : segs_) {
            if (!out.empty() && (evInf_ || s.start != rank_) && s.slope == out.back().slope &&
                leftLimit(out.back(), s.start) == s.valueAtStartRight)
                continue;
            out.push_back(s);
        }
        segs_ = std::move(out);
    };
    mergeCollinear();
    guard(segs_.size());
    if (evInf_) return;

    auto prefixTo = [this](const Q& h) { return unroll(h); };
    auto rebuild = [&](const Q& newRank, const Q& newPeriod, const Q& newInc) {
        Pwl p = prefixTo(newRank + newPeriod);
        rank_ = newRank;
        period_ = newPeriod;
        inc_ = newInc;
        segs_ = segmentsOf(p, rank_ + period_, &rank_);
        mergeCollinear();
    };

    // minimal rank for the current period
    if (rank_.sign() > 0) {
        Pwl p = prefixTo(rank_ + period_);
        Pwl later = p.restrict(period_, rank_ + period_).shifted(-period_, -inc_);
        Pwl diff = detail::combine(later, p.restrict(Q(0), rank_), -1);
        Q r = 0;
        for (std::size_t k = 0; k + 1 < diff.nodes.size(); ++k) {
            const PNode& n = diff.nodes[k];
            if (n.hasSeg && (!n.right.isZero() || !n.slope.isZero())) r = diff.nodes[k + 1].x;
            if (k > 0 && n.hasValue && !n.value.isZero()) r = max(r, n.x);
        }
        if (!diff.nodes.empty() && diff.nodes.size() > 1 && diff.nodes.back().hasValue && !diff.nodes.back().value.isZero())
            r = max(r, diff.nodes.back().x);
        if (r < rank_) rebuild(r, period_, inc_);
    }

    // count true breakpoints in (rank, rank + period]
    auto ps = periodSegments();
    std::size_t breaks = ps.size() - 1;
    {
        Q lastLeft = leftLimit(segs_.back(), rank_ + period_);
        const Segment& first = ps.front();
        if (first.valueAtStartRight + inc_ != lastLeft || first.slope != segs_.back().slope) ++breaks;
    }
    if (breaks == 0) {
        Q slope = ps.front().slope;
        if (period_ != Q(1) || inc_ != slope) rebuild(rank_, Q(1), slope);
        return;
    }
    for (std::size_t k = breaks; k >= 2; --k) {
        if (breaks % k) continue;
        Q d2 = period_ / Q(static_cast<long>(k));
        Q c2 = inc_ / Q(static_cast<long>(k));
        Pwl p = prefixTo(rank_ + period_ + d2);
        Pwl a = p.restrict(rank_ + d2, rank_ + period_ + d2).shifted(-d2, -c2);
        Pwl diff = detail::combine(a, p.restrict(rank_, rank_ + period_), -1);
        if (!diff.nodes.empty()) diff.nodes.front().hasValue = false;
        if (diff.isZero()) {
            rebuild(rank_, d2, c2);
            break;
        }
    }
}

std::string UppFunction::toText() const {
    std::ostringstream os;
    os << "upp\n";
    os << "zero " << v0_.str() << "\n";
    for (const auto& s : segs_) os << "seg " << s.start.str() << " " << s.valueAtStartRight.str() << " " << s.slope.str() << "\n";
    if (evInf_) os << "infinite-after " << rank_.str() << "\n";
    else os << "periodic " << rank_.str() << " " << period_.str() << " " << inc_.str() << "\n";
    return os.str();
}

UppFunction UppFunction::fromText(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool header = false, tail = false;
    Q v0 = 0;
    std::vector<Segment> segs;
    UppFunction result;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') continue;
        if (key == "upp") {
            header = true;
            continue;
        }
        if (!header) throw DomainError("curve text must start with 'upp'");
        std::vector<std::string> args;
        std::string a;
        while (ls >> a) args.push_back(a);
        auto want = [&](std::size_t n) {
            if (args.size() != n) throw DomainError("bad line in curve text: " + line);
        };
        if (key == "zero") {
            want(1);
            v0 = Q::parse(args[0]);
        } else if (key == "seg") {
            want(3);
            segs.push_back({Q::parse(args[0]), Q::parse(args[1]), Q::parse(args[2])});
        } else if (key == "periodic") {
            want(3);
            result = periodic(v0, segs, Q::parse(args[0]), Q::parse(args[1]), Q::parse(args[2]));
            tail = true;
        } else if (key == "infinite-after") {
            want(1);
            if (v0.isInf()) result = top();
            else result = finiteThenInfinite(v0, segs, Q::parse(args[0]));
            tail = true;
        } else {
            throw DomainError("unknown key in curve text: " + key);
        }
    }
    if (!tail) throw DomainError("curve text lacks a 'periodic' or 'infinite-after' line");
    return result;
}

std::ostream& operator<<(std::ostream& os, const UppFunction& f) { return os << f.toText(); }

}  // namespace netcalc
