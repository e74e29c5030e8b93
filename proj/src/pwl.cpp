#include "netcalc/pwl.hpp"

#include <algorithm>

namespace netcalc::detail {

namespace {

// index i with nodes[i].x <= x, or -1
long floorIndex(const std::vector<PNode>& n, const Q& x) {
    auto it = std::upper_bound(n.begin(), n.end(), x, [](const Q& v, const PNode& p) { return v < p.x; });
    return static_cast<long>(it - n.begin()) - 1;
}

struct SegVal {
    Q y;  // right limit at the interval start
    Q s;
};

std::optional<SegVal> segOn(const Pwl& p, const Q& l) {
    long i = floorIndex(p.nodes, l);
    if (i < 0 || i + 1 >= static_cast<long>(p.nodes.size())) return std::nullopt;
    const PNode& n = p.nodes[static_cast<std::size_t>(i)];
    if (!n.hasSeg) return std::nullopt;
    return SegVal{n.right + n.slope * (l - n.x), n.slope};
}

std::vector<Q> mergedXs(const Pwl& a, const Pwl& b, const Q& lo, const Q& hi) {
    std::vector<Q> xs;
    xs.reserve(a.nodes.size() + b.nodes.size());
    std::size_t i = 0, j = 0;
    while (i < a.nodes.size() || j < b.nodes.size()) {
        const Q* next;
        if (j >= b.nodes.size() || (i < a.nodes.size() && a.nodes[i].x <= b.nodes[j].x)) {
            next = &a.nodes[i].x;
            if (j < b.nodes.size() && b.nodes[j].x == a.nodes[i].x) ++j;
            ++i;
        } else {
            next = &b.nodes[j].x;
            ++j;
        }
        if (*next < lo || *next > hi) continue;
        if (xs.empty() || xs.back() != *next) xs.push_back(*next);
    }
    return xs;
}

std::vector<std::pair<Q, Q>> clipPolyline(const std::vector<std::pair<Q, Q>>& pts, const Q& lo, const Q& hi) {
    std::vector<std::pair<Q, Q>> out;
    if (pts.empty() || hi < lo) return out;
    if (pts.back().first < lo || pts.front().first > hi) return out;
    auto interp = [&](std::size_t k, const Q& x) {
        const auto& [x0, y0] = pts[k];
        const auto& [x1, y1] = pts[k + 1];
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    };
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const Q& x = pts[k].first;
        if (x >= lo && x <= hi) {
            if (out.empty() && k > 0 && pts[k - 1].first < lo && x > lo) out.emplace_back(lo, interp(k - 1, lo));
            out.push_back(pts[k]);
        } else if (x > hi) {
            if (k > 0 && pts[k - 1].first < hi) {
                if (out.empty() && pts[k - 1].first < lo) out.emplace_back(lo, interp(k - 1, lo));
                out.emplace_back(hi, interp(k - 1, hi));
            }
            break;
        }
    }
    return out;
}

}  // namespace

std::optional<Q> Pwl::at(const Q& x) const {
    if (nodes.empty() || x < lo() || x > hi()) return std::nullopt;
    long i = floorIndex(nodes, x);
    const PNode& n = nodes[static_cast<std::size_t>(i)];
    if (n.x == x) return n.hasValue ? std::optional<Q>(n.value) : std::nullopt;
    if (!n.hasSeg) return std::nullopt;
    return n.right + n.slope * (x - n.x);
}

std::optional<Q> Pwl::rightAt(const Q& x) const {
    if (nodes.empty() || x < lo() || x >= hi()) return std::nullopt;
    long i = floorIndex(nodes, x);
    const PNode& n = nodes[static_cast<std::size_t>(i)];
    if (!n.hasSeg) return std::nullopt;
    return n.right + n.slope * (x - n.x);
}

std::optional<Q> Pwl::leftAt(const Q& x) const {
    if (nodes.empty() || x <= lo() || x > hi()) return std::nullopt;
    auto it = std::lower_bound(nodes.begin(), nodes.end(), x, [](const PNode& p, const Q& v) { return p.x < v; });
    const PNode& n = *(it - 1);
    if (!n.hasSeg) return std::nullopt;
    return n.right + n.slope * (x - n.x);
}

void Pwl::simplify() {
    if (nodes.empty()) return;
    std::vector<PNode> out;
    out.reserve(nodes.size());
    out.push_back(nodes.front());
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        const PNode& cur = nodes[k];
        PNode& prev = out.back();
        bool last = k + 1 == nodes.size();
        if (!last && prev.hasSeg && cur.hasSeg && cur.hasValue && prev.slope == cur.slope) {
            Q leftLim = prev.right + prev.slope * (cur.x - prev.x);
            if (leftLim == cur.value && cur.value == cur.right) continue;
        }
        out.push_back(cur);
    }
    while (out.size() > 1 && !out.front().hasValue && !out.front().hasSeg) out.erase(out.begin());
    while (out.size() > 1 && !out.back().hasValue && !out[out.size() - 2].hasSeg) {
        out.pop_back();
        out.back().hasSeg = false;
    }
    if (out.size() == 1 && !out.front().hasValue) out.clear();
    if (!out.empty()) out.back().hasSeg = false;
    nodes = std::move(out);
}

void Pwl::makeLeftContinuous() {
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        const PNode& p = nodes[k - 1];
        if (p.hasSeg) {
            nodes[k].hasValue = true;
            nodes[k].value = p.right + p.slope * (nodes[k].x - p.x);
        }
    }
}

Pwl Pwl::restrict(const Q& a, const Q& b) const {
    Pwl out;
    if (nodes.empty() || b < lo() || a > hi() || b < a) return out;
    Q lo2 = max(a, lo()), hi2 = min(b, hi());
    long i = floorIndex(nodes, lo2);
    {
        const PNode& n = nodes[static_cast<std::size_t>(i)];
        PNode first;
        first.x = lo2;
        auto v = at(lo2);
        first.hasValue = v.has_value();
        if (v) first.value = *v;
        if (lo2 < hi2 && n.hasSeg && static_cast<std::size_t>(i + 1) < nodes.size()) {
            first.hasSeg = true;
            first.slope = n.slope;
            first.right = n.right + n.slope * (lo2 - n.x);
        }
        out.nodes.push_back(first);
    }
    for (std::size_t k = static_cast<std::size_t>(i + 1); k < nodes.size() && nodes[k].x < hi2; ++k) out.nodes.push_back(nodes[k]);
    if (hi2 > lo2) {
        PNode last;
        last.x = hi2;
        auto v = at(hi2);
        last.hasValue = v.has_value();
        if (v) last.value = *v;
        out.nodes.push_back(last);
    }
    out.nodes.back().hasSeg = false;
    return out;
}

Pwl Pwl::shifted(const Q& dx, const Q& dy) const {
    Pwl out = *this;
    for (auto& n : out.nodes) {
        n.x += dx;
        if (n.hasValue) n.value += dy;
        if (n.hasSeg) n.right += dy;
    }
    return out;
}

std::optional<Q> Pwl::infimum() const {
    std::optional<Q> best;
    auto take = [&](const Q& v) {
        if (!best || v < *best) best = v;
    };
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const PNode& n = nodes[k];
        if (n.hasValue) take(n.value);
        if (n.hasSeg) {
            take(n.right);
            take(n.right + n.slope * (nodes[k + 1].x - n.x));
        }
    }
    return best;
}

std::optional<Q> Pwl::supremum() const {
    std::optional<Q> best;
    auto take = [&](const Q& v) {
        if (!best || v > *best) best = v;
    };
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const PNode& n = nodes[k];
        if (n.hasValue) take(n.value);
        if (n.hasSeg) {
            take(n.right);
            take(n.right + n.slope * (nodes[k + 1].x - n.x));
        }
    }
    return best;
}

bool Pwl::isZero() const {
    for (const auto& n : nodes) {
        if (n.hasValue && !n.value.isZero()) return false;
        if (n.hasSeg && (!n.right.isZero() || !n.slope.isZero())) return false;
    }
    return true;
}

bool operator==(const Pwl& a, const Pwl& b) {
    if (a.nodes.size() != b.nodes.size()) return false;
    for (std::size_t k = 0; k < a.nodes.size(); ++k) {
        const PNode& p = a.nodes[k];
        const PNode& q = b.nodes[k];
        if (p.x != q.x || p.hasValue != q.hasValue || p.hasSeg != q.hasSeg) return false;
        if (p.hasValue && p.value != q.value) return false;
        if (p.hasSeg && (p.right != q.right || p.slope != q.slope)) return false;
    }
    return true;
}

Pwl polyline(const std::vector<std::pair<Q, Q>>& pts) {
    Pwl out;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (!out.nodes.empty() && out.nodes.back().x == pts[k].first) continue;
        if (!out.nodes.empty()) {
            PNode& prev = out.nodes.back();
            prev.hasSeg = true;
            prev.right = prev.value;
            prev.slope = (pts[k].second - prev.value) / (pts[k].first - prev.x);
        }
        PNode n;
        n.x = pts[k].first;
        n.value = pts[k].second;
        out.nodes.push_back(n);
    }
    return out;
}

Pwl envelope(const Pwl& a, const Pwl& b, bool takeMin) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    Q lo = min(a.lo(), b.lo()), hi = max(a.hi(), b.hi());
    std::vector<Q> xs = mergedXs(a, b, lo, hi);
    Pwl out;
    out.nodes.reserve(xs.size() + 4);
    auto better = [&](const Q& u, const Q& v) { return takeMin ? u < v : u > v; };
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const Q& x = xs[k];
        PNode node;
        node.x = x;
        auto va = a.at(x), vb = b.at(x);
        if (va && vb) node.value = better(*vb, *va) ? *vb : *va;
        else if (va) node.value = *va;
        else if (vb) node.value = *vb;
        else node.hasValue = false;
        if (k + 1 == xs.size()) {
            out.nodes.push_back(node);
            break;
        }
        const Q& xn = xs[k + 1];
        auto sa = segOn(a, x), sb = segOn(b, x);
        if (sa && sb) {
            Q len = xn - x;
            Q dl = sa->y - sb->y;
            Q dr = dl + (sa->s - sb->s) * len;
            if ((dl.sign() < 0 && dr.sign() > 0) || (dl.sign() > 0 && dr.sign() < 0)) {
                Q tau = -dl / (sa->s - sb->s);
                bool aFirst = takeMin ? dl.sign() < 0 : dl.sign() > 0;
                const SegVal& first = aFirst ? *sa : *sb;
                const SegVal& second = aFirst ? *sb : *sa;
                node.hasSeg = true;
                node.right = first.y;
                node.slope = first.s;
                out.nodes.push_back(node);
                PNode mid;
                mid.x = x + tau;
                mid.value = first.y + first.s * tau;
                mid.hasSeg = true;
                mid.right = mid.value;
                mid.slope = second.s;
                out.nodes.push_back(mid);
                continue;
            }
            bool useA = takeMin ? (dl.sign() < 0 || (dl.sign() == 0 && dr.sign() <= 0))
                                : (dl.sign() > 0 || (dl.sign() == 0 && dr.sign() >= 0));
            const SegVal& s = useA ? *sa : *sb;
            node.hasSeg = true;
            node.right = s.y;
            node.slope = s.s;
        } else if (sa || sb) {
            const SegVal& s = sa ? *sa : *sb;
            node.hasSeg = true;
            node.right = s.y;
            node.slope = s.s;
        }
        out.nodes.push_back(node);
    }
    out.simplify();
    return out;
}

Pwl envelopeAll(std::vector<Pwl> parts, bool takeMin) {
    if (parts.empty()) return {};
    while (parts.size() > 1) {
        std::vector<Pwl> next;
        next.reserve(parts.size() / 2 + 1);
        for (std::size_t k = 0; k + 1 < parts.size(); k += 2) next.push_back(envelope(parts[k], parts[k + 1], takeMin));
        if (parts.size() % 2) next.push_back(std::move(parts.back()));
        parts = std::move(next);
    }
    return std::move(parts.front());
}

Pwl combine(const Pwl& a, const Pwl& b, int sign) {
    Pwl out;
    if (a.empty() || b.empty()) return out;
    Q lo = max(a.lo(), b.lo()), hi = min(a.hi(), b.hi());
    if (hi < lo) return out;
    std::vector<Q> xs = mergedXs(a, b, lo, hi);
    if (xs.empty() || xs.front() != lo) xs.insert(xs.begin(), lo);
    if (xs.back() != hi) xs.push_back(hi);
    Q sg(sign);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        PNode node;
        node.x = xs[k];
        auto va = a.at(xs[k]), vb = b.at(xs[k]);
        node.hasValue = va && vb;
        if (node.hasValue) node.value = *va + sg * *vb;
        if (k + 1 < xs.size()) {
            auto sa = segOn(a, xs[k]), sb = segOn(b, xs[k]);
            if (sa && sb) {
                node.hasSeg = true;
                node.right = sa->y + sg * sb->y;
                node.slope = sa->s + sg * sb->s;
            }
        }
        out.nodes.push_back(node);
    }
    out.simplify();
    return out;
}

Pwl clipBelowZero(const Pwl& a) {
    Pwl out;
    for (std::size_t k = 0; k < a.nodes.size(); ++k) {
        PNode n = a.nodes[k];
        if (n.hasValue) n.value = pos(n.value);
        if (!n.hasSeg) {
            out.nodes.push_back(n);
            continue;
        }
        Q len = a.nodes[k + 1].x - n.x;
        Q yl = n.right, yr = n.right + n.slope * len;
        if (yl.sign() >= 0 && yr.sign() >= 0) {
            out.nodes.push_back(n);
        } else if (yl.sign() <= 0 && yr.sign() <= 0) {
            n.right = 0;
            n.slope = 0;
            out.nodes.push_back(n);
        } else {
            Q tau = -yl / n.slope;
            PNode mid;
            mid.x = n.x + tau;
            mid.value = 0;
            mid.hasSeg = true;
            mid.right = 0;
            if (yl.sign() < 0) {
                n.right = 0;
                n.slope = 0;
                mid.slope = a.nodes[k].slope;
            } else {
                mid.slope = 0;
            }
            out.nodes.push_back(n);
            out.nodes.push_back(mid);
        }
    }
    out.simplify();
    return out;
}

Pwl concat(const Pwl& a, const Pwl& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    Pwl out = a;
    PNode& joint = out.nodes.back();
    joint.hasSeg = b.nodes.front().hasSeg;
    joint.right = b.nodes.front().right;
    joint.slope = b.nodes.front().slope;
    if (!joint.hasValue && b.nodes.front().hasValue) {
        joint.hasValue = true;
        joint.value = b.nodes.front().value;
    }
    for (std::size_t k = 1; k < b.nodes.size(); ++k) out.nodes.push_back(b.nodes[k]);
    out.simplify();
    return out;
}

std::vector<Piece> pieces(const Pwl& f) {
    std::vector<Piece> out;
    for (std::size_t k = 0; k < f.nodes.size(); ++k) {
        const PNode& n = f.nodes[k];
        if (n.hasValue) {
            auto left = k ? f.leftAt(n.x) : std::nullopt;
            if (!left || *left != n.value) out.push_back({n.x, n.value, Q(0), Q(0)});
        }
        if (n.hasSeg) out.push_back({n.x, n.right, n.slope, f.nodes[k + 1].x - n.x});
    }
    return out;
}

Pwl convolveFinite(const Pwl& a, const Pwl& b, const Q& horizon) {
    auto pa = pieces(a), pb = pieces(b);
    std::vector<Pwl> parts;
    parts.reserve(pa.size() * pb.size());
    std::vector<std::pair<Q, Q>> pts;
    for (const auto& p : pa) {
        for (const auto& q : pb) {
            Q x0 = p.x + q.x;
            if (x0 > horizon) continue;
            const Piece& f1 = p.s <= q.s ? p : q;
            const Piece& f2 = p.s <= q.s ? q : p;
            pts.clear();
            Q y0 = p.v + q.v;
            pts.emplace_back(x0, y0);
            Q x1 = x0 + f1.len, y1 = y0 + f1.s * f1.len;
            pts.emplace_back(x1, y1);
            pts.emplace_back(x1 + f2.len, y1 + f2.s * f2.len);
            auto clipped = clipPolyline(pts, Q(0), horizon);
            if (!clipped.empty()) parts.push_back(polyline(clipped));
        }
    }
    return envelopeAll(std::move(parts), true);
}

Pwl deconvolveFinite(const Pwl& f, const Pwl& g, const Q& horizon) {
    auto pf = pieces(f), pg = pieces(g);
    std::vector<Pwl> parts;
    std::vector<std::pair<Q, Q>> pts;
    for (const auto& p : pf) {
        for (const auto& q : pg) {
            Q tlo = p.x - q.x - q.len;
            Q thi = p.x + p.len - q.x;
            if (thi.sign() < 0 || tlo > horizon) continue;
            pts.clear();
            Q y0 = p.v - q.v - q.s * q.len;
            pts.emplace_back(tlo, y0);
            if (p.s >= q.s) {
                Q t1 = tlo + p.len;
                pts.emplace_back(t1, y0 + p.s * p.len);
                pts.emplace_back(thi, y0 + p.s * p.len + q.s * q.len);
            } else {
                Q t1 = tlo + q.len;
                pts.emplace_back(t1, y0 + q.s * q.len);
                pts.emplace_back(thi, y0 + q.s * q.len + p.s * p.len);
            }
            auto clipped = clipPolyline(pts, Q(0), horizon);
            if (!clipped.empty()) parts.push_back(polyline(clipped));
        }
    }
    Pwl out = envelopeAll(std::move(parts), false);
    out.makeLeftContinuous();
    out.simplify();
    return out;
}

}  // namespace netcalc::detail
