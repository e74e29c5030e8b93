#include "netcalc/netfile.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace netcalc {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::map<std::string, Q>& dataTable() {
    static const std::map<std::string, Q> t{{"b", Q(1)},          {"kb", Q(1000)},         {"Mb", Q(1000000)},
                                            {"Gb", Q(1000000000)}, {"B", Q(8)},            {"kB", Q(8000)},
                                            {"MB", Q(8000000)}};
    return t;
}
const std::map<std::string, Q>& rateTable() {
    static const std::map<std::string, Q> t{
        {"bps", Q(1)}, {"kbps", Q(1000)}, {"Mbps", Q(1000000)}, {"Gbps", Q(1000000000)}};
    return t;
}
const std::map<std::string, Q>& timeTable() {
    static const std::map<std::string, Q> t{
        {"s", Q(1)}, {"ms", Q(1) / Q(1000)}, {"us", Q(1) / Q(1000000)}, {"ns", Q(1) / Q(1000000000)}};
    return t;
}

Q lookup(const std::map<std::string, Q>& t, const std::string& name, const char* what, int line) {
    auto it = t.find(name);
    if (it == t.end()) throw ParseError(line, std::string("unknown ") + what + " unit '" + name + "'");
    return it->second;
}

enum class Dim { Data, Rate, Time, Plain };

struct Entry {
    std::string name, type;
    std::map<std::string, std::string> kv;
    int line = 0;
};

class Parser {
public:
    explicit Parser(NetFile& f) : f_(f) {}

    Q value(const Entry& e, const std::string& key, Dim dim, std::optional<Q> fallback = std::nullopt) const {
        auto it = e.kv.find(key);
        if (it == e.kv.end()) {
            if (fallback) return *fallback;
            throw ParseError(e.line, "'" + e.name + "' needs " + key + "=");
        }
        const std::string& s = it->second;
        std::size_t k = s.size();
        while (k > 0 && std::isalpha(static_cast<unsigned char>(s[k - 1]))) --k;
        std::string num = s.substr(0, k), suffix = s.substr(k);
        if (num == "in") {  // "inf"
            num = s;
            suffix.clear();
        }
        Q v;
        try {
            v = Q::parse(num);
        } catch (const std::exception&) {
            throw ParseError(e.line, "bad number '" + s + "' for " + key);
        }
        if (v.sign() < 0) throw ParseError(e.line, key + " must be >= 0");
        switch (dim) {
            case Dim::Data: return v * lookup(dataTable(), suffix.empty() ? f_.units.data : suffix, "data", e.line);
            case Dim::Rate: return v * lookup(rateTable(), suffix.empty() ? f_.units.rate : suffix, "rate", e.line);
            case Dim::Time: return v * lookup(timeTable(), suffix.empty() ? f_.units.time : suffix, "time", e.line);
            case Dim::Plain:
                if (!suffix.empty()) throw ParseError(e.line, key + " takes no unit");
                return v;
        }
        return v;
    }

    int serverIndex(const Entry& e, const std::string& token) const {
        auto it = std::find(f_.serverNames.begin(), f_.serverNames.end(), token);
        if (it != f_.serverNames.end()) return static_cast<int>(it - f_.serverNames.begin()) + 1;
        try {
            std::size_t used = 0;
            int v = std::stoi(token, &used);
            if (used == token.size() && v >= 1 && v <= static_cast<int>(f_.serverNames.size())) return v;
        } catch (const std::exception&) {
        }
        throw ParseError(e.line, "unknown server '" + token + "'");
    }

    ServiceKind kind(const Entry& e, ServiceKind fallback) const {
        auto it = e.kv.find("kind");
        if (it == e.kv.end()) return fallback;
        if (it->second == "strict") return ServiceKind::Strict;
        if (it->second == "subadditive") return ServiceKind::SubAdditiveMinPlus;
        if (it->second == "minplus") return ServiceKind::MinPlus;
        throw ParseError(e.line, "unknown server kind '" + it->second + "'");
    }

    void allow(const Entry& e, std::initializer_list<const char*> keys) const {
        for (const auto& [k, v] : e.kv)
            if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
                throw ParseError(e.line, "unexpected key '" + k + "' for " + e.type);
    }

    void server(const Entry& e) {
        Curve c;
        try {
            if (e.type == "rate-latency") {
                allow(e, {"R", "T", "kind"});
                c = rateLatency(value(e, "R", Dim::Rate), value(e, "T", Dim::Time), kind(e, ServiceKind::Strict));
            } else if (e.type == "constant-rate") {
                allow(e, {"R", "kind"});
                c = constantRate(value(e, "R", Dim::Rate), kind(e, ServiceKind::SubAdditiveMinPlus));
            } else if (e.type == "delay") {
                allow(e, {"m", "M"});
                c = transmissionDelay(value(e, "m", Dim::Time, Q(0)), value(e, "M", Dim::Time));
            } else if (e.type == "wfc") {
                allow(e, {"W", "R", "T"});
                c = wfcCurve(value(e, "W", Dim::Data), value(e, "R", Dim::Rate), value(e, "T", Dim::Time));
            } else {
                throw ParseError(e.line, "unknown server type '" + e.type + "'");
            }
        } catch (const KindError& k) {
            throw ParseError(e.line, k.what());
        } catch (const DomainError& d) {
            throw ParseError(e.line, d.what());
        }
        f_.network.base.servers.push_back(std::move(c));
    }

    void flow(const Entry& e) {
        if (e.type != "token-bucket") throw ParseError(e.line, "unknown flow type '" + e.type + "'");
        allow(e, {"r", "b", "path", "min-rate", "min-latency"});
        FlowSpec fs;
        fs.id = e.name;
        fs.alpha = tokenBucket(value(e, "r", Dim::Rate), value(e, "b", Dim::Data));
        auto it = e.kv.find("path");
        if (it == e.kv.end()) throw ParseError(e.line, "'" + e.name + "' needs path=");
        auto dash = it->second.find('-');
        fs.first = serverIndex(e, it->second.substr(0, dash));
        fs.last = dash == std::string::npos ? fs.first : serverIndex(e, it->second.substr(dash + 1));
        if (fs.first > fs.last) throw ParseError(e.line, "path of '" + e.name + "' runs backwards");
        if (e.kv.count("min-rate"))
            fs.minAlpha = MinArrival{value(e, "min-rate", Dim::Rate), value(e, "min-latency", Dim::Time, Q(0))};
        else if (e.kv.count("min-latency"))
            throw ParseError(e.line, "min-latency needs min-rate");
        f_.network.base.flows.push_back(std::move(fs));
    }

    void window(const Entry& e) {
        allow(e, {"s", "u", "W", "scope"});
        FeedbackTriple t;
        for (const char* k : {"s", "u"})
            if (!e.kv.count(k)) throw ParseError(e.line, "'" + e.name + "' needs " + k + "=");
        t.s = serverIndex(e, e.kv.at("s"));
        t.u = serverIndex(e, e.kv.at("u"));
        t.W = value(e, "W", Dim::Data);
        if (auto it = e.kv.find("scope"); it != e.kv.end()) {
            std::stringstream ss(it->second);
            std::string id;
            while (std::getline(ss, id, ','))
                if (!trim(id).empty()) t.scope.push_back(trim(id));
        }
        f_.network.triples.push_back(std::move(t));
        f_.windowNames.push_back(e.name);
    }

private:
    NetFile& f_;
};

Entry splitEntry(const std::string& line, int lineNo, bool typed) {
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineNo, "expected 'name = ...'");
    Entry e;
    e.line = lineNo;
    e.name = trim(line.substr(0, eq));
    if (e.name.empty()) throw ParseError(lineNo, "missing name");
    std::stringstream ss(line.substr(eq + 1));
    std::string tok;
    bool first = true;
    while (ss >> tok) {
        auto k = tok.find('=');
        if (k == std::string::npos) {
            if (typed && first) {
                e.type = tok;
                first = false;
                continue;
            }
            throw ParseError(lineNo, "expected key=value, got '" + tok + "'");
        }
        first = false;
        std::string key = tok.substr(0, k);
        if (e.kv.count(key)) throw ParseError(lineNo, "duplicate key '" + key + "'");
        e.kv[key] = tok.substr(k + 1);
    }
    if (typed && e.type.empty()) throw ParseError(lineNo, "missing type for '" + e.name + "'");
    return e;
}

}  // namespace

Q dataUnit(const std::string& name) { return lookup(dataTable(), name, "data", 0); }
Q rateUnit(const std::string& name) { return lookup(rateTable(), name, "rate", 0); }
Q timeUnit(const std::string& name) { return lookup(timeTable(), name, "time", 0); }

NetFile parseNetFile(const std::string& text) {
    NetFile f;
    Parser p(f);
    std::stringstream in(text);
    std::string raw, section;
    int lineNo = 0;
    std::vector<std::pair<int, std::string>> serverLines, flowLines, windowLines;
    std::map<std::string, std::pair<int, std::string>> analysis;
    std::set<std::string> seen;
    while (std::getline(in, raw)) {
        ++lineNo;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(lineNo, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> known{"units", "servers", "flows", "windows", "analysis"};
            if (!known.count(section)) throw ParseError(lineNo, "unknown section [" + section + "]");
            if (!seen.insert(section).second) throw ParseError(lineNo, "section [" + section + "] appears twice");
            continue;
        }
        if (section.empty()) throw ParseError(lineNo, "entry outside of any section");
        if (section == "units" || section == "analysis") {
            auto eq = line.find('=');
            if (eq == std::string::npos) throw ParseError(lineNo, "expected key = value");
            std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
            if (section == "units") {
                if (k == "data") {
                    lookup(dataTable(), v, "data", lineNo);
                    f.units.data = v;
                } else if (k == "rate") {
                    lookup(rateTable(), v, "rate", lineNo);
                    f.units.rate = v;
                } else if (k == "time" || k == "report-time") {
                    lookup(timeTable(), v, "time", lineNo);
                    (k == "time" ? f.units.time : f.units.reportTime) = v;
                } else {
                    throw ParseError(lineNo, "unknown unit key '" + k + "'");
                }
            } else {
                if (analysis.count(k)) throw ParseError(lineNo, "duplicate analysis key '" + k + "'");
                analysis[k] = {lineNo, v};
            }
        } else if (section == "servers") {
            serverLines.emplace_back(lineNo, line);
        } else if (section == "flows") {
            flowLines.emplace_back(lineNo, line);
        } else {
            windowLines.emplace_back(lineNo, line);
        }
    }
    // units may come after the sections that use them, so entries are read last
    for (const auto& [n, l] : serverLines) {
        Entry e = splitEntry(l, n, true);
        if (std::find(f.serverNames.begin(), f.serverNames.end(), e.name) != f.serverNames.end())
            throw ParseError(n, "duplicate server '" + e.name + "'");
        p.server(e);
        f.serverNames.push_back(e.name);
    }
    if (f.serverNames.empty()) throw ParseError(0, "no servers");
    for (const auto& [n, l] : flowLines) {
        Entry e = splitEntry(l, n, true);
        for (const auto& fl : f.network.base.flows)
            if (fl.id == e.name) throw ParseError(n, "duplicate flow '" + e.name + "'");
        p.flow(e);
    }
    if (f.network.base.flows.empty()) throw ParseError(0, "no flows");
    for (const auto& [n, l] : windowLines) p.window(splitEntry(l, n, false));

    for (const auto& [k, v] : analysis) {
        int n = v.first;
        const std::string& s = v.second;
        Entry e{k, "", {{k, s}}, n};
        if (k == "method") {
            if (s == "pmoo") f.method = Method::Pmoo;
            else if (s == "sequential") f.method = Method::Sequential;
            else if (s == "feedback") f.method = Method::Feedback;
            else throw ParseError(n, "unknown method '" + s + "'");
        } else if (k == "flow") {
            f.network.base.flowOfInterest = s;
        } else if (k == "grid-step" || k == "grid-horizon") {
            if (!f.grid) f.grid = GridSpec{Q(0), Q(0)};
            (k == "grid-step" ? f.grid->step : f.grid->horizon) = p.value(e, k, Dim::Time);
        } else {
            throw ParseError(n, "unknown analysis key '" + k + "'");
        }
    }
    if (f.grid && (f.grid->step.sign() <= 0 || f.grid->horizon.sign() <= 0))
        throw ParseError(0, "grid-step and grid-horizon must both be set and positive");
    auto& base = f.network.base;
    if (base.flowOfInterest.empty()) {
        if (base.flows.size() != 1) throw ParseError(0, "[analysis] flow = ... is required with several flows");
        base.flowOfInterest = base.flows[0].id;
    }
    try {
        f.network.validate();
        base.validate(f.method != Method::Feedback);
    } catch (const DomainError& d) {
        throw ParseError(0, d.what());
    } catch (const KindError& d) {
        throw ParseError(0, d.what());
    }
    return f;
}

NetFile loadNetFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parseNetFile(ss.str());
}

}  // namespace netcalc
