// netcalc: batch front-end for network description files.
//
// Exit codes: 0 ok, 1 input or usage error, 2 refusal, 3 unstable.

#include "netcalc/netfile.hpp"
#include "netcalc/trajectory.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace netcalc;

namespace {

enum Exit { kOk = 0, kInput = 1, kRefused = 2, kUnstable = 3 };

struct Format {
    bool csv = false;
    bool exact = false;
    int precision = 9;

    [[nodiscard]] std::string num(const Q& v) const { return exact ? v.str() : v.decimal(precision); }
};

std::string csvField(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

class Report {
public:
    Report(const Format& fmt, const Units& u) : fmt_(fmt), u_(u) {
        if (fmt_.csv) os_ << "kind,label,value,extra\n";
    }

    void row(const std::string& kind, const std::string& label, const std::string& value, const std::string& extra = {}) {
        if (fmt_.csv) {
            os_ << csvField(kind) << ',' << csvField(label) << ',' << csvField(value) << ',' << csvField(extra) << '\n';
        } else {
            os_ << label << ": " << value << (extra.empty() ? "" : " " + extra) << '\n';
        }
    }
    void line(const std::string& kind, const std::string& text) {
        if (fmt_.csv) row(kind, "", text);
        else os_ << "  " << text << '\n';
    }
    void heading(const std::string& text) {
        if (!fmt_.csv) os_ << text << '\n';
    }
    void curve(const std::string& label, const UppFunction& f) {
        if (fmt_.csv) {
            std::string text = f.toText();
            std::replace(text.begin(), text.end(), '\n', ';');
            row("curve", label, text);
            return;
        }
        os_ << label << " (bit, s):\n";
        std::stringstream ss(f.toText());
        std::string l;
        while (std::getline(ss, l)) os_ << "    " << l << '\n';
    }

    std::string time(const Q& v) const { return fmt_.num(v.isInf() ? v : v / timeUnit(u_.reportTime)); }
    std::string data(const Q& v) const { return fmt_.num(v.isInf() ? v : v / dataUnit(u_.data)); }
    std::string rate(const Q& v) const { return fmt_.num(v.isInf() ? v : v / rateUnit(u_.rate)); }

    void margins(const std::vector<StabilityMargin>& ms) {
        heading("stability:");
        for (const auto& m : ms) {
            if (fmt_.csv) {
                row("margin", m.label, rate(m.arrivalRate), rate(m.serviceRate));
            } else {
                os_ << "  " << m.label << ": arrival " << rate(m.arrivalRate) << " " << u_.rate << ", service "
                    << rate(m.serviceRate) << " " << u_.rate << (m.stable() ? "" : "  UNSTABLE") << '\n';
            }
        }
    }

    void print() const { std::cout << os_.str(); }

private:
    const Format& fmt_;
    const Units& u_;
    std::ostringstream os_;
};

int emitAnalysis(Report& rep, const AnalysisReport& ar, const Units& u) {
    rep.margins(ar.margins);
    rep.heading("diagnostics:");
    for (const auto& d : ar.diagnostics) rep.line("diagnostic", d);
    if (ar.unstable) {
        rep.row("status", "status", "unstable");
        return kUnstable;
    }
    rep.row("bound", "delay", rep.time(ar.delayBound), u.reportTime);
    rep.row("bound", "backlog", rep.data(ar.backlogBound), u.data);
    rep.curve("e2e curve", ar.e2e.fn);
    rep.row("status", "status", "ok");
    return kOk;
}

AnalysisReport runTandem(const NetFile& nf, const TandemNetwork& net) {
    if (nf.method == Method::Sequential) return sequentialAnalysis(net);
    if (nf.method == Method::Pmoo) return pmooAnalysis(net, nf.grid);
    // open-loop equivalents carry sub-additive throttles, so the sequential analysis applies
    return sequentialAnalysis(net);
}

int refuseStructure(Report& rep, const NetFile& nf, const StructureClass& cls) {
    rep.row("structure", "structure", structureName(cls.kind));
    if (!cls.witness.empty()) rep.row("refusal", "witness", cls.witness);
    if (cls.kind == StructureKind::RuleHViolation) {
        try {
            InstabilityWitness w = instabilityWitness(nf.network);
            rep.heading("instability witness:");
            if (w.hasGrowth) {
                rep.row("witness", "growth-rate", rep.rate(w.growthRate), nf.units.rate);
                rep.row("witness", "onset", rep.time(w.onset), nf.units.reportTime);
            }
            rep.row("witness", "uncontrolled-backlog", rep.data(w.uncontrolledBacklog), nf.units.data);
            rep.row("witness", "window", rep.data(w.window), nf.units.data);
            rep.row("witness", "exceeds-window", w.exceedsWindow ? "yes" : "no");
        } catch (const DomainError& e) {
            rep.row("witness", "witness", std::string("not available: ") + e.what());
        }
    }
    rep.row("status", "status", "refused");
    return kRefused;
}

int analyze(const NetFile& nf, const Format& fmt) {
    Report rep(fmt, nf.units);
    static const char* names[] = {"pmoo", "sequential", "feedback"};
    rep.row("info", "method", names[static_cast<int>(nf.method)]);
    rep.row("info", "flow", nf.network.base.flowOfInterest);
    int code = kOk;
    if (nf.method != Method::Feedback) {
        if (!nf.network.triples.empty()) throw DomainError("windows are only analyzed with method = feedback");
        code = emitAnalysis(rep, runTandem(nf, nf.network.base), nf.units);
        rep.print();
        return code;
    }
    StructureClass cls = classifyStructure(nf.network);
    if (!cls.supported()) {
        code = refuseStructure(rep, nf, cls);
        rep.print();
        return code;
    }
    rep.row("structure", "structure", structureName(cls.kind));
    OpenLoopResult ol = openLoopTransform(nf.network);
    rep.heading("throttles:");
    for (std::size_t i = 0; i < ol.triples.size(); ++i) {
        std::size_t orig = 0;
        for (std::size_t k = 0; k < nf.network.triples.size(); ++k) {
            const auto& t = nf.network.triples[k];
            if (t.s == ol.triples[i].s && t.u == ol.triples[i].u && t.W == ol.triples[i].W) orig = k;
        }
        const std::string& name = nf.windowNames[orig];
        rep.row("throttle", name, rep.rate(ol.throttles[i].fn.longRunRate()), nf.units.rate);
        rep.curve("throttle " + name, ol.throttles[i].fn);
    }
    for (const auto& d : ol.diagnostics) rep.line("diagnostic", d);
    StabilityReport st = stabilityCheck(ol.network);
    if (!st.stable) {
        rep.margins(st.margins);
        rep.row("status", "status", "unstable");
        rep.print();
        return kUnstable;
    }
    code = emitAnalysis(rep, runTandem(nf, ol.network), nf.units);
    rep.print();
    return code;
}

int check(const NetFile& nf, const Format& fmt) {
    Report rep(fmt, nf.units);
    StabilityReport st;
    if (!nf.network.triples.empty()) {
        StructureClass cls = classifyStructure(nf.network);
        if (!cls.supported()) {
            int code = refuseStructure(rep, nf, cls);
            rep.print();
            return code;
        }
        rep.row("structure", "structure", structureName(cls.kind));
        st = stabilityCheck(nf.network);
    } else {
        rep.row("structure", "structure", "open-loop");
        st = stabilityCheck(nf.network.base);
    }
    rep.margins(st.margins);
    rep.row("status", "status", st.stable ? "stable" : "unstable");
    rep.print();
    return st.stable ? kOk : kUnstable;
}

int dumpCurve(const NetFile& nf, const std::string& id, const std::string& grid, const Format& fmt) {
    const auto& base = nf.network.base;
    std::optional<UppFunction> f;
    for (std::size_t j = 0; j < nf.serverNames.size(); ++j)
        if (nf.serverNames[j] == id) f = base.servers[j].fn;
    for (const auto& fl : base.flows)
        if (!f && fl.id == id) f = fl.alpha.fn;
    for (std::size_t k = 0; k < nf.windowNames.size() && !f; ++k) {
        if (nf.windowNames[k] != id) continue;
        OpenLoopResult ol = openLoopTransform(nf.network);
        const auto& t = nf.network.triples[k];
        for (std::size_t i = 0; i < ol.triples.size(); ++i)
            if (ol.triples[i].s == t.s && ol.triples[i].u == t.u) f = ol.throttles[i].fn;
    }
    if (!f && id == "e2e") {
        const TandemNetwork* net = &base;
        OpenLoopResult ol;
        if (nf.method == Method::Feedback) {
            ol = openLoopTransform(nf.network);
            net = &ol.network;
        }
        f = runTandem(nf, *net).e2e.fn;
    }
    if (!f) throw DomainError("unknown curve id '" + id + "'");

    if (!grid.empty()) {
        auto comma = grid.find(',');
        if (comma == std::string::npos) throw DomainError("--grid takes STEP,HORIZON in seconds");
        GridTrajectory g = sample(*f, Q::parse(grid.substr(0, comma)), Q::parse(grid.substr(comma + 1)));
        std::cout << "t,value\n";
        for (std::size_t k = 0; k < g.size(); ++k) std::cout << fmt.num(g.time(k)) << ',' << fmt.num(g.values[k]) << '\n';
        return kOk;
    }
    std::string text = f->toText();
    if (!fmt.csv) {
        std::cout << text;
        return kOk;
    }
    std::stringstream ss(text);
    std::string l;
    while (std::getline(ss, l)) {
        for (char& c : l)
            if (c == ' ') c = ',';
        std::cout << l << '\n';
    }
    return kOk;
}

std::vector<Q> parseList(const std::string& s) {
    std::vector<Q> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(Q::parse(tok));
    return out;
}

int compare(int nMax, const std::string& rPrime, const std::string& outPath, const Format& fmt) {
    if (nMax < 1) throw DomainError("--n-max must be at least 1");
    std::vector<Q> rates = parseList(rPrime);
    if (rates.empty()) throw DomainError("--r-prime needs at least one rate");
    auto rows = compareTandem(nMax, rates, defaultUseCase());
    std::ostringstream os;
    os << "n,r_prime,D_conventional,D_unconventional\n";
    for (const auto& r : rows)
        os << r.hops << ',' << fmt.num(r.minRate) << ',' << fmt.num(r.conventional) << ',' << fmt.num(r.unconventional)
           << '\n';
    if (outPath.empty() || outPath == "-") {
        std::cout << os.str();
        return kOk;
    }
    std::ofstream out(outPath);
    if (!out) throw std::runtime_error("cannot write '" + outPath + "'");
    out << os.str();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic network analysis with exact (min,plus) curves"};
    app.require_subcommand(1);
    Format fmt;
    std::string format = "text";
    auto addFormat = [&](CLI::App* sub) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv"}));
        sub->add_flag("--exact", fmt.exact, "Print exact rationals");
        sub->add_option("--precision", fmt.precision, "Significant digits for decimals")->check(CLI::Range(1, 60));
    };

    std::string file, id, grid, rPrime = "0.5,1.25,2.5,3.75,5", outPath;
    int nMax = 20;
    auto* an = app.add_subcommand("analyze", "Analyze a network file");
    an->add_option("file", file)->required();
    addFormat(an);
    auto* ck = app.add_subcommand("check", "Structure classification and stability only");
    ck->add_option("file", file)->required();
    addFormat(ck);
    auto* dc = app.add_subcommand("dump-curve", "Print a curve: server, flow, window name or e2e");
    dc->add_option("file", file)->required();
    dc->add_option("id", id)->required();
    dc->add_option("--grid", grid, "STEP,HORIZON in seconds: print samples instead of breakpoints");
    addFormat(dc);
    auto* ct = app.add_subcommand("compare-tandem", "Conventional vs minimum-arrival-curve delay sweep (CSV)");
    ct->add_option("--n-max", nMax, "Largest number of hops");
    ct->add_option("--r-prime", rPrime, "Comma-separated minimum rates in Mbps");
    ct->add_option("--out", outPath, "Output path (default stdout)");
    ct->add_flag("--exact", fmt.exact, "Print exact rationals");
    ct->add_option("--precision", fmt.precision, "Significant digits for decimals")->check(CLI::Range(1, 60));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kInput;
    }
    fmt.csv = format == "csv";

    try {
        if (ct->parsed()) return compare(nMax, rPrime, outPath, fmt);
        NetFile nf = loadNetFile(file);
        if (an->parsed()) return analyze(nf, fmt);
        if (ck->parsed()) return check(nf, fmt);
        return dumpCurve(nf, id, grid, fmt);
    } catch (const StructureError& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return kRefused;
    } catch (const KindError& e) {
        std::cerr << "refused: " << e.what() << '\n';
        if (!e.witness().empty()) std::cerr << "witness: " << e.witness() << '\n';
        return kRefused;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    }
}
