#include "doctest.h"
#include "netcalc/netfile.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace netcalc;

TEST_CASE("unit tables") {
    CHECK(dataUnit("Mb") == Q(1000000));
    CHECK(dataUnit("kB") == Q(8000));
    CHECK(rateUnit("Gbps") == Q(1000000000));
    CHECK(timeUnit("us") == Q(1, 1000000));
    CHECK_THROWS_AS(timeUnit("h"), ParseError);
}

TEST_CASE("parse a feedback network") {
    const char* text = R"(# comment
[units]
data = kb
rate = kbps
time = ms

[servers]
a = rate-latency R=10 T=5
b = rate-latency R=20 T=1ms kind=subadditive-free-test
)";
    // unknown server kind
    CHECK_THROWS_AS(parseNetFile(text), ParseError);

    const char* good = R"(
[units]
data = kb
rate = kbps
time = ms

[servers]
a = rate-latency R=10 T=5
b = constant-rate R=2Mbps kind=strict
c = delay M=2 m=1

[flows]
f = token-bucket r=1 b=2 path=a-c min-rate=1 min-latency=3
g = token-bucket r=500bps b=1kB path=2

[windows]
w = s=a u=b W=4 scope=f

[analysis]
method = feedback
flow = f
)";
    NetFile nf = parseNetFile(good);
    const auto& net = nf.network;
    REQUIRE(net.base.servers.size() == 3);
    CHECK(net.base.servers[0].fn == rateLatencyFn(10000, Q(1, 200)));
    CHECK(net.base.servers[1].fn == constantRateFn(2000000));
    CHECK(net.base.servers[1].kind == ServiceKind::Strict);
    CHECK(net.base.servers[2].kind == ServiceKind::TransmissionDelay);
    CHECK(net.base.servers[2].delayOffset == Q(1, 1000));
    REQUIRE(net.base.flows.size() == 2);
    CHECK(net.base.flows[0].alpha.fn == tokenBucketFn(1000, 2000));
    CHECK(net.base.flows[0].first == 1);
    CHECK(net.base.flows[0].last == 3);
    CHECK(net.base.flows[0].minAlpha->latency == Q(3, 1000));
    CHECK(net.base.flows[1].alpha.fn == tokenBucketFn(500, 8000));
    CHECK(net.base.flows[1].first == 2);
    CHECK(net.base.flows[1].last == 2);
    REQUIRE(net.triples.size() == 1);
    CHECK(net.triples[0].W == Q(4000));
    CHECK(net.triples[0].u == 2);
    CHECK(net.triples[0].scope == std::vector<std::string>{"f"});
    CHECK(nf.method == Method::Feedback);
    CHECK(net.base.flowOfInterest == "f");
    CHECK(nf.serverNames == std::vector<std::string>{"a", "b", "c"});
    CHECK(nf.windowNames == std::vector<std::string>{"w"});
}

TEST_CASE("parse errors report the line") {
    auto fails = [](const std::string& text, int line) {
        try {
            parseNetFile(text);
        } catch (const ParseError& e) {
            return e.line() == line;
        }
        return false;
    };
    CHECK(fails("[servers]\na = rate-latency R=1\n[flows]\nf = token-bucket r=1 b=1 path=a\n", 2));
    CHECK(fails("[servers]\na = rate-latency R=1 T=1\n[flows]\nf = token-bucket r=1 b=1 path=z\n", 4));
    CHECK(fails("[servers]\na = rate-latency R=1 T=1 T=2\n", 2));
    CHECK(fails("[bogus]\n", 1));
    CHECK(fails("[servers]\n[servers]\n", 2));
    CHECK(fails("a = rate-latency R=1 T=1\n", 1));
    CHECK(fails("[servers]\na = rate-latency R=-1 T=1\n", 2));
    CHECK(fails("[servers]\na = rate-latency R=1 T=1 color=red\n", 2));
    CHECK(fails("[servers]\na = rate-latency R=1 T=1\n[flows]\nf = token-bucket r=1 b=1 path=a\n"
                "g = token-bucket r=1 b=1 path=a\n",
                0));
    CHECK(fails("[servers]\na = rate-latency R=1 T=1\n[flows]\nf = token-bucket r=1 b=1 path=a\n[analysis]\nmethod = magic\n",
                6));
}

TEST_CASE("example network files load") {
    for (const auto& name : {"oneperwind.net", "nested.net", "interleave.net", "net-cex.net", "usecase.net", "two-hop.net",
                             "throttle.net"}) {
        CAPTURE(name);
        CHECK_NOTHROW(loadNetFile(std::string(NETCALC_NETWORK_DIR) + "/" + name));
    }
    CHECK_THROWS(loadNetFile(std::string(NETCALC_NETWORK_DIR) + "/missing.net"));
}

TEST_CASE("dump-curve output parses back") {
    const char* dir = std::getenv("NETCALC_ROUNDTRIP_DIR");
    if (!dir) return;
    int files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().filename().string().rfind("curve", 0) != 0) continue;
        std::ifstream in(entry.path());
        std::stringstream ss;
        ss << in.rdbuf();
        CAPTURE(entry.path().string());
        auto f = UppFunction::fromText(ss.str());
        CHECK(f.toText() == ss.str());
        CHECK(UppFunction::fromText(f.toText()) == f);
        ++files;
    }
    CHECK(files > 0);
}
