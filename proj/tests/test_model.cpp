#include <doctest.h>

#include <random>

#include "flowname/dns_pipeline.hpp"
#include "flowname/flow_pipeline.hpp"
#include "flowname/io.hpp"
#include "flowname/model.hpp"

using namespace flowname;

TEST_SUITE_BEGIN("model");

TEST_CASE("DnsRecord construction rejects violated invariants") {
    CHECK_NOTHROW(makeDnsRecord(0, RType::A, "edge.cdn.net", 60, "10.0.0.1"));
    CHECK_THROWS_AS(makeDnsRecord(-1, RType::A, "a.com", 60, "10.0.0.1"), std::invalid_argument);
    CHECK_THROWS_AS(makeDnsRecord(0, RType::A, "a.com", -1, "10.0.0.1"), std::invalid_argument);
    CHECK_THROWS_AS(makeDnsRecord(0, RType::A, "", 60, "10.0.0.1"), std::invalid_argument);
    CHECK_THROWS_AS(makeDnsRecord(0, RType::A, "a.com", 60, ""), std::invalid_argument);
    CHECK_THROWS_AS(makeDnsRecord(0, RType::A, "a.com", 60, "not-an-ip"), std::invalid_argument);
    CHECK_THROWS_AS(makeDnsRecord(0, RType::AAAA, "a.com", 60, "10.0.0.1"),
                    std::invalid_argument);
    CHECK_NOTHROW(makeDnsRecord(0, RType::AAAA, "a.com", 60, "2001:db8::1"));
    CHECK_NOTHROW(makeDnsRecord(0, RType::CNAME, "a.com", 60, "b.com"));
}

TEST_CASE("FlowRecord construction rejects violated invariants") {
    CHECK_NOTHROW(makeFlowRecord(0, "10.0.0.1", "192.0.2.9", 6, 443, 51000, 1, 1));
    CHECK_THROWS_AS(makeFlowRecord(0, "10.0.0.1", "192.0.2.9", 6, 443, 51000, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(makeFlowRecord(0, "10.0.0.1", "192.0.2.9", 6, 443, 51000, 1, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(makeFlowRecord(0, "10.0.0.1", "192.0.2.9", 6, 70000, 51000, 1, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(makeFlowRecord(0, "nope", "192.0.2.9", 6, 443, 51000, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("CorrelatedRecord invariants") {
    FlowRecord flow = makeFlowRecord(10, "10.0.0.1", "192.0.2.9", 6, 443, 51000, 2, 300);

    auto rec = makeCorrelatedRecord(flow, {"edge.cdn.net", "www.svc.com"});
    CHECK(rec.result == "www.svc.com");

    auto empty = makeCorrelatedRecord(flow, {});
    CHECK_FALSE(empty.result.has_value());
    CHECK(empty.chain.empty());

    // chain longer than 1 + chainLimit
    std::vector<std::string> tooLong(8, "x.com");
    CHECK_THROWS_AS(makeCorrelatedRecord(flow, tooLong, 6), std::invalid_argument);

    CorrelatedRecord bad;
    bad.flow = flow;
    bad.chain = {"a.com"};
    bad.result = "b.com";  // result must equal last chain element
    CHECK(validate(bad).has_value());
}

TEST_CASE("EngineConfig validation and variant normalization") {
    EngineConfig cfg;
    CHECK_FALSE(cfg.validate().has_value());

    cfg.numSplit = 0;
    CHECK(cfg.validate().has_value());

    EngineConfig noSplit;
    noSplit.variant = Variant::NoSplit;
    noSplit.numSplit = 10;
    CHECK(noSplit.normalized().numSplit == 1);
    CHECK_FALSE(noSplit.normalized().validate().has_value());
}

TEST_CASE("IP helpers canonicalize and classify") {
    CHECK(isIpv4("10.0.0.1"));
    CHECK_FALSE(isIpv4("10.0.0"));
    CHECK_FALSE(isIpv4("2001:db8::1"));
    CHECK(isIpv6("2001:db8::1"));
    CHECK_FALSE(isIpv6("10.0.0.1"));

    CHECK(canonicalIp("2001:DB8::1") == "2001:db8::1");
    CHECK(canonicalIp("2001:db8:0:0:0:0:0:1") == "2001:db8::1");
    CHECK(canonicalIp("10.0.0.1") == "10.0.0.1");
    CHECK_FALSE(canonicalIp("example.com").has_value());

    CHECK(ipFamilyOf("10.0.0.1") == IpFamily::V4);
    CHECK(ipFamilyOf("::1") == IpFamily::V6);
    CHECK_FALSE(ipFamilyOf("").has_value());
}

TEST_CASE("domain normalization folds case and strips trailing dots") {
    CHECK(normalizeDomain("WWW.Example.COM.") == "www.example.com");
    CHECK(normalizeDomain("a..") == "a");
    CHECK(normalizeDomain(".") == "");
    // non-ASCII bytes carried verbatim
    CHECK(normalizeDomain("bücher.Example") == "bücher.example");
}

namespace {

DnsRecord randomDnsRecord(std::mt19937_64& rng) {
    DnsRecord rec;
    rec.ts = static_cast<std::int64_t>(rng() % 1000000);
    rec.ttl = static_cast<std::int64_t>(rng() % 90000);
    switch (rng() % 3) {
        case 0:
            rec.rtype = RType::A;
            rec.answer = std::to_string(rng() % 256) + "." + std::to_string(rng() % 256) +
                         ".0." + std::to_string(rng() % 256);
            break;
        case 1:
            rec.rtype = RType::AAAA;
            rec.answer = "2001:db8::" + std::to_string(rng() % 9 + 1);
            break;
        default:
            rec.rtype = RType::CNAME;
            rec.answer = "ans" + std::to_string(rng() % 1000) + ".example.net";
            break;
    }
    rec.qname = "q" + std::to_string(rng() % 1000) + ".example.com";
    return rec;
}

FlowRecord randomFlowRecord(std::mt19937_64& rng) {
    FlowRecord rec;
    rec.ts = static_cast<std::int64_t>(rng() % 1000000);
    rec.srcIp = std::to_string(rng() % 256) + ".1.2." + std::to_string(rng() % 256);
    rec.dstIp = rng() % 2 ? "2001:db8::" + std::to_string(rng() % 9 + 1)
                          : "192.0.2." + std::to_string(rng() % 255 + 1);
    rec.dstIp = *canonicalIp(rec.dstIp);
    rec.proto = static_cast<int>(rng() % 256);
    rec.srcPort = static_cast<int>(rng() % 65536);
    rec.dstPort = static_cast<int>(rng() % 65536);
    rec.packets = rng() % 1000 + 1;
    rec.bytes = rng() % 100000 + 1;
    return rec;
}

}  // namespace

TEST_CASE("serialization round-trips: parse(format(x)) == x") {
    std::mt19937_64 rng(20260811);
    for (int i = 0; i < 300; ++i) {
        DnsRecord dns = randomDnsRecord(rng);
        auto dnsBack = parseDnsLine(formatDnsLine(dns));
        REQUIRE(dnsBack.ok());
        CHECK(dnsBack.value() == dns);

        FlowRecord flow = randomFlowRecord(rng);
        auto flowBack = parseFlowLine(formatFlowLine(flow));
        REQUIRE(flowBack.ok());
        CHECK(flowBack.value() == flow);

        CorrelatedRecord rec;
        rec.flow = flow;
        if (i % 3 != 0) {
            int hops = static_cast<int>(rng() % 3);
            rec.chain.push_back("edge" + std::to_string(i) + ".cdn.example");
            for (int h = 0; h < hops; ++h) {
                rec.chain.push_back("n" + std::to_string(h) + ".example.com");
            }
            rec.result = rec.chain.back();
        }
        auto outBack = parseOutputLine(formatOutputLine(rec));
        REQUIRE(outBack.ok());
        // ports/proto are not part of the output format
        CorrelatedRecord expected = rec;
        expected.flow.proto = 0;
        expected.flow.srcPort = 0;
        expected.flow.dstPort = 0;
        CHECK(outBack.value() == expected);
    }
}

TEST_SUITE_END();
