#include "flowname/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "flowname/analysis.hpp"
#include "flowname/engine.hpp"
#include "flowname/harness.hpp"
#include "flowname/io.hpp"

namespace flowname {

namespace {

std::atomic<bool> g_stopRequested{false};

void onSignal(int) { g_stopRequested.store(true, std::memory_order_relaxed); }

const std::vector<std::string>& variantNames() {
    static const std::vector<std::string> names = {"main",        "no-split",
                                                   "no-clear-up", "no-rotation",
                                                   "no-long-maps", "exact-ttl"};
    return names;
}

// Mutable flag targets for one (sub)command; CLI11 binds references.
struct ConfigFlags {
    std::string variant = "main";
    std::int64_t longInterval = 0;  // 0 = never cleared

    void attach(CLI::App& app, EngineConfig& cfg) {
        app.add_option("--a-interval", cfg.aClearUpInterval,
                       "IP-NAME clear-up interval, seconds")
            ->capture_default_str();
        app.add_option("--c-interval", cfg.cClearUpInterval,
                       "NAME-CNAME clear-up interval, seconds")
            ->capture_default_str();
        app.add_option("--long-interval", longInterval,
                       "long-map clear-up interval, seconds (0 = never)")
            ->capture_default_str();
        app.add_option("--num-split", cfg.numSplit, "shards per hashmap family")
            ->capture_default_str();
        app.add_option("--chain-limit", cfg.chainLimit, "max CNAME hops per lookup")
            ->capture_default_str();
        app.add_option("--variant", variant, "engine variant")
            ->check(CLI::IsMember(variantNames()))
            ->capture_default_str();
        app.add_option("--queue-cap", cfg.queueCapacity, "capacity per internal queue")
            ->capture_default_str();
        app.add_option("--fill-workers", cfg.fillWorkers, "FillUp workers per DNS stream (live)")
            ->capture_default_str();
        app.add_option("--lookup-workers", cfg.lookupWorkers,
                       "LookUp workers per flow stream (live)")
            ->capture_default_str();
        app.add_option("--write-workers", cfg.writeWorkers, "write workers")
            ->capture_default_str();
        app.add_option("--roll-interval", cfg.rollInterval,
                       "output file roll interval, logical seconds")
            ->capture_default_str();
        app.add_flag("--use-dst-ip", cfg.useDstIp, "correlate on destination IP instead of source");
    }

    // Applies flag values that cannot bind directly.
    std::optional<std::string> finish(EngineConfig& cfg) const {
        auto v = variantFromName(variant);
        if (!v) return "unknown variant: " + variant;
        cfg.variant = *v;
        if (longInterval > 0) {
            cfg.longClearUpInterval = longInterval;
        } else {
            cfg.longClearUpInterval.reset();
        }
        if (cfg.variant == Variant::NoSplit) cfg.numSplit = 1;
        return cfg.validate();
    }
};

Parsed<std::vector<SourceSpec>> parseSources(const std::vector<std::string>& texts) {
    std::vector<SourceSpec> specs;
    for (const auto& t : texts) {
        auto s = SourceSpec::parse(t);
        if (!s) return s.error();
        specs.push_back(std::move(s.value()));
    }
    return specs;
}

int fail(const std::string& message) {
    std::cerr << "error: " << message << '\n';
    return 1;
}

std::vector<std::string> expandCorrelated(const std::vector<std::string>& paths) {
    std::vector<std::string> files;
    for (const auto& p : paths) {
        if (std::filesystem::is_directory(p)) {
            for (const auto& entry : std::filesystem::directory_iterator(p)) {
                const auto name = entry.path().filename().string();
                if (name.rfind("correlated-", 0) == 0 && entry.path().extension() == ".tsv") {
                    files.push_back(entry.path().string());
                }
            }
        } else {
            files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

Parsed<std::vector<CorrelatedRecord>> loadCorrelated(const std::vector<std::string>& paths) {
    std::vector<CorrelatedRecord> records;
    for (const auto& file : expandCorrelated(paths)) {
        std::ifstream in(file);
        if (!in.is_open()) return ParseError{0, "cannot open correlated file: " + file};
        std::string line;
        std::size_t lineNo = 0;
        while (std::getline(in, line)) {
            ++lineNo;
            auto rec = parseOutputLine(line, lineNo);
            if (!rec) return ParseError{lineNo, file + ": " + rec.error().message};
            records.push_back(std::move(rec.value()));
        }
    }
    return records;
}

int runEngineCommand(const EngineConfig& cfg, const std::vector<std::string>& dnsTexts,
                     const std::vector<std::string>& flowTexts, const std::string& outDir,
                     RunReport* reportOut) {
    auto dns = parseSources(dnsTexts);
    if (!dns) return fail(dns.error().message);
    auto flows = parseSources(flowTexts);
    if (!flows) return fail(flows.error().message);

    Engine engine(cfg, dns.value(), flows.value(), outDir);

    std::signal(SIGINT, onSignal);
    std::signal(SIGTERM, onSignal);
    std::atomic<bool> done{false};
    std::thread watcher([&] {
        while (!done.load(std::memory_order_relaxed)) {
            if (g_stopRequested.load(std::memory_order_relaxed)) {
                engine.requestStop();
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
    });

    int rc = 0;
    try {
        RunReport report = engine.run();
        report.writeKeyValues(std::cout);
        if (!report.fatalError.empty()) {
            std::cerr << "fatal: " << report.fatalError << '\n';
            rc = 1;
        }
        if (reportOut) *reportOut = std::move(report);
    } catch (const std::exception& e) {
        rc = fail(e.what());
    }
    done.store(true, std::memory_order_relaxed);
    watcher.join();
    return rc;
}

}  // namespace

Parsed<EngineConfig> parseEngineFlags(const std::vector<std::string>& args) {
    CLI::App app{"engine flags"};
    app.set_config("--config");
    EngineConfig cfg;
    ConfigFlags flags;
    flags.attach(app, cfg);
    try {
        // CLI11 wants argv order reversed.
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return ParseError{0, e.what()};
    }
    if (auto err = flags.finish(cfg)) return ParseError{0, *err};
    return cfg;
}

std::string emitEngineConfig(const EngineConfig& config) {
    std::string out;
    out += "a-interval=" + std::to_string(config.aClearUpInterval) + "\n";
    out += "c-interval=" + std::to_string(config.cClearUpInterval) + "\n";
    out += "long-interval=" + std::to_string(config.longClearUpInterval.value_or(0)) + "\n";
    out += "num-split=" + std::to_string(config.numSplit) + "\n";
    out += "chain-limit=" + std::to_string(config.chainLimit) + "\n";
    out += "variant=" + std::string(variantName(config.variant)) + "\n";
    out += "queue-cap=" + std::to_string(config.queueCapacity) + "\n";
    out += "fill-workers=" + std::to_string(config.fillWorkers) + "\n";
    out += "lookup-workers=" + std::to_string(config.lookupWorkers) + "\n";
    out += "write-workers=" + std::to_string(config.writeWorkers) + "\n";
    out += "roll-interval=" + std::to_string(config.rollInterval) + "\n";
    out += "use-dst-ip=" + std::string(config.useDstIp ? "true" : "false") + "\n";
    return out;
}

int runCli(int argc, const char* const* argv) {
    CLI::App app{"passive-DNS / flow correlation engine"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read flags from a config file");

    // --- run ---
    auto* run = app.add_subcommand("run", "correlate DNS and flow streams");
    std::vector<std::string> dnsTexts;
    std::vector<std::string> flowTexts;
    std::string outDir = "out";
    EngineConfig runCfg;
    ConfigFlags runFlags;
    run->add_option("--dns", dnsTexts, "DNS source: path, '-', or tcp:PORT")->required();
    run->add_option("--flows", flowTexts, "flow source: path, '-', or tcp:PORT")->required();
    run->add_option("--out", outDir, "output directory")->capture_default_str();
    runFlags.attach(*run, runCfg);

    // --- generate ---
    auto* gen = app.add_subcommand("generate", "generate a synthetic workload with ground truth");
    WorkloadSpec genSpec;
    std::string genOut = "workload";
    int genScenario = 0;
    std::string genSharing = "disjoint";
    gen->add_option("--out", genOut, "output directory")->capture_default_str();
    gen->add_option("--scenario", genScenario, "accuracy scenario preset (1 or 2)")
        ->check(CLI::Range(1, 2));
    gen->add_option("--duration", genSpec.durationSeconds, "logical seconds of traffic")
        ->capture_default_str();
    gen->add_option("--start-ts", genSpec.startTs, "first record timestamp")
        ->capture_default_str();
    gen->add_option("--dns-rate", genSpec.dnsRate, "extra DNS records per second")
        ->capture_default_str();
    gen->add_option("--flow-rate", genSpec.flowRate, "flows per second")->capture_default_str();
    gen->add_option("--services", genSpec.numServices, "number of services")
        ->capture_default_str();
    gen->add_option("--cname-min", genSpec.cnameDepthMin, "min CNAME chain depth")
        ->capture_default_str();
    gen->add_option("--cname-max", genSpec.cnameDepthMax, "max CNAME chain depth")
        ->capture_default_str();
    gen->add_option("--ip-sharing", genSharing, "disjoint | shared")
        ->check(CLI::IsMember({"disjoint", "shared"}))
        ->capture_default_str();
    gen->add_option("--seed", genSpec.seed, "workload seed")->capture_default_str();

    // --- bench ---
    auto* bench = app.add_subcommand("bench", "run a variant benchmark over a workload");
    std::string benchDns;
    std::string benchFlows;
    std::string benchOut = "bench-out";
    std::int64_t benchWindow = 300;
    EngineConfig benchCfg;
    ConfigFlags benchFlags;
    bench->add_option("--dns", benchDns, "DNS input file")->required();
    bench->add_option("--flows", benchFlows, "flow input file")->required();
    bench->add_option("--out", benchOut, "metrics/output directory")->capture_default_str();
    bench->add_option("--window", benchWindow, "names-per-IP window, logical seconds")
        ->capture_default_str();
    benchFlags.attach(*bench, benchCfg);

    // --- eval ---
    auto* eval = app.add_subcommand("eval", "evaluate correlated output against ground truth");
    std::vector<std::string> evalFiles;
    std::string evalTruth;
    eval->add_option("--correlated", evalFiles, "correlated output file(s) or directory")
        ->required();
    eval->add_option("--truth", evalTruth, "ground truth file")->required();

    // --- aggregate ---
    auto* agg = app.add_subcommand("aggregate", "per-domain / per-category traffic report");
    std::vector<std::string> aggFiles;
    std::string aggBlocklist;
    std::string aggOut;
    bool aggLenient = false;
    agg->add_option("--correlated", aggFiles, "correlated output file(s) or directory")
        ->required();
    agg->add_option("--blocklist", aggBlocklist, "domain blocklist TSV");
    agg->add_option("--out", aggOut, "directory for category CDF CSVs");
    agg->add_flag("--lenient", aggLenient, "allow digit-first labels");

    // --- validate ---
    auto* val = app.add_subcommand("validate", "check domain names against the three name rules");
    std::string valNames;
    bool valLenient = false;
    val->add_option("--names", valNames, "file with one domain name per line")->required();
    val->add_flag("--lenient", valLenient, "allow digit-first labels");

    // --- coverage ---
    auto* cov = app.add_subcommand("coverage", "estimate DNS coverage from resolver traffic");
    std::string covFlows;
    std::string covResolvers;
    cov->add_option("--flows", covFlows, "flow input file")->required();
    cov->add_option("--resolvers", covResolvers, "public resolver list, one IP per line")
        ->required();

    // --- bidir ---
    auto* bidir = app.add_subcommand("bidir", "return-traffic report for malformed domains");
    std::vector<std::string> bidirFiles;
    bool bidirLenient = false;
    bidir->add_option("--correlated", bidirFiles, "correlated output file(s) or directory")
        ->required();
    bidir->add_flag("--lenient", bidirLenient, "allow digit-first labels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (*run) {
        if (auto err = runFlags.finish(runCfg)) return fail(*err);
        return runEngineCommand(runCfg, dnsTexts, flowTexts, outDir, nullptr);
    }

    if (*gen) {
        if (genScenario != 0) {
            std::uint64_t seed = genSpec.seed;
            genSpec = scenarioSpec(genScenario);
            if (gen->count("--seed")) genSpec.seed = seed;
        } else {
            genSpec.ipSharing =
                genSharing == "shared" ? IpSharing::SharedIp : IpSharing::Disjoint;
        }
        try {
            auto workload = generateWorkload(genSpec, genOut);
            std::cout << "dns=" << workload.dnsPath << '\n'
                      << "flows=" << workload.flowPath << '\n'
                      << "truth=" << workload.truthPath << '\n'
                      << "dns_records=" << workload.dnsRecords << '\n'
                      << "flow_records=" << workload.flowRecords << '\n';
        } catch (const std::exception& e) {
            return fail(e.what());
        }
        return 0;
    }

    if (*bench) {
        if (auto err = benchFlags.finish(benchCfg)) return fail(*err);
        auto result = runBenchmark(benchCfg, benchDns, benchFlows, benchOut, benchWindow);
        if (!result) return fail(result.error().message);
        std::cout << "metrics=" << result.value().metricsPath << '\n';
        std::cout << "correlation_rate=" << result.value().report.correlationRate() << '\n';
        std::cout << "peak_entries=" << result.value().report.peakEntries << '\n';
        if (!result.value().report.fatalError.empty()) {
            return fail(result.value().report.fatalError);
        }
        return 0;
    }

    if (*eval) {
        auto report = evaluateAccuracy(expandCorrelated(evalFiles), evalTruth);
        if (!report) return fail(report.error().toString());
        std::cout << "flows=" << report.value().flows << '\n'
                  << "result_correct=" << report.value().resultCorrect << '\n'
                  << "chain_contains=" << report.value().chainContains << '\n'
                  << "accuracy=" << report.value().accuracy() << '\n'
                  << "chain_accuracy=" << report.value().chainAccuracy() << '\n';
        return 0;
    }

    if (*agg) {
        Blocklist blocklist;
        if (!aggBlocklist.empty()) {
            auto bl = Blocklist::load(aggBlocklist);
            if (!bl) return fail(bl.error().toString());
            blocklist = std::move(bl.value());
        }
        auto records = loadCorrelated(aggFiles);
        if (!records) return fail(records.error().message);
        TrafficAggregator aggregator(aggBlocklist.empty() ? nullptr : &blocklist, aggLenient);
        for (const auto& rec : records.value()) aggregator.add(rec);
        auto report = aggregator.finish();

        std::cout << "records=" << report.records << '\n'
                  << "total_bytes=" << report.totalBytes << '\n'
                  << "correlated_bytes=" << report.correlatedBytes << '\n'
                  << "correlation_rate=" << report.correlationRate() << '\n';
        for (const auto& [category, bytes] : report.categoryBytes) {
            std::cout << "category." << category << "=" << bytes << '\n';
        }
        if (!aggOut.empty()) {
            std::filesystem::create_directories(aggOut);
            for (const auto& [category, ranked] : report.ranking) {
                std::ofstream os(std::filesystem::path(aggOut) / ("cdf_" + category + ".csv"),
                                 std::ios::trunc);
                writeCategoryCdfCsv(os, report, category);
            }
        }
        return 0;
    }

    if (*val) {
        std::ifstream in(valNames);
        if (!in.is_open()) return fail("cannot open names file: " + valNames);
        std::string line;
        std::uint64_t invalid = 0, total = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            ++total;
            auto report = validateDomain(line, valLenient);
            std::cout << line << '\t';
            if (report.valid()) {
                std::cout << "ok";
            } else {
                ++invalid;
                bool first = true;
                for (auto v : report.violations) {
                    if (!first) std::cout << ',';
                    std::cout << violationName(v);
                    first = false;
                }
            }
            std::cout << '\n';
        }
        std::cerr << "checked=" << total << " invalid=" << invalid << '\n';
        return 0;
    }

    if (*cov) {
        auto resolvers = ResolverSet::load(covResolvers);
        if (!resolvers) return fail(resolvers.error().toString());
        std::ifstream in(covFlows);
        if (!in.is_open()) return fail("cannot open flow file: " + covFlows);
        CoverageAccumulator acc(resolvers.value());
        std::string line;
        std::size_t lineNo = 0;
        while (std::getline(in, line)) {
            ++lineNo;
            auto rec = parseFlowLine(line, lineNo);
            if (rec) acc.add(rec.value());
        }
        auto report = acc.finish();
        if (!report) return fail("no DNS/DoT-port flows in input; coverage is undefined");
        std::cout << "dns_port_flows=" << report->dnsPortFlows << '\n'
                  << "public_resolver_flows=" << report->publicResolverFlows << '\n'
                  << "public_fraction=" << report->publicFraction() << '\n'
                  << "coverage=" << report->coverage() << '\n';
        return 0;
    }

    if (*bidir) {
        auto records = loadCorrelated(bidirFiles);
        if (!records) return fail(records.error().message);
        auto report = bidirectionalReport(records.value(), bidirLenient);
        std::cout << "malformed_inbound_flows=" << report.malformedInboundFlows << '\n'
                  << "clients_receiving=" << report.clientsReceiving << '\n'
                  << "clients_replying=" << report.clientsReplying << '\n'
                  << "client_fraction=" << report.clientFraction() << '\n'
                  << "malformed_remotes=" << report.malformedRemotes << '\n'
                  << "remotes_replied_to=" << report.remotesRepliedTo << '\n'
                  << "remote_fraction=" << report.remoteFraction() << '\n'
                  << "bidirectional_packets=" << report.bidirectionalPackets << '\n'
                  << "total_packets=" << report.totalPackets << '\n'
                  << "packet_share=" << report.packetShare() << '\n';
        return 0;
    }

    return 0;
}

}  // namespace flowname
