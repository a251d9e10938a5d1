// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

// gadgetsim: run scenarios, check traces, run the corpus, play demos.
// Exit status: 0 pass, 1 a verdict failed, 2 bad usage, config or I/O.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gadget/demos.hpp"
#include "gadget/gadget.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kError = 2;

int cmd_run(const std::string& config, const std::string& out, std::optional<std::uint64_t> seed) {
    gadget::ScenarioConfig cfg = gadget::load_config(config);
    if (seed) cfg.seed = *seed;
    cfg.validate();
    gadget::Trace t = gadget::run(cfg);
    std::filesystem::path p(out);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + out);
    t.write_jsonl(os);
    std::cout << cfg.name << ": " << t.size() << " events over " << cfg.horizon + 1 << " rounds -> " << out << '\n';
    return kPass;
}

int cmd_check(const std::string& path, const std::string& checker, std::optional<gadget::Round> u) {
    gadget::Trace t = gadget::Trace::load(path);
    std::vector<gadget::check::Verdict> verdicts;
    if (checker.empty()) {
        verdicts = gadget::check::check_all(t);
        if (u) verdicts[1] = gadget::check::check_liveness(t, *u);
    } else if (checker == "liveness" && u) {
        verdicts.push_back(gadget::check::check_liveness(t, *u));
    } else if (auto v = gadget::check::run_checker(checker, t)) {
        verdicts.push_back(*v);
    } else {
        std::cerr << "unknown checker '" << checker << "'\n";
        return kError;
    }
    std::size_t ok = 0;
    for (const auto& v : verdicts) {
        std::cout << (v.pass ? "pass  " : "FAIL  ") << v.name << ": " << v.evidence << '\n';
        ok += v.pass ? 1 : 0;
    }
    auto lat = gadget::check::measure_u_pi(t);
    std::cout << "u_pi configured " << t.header.u_pi << ", observed worst " << lat.worst << " over " << lat.samples
              << " samples\n";
    std::cout << ok << '/' << verdicts.size() << " checkers pass\n";
    return ok == verdicts.size() ? kPass : kFail;
}

int cmd_suite(const std::string& dir, std::size_t seeds) {
    auto corpus = gadget::suite::load_corpus(dir);
    if (corpus.empty()) throw std::runtime_error("no scenarios in " + dir);
    auto report = gadget::suite::run_corpus(corpus, seeds);
    gadget::suite::print_table(std::cout, report);
    return report.ok() ? kPass : kFail;
}

int cmd_demo(const std::string& name) {
    const auto* d = gadget::demo::find(name);
    if (!d) {
        std::cerr << "unknown demo '" << name << "'; choose eve, no-wait or double-spend\n";
        return kError;
    }
    gadget::demo::run_demo(std::cout, *d);
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic simulator and checkers for the freezing and recovery gadgets"};
    app.require_subcommand(1);

    std::string config, trace_out;
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "Run one scenario and write its trace");
    run->add_option("--config", config, "Scenario JSON")->required();
    run->add_option("--trace-out", trace_out, "Trace output (JSONL)")->required();
    run->add_option("--seed", seed, "Override the scenario seed");

    std::string trace_in, checker;
    std::optional<gadget::Round> u;
    auto* check = app.add_subcommand("check", "Check a persisted trace");
    check->add_option("--trace", trace_in, "Trace file (JSONL)")->required();
    check->add_option("--checker", checker, "Run only this checker");
    check->add_option("--u", u, "Liveness latency (default u_pi + client wait)");

    const char* env_dir = std::getenv("GADGETSIM_SCENARIOS");
    std::string dir = env_dir ? env_dir : "scenarios";
    std::size_t seeds = 50;
    auto* suite = app.add_subcommand("suite", "Run the scenario corpus");
    suite->add_option("--dir", dir, "Scenario directory (default $GADGETSIM_SCENARIOS or ./scenarios)");
    suite->add_option("--seeds", seeds, "Seeds per scenario")->check(CLI::PositiveNumber);

    std::string demo_name;
    auto* demo = app.add_subcommand("demo", "Play a narrated scenario");
    demo->add_option("name", demo_name, "eve | no-wait | double-spend")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kPass : kError;
    }

    try {
        if (*run) return cmd_run(config, trace_out, seed);
        if (*check) return cmd_check(trace_in, checker, u);
        if (*suite) return cmd_suite(dir, seeds);
        if (*demo) return cmd_demo(demo_name);
    } catch (const gadget::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kError;
    } catch (const gadget::recovery::ContractViolation& e) {
        std::cerr << "run aborted: " << e.what() << '\n';
        return kFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
