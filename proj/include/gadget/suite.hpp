// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "gadget/checkers.hpp"
#include "gadget/config.hpp"
#include "gadget/recovery.hpp"
#include "gadget/simulator.hpp"

namespace gadget::suite {

struct Scenario {
    std::filesystem::path path;
    ScenarioConfig cfg;
};

/// All *.json files in dir, sorted by file name, each validated. Throws
/// ConfigError naming the first bad file.
inline std::vector<Scenario> load_corpus(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Scenario> out;
    for (const auto& f : files) {
        try {
            ScenarioConfig cfg = load_config(f.string());
            cfg.validate();
            out.push_back({f, std::move(cfg)});
        } catch (const ConfigError& e) {
            std::vector<std::string> ps;
            for (const auto& p : e.problems()) ps.push_back(f.filename().string() + ": " + p);
            throw ConfigError(std::move(ps));
        }
    }
    return out;
}

struct Outcome {
    std::string name;
    std::size_t seeds = 0;
    std::map<std::string, std::size_t> failures;  // checker -> failing seeds
    std::size_t aborted = 0;                      // runs ending in a contract violation
    std::string first_abort;
    std::string first_failure;
    Round worst_latency = 0;
    bool expected = false;

    [[nodiscard]] bool negative() const { return !failures.empty() || aborted > 0; }
};

/// Checks an outcome against its expectation: on a positive control every
/// checker passes on every seed; on a negative one exactly the listed
/// checkers fail, each on every seed.
inline bool meets(const Outcome& o, const Expectation& e) {
    if (o.aborted) return false;
    if (e.pass) return o.failures.empty();
    for (const auto& [checker, count] : o.failures) {
        if (std::find(e.failing.begin(), e.failing.end(), checker) == e.failing.end()) return false;
    }
    for (const auto& checker : e.failing) {
        auto it = o.failures.find(checker);
        if (it == o.failures.end() || it->second != o.seeds) return false;
    }
    return true;
}

/// Runs cfg under seeds cfg.seed, cfg.seed+1, ..., cfg.seed+k-1.
inline Outcome run_scenario(const ScenarioConfig& cfg, std::size_t k) {
    Outcome o;
    o.name = cfg.name;
    o.seeds = k;
    for (std::size_t i = 0; i < k; ++i) {
        ScenarioConfig c = cfg;
        c.seed = cfg.seed + i;
        Trace t;
        try {
            t = run(c);
        } catch (const recovery::ContractViolation& ex) {
            if (!o.aborted++) o.first_abort = "seed " + std::to_string(c.seed) + ": " + ex.what();
            continue;
        }
        for (const auto& v : check::check_all(t)) {
            if (v.pass) continue;
            if (o.first_failure.empty()) o.first_failure = "seed " + std::to_string(c.seed) + " " + v.name + ": " + v.evidence;
            ++o.failures[v.name];
        }
        o.worst_latency = std::max(o.worst_latency, check::measure_u_pi(t).worst);
    }
    o.expected = meets(o, cfg.expect);
    return o;
}

struct Report {
    std::vector<Outcome> outcomes;
    [[nodiscard]] bool ok() const {
        return std::all_of(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return o.expected; });
    }
};

inline Report run_corpus(const std::vector<Scenario>& corpus, std::size_t k) {
    Report r;
    for (const auto& s : corpus) r.outcomes.push_back(run_scenario(s.cfg, k));
    return r;
}

inline void print_table(std::ostream& os, const Report& r) {
    std::size_t width = 8;
    for (const auto& o : r.outcomes) width = std::max(width, o.name.size());
    os << std::left << std::setw(static_cast<int>(width)) << "scenario" << "  seeds  u_pi  status    failing\n";
    for (const auto& o : r.outcomes) {
        os << std::left << std::setw(static_cast<int>(width)) << o.name << "  " << std::setw(5) << o.seeds << "  "
           << std::setw(4) << o.worst_latency << "  " << std::setw(8) << (o.expected ? "ok" : "MISMATCH") << "  ";
        if (o.failures.empty() && !o.aborted) os << '-';
        bool first = true;
        for (const auto& [c, n] : o.failures) {
            os << (first ? "" : ", ") << c << '(' << n << ')';
            first = false;
        }
        if (o.aborted) os << (first ? "" : ", ") << "aborted(" << o.aborted << ')';
        os << '\n';
        if (!o.expected) {
            if (!o.first_failure.empty()) os << "    first failure: " << o.first_failure << '\n';
            if (!o.first_abort.empty()) os << "    first abort: " << o.first_abort << '\n';
        }
    }
    std::size_t good = static_cast<std::size_t>(
        std::count_if(r.outcomes.begin(), r.outcomes.end(), [](const Outcome& o) { return o.expected; }));
    os << good << '/' << r.outcomes.size() << " scenarios as expected\n";
}

}  // namespace gadget::suite
