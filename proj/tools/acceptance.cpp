// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if
// all of them pass.

#include <chrono>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gadget/gadget.hpp"
#include "support/oracles.hpp"

namespace {

using namespace gadget;

struct Tally {
    std::size_t runs = 0;
    std::size_t aborted = 0;
    std::map<std::string, std::size_t> failures;  // checker -> failing runs
    std::string first_failure;

    void fail(const std::string& checker, const std::string& why) {
        ++failures[checker];
        if (first_failure.empty()) first_failure = why;
    }
    [[nodiscard]] std::size_t count(const std::string& c) const {
        auto it = failures.find(c);
        return it == failures.end() ? 0 : it->second;
    }
};

struct ScenarioResult {
    const suite::Scenario* s = nullptr;
    Tally tally;
    // Liveness with measured u_pi + 3Δ.
    std::size_t measured_checks = 0;
    std::size_t measured_obligations = 0;
    std::string measured_failure;
    // Liveness windows with the configured u.
    std::size_t window2_obligations = 0;
    std::set<TxId> dead_zone_due;
};

bool positive(const suite::Scenario& s) { return s.cfg.expect.pass; }

bool lists(const suite::Scenario& s, std::string_view checker) {
    const auto& f = s.cfg.expect.failing;
    return std::find(f.begin(), f.end(), checker) != f.end();
}

bool pre_maj_liveness_case(const ScenarioConfig& c) {
    return c.internal == InternalKind::simple_sync && c.gadget == GadgetKind::recovery &&
           (c.n == 4 || c.n == 7 || c.n == 10) && c.expect.pass;
}

ScenarioResult run_one(const suite::Scenario& s, std::size_t seeds) {
    ScenarioResult out;
    out.s = &s;
    for (std::size_t i = 0; i < seeds; ++i) {
        ScenarioConfig c = s.cfg;
        c.seed = s.cfg.seed + i;
        std::string tag = c.name + " seed " + std::to_string(c.seed);
        ++out.tally.runs;
        Trace t;
        try {
            t = run(c);
        } catch (const recovery::ContractViolation& e) {
            ++out.tally.aborted;
            out.tally.fail("aborted", tag + ": " + e.what());
            continue;
        }
        for (const auto& v : check::check_all(t)) {
            if (!v.pass) out.tally.fail(v.name, tag + " " + v.name + ": " + v.evidence);
        }
        if (pre_maj_liveness_case(c)) {
            Round u = check::measure_u_pi(t).worst + 3 * c.delta;
            auto rep = check::liveness_report(t, u, true);
            ++out.measured_checks;
            out.measured_obligations += rep.due.empty() ? 0 : rep.due[0].size();
            if (!rep.verdict.pass && out.measured_failure.empty()) out.measured_failure = tag + ": " + rep.verdict.evidence;
        }
        if (c.r_rec) {
            auto rep = check::liveness_report(t, t.header.u());
            if (rep.windows.size() == 2) {
                out.window2_obligations += rep.due[1].size();
                Round heal = *c.r_rec + t.header.u_rec();
                for (const auto& tx : c.txs) {
                    if (tx.round >= *c.r_maj && tx.round <= heal && rep.due[1].contains(tx.id)) out.dead_zone_due.insert(tx.id);
                }
            }
        }
    }
    return out;
}

class Printer {
public:
    void line(int n, bool pass, const std::string& what, const std::string& detail) {
        all_ &= pass;
        std::cout << "criterion " << n << ' ' << (pass ? "PASS" : "FAIL") << "  " << what << " | " << detail << std::endl;
    }
    [[nodiscard]] bool all() const { return all_; }

private:
    bool all_ = true;
};

std::string secs(std::chrono::steady_clock::time_point t0) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream os;
    os << ms / 1000 << '.' << (ms % 1000) / 100 << 's';
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gadgetsim acceptance run"};
    std::string dir = "scenarios";
    std::size_t seeds = 50;
    app.add_option("--dir", dir, "scenario corpus directory");
    app.add_option("--seeds", seeds, "seeds per scenario")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    std::vector<suite::Scenario> corpus;
    try {
        corpus = suite::load_corpus(dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    auto t0 = std::chrono::steady_clock::now();
    std::vector<ScenarioResult> results;
    for (const auto& s : corpus) results.push_back(run_one(s, seeds));
    std::string corpus_time = secs(t0);
    Printer p;

    // 1. Safety over the corpus, with the strongest attacks present.
    {
        std::size_t runs = 0, bad = 0;
        std::string first;
        bool n_minus_1 = false, spot = false, ds = false, eve = false;
        for (const auto& r : results) {
            const auto& c = r.s->cfg;
            std::size_t f = c.corrupted_at(c.horizon);
            n_minus_1 |= c.n >= 4 && f + 1 == c.n;
            spot |= c.n == 100 && f == 99;
            ds |= c.adversary.strategy == "double_spend" || c.adversary.strategy == "double_spend_equivocator";
            eve |= c.adversary.strategy == "eve_confuser";
            if (!positive(*r.s)) continue;
            runs += r.tally.runs;
            std::size_t k = r.tally.count("safety") + r.tally.aborted;
            bad += k;
            if (k && first.empty()) first = r.tally.first_failure;
        }
        std::size_t positives = static_cast<std::size_t>(std::count_if(corpus.begin(), corpus.end(), positive));
        bool ok = corpus.size() >= 30 && seeds >= 50 && n_minus_1 && spot && ds && eve && bad == 0;
        std::ostringstream d;
        d << corpus.size() << " scenarios x " << seeds << " seeds (" << corpus_time << "), " << runs << " runs over "
          << positives << " positive controls, " << bad << " safety violations; n-1 of n corrupted: "
          << (n_minus_1 ? "yes" : "no") << ", n=100 f=99: " << (spot ? "yes" : "no")
          << ", double_spend: " << (ds ? "yes" : "no") << ", eve_confuser: " << (eve ? "yes" : "no");
        if (!first.empty()) d << "; first: " << first;
        p.line(1, ok, "always-safety", d.str());
    }

    // 2. Pre-r_maj liveness with u = measured u_pi + 3Δ.
    {
        std::set<std::uint32_t> sizes;
        std::size_t checks = 0, obligations = 0;
        std::string first;
        for (const auto& r : results) {
            if (!r.measured_checks) continue;
            sizes.insert(r.s->cfg.n);
            checks += r.measured_checks;
            obligations += r.measured_obligations;
            if (first.empty()) first = r.measured_failure;
        }
        bool ok = sizes == std::set<std::uint32_t>{4, 7, 10} && obligations > 0 && first.empty();
        std::ostringstream d;
        d << checks << " runs at n in {";
        bool comma = false;
        for (auto n : sizes) {
            d << (comma ? "," : "") << n;
            comma = true;
        }
        d << "}, " << obligations << " tx obligations";
        if (!first.empty()) d << "; first violation: " << first;
        p.line(2, ok, "pre-r_maj liveness, u = measured u_pi + 3 delta", d.str());
    }

    // 3. Liveness after r_rec + u_rec, dead-zone transactions included.
    {
        std::size_t runs = 0, bad = 0, w2 = 0, dead = 0;
        std::string first;
        for (const auto& r : results) {
            if (!r.s->cfg.r_rec || !positive(*r.s)) continue;
            runs += r.tally.runs;
            bad += r.tally.count("liveness") + r.tally.aborted;
            if (r.tally.count("liveness") && first.empty()) first = r.tally.first_failure;
            w2 += r.window2_obligations;
            dead += r.dead_zone_due.size();
        }
        bool ok = runs > 0 && bad == 0 && w2 > 0 && dead > 0;
        std::ostringstream d;
        d << runs << " full-timeline runs, " << bad << " liveness violations, " << w2
          << " post-recovery tx obligations, " << dead << " dead-zone txs owed after recovery";
        if (!first.empty()) d << "; first: " << first;
        p.line(3, ok, "recovery liveness, u_rec = u_pi + u_BC + 4 delta", d.str());
    }

    // 4. Genesis agreement and dominance.
    {
        std::size_t runs = 0, bad = 0, scenarios = 0;
        std::string first;
        for (const auto& r : results) {
            if (!r.s->cfg.r_rec || lists(*r.s, "recovery")) continue;
            ++scenarios;
            runs += r.tally.runs;
            std::size_t k = r.tally.count("recovery") + r.tally.aborted;
            bad += k;
            if (k && first.empty()) first = r.tally.first_failure;
        }
        bool ok = scenarios > 0 && bad == 0;
        std::ostringstream d;
        d << scenarios << " recovery scenarios, " << runs << " runs, " << bad << " violations";
        if (!first.empty()) d << "; first: " << first;
        p.line(4, ok, "genesis dominance and agreement", d.str());
    }

    // 5. Follow-the-leader, and its negative control.
    {
        std::size_t runs = 0, bad = 0, control_runs = 0, control_fail = 0;
        std::string first;
        for (const auto& r : results) {
            if (lists(*r.s, "follow_the_leader")) {
                control_runs += r.tally.runs;
                control_fail += r.tally.count("follow_the_leader");
                continue;
            }
            runs += r.tally.runs;
            std::size_t k = r.tally.count("follow_the_leader");
            bad += k;
            if (k && first.empty()) first = r.tally.first_failure;
        }
        bool ok = bad == 0 && control_runs > 0 && control_fail == control_runs;
        std::ostringstream d;
        d << runs << " runs, " << bad << " violations; control with client wait delta failed on " << control_fail
          << '/' << control_runs << " seeds";
        if (!first.empty()) d << "; first: " << first;
        p.line(5, ok, "follow-the-leader", d.str());
    }

    // 6. Broadcast, exhaustive over corruption patterns.
    {
        auto t = std::chrono::steady_clock::now();
        auto r = oracle::sweep_ds(8);
        std::ostringstream d;
        d << r.cases << " cases for n' in 1..8 (" << secs(t) << "), " << r.mismatches << " violations";
        if (r.mismatches) d << "; first: " << r.first;
        p.line(6, r.mismatches == 0 && r.cases > 0, "Dolev-Strong validity, agreement, single delivery, exact u_BC",
               d.str());
    }

    // 7. Oracle equivalence.
    {
        auto t = std::chrono::steady_clock::now();
        std::uint64_t cases = 0, bad = 0;
        std::string first;
        auto add = [&](const oracle::SweepResult& r) {
            cases += r.cases;
            bad += r.mismatches;
            if (r.mismatches && first.empty()) first = r.first;
        };
        add(oracle::sweep_majority_prefix(5, 5, 2, 2));
        add(oracle::sweep_majority_prefix(5, 3, 3, 2));
        add(oracle::sweep_witness_produce(3, 2, 8));
        add(oracle::sweep_witness_produce(4, 1, 8));
        std::ostringstream d;
        d << cases << " cases (" << secs(t) << "), " << bad << " mismatches";
        if (!first.empty()) d << "; first: " << first;
        p.line(7, bad == 0 && cases > 0, "majority_prefix and witness_produce against brute force", d.str());
    }

    // 8. Negative controls: no wait, no gossip.
    {
        bool saw_wait = false, saw_gossip = false, ok = true;
        std::ostringstream d;
        for (const auto& r : results) {
            const auto& c = r.s->cfg;
            bool no_wait = c.client_wait() == 0;
            bool no_gossip = !c.client_gossip;
            if (!no_wait && !no_gossip) continue;
            saw_wait |= no_wait;
            saw_gossip |= no_gossip;
            std::size_t f = r.tally.count("safety");
            ok &= f == r.tally.runs && lists(*r.s, "safety");
            d << c.name << " failed safety on " << f << '/' << r.tally.runs << " seeds; ";
        }
        ok &= saw_wait && saw_gossip;
        if (!saw_wait) d << "no wait=0 control; ";
        if (!saw_gossip) d << "no gossip-off control; ";
        p.line(8, ok, "negative controls break safety", d.str());
    }

    // 9. Determinism and replay.
    {
        std::size_t runs = 0, bad = 0;
        std::string first;
        for (const auto& s : corpus) {
            for (std::uint64_t k = 0; k < 2; ++k) {
                ScenarioConfig c = s.cfg;
                c.seed = s.cfg.seed + k;
                try {
                    Trace a = run(c), b = run(c);
                    std::string ja = a.to_jsonl(), jb = b.to_jsonl();
                    std::istringstream in(ja);
                    Trace back = Trace::read_jsonl(in);
                    auto va = check::check_all(a);
                    bool same = ja == jb && va == check::check_all(b) && va == check::check_all(back) &&
                                back.to_jsonl() == ja;
                    ++runs;
                    if (!same && bad++ == 0) first = c.name + " seed " + std::to_string(c.seed);
                } catch (const recovery::ContractViolation&) {
                    ++runs;
                }
            }
        }
        std::ostringstream d;
        d << runs << " (scenario, seed) pairs replayed twice and through a trace file, " << bad << " differences";
        if (!first.empty()) d << "; first: " << first;
        p.line(9, bad == 0 && runs > 0, "determinism", d.str());
    }

    std::cout << (p.all() ? "all criteria pass" : "some criteria fail") << std::endl;
    return p.all() ? 0 : 1;
}
