// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each criterion carries a wall-clock budget that is part of the
// verdict. Everything is deterministic: all randomness flows from fixed
// seeds through named streams.

#include "atam/block_sim.hpp"
#include "atam/core.hpp"
#include "atam/engine.hpp"
#include "atam/frame.hpp"
#include "atam/iu_tables.hpp"
#include "atam/svg.hpp"
#include "atam/tas_io.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <deque>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace atam;

namespace {

bool g_all_pass = true;
// Criterion 7 accumulates over criteria 5 and 6: the probe-meeting
// observation is asserted inside site_fire (std::logic_error on violation).
bool g_observation_violated = false;
std::string g_observation_detail;

struct Outcome {
    bool ok = true;
    std::string detail;
    std::string note;  // informational, printed under the verdict line
    void fail(const std::string& msg) {
        if (ok) detail = msg;
        ok = false;
    }
};

void report(int number, const std::string& title, const Outcome& out, double seconds,
            double budget_seconds) {
    bool ok = out.ok && seconds <= budget_seconds;
    g_all_pass = g_all_pass && ok;
    std::printf("%d. %-34s %s  (%.1fs of %.0fs budget)\n", number, (title + ":").c_str(),
                ok ? "PASS" : "FAIL", seconds, budget_seconds);
    if (!out.ok) std::printf("   %s\n", out.detail.c_str());
    if (!out.note.empty()) std::printf("   [%s]\n", out.note.c_str());
    if (out.ok && seconds > budget_seconds) std::printf("   over time budget\n");
}

void run_criterion(int number, const std::string& title, double budget_seconds,
                   const std::function<void(Outcome&)>& body) {
    Outcome out;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::logic_error& e) {
        g_observation_violated = true;
        g_observation_detail = e.what();
        out.fail(std::string("internal invariant violated: ") + e.what());
    } catch (const std::exception& e) {
        out.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(number, title, out, secs, budget_seconds);
}

std::string describe(const TAS& sys) {
    std::ostringstream out;
    out << dump_tas(sys);
    return out.str();
}

// --------------------------------------------------------------------------
// 1. atam-core against brute-force oracles on random systems.

void criterion_core(Outcome& out) {
    std::mt19937_64 rng(0xacce97a11ce);
    int accepted = 0;
    for (int trial = 0; accepted < 200 && trial < 2000; ++trial) {
        int tau = 1 + static_cast<int>(rng() % 3);
        TAS sys = oracle::random_tas(rng, 5, tau);
        int depth = sys.tiles.size() <= 3 ? 4 : 3;
        ProducibleSet ps;
        try {
            ps = producible_set(sys, depth, 4000);
        } catch (const BudgetExceeded&) {
            continue;  // oracle BFS would be equally unbounded; skip
        }
        ++accepted;
        auto expect = oracle::producible(sys, depth);
        if (ps.assemblies.size() != expect.size())
            return out.fail("producible-set size mismatch on\n" + describe(sys));
        for (const auto& a : ps.assemblies) {
            if (!expect.count(a)) return out.fail("extra producible assembly on\n" + describe(sys));
            if (is_tau_stable(sys, a) != oracle::stable(sys, a))
                return out.fail("stability mismatch on\n" + describe(sys));
            if (a.size() <= 6) {
                if (binding_min_cut(sys, a) != oracle::min_cut(sys, a))
                    return out.fail("min-cut mismatch on\n" + describe(sys));
                if (frontier(sys, a) != oracle::frontier(sys, a))
                    return out.fail("frontier mismatch on\n" + describe(sys));
            }
        }
    }
    if (accepted < 200) out.fail("fewer than 200 systems checked");
}

// --------------------------------------------------------------------------
// 2. Closed-form maximum entry count and per-category caps.

TAS complete_system(int real_glues, int tau) {
    TAS sys;
    sys.temperature = tau;
    sys.glues.push_back(Glue{"", 0});
    for (int i = 0; i < real_glues; ++i)
        sys.glues.push_back(Glue{std::string(1, char('a' + i)), tau});
    int g = real_glues + 1;
    int idx = 0;
    for (int n = 0; n < g; ++n)
        for (int e = 0; e < g; ++e)
            for (int s = 0; s < g; ++s)
                for (int w = 0; w < g; ++w)
                    if (n || e || s || w) {
                        TileType t;
                        t.name = "t" + std::to_string(idx++);
                        t.glue = {n, e, s, w};
                        sys.tiles.push_back(t);
                    }
    sys.seed.emplace(Pos{0, 0}, 0);
    return sys;
}

void criterion_scale(Outcome& out) {
    for (int g = 2; g <= 4; ++g) {
        TAS sys = complete_system(g - 1, 2);
        EntryCensus c = full_match_census(sys);
        std::uint64_t gu = g;
        std::uint64_t closed = 15 * gu * gu * gu * gu - 32 * gu * gu * gu + 24 * gu * gu -
                               8 * gu + 1;
        if (c.total != closed)
            return out.fail("total " + std::to_string(c.total) + " != closed form " +
                            std::to_string(closed) + " at g=" + std::to_string(g));
        // per-category caps: choose any one non-null side (g^3 completions),
        // two sides (g^2), three (g), four (1); summed over side choices.
        std::array<std::uint64_t, 5> cap{0, 4 * (gu - 1) * gu * gu * gu,
                                         6 * (gu - 1) * (gu - 1) * gu * gu,
                                         4 * (gu - 1) * (gu - 1) * (gu - 1) * gu,
                                         (gu - 1) * (gu - 1) * (gu - 1) * (gu - 1)};
        for (int k = 0; k <= 4; ++k)
            if (c.by_nonnull_sides[k] > cap[k])
                return out.fail("category " + std::to_string(k) + " exceeds its cap at g=" +
                                std::to_string(g));
        if (g == 2 && c.total != 65) return out.fail("g=2 total is not 65");
    }
}

// --------------------------------------------------------------------------
// 3. Lookup-table entries equal the strength-sum rule, exhaustively.

void criterion_lookup(Outcome& out) {
    std::mt19937_64 rng(0x10030c0de);
    for (int trial = 0; trial < 120; ++trial) {
        int tau = 1 + static_cast<int>(rng() % 3);
        int real_glues = 1 + static_cast<int>(rng() % 3);  // g <= 4 incl. null
        TAS sys;
        sys.temperature = tau;
        sys.glues.push_back(Glue{"", 0});
        for (int i = 0; i < real_glues; ++i)
            sys.glues.push_back(
                Glue{"g" + std::to_string(i), 1 + static_cast<int>(rng() % tau)});
        int ntiles = 1 + static_cast<int>(rng() % 6);
        std::set<std::array<int, 4>> quads;
        while (static_cast<int>(quads.size()) < ntiles) {
            std::array<int, 4> q;
            for (int d = 0; d < 4; ++d) q[d] = static_cast<int>(rng() % (real_glues + 1));
            quads.insert(q);
        }
        int idx = 0;
        for (const auto& q : quads) {
            TileType t;
            t.name = "t" + std::to_string(idx++);
            t.glue = q;
            sys.tiles.push_back(t);
        }
        sys.seed.emplace(Pos{0, 0}, 0);

        LookupTable lt = build_lookup_table(sys);
        // exhaustive: every decodable address x every tile
        for (int n = 0; n < lt.gt.g; ++n)
            for (int e = 0; e < lt.gt.g; ++e)
                for (int s = 0; s < lt.gt.g; ++s)
                    for (int w = 0; w < lt.gt.g; ++w) {
                        std::array<int, 4> addr{lt.gt.order[n], lt.gt.order[e], lt.gt.order[s],
                                                lt.gt.order[w]};
                        auto slot = address_int(address_of(lt.gt, addr));
                        const auto& en = lt.entries[slot];
                        for (int t = 0; t < static_cast<int>(sys.tiles.size()); ++t) {
                            bool in = std::find(en.begin(), en.end(), t) != en.end();
                            // independent restatement of the rule
                            int sum = 0;
                            for (int d = 0; d < 4; ++d)
                                if (sys.tiles[t].glue[d] != 0 && sys.tiles[t].glue[d] == addr[d])
                                    sum += sys.glues[addr[d]].strength;
                            if (in != (sum >= tau))
                                return out.fail("entry/strength-sum disagreement on\n" +
                                                describe(sys));
                        }
                    }
    }
}

// --------------------------------------------------------------------------
// 4. Frame formation: every subset x tie-break x interleaving completes, and
//    crawler initiations match the configuration taxonomy.

void criterion_frame(Outcome& out) {
    for (int mask = 1; mask < 16; ++mask) {
        std::set<Dir> present;
        for (int d = 0; d < 4; ++d)
            if (mask >> d & 1) present.insert(static_cast<Dir>(d));
        for (const TieBreak& tie : all_tie_breaks(present)) {
            FrameConfig expect = resolve_competitions(present, tie);
            // exhaustive BFS over all event interleavings
            FrameMachine root(present, tie);
            std::set<std::string> seen{root.state_key()};
            int quiescents = 0;
            std::deque<FrameMachine> queue{root};
            while (!queue.empty()) {
                FrameMachine m = queue.front();
                queue.pop_front();
                auto events = m.enabled();
                if (events.empty()) {
                    ++quiescents;
                    if (!m.all_complete()) return out.fail("frame deadlock before completion");
                    if (m.config() != expect) return out.fail("frame config mismatch");
                    for (Dir d : present) {
                        if (!m.knowledge(d).sound(expect))
                            return out.fail("unsound side knowledge");
                        // Full common knowledge is only promised after the
                        // WAI circuit of the cyclic configurations.
                        if ((is_case_all_wl(expect) || is_case_all_lw(expect)) &&
                            !m.knowledge(d).covers_all(expect))
                            return out.fail("incomplete knowledge after the WAI circuit");
                    }
                    continue;
                }
                for (const auto& e : events) {
                    FrameMachine n = m;
                    n.fire(e);
                    if (seen.insert(n.state_key()).second) queue.push_back(n);
                }
            }
            if (quiescents == 0) return out.fail("no quiescent frame state reached");

            // initiation corners: independent restatement of the taxonomy
            std::set<Corner> want;
            bool lone = expect.present_count() == 1;
            for (Dir d : present) {
                SideClass c = expect.cls(d);
                if (c != SideClass::WW && c != SideClass::WL) continue;
                Dir partner = corner_partner(right_corner(d), d);
                if (lone || present.count(partner)) want.insert(right_corner(d));
            }
            if (is_case_all_wl(expect) || is_case_all_lw(expect)) want = {Corner::NW};
            if (want.size() == 3)
                for (Dir d : present)
                    if (expect.cls(d) == SideClass::WW &&
                        expect.cls(corner_partner(right_corner(d), d)) == SideClass::LL)
                        want.erase(right_corner(d));
            if (crawler_initiations(expect) != want)
                return out.fail("initiation corners diverge from the taxonomy");
        }
    }
}

// --------------------------------------------------------------------------
// 5. Single-site output-count invariants over exhaustive schedules.

std::vector<TAS> site_systems() {
    std::vector<TAS> out;
    // crafted: cooperative, nondeterministic, opposite-matching, mismatching
    out.push_back(load_tas(std::string(ATAM_SYSTEMS_DIR) + "/coop_l.tas"));
    out.push_back(load_tas(std::string(ATAM_SYSTEMS_DIR) + "/competition.tas"));
    out.push_back(load_tas(std::string(ATAM_SYSTEMS_DIR) + "/opposite_gap.tas"));
    // generated, up to 4 real glues (g <= 5 including null), tau = 2
    std::mt19937_64 rng(0x51735);
    while (out.size() < 7) {
        TAS sys = oracle::random_tas(rng, 4, 2);
        if (sys.glues.size() < 3) continue;
        out.push_back(sys);
    }
    return out;
}

void criterion_site_invariants(Outcome& out) {
    std::size_t scenarios = 0;
    for (const TAS& sys : site_systems()) {
        int nglues = static_cast<int>(sys.glues.size());
        for (int mask = 1; mask < 16; ++mask) {
            int k = __builtin_popcount(static_cast<unsigned>(mask));
            std::vector<int> sides;
            for (int d = 0; d < 4; ++d)
                if (mask >> d & 1) sides.push_back(d);
            // all glue assignments (null included) over the present sides
            std::size_t combos = 1;
            for (int i = 0; i < k; ++i) combos *= static_cast<std::size_t>(nglues);
            for (std::size_t c = 0; c < combos; ++c) {
                SiteScenario sc;
                sc.present = static_cast<std::uint8_t>(mask);
                std::size_t rest = c;
                for (int d : sides) {
                    sc.glue[d] = static_cast<int>(rest % nglues);
                    rest /= nglues;
                }
                SiteCensus census = explore_site(sys, sc);
                ++scenarios;
                if (!census.ok)
                    return out.fail(census.failure + " (scenario mask " + std::to_string(mask) +
                                    ")\n" + describe(sys));
            }
        }
    }
    out.note = std::to_string(scenarios) + " site scenarios explored";
}

// --------------------------------------------------------------------------
// 6. End-to-end intrinsic simulation on generated systems.

bool is_nondeterministic(const TAS& sys, const ProducibleSet& ps) {
    for (const auto& a : ps.assemblies) {
        auto fr = frontier(sys, a);
        for (std::size_t i = 1; i < fr.size(); ++i)
            if (fr[i].pos == fr[i - 1].pos) return true;
    }
    return false;
}

bool has_mismatch(const TAS& sys, const ProducibleSet& ps) {
    for (const auto& a : ps.assemblies)
        for (const auto& [p, t] : a)
            for (Dir d : {N, E}) {
                auto it = a.find(neighbor(p, d));
                if (it == a.end()) continue;
                int ga = sys.tiles[t].glue[d];
                int gb = sys.tiles[it->second].glue[opposite(d)];
                if (ga != gb) return true;  // includes glue-vs-null abutment
            }
    return false;
}

void criterion_end_to_end(Outcome& out) {
    std::mt19937_64 rng(0xe2e5eed);
    int total = 0, nondet = 0, mismatch = 0;
    for (int trial = 0; (total < 20 || nondet < 5 || mismatch < 3) && trial < 4000; ++trial) {
        TAS sys = oracle::random_tas(rng, 4, 2);
        ProducibleSet ps;
        try {
            ps = producible_set(sys, 3, 80);
        } catch (const BudgetExceeded&) {
            continue;  // too wide for exhaustive protocol exploration
        }
        if (ps.assemblies.size() < 2) continue;  // inert systems prove nothing
        bool nd = is_nondeterministic(sys, ps);
        bool mm = has_mismatch(sys, ps);
        bool needed = total < 20 || (nd && nondet < 5) || (mm && mismatch < 3);
        if (!needed) continue;

        SimReport engine_report;
        try {
            engine_report = check_intrinsic_simulation(sys, 3, 400000);
        } catch (const BudgetExceeded&) {
            engine_report = check_intrinsic_simulation(sys, 2, 400000);
        }
        if (!engine_report.ok())
            return out.fail("engine representation failed: " + engine_report.counterexample +
                            "\n" + describe(sys));
        SimReport self = check_simulation(sys, sys, identity_rep(sys), 3);
        if (!self.ok())
            return out.fail("identity self-simulation failed: " + self.counterexample + "\n" +
                            describe(sys));
        ++total;
        nondet += nd;
        mismatch += mm;
    }
    out.note = std::to_string(total) + " systems: " + std::to_string(nondet) +
               " nondeterministic, " + std::to_string(mismatch) + " with mismatches";
    if (total < 20) out.fail("fewer than 20 systems checked");
    if (nondet < 5) out.fail("fewer than 5 nondeterministic systems");
    if (mismatch < 3) out.fail("fewer than 3 systems with mismatches");
}

// --------------------------------------------------------------------------
// 7. Probe meetings only between two opposite win-win sides. The condition is
//    asserted structurally inside site_fire on every Meet/ClaimCenter/pair
//    spawn; criteria 5 and 6 drive every reachable schedule through it.

void criterion_observation(Outcome& out) {
    if (g_observation_violated) out.fail(g_observation_detail);
}

// --------------------------------------------------------------------------
// 8. Byte-identical reproducibility of traces, dumps, and SVGs.

void criterion_reproducibility(Outcome& out) {
    TAS sys = load_tas(std::string(ATAM_SYSTEMS_DIR) + "/competition.tas");
    for (std::uint64_t seed : {std::uint64_t{1}, std::uint64_t{777}}) {
        auto r1 = run_lattice(sys, 3, seed);
        auto r2 = run_lattice(sys, 3, seed);
        if (r1.trace != r2.trace) return out.fail("lattice traces differ across reruns");
        if (dump_assembly(sys, r1.final_image) != dump_assembly(sys, r2.final_image))
            return out.fail("assembly dumps differ across reruns");
        if (render_svg(sys, r1.final_image) != render_svg(sys, r2.final_image))
            return out.fail("SVGs differ across reruns");
        auto s1 = run_sequence(sys, seed, 50);
        auto s2 = run_sequence(sys, seed, 50);
        if (s1.steps.size() != s2.steps.size() || s1.final != s2.final)
            return out.fail("tile-level runs differ across reruns");
    }
    if (build_lookup_table(sys).tape != build_lookup_table(sys).tape)
        return out.fail("lookup tape differs across rebuilds");
}

}  // namespace

int main() {
    run_criterion(1, "formal-model conformance", 60, criterion_core);
    run_criterion(2, "maximum-entry closed form", 30, criterion_scale);
    run_criterion(3, "lookup-table rule equivalence", 60, criterion_lookup);
    run_criterion(4, "frame exhaustiveness", 120, criterion_frame);
    run_criterion(5, "single-site output invariants", 600, criterion_site_invariants);
    run_criterion(6, "end-to-end intrinsic simulation", 900, criterion_end_to_end);
    run_criterion(7, "probe-meeting observation", 10, criterion_observation);
    run_criterion(8, "reproducibility", 60, criterion_reproducibility);
    return g_all_pass ? 0 : 1;
}
