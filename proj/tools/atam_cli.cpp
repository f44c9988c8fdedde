// atam: command-line driver for the tile-assembly toolkit.
//
// Subcommands:
//   run        simulate a tile assembly system (one seeded trajectory or the
//              exhaustive producible set)
//   check-sim  block-simulation conformance: S simulates T under a block
//              representation file, or the protocol engine's own
//              representation of T (--iu)
//   iu-tables  emit the addressed lookup table tape, probe slots, superside
//              layout and size report for a system
//   iu-run     run or exhaustively check the protocol engine on a system
//   render     write a deterministic SVG of an assembly
//
// Exit codes: 0 pass, 1 check failed, 2 usage/parse error, 3 budget exceeded.

#include "CLI11.hpp"

#include "atam/block_sim.hpp"
#include "atam/core.hpp"
#include "atam/engine.hpp"
#include "atam/iu_tables.hpp"
#include "atam/svg.hpp"
#include "atam/tas_io.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using namespace atam;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

bool use_color() {
    const char* v = std::getenv("ATAM_COLOR");
    return v && *v && std::string(v) != "0";
}

std::string verdict(bool ok) {
    if (!use_color()) return ok ? "PASS" : "FAIL";
    return ok ? "\033[32mPASS\033[0m" : "\033[31mFAIL\033[0m";
}

void write_out(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << content;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream out;
    out << f.rdbuf();
    return out.str();
}

// Block representation file format (line oriented, '#' comments):
//   m <block size>
//   exact            (optional: disable the monotone closure)
//   rule <T tile name>
//   cell <i> <j> <S tile name>     (i,j in [0,m)^2, repeated; belongs to the
//                                   most recent rule)
BlockRep parse_rep(const std::string& text, const TAS& S, const TAS& T) {
    BlockRep rep;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_rule = false;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("rep line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "m") {
            if (!(ls >> rep.m) || rep.m < 1) fail("expected m <positive block size>");
        } else if (word == "exact") {
            rep.monotone_closure = false;
        } else if (word == "rule") {
            std::string name;
            if (!(ls >> name)) fail("expected rule <tile name>");
            int t = T.tile_index(name);
            if (t < 0) fail("unknown simulated tile: " + name);
            rep.rules.push_back({MBlock{rep.m, {}}, t});
            have_rule = true;
        } else if (word == "cell") {
            int i = 0, j = 0;
            std::string name;
            if (!have_rule) fail("cell before any rule");
            if (!(ls >> i >> j >> name)) fail("expected cell <i> <j> <tile name>");
            if (i < 0 || i >= rep.m || j < 0 || j >= rep.m) fail("cell out of block range");
            int t = S.tile_index(name);
            if (t < 0) fail("unknown simulator tile: " + name);
            rep.rules.back().first.cells[{i, j}] = t;
        } else {
            fail("unknown directive: " + word);
        }
    }
    for (auto& [block, tile] : rep.rules) block.m = rep.m;
    if (rep.rules.empty()) throw std::runtime_error("rep file defines no rules");
    return rep;
}

Assembly parse_assembly(const std::string& text, const TAS& sys) {
    Assembly a;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        int x = 0, y = 0;
        std::string name;
        if (!(ls >> x)) continue;
        if (!(ls >> y >> name))
            throw std::runtime_error("assembly line " + std::to_string(lineno) +
                                     ": expected <x> <y> <tilename>");
        int t = sys.tile_index(name);
        if (t < 0)
            throw std::runtime_error("assembly line " + std::to_string(lineno) +
                                     ": unknown tile " + name);
        a[{x, y}] = t;
    }
    return a;
}

std::string region_table(const std::vector<Region>& regions) {
    std::ostringstream out;
    for (const auto& r : regions)
        out << "  " << r.name << ": start=" << r.start << " length=" << r.length << "\n";
    return out.str();
}

int cmd_run(const std::string& tas_path, int depth, std::uint64_t seed, int steps, bool all,
            std::size_t cap, const std::string& out, const std::string& svg_path) {
    TAS sys = load_tas(tas_path);
    std::ostringstream text;
    Assembly to_render = sys.seed;
    if (all) {
        auto prod = producible_set(sys, depth, cap);
        text << "# producible assemblies, depth " << depth << ": " << prod.assemblies.size()
             << (prod.exhausted ? " (exhaustive)" : " (depth-bounded)") << "\n";
        for (std::size_t i = 0; i < prod.assemblies.size(); ++i) {
            text << "# assembly " << i << " (" << prod.assemblies[i].size() << " tiles)\n";
            text << dump_assembly(sys, prod.assemblies[i]);
            if (prod.assemblies[i].size() > to_render.size()) to_render = prod.assemblies[i];
        }
    } else {
        auto run = run_sequence(sys, seed, steps);
        text << "# seed " << seed << ", " << run.steps.size() << " attachments"
             << (run.terminal ? ", terminal" : "") << "\n";
        text << dump_assembly(sys, run.final);
        to_render = run.final;
    }
    write_out(out, text.str());
    if (!svg_path.empty()) write_out(svg_path, render_svg(sys, to_render));
    return kExitPass;
}

int cmd_check_sim(const std::string& s_path, const std::string& t_path,
                  const std::string& rep_path, bool iu, int depth, std::size_t cap) {
    SimReport report;
    if (iu) {
        TAS T = load_tas(t_path.empty() ? s_path : t_path);
        report = check_intrinsic_simulation(T, depth, cap);
    } else {
        TAS S = load_tas(s_path);
        TAS T = t_path.empty() ? S : load_tas(t_path);
        BlockRep rep =
            rep_path.empty() ? identity_rep(S) : parse_rep(read_file(rep_path), S, T);
        report = check_simulation(S, T, rep, depth, 4, cap);
    }
    std::cout << report.to_text();
    std::cout << "check-sim: " << verdict(report.ok()) << "\n";
    return report.ok() ? kExitPass : kExitCheckFailed;
}

int cmd_iu_tables(const std::string& tas_path, const std::string& out) {
    TAS sys = load_tas(tas_path);
    LookupTable lt = build_lookup_table(sys);
    SupersideLayout layout = superside_layout(sys);
    std::ostringstream text;
    text << "glues (incl. null): g=" << lt.gt.g << ", bits per glue L=" << lt.gt.L << "\n";
    text << "address slots: " << lt.entries.size() << "\n";
    text << "total entries: " << lt.total_entries << "\n";
    auto census = entry_census(lt, sys);
    text << "entries by non-null address sides:";
    for (int k = 0; k <= 4; ++k) text << " " << k << ":" << census.by_nonnull_sides[k];
    text << "\n";
    text << "superside length m=" << layout.m << " (crawler width " << layout.crawler_width
         << ", probe pitch " << layout.probe_slot_pitch << ")\n";
    text << "superside regions:\n" << region_table(layout.regions);
    text << "probe slots per side and glue:\n";
    for (int d = 0; d < 4; ++d)
        for (int g = 1; g < static_cast<int>(sys.glues.size()); ++g) {
            auto slots = probe_slots(sys, lt.gt, static_cast<Dir>(d), g);
            if (slots.empty()) continue;
            text << "  " << dir_name(static_cast<Dir>(d)) << " " << sys.glues[g].label << ":";
            for (int s : slots) text << " " << (s == tau_slot(lt.gt) ? "tau" : glue_bin(lt.gt, lt.gt.order[s]));
            text << "\n";
        }
    text << "lookup tape regions:\n" << region_table(lt.tape_regions);
    text << "lookup tape:\n" << lt.tape << "\n";
    write_out(out, text.str());
    return kExitPass;
}

int cmd_iu_run(const std::string& tas_path, int depth, std::uint64_t seed,
               const std::string& mode, std::size_t cap, const std::string& out,
               const std::string& svg_path) {
    TAS sys = load_tas(tas_path);
    if (mode == "exhaustive") {
        auto report = check_intrinsic_simulation(sys, depth, cap);
        std::ostringstream text;
        text << report.to_text();
        text << "iu-run exhaustive: " << verdict(report.ok()) << "\n";
        write_out(out, text.str());
        return report.ok() ? kExitPass : kExitCheckFailed;
    }
    auto run = run_lattice(sys, depth, seed);
    std::ostringstream text;
    for (const auto& line : run.trace) text << line << "\n";
    text << "# " << run.steps << " events, " << (run.quiescent ? "quiescent" : "step-capped")
         << "\n";
    text << "# resolved image:\n";
    text << dump_assembly(sys, run.final_image);
    write_out(out, text.str());
    if (!svg_path.empty()) write_out(svg_path, render_svg(sys, run.final_image));
    return kExitPass;
}

int cmd_render(const std::string& tas_path, const std::string& assembly_path,
               const std::string& out) {
    TAS sys = load_tas(tas_path);
    Assembly a = assembly_path.empty() ? sys.seed : parse_assembly(read_file(assembly_path), sys);
    write_out(out, render_svg(sys, a));
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tile assembly toolkit"};
    app.require_subcommand(1);

    int depth = 3;
    std::uint64_t seed = 0;
    int steps = 100;
    bool all = false;
    bool iu = false;
    std::size_t cap = 200000;
    std::string mode = "one";
    std::string tas_path, t_path, rep_path, assembly_path, out, svg_path;

    auto add_common = [&](CLI::App* c, bool with_seed) {
        c->add_option("--depth", depth, "exploration depth (attachments)");
        c->add_option("--cap-assemblies", cap, "state/assembly budget");
        c->add_option("--out", out, "output file ('-' = stdout)");
        if (with_seed) c->add_option("--seed", seed, "root seed for all randomness");
    };

    auto* run = app.add_subcommand("run", "simulate a tile assembly system");
    run->add_option("tas", tas_path, "TAS file")->required();
    run->add_option("--steps", steps, "attachment budget for one trajectory");
    run->add_flag("--all", all, "dump every producible assembly up to --depth");
    run->add_option("--svg", svg_path, "also write an SVG of the final assembly");
    add_common(run, true);

    auto* check = app.add_subcommand("check-sim", "block-simulation conformance check");
    check->add_option("simulator", tas_path, "simulator TAS file (or target with --iu)")
        ->required();
    check->add_option("--target", t_path, "simulated TAS file (default: simulator itself)");
    check->add_option("--rep", rep_path,
                      "block representation file (default: scale-1 identity)");
    check->add_flag("--iu", iu, "check the protocol engine's own representation");
    add_common(check, false);

    auto* tables = app.add_subcommand("iu-tables", "emit lookup/probe/layout tables");
    tables->add_option("tas", tas_path, "TAS file")->required();
    add_common(tables, false);

    auto* iurun = app.add_subcommand("iu-run", "run the protocol engine");
    iurun->add_option("tas", tas_path, "TAS file")->required();
    iurun->add_option("--mode", mode, "one (seeded trace) or exhaustive (full check)")
        ->check(CLI::IsMember({"one", "exhaustive"}));
    iurun->add_option("--svg", svg_path, "also write an SVG of the resolved image");
    add_common(iurun, true);

    auto* render = app.add_subcommand("render", "render an assembly to SVG");
    render->add_option("tas", tas_path, "TAS file")->required();
    render->add_option("--assembly", assembly_path,
                       "assembly dump to render (default: the seed)");
    render->add_option("--out", out, "output file ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (app.got_subcommand(run)) return cmd_run(tas_path, depth, seed, steps, all, cap, out, svg_path);
        if (app.got_subcommand(check)) return cmd_check_sim(tas_path, t_path, rep_path, iu, depth, cap);
        if (app.got_subcommand(tables)) return cmd_iu_tables(tas_path, out);
        if (app.got_subcommand(iurun)) return cmd_iu_run(tas_path, depth, seed, mode, cap, out, svg_path);
        if (app.got_subcommand(render)) return cmd_render(tas_path, assembly_path, out);
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
