#include "atam/block_sim.hpp"

#include "atam/tas_io.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace atam {

namespace {

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

// (block position, contents) of every nonempty block of `sim`.
std::map<Pos, MBlock, PosYX> blocks_of(const Assembly& sim, int m) {
    std::map<Pos, MBlock, PosYX> out;
    for (const auto& [p, t] : sim) {
        Pos bp{floor_div(p.x, m), floor_div(p.y, m)};
        MBlock& b = out[bp];
        b.m = m;
        b.cells[{p.x - bp.x * m, p.y - bp.y * m}] = t;
    }
    return out;
}

bool extends(const MBlock& small, const MBlock& big) {
    for (const auto& [cell, t] : small.cells) {
        auto it = big.cells.find(cell);
        if (it == big.cells.end() || it->second != t) return false;
    }
    return true;
}

}  // namespace

MBlock block_at(const Assembly& a, int m, int x, int y) {
    MBlock b;
    b.m = m;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            auto it = a.find(Pos{m * x + i, m * y + j});
            if (it != a.end()) b.cells[{i, j}] = it->second;
        }
    return b;
}

std::optional<int> rep_block(const BlockRep& rep, const MBlock& b) {
    std::optional<int> out;
    for (const auto& [pattern, tile] : rep.rules) {
        bool match = rep.monotone_closure ? extends(pattern, b) : pattern == b;
        if (!match) continue;
        if (out && *out != tile)
            throw std::invalid_argument("block matches rules with conflicting outputs");
        out = tile;
    }
    return out;
}

bool validate_rep(const BlockRep& rep, const std::vector<MBlock>& universe) {
    for (const auto& small : universe) {
        std::optional<int> rs;
        try {
            rs = rep_block(rep, small);
        } catch (const std::invalid_argument&) {
            return false;
        }
        if (!rs) continue;
        for (const auto& big : universe) {
            if (!extends(small, big)) continue;
            std::optional<int> rb;
            try {
                rb = rep_block(rep, big);
            } catch (const std::invalid_argument&) {
                return false;
            }
            if (!rb || *rb != *rs) return false;
        }
    }
    return true;
}

Assembly represent(const BlockRep& rep, const Assembly& sim) {
    Assembly image;
    for (const auto& [bp, block] : blocks_of(sim, rep.m))
        if (auto t = rep_block(rep, block)) image.emplace(bp, *t);
    return image;
}

bool maps_cleanly(const BlockRep& rep, const Assembly& sim) {
    auto blocks = blocks_of(sim, rep.m);
    if (blocks.size() <= 1) return true;
    std::set<Pos, PosYX> mapped;
    for (const auto& [bp, block] : blocks)
        if (rep_block(rep, block)) mapped.insert(bp);
    for (const auto& [bp, block] : blocks) {
        if (mapped.count(bp)) continue;
        bool near = false;
        for (int dy = -1; dy <= 1 && !near; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                if ((dx || dy) && mapped.count(Pos{bp.x + dx, bp.y + dy})) {
                    near = true;
                    break;
                }
        if (!near) return false;
    }
    return true;
}

std::string SimReport::to_text() const {
    std::ostringstream out;
    auto line = [&](const char* name, bool v) { out << name << ": " << (v ? "PASS" : "FAIL") << '\n'; };
    out << "depth: " << depth << '\n';
    line("production", production_ok);
    line("maps-cleanly", clean_ok);
    line("dynamics-forward", dynamics_forward_ok);
    line("dynamics-backward", dynamics_backward_ok);
    if (!counterexample.empty()) out << "counterexample:\n" << counterexample;
    return out.str();
}

SimReport check_graph(const SimGraph& graph, const TAS& T, int depth, int headroom,
                      std::size_t cap) {
    SimReport rep;
    rep.depth = depth;
    rep.production_ok = rep.clean_ok = rep.dynamics_forward_ok = rep.dynamics_backward_ok = true;
    auto note = [&](const std::string& msg) {
        if (rep.counterexample.empty()) rep.counterexample = msg;
    };

    // --- clean mapping ------------------------------------------------------
    for (std::size_t i = 0; i < graph.nodes.size() && rep.clean_ok; ++i)
        if (!graph.nodes[i].clean) {
            rep.clean_ok = false;
            note("state " + std::to_string(i) + " does not map cleanly\n");
        }

    // --- equivalent production ---------------------------------------------
    auto pt = producible_set(T, depth, cap);
    std::set<Assembly> expected(pt.assemblies.begin(), pt.assemblies.end());
    std::set<Assembly> images;
    for (const auto& n : graph.nodes) images.insert(n.image);
    for (const auto& a : expected)
        if (!images.count(a)) {
            rep.production_ok = false;
            note("producible assembly never represented:\n" + dump_assembly(T, a));
            break;
        }
    for (const auto& img : images) {
        if (expected.count(img)) continue;
        rep.production_ok = false;
        note(img.empty() ? std::string("state represents only empty space\n")
                         : "represented assembly is not producible at this depth:\n" +
                               dump_assembly(T, img));
        break;
    }

    // --- equivalent dynamics, backward --------------------------------------
    for (std::size_t u = 0; u < graph.nodes.size() && rep.dynamics_backward_ok; ++u) {
        const Assembly& a = graph.nodes[u].image;
        for (int v : graph.succ[u]) {
            const Assembly& b = graph.nodes[v].image;
            if (a == b) continue;
            std::vector<Attachment> added;
            bool super = true;
            for (const auto& [p, t] : b) {
                auto it = a.find(p);
                if (it == a.end())
                    added.push_back({p, t});
                else if (it->second != t)
                    super = false;
            }
            for (const auto& [p, t] : a)
                if (!b.count(p)) super = false;
            bool ok = super && added.size() == 1;
            if (ok) {
                if (a.empty())
                    ok = (b == T.seed);
                else
                    ok = can_attach(T, a, added[0].pos, added[0].tile);
            }
            if (!ok) {
                rep.dynamics_backward_ok = false;
                note("simulator step does not project to one valid T-step:\n" +
                     dump_assembly(T, a) + "->\n" + dump_assembly(T, b));
                break;
            }
        }
    }

    // --- equivalent dynamics, forward ----------------------------------------
    int max_depth = 0;
    for (const auto& n : graph.nodes) max_depth = std::max(max_depth, n.depth);
    int cutoff = graph.exhausted ? INT32_MAX : max_depth - headroom;
    std::vector<std::vector<int>> pred(graph.nodes.size());
    for (std::size_t u = 0; u < graph.succ.size(); ++u)
        for (int v : graph.succ[u]) pred[v].push_back(static_cast<int>(u));

    for (const auto& alpha : expected) {
        if (!rep.dynamics_forward_ok) break;
        int alpha_steps = static_cast<int>(alpha.size() - T.seed.size());
        if (alpha_steps >= depth) continue;  // successors exceed the depth bound
        for (const auto& at : frontier(T, alpha)) {
            Assembly beta = attach(alpha, at);
            // reverse reachability from { nodes with image beta }
            std::vector<char> reach(graph.nodes.size(), 0);
            std::deque<int> q;
            for (std::size_t i = 0; i < graph.nodes.size(); ++i)
                if (graph.nodes[i].image == beta) {
                    reach[i] = 1;
                    q.push_back(static_cast<int>(i));
                }
            while (!q.empty()) {
                int v = q.front();
                q.pop_front();
                for (int u : pred[v])
                    if (!reach[u]) {
                        reach[u] = 1;
                        q.push_back(u);
                    }
            }
            for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
                if (graph.nodes[i].image != alpha || graph.nodes[i].depth > cutoff) continue;
                if (!reach[i]) {
                    rep.dynamics_forward_ok = false;
                    note("T-step unreachable from a preimage (state " + std::to_string(i) +
                         "):\n" + dump_assembly(T, alpha) + "->\n" + dump_assembly(T, beta));
                    break;
                }
            }
            if (!rep.dynamics_forward_ok) break;
        }
    }
    return rep;
}

SimReport check_simulation(const TAS& S, const TAS& T, const BlockRep& rep, int depth, int c,
                           std::size_t cap) {
    int depth_S = c * rep.m * rep.m * depth;
    SimGraph graph;
    graph.exhausted = true;

    std::map<Assembly, int> index;
    std::deque<int> queue;
    auto add_node = [&](const Assembly& a, int d) {
        auto [it, fresh] = index.emplace(a, static_cast<int>(graph.nodes.size()));
        if (fresh) {
            if (graph.nodes.size() >= cap) throw BudgetExceeded("simulation state budget");
            graph.nodes.push_back({represent(rep, a), maps_cleanly(rep, a), d});
            graph.succ.emplace_back();
            queue.push_back(it->second);
        }
        return it->second;
    };
    add_node(S.seed, 0);
    std::size_t seed_image = graph.nodes[0].image.size();
    std::vector<Assembly> states{S.seed};

    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        const Assembly a = states[u];
        // stop expanding once the image already carries `depth` attachments
        if (static_cast<int>(graph.nodes[u].image.size() - seed_image) >= depth) continue;
        auto fr = frontier(S, a);
        if (graph.nodes[u].depth >= depth_S) {
            if (!fr.empty()) graph.exhausted = false;
            continue;
        }
        for (const auto& at : fr) {
            Assembly b = attach(a, at);
            std::size_t before = graph.nodes.size();
            int v = add_node(b, graph.nodes[u].depth + 1);
            if (graph.nodes.size() > before) states.push_back(b);
            graph.succ[u].push_back(v);
        }
    }
    return check_graph(graph, T, depth, c * rep.m * rep.m, cap);
}

BlockRep identity_rep(const TAS& sys) {
    BlockRep rep;
    rep.m = 1;
    for (int i = 0; i < static_cast<int>(sys.tiles.size()); ++i) {
        MBlock b;
        b.m = 1;
        b.cells[{0, 0}] = i;
        rep.rules.emplace_back(b, i);
    }
    rep.monotone_closure = true;
    return rep;
}

}  // namespace atam
