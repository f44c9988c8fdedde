#include "atam/core.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <random>
#include <set>
#include <unordered_set>

namespace atam {

int TAS::glue_index(const std::string& label) const {
    for (std::size_t i = 0; i < glues.size(); i++)
        if (glues[i].label == label) return static_cast<int>(i);
    return -1;
}

int TAS::tile_index(const std::string& name) const {
    for (std::size_t i = 0; i < tiles.size(); i++)
        if (tiles[i].name == name) return static_cast<int>(i);
    return -1;
}

void validate(const TAS& tas) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (tas.temperature < 1) fail("temperature must be >= 1");
    if (tas.glues.empty() || !tas.glues[0].label.empty() || tas.glues[0].strength != 0)
        fail("glue 0 must be the null glue");
    std::set<std::string> labels;
    for (std::size_t i = 1; i < tas.glues.size(); i++) {
        const Glue& g = tas.glues[i];
        if (g.label.empty()) fail("only glue 0 may be null");
        if (g.strength < 1 || g.strength > tas.temperature)
            fail("glue '" + g.label + "' strength out of [1, tau]");
        if (!labels.insert(g.label).second) fail("duplicate glue label '" + g.label + "'");
    }
    std::set<std::string> names;
    std::set<std::array<int, 4>> quads;
    for (const TileType& t : tas.tiles) {
        if (t.name.empty()) fail("tile with empty name");
        if (!names.insert(t.name).second) fail("duplicate tile name '" + t.name + "'");
        for (int g : t.glue)
            if (g < 0 || g >= static_cast<int>(tas.glues.size())) fail("tile glue out of range");
        if (!quads.insert(t.glue).second)
            fail("duplicate glue quadruple on tile '" + t.name + "'");
    }
    if (tas.seed.empty()) fail("seed must be nonempty");
    for (auto& [p, t] : tas.seed)
        if (t < 0 || t >= static_cast<int>(tas.tiles.size())) fail("seed tile out of range");
    if (!is_connected(tas.seed)) fail("seed must be connected");
    if (!is_tau_stable(tas, tas.seed)) fail("seed must be tau-stable");
}

bool is_connected(const Assembly& a) {
    if (a.empty()) return false;
    std::set<Pos> seen;
    std::deque<Pos> q{a.begin()->first};
    seen.insert(a.begin()->first);
    while (!q.empty()) {
        Pos p = q.front();
        q.pop_front();
        for (int d = 0; d < 4; d++) {
            Pos n = neighbor(p, static_cast<Dir>(d));
            if (a.count(n) && seen.insert(n).second) q.push_back(n);
        }
    }
    return seen.size() == a.size();
}

namespace {

struct Edge {
    int u, v, w;
};

// Edges of the binding graph (positive-strength bonds between adjacent tiles).
std::vector<Edge> binding_edges(const TAS& tas, const Assembly& a, std::vector<Pos>& order) {
    order.clear();
    std::map<Pos, int, PosYX> index;
    for (auto& [p, t] : a) {
        index[p] = static_cast<int>(order.size());
        order.push_back(p);
    }
    std::vector<Edge> edges;
    for (auto& [p, t] : a) {
        // east and north neighbors only, so each bond is listed once
        for (Dir d : {E, N}) {
            auto it = a.find(neighbor(p, d));
            if (it == a.end()) continue;
            int w = tas.bond(tas.tiles[t].glue[d], tas.tiles[it->second].glue[opposite(d)]);
            if (w > 0) edges.push_back({index[p], index[it->first], w});
        }
    }
    return edges;
}

int min_cut_exhaustive(int n, const std::vector<Edge>& edges) {
    int best = INT32_MAX;
    // vertex 0 fixed on one side; enumerate the rest
    for (std::uint64_t mask = 0; mask < (1ull << (n - 1)); mask++) {
        std::uint64_t side = mask << 1;  // bit i set -> vertex i on the far side
        if (side == 0 || static_cast<int>(__builtin_popcountll(side)) == n - 0) continue;
        int cut = 0;
        for (const Edge& e : edges) {
            bool su = (side >> e.u) & 1, sv = (side >> e.v) & 1;
            if (su != sv) cut += e.w;
        }
        if (side != 0) best = std::min(best, cut);
    }
    return best == INT32_MAX ? 0 : best;
}

// Edmonds-Karp max flow; global min cut = min over t of maxflow(0, t).
struct FlowNet {
    struct Arc {
        int to, cap, flow;
    };
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> adj;
    explicit FlowNet(int n) : adj(n) {}
    void add(int u, int v, int c) {
        adj[u].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({v, c, 0});
        adj[v].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({u, c, 0});  // undirected
    }
    int maxflow(int s, int t) {
        for (auto& a : arcs) a.flow = 0;
        int total = 0;
        for (;;) {
            std::vector<int> pre(adj.size(), -1);
            std::deque<int> q{s};
            pre[s] = -2;
            while (!q.empty() && pre[t] == -1) {
                int u = q.front();
                q.pop_front();
                for (int id : adj[u]) {
                    const Arc& a = arcs[id];
                    if (pre[a.to] == -1 && a.cap > a.flow) {
                        pre[a.to] = id;
                        q.push_back(a.to);
                    }
                }
            }
            if (pre[t] == -1) return total;
            int aug = INT32_MAX;
            for (int v = t; v != s;) {
                const Arc& a = arcs[pre[v]];
                aug = std::min(aug, a.cap - a.flow);
                v = arcs[pre[v] ^ 1].to;
            }
            for (int v = t; v != s;) {
                arcs[pre[v]].flow += aug;
                arcs[pre[v] ^ 1].flow -= aug;
                v = arcs[pre[v] ^ 1].to;
            }
            total += aug;
        }
    }
};

}  // namespace

int binding_min_cut(const TAS& tas, const Assembly& a) {
    int n = static_cast<int>(a.size());
    if (n <= 1) return INT32_MAX;  // no cut exists; treat singletons as unconditionally stable
    std::vector<Pos> order;
    std::vector<Edge> edges = binding_edges(tas, a, order);
    if (n <= 20) return min_cut_exhaustive(n, edges);
    FlowNet net(n);
    for (const Edge& e : edges) net.add(e.u, e.v, e.w);
    int best = INT32_MAX;
    for (int t = 1; t < n; t++) best = std::min(best, net.maxflow(0, t));
    return best;
}

bool is_tau_stable(const TAS& tas, const Assembly& a) {
    if (a.empty()) return false;
    return binding_min_cut(tas, a) >= tas.temperature;
}

int attachment_strength(const TAS& tas, const Assembly& a, Pos p, int tile) {
    int s = 0;
    for (int d = 0; d < 4; d++) {
        auto it = a.find(neighbor(p, static_cast<Dir>(d)));
        if (it == a.end()) continue;
        s += tas.bond(tas.tiles[tile].glue[d],
                      tas.tiles[it->second].glue[opposite(static_cast<Dir>(d))]);
    }
    return s;
}

bool can_attach(const TAS& tas, const Assembly& a, Pos p, int tile) {
    return !a.count(p) && attachment_strength(tas, a, p, tile) >= tas.temperature;
}

std::vector<Attachment> frontier(const TAS& tas, const Assembly& a) {
    std::set<Pos> sites;
    for (auto& [p, t] : a)
        for (int d = 0; d < 4; d++) {
            Pos n = neighbor(p, static_cast<Dir>(d));
            if (!a.count(n)) sites.insert(n);
        }
    std::vector<Attachment> out;
    for (Pos p : sites)
        for (int t = 0; t < static_cast<int>(tas.tiles.size()); t++)
            if (can_attach(tas, a, p, t)) out.push_back({p, t});
    std::sort(out.begin(), out.end());
    return out;
}

Assembly attach(const TAS& tas, const Assembly& a, const Attachment& at) {
    if (a.count(at.pos) || !can_attach(tas, a, at.pos, at.tile))
        throw std::invalid_argument("attachment not in frontier");
    return attach(a, at);
}

Assembly attach(const Assembly& a, const Attachment& at) {
    Assembly b = a;
    b[at.pos] = at.tile;
    return b;
}

bool is_terminal(const TAS& tas, const Assembly& a) { return frontier(tas, a).empty(); }

std::uint64_t hash_assembly(const Assembly& a) {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    auto mix = [&](std::uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    for (auto& [p, t] : a) {
        mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)));
        mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.y)));
        mix(static_cast<std::uint64_t>(t));
    }
    return h;
}

ProducibleSet producible_set(const TAS& tas, int depth, std::size_t cap) {
    ProducibleSet ps;
    std::set<Assembly> seen;
    std::deque<std::pair<Assembly, int>> q;
    seen.insert(tas.seed);
    q.push_back({tas.seed, 0});
    ps.exhausted = true;
    while (!q.empty()) {
        auto [a, d] = q.front();
        q.pop_front();
        ps.assemblies.push_back(a);
        if (ps.assemblies.size() > cap) throw BudgetExceeded("producible_set cap exceeded");
        std::vector<Attachment> fr = frontier(tas, a);
        if (d == depth) {
            if (!fr.empty()) ps.exhausted = false;
            continue;
        }
        for (const Attachment& at : fr) {
            Assembly b = attach(a, at);
            if (seen.insert(b).second) q.push_back({b, d + 1});
        }
    }
    return ps;
}

Directedness is_directed_up_to(const TAS& tas, int depth, std::size_t cap) {
    ProducibleSet ps = producible_set(tas, depth, cap);
    std::map<Pos, int, PosYX> agreed;
    for (const Assembly& a : ps.assemblies)
        for (auto& [p, t] : a) {
            auto [it, fresh] = agreed.emplace(p, t);
            (void)fresh;
            if (it->second != t) return Directedness::NotDirected;
        }
    return ps.exhausted ? Directedness::DirectedSoFar : Directedness::Inconclusive;
}

std::uint64_t stream_seed(std::uint64_t root, const std::string& name, int x, int y) {
    std::uint64_t h = root ^ 0xc2b2ae3d27d4eb4full;
    auto mix = [&](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ull;
        h ^= h >> 29;
    };
    for (char c : name) mix(static_cast<unsigned char>(c));
    mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) | 0xa000000000ull);
    mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(y)) | 0xb000000000ull);
    return h;
}

RunResult run_sequence(const TAS& tas, std::uint64_t seed, int max_steps, bool fair) {
    std::mt19937_64 rng(stream_seed(seed, "run"));
    RunResult res;
    Assembly a = tas.seed;
    // fair mode: service the location waiting longest; arrival order tracked
    std::deque<Pos> queue;
    std::set<Pos> queued;
    auto refresh = [&]() {
        std::set<Pos> sites;
        for (auto& at : frontier(tas, a)) sites.insert(at.pos);
        for (Pos p : sites)
            if (queued.insert(p).second) queue.push_back(p);
        // drop stale entries (filled or no longer attachable)
        std::deque<Pos> alive;
        for (Pos p : queue)
            if (sites.count(p)) alive.push_back(p);
            else queued.erase(p);
        queue = std::move(alive);
    };
    for (int step = 0; step < max_steps; step++) {
        std::vector<Attachment> fr = frontier(tas, a);
        if (fr.empty()) {
            res.terminal = true;
            break;
        }
        Attachment pick{};
        if (fair) {
            refresh();
            Pos p = queue.front();
            std::vector<int> cands;
            for (const Attachment& at : fr)
                if (at.pos == p) cands.push_back(at.tile);
            pick = {p, cands[rng() % cands.size()]};
        } else {
            pick = fr[rng() % fr.size()];
        }
        a = attach(a, pick);
        res.steps.push_back({pick, step});
    }
    if (!res.terminal && is_terminal(tas, a)) res.terminal = true;
    res.final = a;
    return res;
}

}  // namespace atam
