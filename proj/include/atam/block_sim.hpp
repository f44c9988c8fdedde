#pragma once
// m-block supertiles, representation functions and the two-sided simulation
// relation (equivalent production / equivalent dynamics) as an executable
// conformance checker. The graph-level checker is shared by the extensional
// block representation below and by the protocol engine.

#include "atam/core.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace atam {

// An m x m window of simulator tiles; cells indexed (i,j) in [0,m)^2.
struct MBlock {
    int m = 1;
    std::map<std::pair<int, int>, int> cells;  // -> simulator tile index
    friend auto operator<=>(const MBlock&, const MBlock&) = default;
};

// Reads the block covering [mx, mx+m) x [my, my+m).
MBlock block_at(const Assembly& a, int m, int x, int y);

// Extensional block representation: a finite list of block patterns mapped to
// simulated tile indices. With monotone_closure set, any block extending a
// rule's pattern maps to the same tile; otherwise rules match exactly.
struct BlockRep {
    int m = 1;
    std::vector<std::pair<MBlock, int>> rules;
    bool monotone_closure = true;
};

// The represented simulated tile of one block, if any. Returns nullopt for
// unmapped blocks; throws std::invalid_argument if two rules with different
// outputs both match (invalid representation).
std::optional<int> rep_block(const BlockRep& rep, const MBlock& b);

// Monotonicity over a universe of blocks: whenever one block extends another
// and the smaller is mapped, the larger maps to the same tile.
bool validate_rep(const BlockRep& rep, const std::vector<MBlock>& universe);

// The assembly representation function R*: block coordinates become simulated
// positions; unmapped blocks represent empty space. May return an empty map.
Assembly represent(const BlockRep& rep, const Assembly& sim);

// True iff every nonempty unmapped block is 8-adjacent to a mapped block, or
// the whole assembly occupies at most one block.
bool maps_cleanly(const BlockRep& rep, const Assembly& sim);

struct SimReport {
    bool production_ok = false;
    bool clean_ok = false;
    bool dynamics_forward_ok = false;
    bool dynamics_backward_ok = false;
    int depth = 0;
    std::string counterexample;  // empty when all checks pass

    bool ok() const {
        return production_ok && clean_ok && dynamics_forward_ok && dynamics_backward_ok;
    }
    std::string to_text() const;
};

// Explored simulator transition graph with precomputed images. Node 0 is the
// initial state; depth is the BFS distance from it.
struct SimGraph {
    struct Node {
        Assembly image;  // R*(state) in simulated coordinates
        bool clean = true;
        int depth = 0;
    };
    std::vector<Node> nodes;
    std::vector<std::vector<int>> succ;
    // true when exploration hit no budget/depth boundary; forward dynamics is
    // then demanded of every node instead of only those with headroom.
    bool exhausted = false;
};

// Core conformance check against the simulated system T at the given depth.
// Forward dynamics is only demanded of nodes with at least `headroom`
// exploration margin (deeper nodes may lack their completions in the graph).
SimReport check_graph(const SimGraph& graph, const TAS& T, int depth, int headroom,
                      std::size_t cap = 200000);

// Convenience driver: explores S to depth_S = c * m^2 * depth, builds the
// graph through the extensional representation, and runs check_graph.
SimReport check_simulation(const TAS& S, const TAS& T, const BlockRep& rep, int depth, int c = 4,
                           std::size_t cap = 200000);

// The scale-1 identity representation of a tile set (self-simulation).
BlockRep identity_rep(const TAS& sys);

}  // namespace atam
