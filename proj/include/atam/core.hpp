#pragma once
// Core abstract tile assembly model: tile systems, assemblies, stability,
// frontier computation, producible-set exploration and seeded runs.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace atam {

enum Dir : int { N = 0, E = 1, S = 2, W = 3 };
inline Dir opposite(Dir d) { return static_cast<Dir>((static_cast<int>(d) + 2) % 4); }
inline const char* dir_name(Dir d) {
    static const char* names[4] = {"N", "E", "S", "W"};
    return names[static_cast<int>(d)];
}

struct Pos {
    int x = 0;
    int y = 0;
    // ordered by (y, x) so iteration matches the dump format
    friend auto operator<=>(const Pos&, const Pos&) = default;
};
inline Pos neighbor(Pos p, Dir d) {
    switch (d) {
        case N: return {p.x, p.y + 1};
        case E: return {p.x + 1, p.y};
        case S: return {p.x, p.y - 1};
        default: return {p.x - 1, p.y};
    }
}
// comparator giving (y,x) order for deterministic dumps
struct PosYX {
    bool operator()(const Pos& a, const Pos& b) const {
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    }
};

struct Glue {
    std::string label;  // empty = null glue
    int strength = 0;
};

struct TileType {
    std::string name;
    std::array<int, 4> glue{0, 0, 0, 0};  // per Dir, index into TAS::glues (0 = null)
};

// Assembly: positions to tile indices. Uses (y,x)-ordered map so equality,
// hashing and serialization are all canonical.
using Assembly = std::map<Pos, int, PosYX>;

struct TAS {
    int temperature = 1;
    std::vector<Glue> glues;      // glues[0] is always the null glue
    std::vector<TileType> tiles;  // distinct names, distinct glue quadruples
    Assembly seed;

    int glue_index(const std::string& label) const;
    int tile_index(const std::string& name) const;
    // interaction strength of two abutting glue indices (equal and nonzero -> strength)
    int bond(int ga, int gb) const {
        return (ga != 0 && ga == gb) ? glues[ga].strength : 0;
    }
};

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Validates structural invariants (null glue at index 0, strengths in [0, tau],
// unique labels/names/quadruples, seed stability + connectivity). Throws
// std::invalid_argument on violation.
void validate(const TAS& tas);

bool is_connected(const Assembly& a);

// Sum of bond strengths across the boundary between `a` restricted to the two
// halves of a bipartition; stability = min cut of the binding graph >= tau.
// Exhaustive bipartition for <= 20 tiles, global min-cut via max-flow beyond.
bool is_tau_stable(const TAS& tas, const Assembly& a);
int binding_min_cut(const TAS& tas, const Assembly& a);

// Strength with which `tile` would bind at empty position p against `a`.
int attachment_strength(const TAS& tas, const Assembly& a, Pos p, int tile);
bool can_attach(const TAS& tas, const Assembly& a, Pos p, int tile);

struct Attachment {
    Pos pos;
    int tile;
    friend auto operator<=>(const Attachment&, const Attachment&) = default;
};

// All (position, tile) pairs attachable to `a`, sorted by (pos, tile).
std::vector<Attachment> frontier(const TAS& tas, const Assembly& a);

// Throws std::invalid_argument unless `at` is in frontier(tas, a).
Assembly attach(const TAS& tas, const Assembly& a, const Attachment& at);
// Unchecked variant for callers that already hold a frontier element.
Assembly attach(const Assembly& a, const Attachment& at);

bool is_terminal(const TAS& tas, const Assembly& a);

struct ProducibleSet {
    std::vector<Assembly> assemblies;  // includes the seed
    bool exhausted = false;            // true if every producible assembly was reached
};

// Breadth-first enumeration of assemblies reachable by at most `depth`
// attachments from the seed, deduplicated. Throws BudgetExceeded when more
// than `cap` distinct assemblies would be stored.
ProducibleSet producible_set(const TAS& tas, int depth, std::size_t cap = 200000);

enum class Directedness { DirectedSoFar, NotDirected, Inconclusive };

// Directed iff all producibles pairwise agree at shared positions. Verdict is
// definite only when exploration exhausted the producible set within depth.
Directedness is_directed_up_to(const TAS& tas, int depth, std::size_t cap = 200000);

struct RunStep {
    Attachment at;
    int step = 0;
};

struct RunResult {
    Assembly final;
    std::vector<RunStep> steps;
    bool terminal = false;  // frontier empty at stop
};

// Seeded single trajectory. fair=true services the oldest frontier location
// first (tile chosen uniformly among candidates there); fair=false draws
// uniformly over all frontier pairs. Deterministic for a given seed.
RunResult run_sequence(const TAS& tas, std::uint64_t seed, int max_steps, bool fair = true);

std::uint64_t hash_assembly(const Assembly& a);

// Named splittable stream: all pseudorandomness in the toolkit derives from a
// single 64-bit seed mixed with a stream label and coordinates.
std::uint64_t stream_seed(std::uint64_t root, const std::string& name, int x = 0, int y = 0);

}  // namespace atam
