#pragma once
// Protocol-level supertile engine: each simulated lattice position is a site
// whose supertile forms by frame corner competitions, probe growth from
// win-win sides, and counterclockwise crawlers that collect input glues,
// perform addressed lookups, and resolve the site to one simulated tile.
// Crawlers are modeled as non-blocking messages on a fixed station route;
// resolution is atomic (the first output commits the tile, pair-linked twin
// crawlers output the identical tile in the same event, every other crawler
// dies). Exhaustive exploration over all event interleavings feeds the
// graph-level simulation checker.

#include "atam/block_sim.hpp"
#include "atam/core.hpp"
#include "atam/frame.hpp"
#include "atam/iu_tables.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace atam {

// Immutable per-system context shared by every site.
struct EngineContext {
    const TAS* sys = nullptr;
    GlueTable gt;
    LookupTable lt;

    explicit EngineContext(const TAS& s);
    int tau() const { return sys->temperature; }
    int strength(int glue) const { return sys->glues[glue].strength; }
    // Entry list (tile indices) at the address formed by a glue quadruple.
    const std::vector<int>& entries(const std::array<int, 4>& quad) const;
};

enum class CrawlerOrigin : int { Corner = 0, Probe, PairTwin };
const char* origin_name(CrawlerOrigin o);

struct EngineCrawler {
    CrawlerOrigin origin = CrawlerOrigin::Corner;
    Dir origin_side = N;
    int at = 0;              // corner station index on the CCW route (see route_corner)
    int steps = 0;           // sides already processed; the circuit ends at 4
    std::uint8_t collected = 0;  // bitmask of Dir whose input glue was collected
    bool alive = true;
    bool output = false;     // printed a tile record
    int pair = -1;           // index of the pair-linked twin, if any
};

// CCW station route: corner SE -> side E -> NE -> N -> NW -> W -> SW -> S.
Corner route_corner(int idx);     // idx in [0,4)
int route_index(Corner c);
Dir side_after(int idx);          // side a crawler at station idx processes next

struct SiteState {
    std::array<int, 4> in{-1, -1, -1, -1};  // input glue per Dir, -1 = absent
    std::array<bool, 4> participating{};    // arrived before the frame finalized
    std::array<int, 4> corner_winner{-1, -1, -1, -1};  // by Corner, value is a Dir
    bool config_final = false;
    FrameConfig cfg;                        // valid once config_final
    std::array<bool, 4> probes{};           // probes grown, by Dir
    std::array<bool, 2> met{};              // shared-slot meeting fired, by axis (0 = N/S)
    int center = -1;                        // Dir whose tau probe claimed the middle
    std::vector<EngineCrawler> crawlers;
    std::array<bool, 4> emitted{};          // output supersides grown, by Dir
    int resolved = -1;                      // simulated tile index
    char resolution_kind = 0;               // 0 none, 's' single crawler, 'p' pair
    int outputs = 0;                        // crawlers that reached the output state

    std::array<int, 4> quad(std::uint8_t mask) const;  // collected glues, 0 elsewhere
    std::string key() const;                           // canonical serialization
};

struct SiteEvent {
    enum Kind : int {
        Lock = 0,     // corner, winner
        Finalize,     // compute frame config, spawn initiation-corner crawlers
        SpawnProbes,  // side
        Meet,         // axis (shared probe slot; spawns the twin pair)
        ClaimCenter,  // side (strength-tau probe claims the middle)
        Cross,        // crawler processes a present side
        Claim,        // crawler claims an absent side (resolving if not yet output)
        Resolve,      // crawler finished the circuit with all four sides present
    } kind = Lock;
    Corner corner = Corner::NW;  // Lock
    Dir side = N;                // SpawnProbes, ClaimCenter; Lock winner
    int axis = 0;                // Meet: 0 = N/S, 1 = E/W
    int crawler = -1;            // Cross, Claim, Resolve
    int entry = -1;              // Claim/Resolve tile choice; -1 = draw e = r mod n
    friend auto operator<=>(const SiteEvent&, const SiteEvent&) = default;
};

std::string site_event_text(const EngineContext& ctx, const SiteState& st, const SiteEvent& e);

// Input superside delivery (from a resolved neighbor or the test harness).
void site_deliver(const EngineContext& ctx, SiteState& st, Dir d, int glue);

// Enabled events in deterministic order. With expand_branches, Lock carries
// each possible winner and Claim/Resolve each possible entry index; otherwise
// branch parameters are left to be drawn from `rng` at fire time.
std::vector<SiteEvent> site_enabled(const EngineContext& ctx, const SiteState& st,
                                    bool expand_branches);

// Fires one enabled event; returns output supersides grown by it as
// (side, glue) pairs. `rng` is required when the event carries an unexpanded
// branch parameter. Throws std::logic_error on internal invariant violations
// (probe meetings are asserted to satisfy the opposite win-win observation).
std::vector<std::pair<Dir, int>> site_fire(const EngineContext& ctx, SiteState& st,
                                           const SiteEvent& e, std::mt19937_64* rng);

// ---------------------------------------------------------------------------
// Single-site exhaustive harness: all interleavings of a fixed set of input
// arrivals with the site's internal events.

struct SiteScenario {
    std::array<int, 4> glue{0, 0, 0, 0};  // arriving glue per Dir (0 allowed)
    std::uint8_t present = 0;             // bitmask of arriving Dirs
};

struct SiteCensus {
    std::size_t states = 0;
    int quiescent_pair = 0;    // quiescent states resolved by a twin pair
    int quiescent_single = 0;  // resolved by a lone crawler
    int quiescent_none = 0;    // unresolved at quiescence
    std::set<int> resolved_tiles;
    bool ok = true;            // per-trace invariants held in every quiescent state
    std::string failure;
};

// Invariants checked per quiescent state: pair resolutions print exactly two
// identical records, single resolutions exactly one, unresolved quiescence
// happens only when no tile is validly addressed by the full input quadruple,
// and every resolved tile is validly addressed by it.
SiteCensus explore_site(const TAS& sys, const SiteScenario& sc, std::size_t cap = 2000000);

// ---------------------------------------------------------------------------
// Lattice: one site per simulated position inside a depth window around the
// seed. Seed sites start resolved with their perimeter supersides pre-grown.

struct LatticeState {
    std::map<Pos, SiteState, PosYX> sites;
    std::string key() const;
};

class LatticeEngine {
  public:
    LatticeEngine(const TAS& sys, int depth);

    const EngineContext& ctx() const { return ctx_; }
    const LatticeState& initial() const { return init_; }
    // seed sites only, before their perimeter supersides are delivered
    const LatticeState& seed_only() const { return seeds_; }
    // per target site, the seed supersides it receives, in canonical order
    const std::map<Pos, std::vector<std::pair<Dir, int>>, PosYX>& seed_deliveries() const {
        return deliveries_;
    }
    bool in_window(Pos p) const;
    bool is_seed_site(Pos p) const { return sys_.seed.count(p) != 0; }

    std::vector<std::pair<Pos, SiteEvent>> enabled(const LatticeState& st,
                                                   bool expand_branches) const;
    // Fires one event, delivering any output supersides to in-window
    // neighbors. Returns the trace line for the event.
    std::string fire(LatticeState& st, Pos p, const SiteEvent& e, std::mt19937_64* rng) const;

    Assembly image(const LatticeState& st) const;  // seed plus resolved sites
    int nonseed_resolved(const LatticeState& st) const;

  private:
    TAS sys_;
    EngineContext ctx_;
    int depth_;
    int xmin_, xmax_, ymin_, ymax_;
    LatticeState seeds_;
    LatticeState init_;
    std::map<Pos, std::vector<std::pair<Dir, int>>, PosYX> deliveries_;
};

struct RunLatticeResult {
    std::vector<std::string> trace;
    Assembly final_image;
    bool quiescent = false;
    int steps = 0;
};

// One seeded interleaving of enabled events; every draw (scheduling, corner
// winners, entry choices) derives from `seed` via named streams.
RunLatticeResult run_lattice(const TAS& sys, int depth, std::uint64_t seed,
                             int max_steps = 1000000);

// Exhaustive protocol state graph. Nodes are macro states: per site, a
// committed protocol state plus the ordered queue of input supersides not yet
// absorbed. Each edge is one step that resolves a site or grows an output
// superside, found by exhaustively interleaving the site's queued inputs with
// its internal events; internal progress is invisible to other sites until
// such a step, so every fine-grained interleaving maps to a macro path with
// identical images. Pruned once the image carries `depth` non-seed tiles;
// throws BudgetExceeded beyond `cap` states.
SimGraph build_engine_graph(const TAS& sys, int depth, std::size_t cap = 200000);

// Full intrinsic check: explores the protocol graph and runs the graph-level
// production/dynamics checker against the simulated system itself.
SimReport check_intrinsic_simulation(const TAS& sys, int depth, std::size_t cap = 200000);

}  // namespace atam
