#pragma once
// Static encodings used by the protocol engine: glue ordering and binary
// encoding, interleaved addresses, the addressed tile lookup table, probe
// slot tables, and superside layout geometry (scale factor m).

#include "atam/core.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace atam {

// Deterministic glue ordering: null at index 0, remaining glues sorted
// lexicographically by label. L is the per-glue bit width.
struct GlueTable {
    std::vector<int> order;     // table index -> TAS glue index; order[0] == 0
    std::vector<int> index_of;  // TAS glue index -> table index
    int g = 1;                  // |G| including null
    int L = 1;                  // max(1, ceil(log2 g))
};

GlueTable build_glue_table(const TAS& sys);

// L-bit MSB-first binary of the glue's table index. `glue` is a TAS index.
std::string glue_bin(const GlueTable& gt, int glue);

// An address is L hex digits; digit i packs bit i of bin(n), bin(e), bin(s),
// bin(w) MSB-first (north in the high bit of each digit).
struct Address {
    std::vector<int> digits;
    friend auto operator<=>(const Address&, const Address&) = default;
};

// quad holds TAS glue indices in N,E,S,W order (0 = null / absent side).
Address address_of(const GlueTable& gt, const std::array<int, 4>& quad);
std::array<int, 4> address_to_quadruple(const GlueTable& gt, const Address& a);

// The address read as an integer, digits most-significant-first. This is the
// slot index in the padded [0, 2^{4L}) address space.
std::uint64_t address_int(const Address& a);

// True iff the strengths of t's sides that agree with the address sum to at
// least the temperature. Address sides carrying other glues (including null
// for absent inputs) impose no constraint: they model mismatching or absent
// input supersides.
bool validly_addresses(const TAS& sys, const std::array<int, 4>& addr, const TileType& t);

struct Region {
    std::string name;
    int start = 0;
    int length = 0;
};

struct LookupTable {
    GlueTable gt;
    int temperature = 1;
    // 2^{4L} slots in interleaved-integer order; each slot lists the tiles
    // validly addressed by it, ordered by the tile quadruple's interleaved
    // integer. Slots whose bit pattern decodes to no glue quadruple are empty.
    std::vector<std::vector<int>> entries;
    std::uint64_t total_entries = 0;
    // Text tape: address entry counts | random-number region | address
    // entries | compute region, a spacer '_' after every information cell.
    std::string tape;
    std::vector<Region> tape_regions;
};

// Throws BudgetExceeded if the padded slot space exceeds `cap`.
LookupTable build_lookup_table(const TAS& sys, std::size_t cap = (std::size_t{1} << 22));

struct LookupResult {
    int tile = -1;  // TAS tile index
    int count = 0;  // entry count n at the address
};

// collected: TAS glue indices per Dir, 0 for absent sides. Returns entry
// r mod n, or nullopt when the address has no entries.
std::optional<LookupResult> lookup(const LookupTable& lt, const std::array<int, 4>& collected,
                                   std::uint64_t r);

struct DualLookupResult {
    std::optional<LookupResult> primary;
    // whether the glues on `axis` and its opposite alone validly address
    // some tile (the probes-will-meet test).
    bool opposite_pair_matches = false;
};

DualLookupResult dual_lookup(const LookupTable& lt, const std::array<int, 4>& three, Dir axis,
                             std::uint64_t r);

struct EntryCensus {
    std::array<std::uint64_t, 5> by_nonnull_sides{};  // indexed by k = 0..4
    std::uint64_t total = 0;
};

// Entries under the strength-sum rule, bucketed by the number of non-null
// address sides.
EntryCensus entry_census(const LookupTable& lt, const TAS& sys);

// Full-match census: tile counted at an address iff its quadruple agrees with
// every non-null address side and those sides' strengths sum to >= tau. This
// is the notion whose per-category maxima are g^3, g^2, g, 1 and whose total
// is bounded by 15g^4 - 32g^3 + 24g^2 - 8g + 1.
EntryCensus full_match_census(const TAS& sys);

// Probe slot identifiers: glue slots are glue-table indices 1..g-1; slot id g
// is the shared strength-tau slot. The null glue has no slot.
inline int tau_slot(const GlueTable& gt) { return gt.g; }

// For north/east supersides: the side's own glue slot. For south/west: one
// slot per glue h such that some tile carries h on the opposite axis side and
// the superside's glue on this side with combined strength >= tau. Every side
// whose glue has strength exactly tau also grows the strength-tau slot.
// `glue` is a TAS glue index; returns the empty set for the null glue.
std::set<int> probe_slots(const TAS& sys, const GlueTable& gt, Dir side, int glue);

struct ProbeMeeting {
    bool meet = false;
    bool via_shared_slot = false;  // matching opposite binding
    bool via_tau = false;          // two opposite strength-tau sides
};

// Whether probes grown by the input supersides on `d` (glue gd) and its
// opposite (glue go) meet in the middle of the site. Callers must separately
// ensure both sides are win-win; this is the slot-geometry test only.
ProbeMeeting probes_meet(const TAS& sys, const GlueTable& gt, Dir d, int gd, int go);

struct SupersideLayout {
    std::vector<Region> regions;  // in order; covers [0, m)
    int m = 0;                    // total superside length, always odd
    int crawler_width = 0;
    int probe_slot_pitch = 0;
    // offset of each probe slot id (1..g-1 glue slots, then the tau slot)
    // within the probe region.
    std::vector<int> probe_slot_offset;
};

SupersideLayout superside_layout(const TAS& sys);

}  // namespace atam
