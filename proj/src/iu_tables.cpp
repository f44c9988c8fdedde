#include "atam/iu_tables.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <numeric>

namespace atam {

namespace {

int bits_for(std::uint64_t n) {  // minimal binary width of n (n >= 1)
    int b = 0;
    while (n) {
        ++b;
        n >>= 1;
    }
    return b;
}

std::string binary(std::uint64_t n) {
    if (n == 0) return "0";
    std::string s;
    for (int i = bits_for(n) - 1; i >= 0; --i) s += char('0' + ((n >> i) & 1));
    return s;
}

char hex_digit(int v) { return v < 10 ? char('0' + v) : char('a' + v - 10); }

// Appends `info` to the tape with a spacer after every information cell
// (crawlers read every other column while zig-zagging).
void emit(std::string& tape, const std::string& info) {
    for (char c : info) {
        tape += c;
        tape += '_';
    }
}

}  // namespace

GlueTable build_glue_table(const TAS& sys) {
    GlueTable gt;
    gt.order.clear();
    std::vector<std::pair<std::string, int>> labeled;
    for (std::size_t i = 1; i < sys.glues.size(); ++i)
        labeled.emplace_back(sys.glues[i].label, static_cast<int>(i));
    std::sort(labeled.begin(), labeled.end());
    gt.order.push_back(0);
    for (auto& [label, idx] : labeled) gt.order.push_back(idx);
    gt.index_of.assign(sys.glues.size(), -1);
    for (std::size_t i = 0; i < gt.order.size(); ++i) gt.index_of[gt.order[i]] = static_cast<int>(i);
    gt.g = static_cast<int>(gt.order.size());
    gt.L = std::max(1, bits_for(static_cast<std::uint64_t>(gt.g) - 1));
    // ceil(log2 g): bits_for(g-1) except when g is 1 (handled by the max).
    return gt;
}

std::string glue_bin(const GlueTable& gt, int glue) {
    if (glue < 0 || glue >= static_cast<int>(gt.index_of.size()) || gt.index_of[glue] < 0)
        throw std::invalid_argument("unknown glue");
    int idx = gt.index_of[glue];
    std::string s;
    for (int i = gt.L - 1; i >= 0; --i) s += char('0' + ((idx >> i) & 1));
    return s;
}

Address address_of(const GlueTable& gt, const std::array<int, 4>& quad) {
    std::array<int, 4> idx;
    for (int d = 0; d < 4; ++d) {
        if (quad[d] < 0 || quad[d] >= static_cast<int>(gt.index_of.size()) ||
            gt.index_of[quad[d]] < 0)
            throw std::invalid_argument("unknown glue in quadruple");
        idx[d] = gt.index_of[quad[d]];
    }
    Address a;
    a.digits.resize(gt.L);
    for (int i = 0; i < gt.L; ++i) {
        int shift = gt.L - 1 - i;  // bit i of an index, MSB-first
        int digit = 0;
        for (int d = 0; d < 4; ++d) digit = (digit << 1) | ((idx[d] >> shift) & 1);
        a.digits[i] = digit;
    }
    return a;
}

std::array<int, 4> address_to_quadruple(const GlueTable& gt, const Address& a) {
    int L = static_cast<int>(a.digits.size());
    std::array<int, 4> idx{0, 0, 0, 0};
    for (int i = 0; i < L; ++i)
        for (int d = 0; d < 4; ++d)
            idx[d] = (idx[d] << 1) | ((a.digits[i] >> (3 - d)) & 1);
    std::array<int, 4> quad;
    for (int d = 0; d < 4; ++d) {
        if (idx[d] >= gt.g) throw std::invalid_argument("address decodes to no glue");
        quad[d] = gt.order[idx[d]];
    }
    return quad;
}

std::uint64_t address_int(const Address& a) {
    std::uint64_t v = 0;
    for (int digit : a.digits) v = (v << 4) | static_cast<unsigned>(digit);
    return v;
}

bool validly_addresses(const TAS& sys, const std::array<int, 4>& addr, const TileType& t) {
    int s = 0;
    for (int d = 0; d < 4; ++d)
        if (addr[d] != 0 && addr[d] == t.glue[d]) s += sys.glues[addr[d]].strength;
    return s >= sys.temperature;
}

LookupTable build_lookup_table(const TAS& sys, std::size_t cap) {
    LookupTable lt;
    lt.gt = build_glue_table(sys);
    lt.temperature = sys.temperature;
    std::size_t slots = std::size_t{1} << (4 * lt.gt.L);
    if (slots > cap) throw BudgetExceeded("lookup table slot space exceeds cap");
    lt.entries.assign(slots, {});

    // Tile order within an address: by the interleaved integer of the tile's
    // own glue quadruple (unique per tile).
    std::vector<int> tiles(sys.tiles.size());
    std::iota(tiles.begin(), tiles.end(), 0);
    std::sort(tiles.begin(), tiles.end(), [&](int a, int b) {
        return address_int(address_of(lt.gt, sys.tiles[a].glue)) <
               address_int(address_of(lt.gt, sys.tiles[b].glue));
    });

    // Enumerate the g^4 realizable addresses; padded slots stay empty.
    int g = lt.gt.g;
    std::array<int, 4> quad;
    for (int n = 0; n < g; ++n)
        for (int e = 0; e < g; ++e)
            for (int s = 0; s < g; ++s)
                for (int w = 0; w < g; ++w) {
                    quad = {lt.gt.order[n], lt.gt.order[e], lt.gt.order[s], lt.gt.order[w]};
                    auto slot = address_int(address_of(lt.gt, quad));
                    for (int t : tiles)
                        if (validly_addresses(sys, quad, sys.tiles[t]))
                            lt.entries[slot].push_back(t);
                    lt.total_entries += lt.entries[slot].size();
                }

    // Build the text tape.
    auto begin_region = [&](const std::string& name) {
        lt.tape_regions.push_back({name, static_cast<int>(lt.tape.size()), 0});
    };
    auto end_region = [&] {
        lt.tape_regions.back().length =
            static_cast<int>(lt.tape.size()) - lt.tape_regions.back().start;
    };
    begin_region("address-entry-counts");
    for (const auto& ent : lt.entries) {
        emit(lt.tape, "#");
        if (!ent.empty()) emit(lt.tape, binary(ent.size()));
    }
    end_region();
    begin_region("random-number");
    emit(lt.tape, std::string(static_cast<std::size_t>(4 * lt.gt.L + 8), '_'));
    end_region();
    begin_region("address-entries");
    for (const auto& ent : lt.entries) {
        emit(lt.tape, "#");
        for (std::size_t i = 0; i < ent.size(); ++i) {
            if (i) emit(lt.tape, ".");
            Address a = address_of(lt.gt, sys.tiles[ent[i]].glue);
            std::string digits;
            for (int d : a.digits) digits += hex_digit(d);
            emit(lt.tape, digits);
        }
    }
    end_region();
    begin_region("compute-state");
    emit(lt.tape, std::string(16, '_'));
    end_region();
    return lt;
}

std::optional<LookupResult> lookup(const LookupTable& lt, const std::array<int, 4>& collected,
                                   std::uint64_t r) {
    auto slot = address_int(address_of(lt.gt, collected));
    const auto& ent = lt.entries[slot];
    if (ent.empty()) return std::nullopt;
    int n = static_cast<int>(ent.size());
    return LookupResult{ent[static_cast<int>(r % n)], n};
}

DualLookupResult dual_lookup(const LookupTable& lt, const std::array<int, 4>& three, Dir axis,
                             std::uint64_t r) {
    DualLookupResult res;
    res.primary = lookup(lt, three, r);
    std::array<int, 4> pair{0, 0, 0, 0};
    pair[axis] = three[axis];
    pair[opposite(axis)] = three[opposite(axis)];
    auto slot = address_int(address_of(lt.gt, pair));
    res.opposite_pair_matches = !lt.entries[slot].empty();
    return res;
}

EntryCensus entry_census(const LookupTable& lt, const TAS& sys) {
    EntryCensus c;
    for (std::size_t slot = 0; slot < lt.entries.size(); ++slot) {
        if (lt.entries[slot].empty()) continue;
        Address a;
        a.digits.resize(lt.gt.L);
        for (int i = 0; i < lt.gt.L; ++i)
            a.digits[i] = static_cast<int>((slot >> (4 * (lt.gt.L - 1 - i))) & 0xf);
        auto quad = address_to_quadruple(lt.gt, a);
        int k = 0;
        for (int d = 0; d < 4; ++d)
            if (quad[d] != 0) ++k;
        c.by_nonnull_sides[k] += lt.entries[slot].size();
        c.total += lt.entries[slot].size();
    }
    (void)sys;
    return c;
}

EntryCensus full_match_census(const TAS& sys) {
    EntryCensus c;
    GlueTable gt = build_glue_table(sys);
    std::array<int, 4> quad;
    for (int n = 0; n < gt.g; ++n)
        for (int e = 0; e < gt.g; ++e)
            for (int s = 0; s < gt.g; ++s)
                for (int w = 0; w < gt.g; ++w) {
                    quad = {gt.order[n], gt.order[e], gt.order[s], gt.order[w]};
                    int k = 0;
                    for (int d = 0; d < 4; ++d)
                        if (quad[d] != 0) ++k;
                    for (const auto& t : sys.tiles) {
                        bool full = true;
                        int strength = 0;
                        for (int d = 0; d < 4; ++d) {
                            if (quad[d] == 0) continue;
                            if (t.glue[d] != quad[d]) {
                                full = false;
                                break;
                            }
                            strength += sys.glues[quad[d]].strength;
                        }
                        if (full && strength >= sys.temperature) {
                            c.by_nonnull_sides[k] += 1;
                            c.total += 1;
                        }
                    }
                }
    return c;
}

std::set<int> probe_slots(const TAS& sys, const GlueTable& gt, Dir side, int glue) {
    std::set<int> slots;
    if (glue == 0) return slots;
    if (side == N || side == E) {
        slots.insert(gt.index_of[glue]);
    } else {
        // Slot keys for an axis are the glue on the north (resp. east) side
        // of the candidate tile.
        Dir key_side = opposite(side);
        for (const auto& t : sys.tiles) {
            if (t.glue[side] != glue) continue;
            int h = t.glue[key_side];
            if (h == 0) continue;
            if (sys.glues[h].strength + sys.glues[glue].strength >= sys.temperature)
                slots.insert(gt.index_of[h]);
        }
    }
    if (sys.glues[glue].strength == sys.temperature) slots.insert(tau_slot(gt));
    return slots;
}

ProbeMeeting probes_meet(const TAS& sys, const GlueTable& gt, Dir d, int gd, int go) {
    ProbeMeeting pm;
    auto a = probe_slots(sys, gt, d, gd);
    auto b = probe_slots(sys, gt, opposite(d), go);
    for (int s : a) {
        if (!b.count(s)) continue;
        if (s == tau_slot(gt))
            pm.via_tau = true;
        else
            pm.via_shared_slot = true;
    }
    pm.meet = pm.via_shared_slot || pm.via_tau;
    return pm;
}

SupersideLayout superside_layout(const TAS& sys) {
    SupersideLayout lay;
    LookupTable lt = build_lookup_table(sys);
    const GlueTable& gt = lt.gt;
    lay.crawler_width = std::max(2, 2 * gt.L);
    int gap = std::max(static_cast<int>(sys.tiles.size()), 2 * lay.crawler_width);
    lay.probe_slot_pitch = gap + lay.crawler_width;
    int nslots = gt.g;  // glue slots 1..g-1 plus the strength-tau slot
    lay.probe_slot_offset.assign(nslots, 0);
    for (int i = 0; i < nslots; ++i) lay.probe_slot_offset[i] = i * lay.probe_slot_pitch;
    int probe_region = nslots * lay.probe_slot_pitch;

    int tau_bits = 1;
    while ((1 << tau_bits) <= sys.temperature) ++tau_bits;
    int glue_copy = 2 * (gt.L + tau_bits);  // glue index + strength, spacered
    int probe_table = 2 * nslots * (gt.L + 2);
    int table = static_cast<int>(lt.tape.size());
    int blank = probe_region + probe_table;

    int at = 0;
    auto add = [&](const std::string& name, int len) {
        lay.regions.push_back({name, at, len});
        at += len;
    };
    add("frame", 4);
    add("glue-copy-1", glue_copy);
    add("glue-copy-2", glue_copy);
    add("lookup-table-1", table);
    add("blank", blank);
    add("probe-region", probe_region);
    add("probe-table", probe_table);
    add("lookup-table-2", table);
    add("glue-copy-3", glue_copy);
    add("glue-copy-4", glue_copy);
    add("frame-right", 4);
    if (at % 2 == 0) add("parity-pad", 1);
    lay.m = lay.regions.back().start + lay.regions.back().length;
    return lay;
}

}  // namespace atam
