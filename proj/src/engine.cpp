#include "atam/engine.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace atam {

namespace {

constexpr std::uint8_t bit(Dir d) { return static_cast<std::uint8_t>(1u << static_cast<int>(d)); }

int axis_of(Dir d) { return (d == N || d == S) ? 0 : 1; }
Dir axis_side(int axis) { return axis == 0 ? N : E; }

// entry lists are ordered by quadruple interleave, so sort before comparing
bool subset(std::vector<int> a, std::vector<int> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

void append_int(std::string& out, int v) {
    out += std::to_string(v);
    out += ',';
}

}  // namespace

EngineContext::EngineContext(const TAS& s) : sys(&s), gt(build_glue_table(s)), lt(build_lookup_table(s)) {}

const std::vector<int>& EngineContext::entries(const std::array<int, 4>& quad) const {
    return lt.entries[address_int(address_of(gt, quad))];
}

const char* origin_name(CrawlerOrigin o) {
    static const char* names[4] = {"corner", "probe", "twin", "late"};
    return names[static_cast<int>(o)];
}

// CCW route SE -> E -> NE -> N -> NW -> W -> SW -> S; each side is entered
// from its left corner, so crawling a side runs left end to right end.
Corner route_corner(int idx) {
    static const Corner order[4] = {Corner::SE, Corner::NE, Corner::NW, Corner::SW};
    return order[idx & 3];
}

int route_index(Corner c) {
    switch (c) {
        case Corner::SE: return 0;
        case Corner::NE: return 1;
        case Corner::NW: return 2;
        default: return 3;
    }
}

Dir side_after(int idx) {
    static const Dir order[4] = {E, N, W, S};
    return order[idx & 3];
}

std::array<int, 4> SiteState::quad(std::uint8_t mask) const {
    std::array<int, 4> q{0, 0, 0, 0};
    for (int d = 0; d < 4; ++d)
        if ((mask >> d & 1) && in[d] > 0) q[d] = in[d];
    return q;
}

std::string SiteState::key() const {
    std::string out;
    for (int d = 0; d < 4; ++d) {
        append_int(out, in[d]);
        out += participating[d] ? 'p' : '.';
        out += emitted[d] ? 'e' : '.';
        out += probes[d] ? 'b' : '.';
    }
    for (int c = 0; c < 4; ++c) append_int(out, corner_winner[c]);
    out += config_final ? 'F' : '.';
    if (config_final)
        for (int d = 0; d < 4; ++d) {
            const SideConfig& sc = cfg.side[d];
            out += sc.present ? '1' : '0';
            out += static_cast<char>('0' + static_cast<int>(sc.left));
            out += static_cast<char>('0' + static_cast<int>(sc.right));
        }
    out += met[0] ? 'M' : '.';
    out += met[1] ? 'M' : '.';
    append_int(out, center);
    append_int(out, resolved);
    out += resolution_kind ? resolution_kind : '.';
    append_int(out, outputs);
    for (const EngineCrawler& cr : crawlers) {
        out += '[';
        append_int(out, static_cast<int>(cr.origin));
        append_int(out, static_cast<int>(cr.origin_side));
        append_int(out, cr.at);
        append_int(out, cr.steps);
        append_int(out, cr.collected);
        out += cr.alive ? 'a' : '.';
        out += cr.output ? 'o' : '.';
        append_int(out, cr.pair);
        out += ']';
    }
    return out;
}

namespace {
void compact_crawlers(SiteState& st);
}

void site_deliver(const EngineContext& ctx, SiteState& st, Dir d, int glue) {
    (void)ctx;
    if (st.in[d] != -1 || st.emitted[d])
        throw std::logic_error("superside delivered to an occupied side");
    st.in[d] = glue;
    if (st.resolved >= 0) return;  // recorded; output already printed
    if (!st.config_final) {
        st.participating[d] = true;
        return;
    }
    // Late arrival: the superside still competes at its corners. Any corner
    // still unlocked has no earlier claimant, so the late side wins it; a
    // locked corner was already taken and the late side loses there. The
    // frame configuration is extended accordingly, which lets a late side
    // that won both corners grow probes like any other win-win side.
    st.participating[d] = true;
    std::set<Corner> before = crawler_initiations(st.cfg);
    for (Corner c : {left_corner(d), right_corner(d)}) {
        int ci = static_cast<int>(c);
        if (st.corner_winner[ci] < 0) st.corner_winner[ci] = static_cast<int>(d);
    }
    SideConfig& side = st.cfg.side[d];
    side.present = true;
    side.left = st.corner_winner[static_cast<int>(left_corner(d))] == static_cast<int>(d)
                    ? WinLose::Win
                    : WinLose::Lose;
    side.right = st.corner_winner[static_cast<int>(right_corner(d))] == static_cast<int>(d)
                     ? WinLose::Win
                     : WinLose::Lose;
    // The extended configuration can justify initiation corners that were
    // vacant at finalize (a win-win side whose partner just arrived); spawn
    // exactly the newly justified ones.
    for (Corner c : crawler_initiations(st.cfg)) {
        if (before.count(c)) continue;
        Dir initiator = corner_sides(c).first;
        EngineCrawler ic;
        ic.origin = CrawlerOrigin::Corner;
        ic.origin_side = initiator;
        ic.at = route_index(c);
        ic.steps = 0;
        ic.collected = bit(initiator);
        st.crawlers.push_back(ic);
    }
    compact_crawlers(st);
}

namespace {

// winners a corner competition could resolve to (arrived adjacent sides)
std::vector<Dir> lock_candidates(const SiteState& st, Corner c) {
    std::vector<Dir> out;
    auto [a, b] = corner_sides(c);
    if (st.in[a] >= 0) out.push_back(a);
    if (st.in[b] >= 0) out.push_back(b);
    return out;
}

bool finalize_ready(const SiteState& st) {
    if (st.config_final) return false;
    bool any = false;
    for (int d = 0; d < 4; ++d) any = any || st.in[d] >= 0;
    if (!any) return false;
    for (int c = 0; c < 4; ++c)
        if (st.corner_winner[c] < 0 && !lock_candidates(st, static_cast<Corner>(c)).empty())
            return false;
    return true;
}

bool crawler_full(const EngineContext& ctx, const SiteState& st, const EngineCrawler& cr) {
    return !ctx.entries(st.quad(cr.collected)).empty();
}

// Resolution bookkeeping shared by Claim and Resolve: prints the records and
// kills every crawler that is neither the resolver nor its pair twin.
void resolve_site(SiteState& st, int crawler, int tile) {
    EngineCrawler& cr = st.crawlers[crawler];
    st.resolved = tile;
    st.resolution_kind = cr.pair >= 0 ? 'p' : 's';
    cr.output = true;
    st.outputs++;
    if (cr.pair >= 0 && st.crawlers[cr.pair].alive) {
        st.crawlers[cr.pair].output = true;
        st.outputs++;
    }
    for (EngineCrawler& other : st.crawlers)
        if (other.alive && !other.output) other.alive = false;
}

int choose_entry(const EngineContext& ctx, const std::vector<int>& entries, const SiteEvent& e,
                 std::mt19937_64* rng) {
    if (e.entry >= 0) {
        if (e.entry >= static_cast<int>(entries.size()))
            throw std::logic_error("entry index out of range");
        return e.entry;
    }
    if (!rng) throw std::logic_error("unexpanded entry choice without a draw stream");
    std::uint64_t r = (*rng)() % static_cast<std::uint64_t>(ctx.gt.g);
    return static_cast<int>(r % entries.size());
}

// Dead crawlers do nothing forever; dropping them keeps dedup keys canonical.
// A dangling pair link (twin died alone) reverts the survivor to a single.
// Everything that determines a crawler's future behavior: station, progress,
// knowledge, output state, the twin exemption, and (for probe crawlers) the
// side identity the center-pair spawn searches for.
std::array<int, 6> crawler_signature(const EngineCrawler& cr) {
    return {cr.at, cr.steps, static_cast<int>(cr.collected), cr.output ? 1 : 0,
            cr.origin == CrawlerOrigin::PairTwin ? 1 : 0,
            cr.origin == CrawlerOrigin::Probe ? static_cast<int>(cr.origin_side) : -1};
}

// Drops dead crawlers, merges behaviorally identical unpaired ones, and puts
// the list in a canonical order so interleavings that only differ in crawler
// bookkeeping collapse to one state.
void compact_crawlers(SiteState& st) {
    std::vector<int> order;
    for (int i = 0; i < static_cast<int>(st.crawlers.size()); ++i)
        if (st.crawlers[i].alive) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        auto sa = crawler_signature(st.crawlers[a]), sb = crawler_signature(st.crawlers[b]);
        return sa != sb ? sa < sb : a < b;
    });
    std::vector<int> remap(st.crawlers.size(), -1);
    std::vector<EngineCrawler> live;
    for (int i : order) {
        const EngineCrawler& cr = st.crawlers[i];
        if (cr.pair < 0 && !live.empty() && live.back().pair < 0 &&
            crawler_signature(live.back()) == crawler_signature(cr))
            continue;  // duplicate knowledge and behavior: one suffices
        remap[i] = static_cast<int>(live.size());
        live.push_back(cr);
    }
    for (EngineCrawler& cr : live)
        cr.pair = cr.pair >= 0 ? remap[cr.pair] : -1;
    st.crawlers = std::move(live);
}

void spawn_pair_twin(SiteState& st, Dir side, int partner) {
    EngineCrawler tw;
    tw.origin = CrawlerOrigin::PairTwin;
    tw.origin_side = side;
    tw.at = route_index(right_corner(side));
    tw.steps = 1;
    tw.collected = bit(side);
    tw.pair = partner;
    st.crawlers.push_back(tw);
    st.crawlers[partner].pair = static_cast<int>(st.crawlers.size()) - 1;
}

}  // namespace

std::vector<SiteEvent> site_enabled(const EngineContext& ctx, const SiteState& st,
                                    bool expand_branches) {
    std::vector<SiteEvent> out;
    const bool unresolved = st.resolved < 0;

    if (unresolved && !st.config_final) {
        for (int c = 0; c < 4; ++c) {
            if (st.corner_winner[c] >= 0) continue;
            auto cands = lock_candidates(st, static_cast<Corner>(c));
            if (cands.empty()) continue;
            SiteEvent e;
            e.kind = SiteEvent::Lock;
            e.corner = static_cast<Corner>(c);
            if (expand_branches)
                for (Dir w : cands) {
                    e.side = w;
                    out.push_back(e);
                }
            else
                out.push_back(e);
        }
        if (finalize_ready(st)) out.push_back({SiteEvent::Finalize});
    }

    if (unresolved && st.config_final) {
        for (int d = 0; d < 4; ++d) {
            if (st.in[d] <= 0 || !st.participating[d] || st.probes[d]) continue;
            if (st.cfg.cls(static_cast<Dir>(d)) != SideClass::WW) continue;
            SiteEvent e;
            e.kind = SiteEvent::SpawnProbes;
            e.side = static_cast<Dir>(d);
            out.push_back(e);
        }
        for (int axis = 0; axis < 2; ++axis) {
            if (st.met[axis] || st.center >= 0) continue;
            Dir d = axis_side(axis), o = opposite(d);
            if (!st.probes[d] || !st.probes[o]) continue;
            if (!probes_meet(*ctx.sys, ctx.gt, d, st.in[d], st.in[o]).via_shared_slot) continue;
            SiteEvent e;
            e.kind = SiteEvent::Meet;
            e.axis = axis;
            out.push_back(e);
        }
        for (int d = 0; d < 4; ++d) {
            if (st.center >= 0) break;
            if (!st.probes[d] || st.met[axis_of(static_cast<Dir>(d))]) continue;
            if (ctx.strength(st.in[d]) != ctx.tau()) continue;
            SiteEvent e;
            e.kind = SiteEvent::ClaimCenter;
            e.side = static_cast<Dir>(d);
            out.push_back(e);
        }
    }

    for (int i = 0; i < static_cast<int>(st.crawlers.size()); ++i) {
        const EngineCrawler& cr = st.crawlers[i];
        if (!cr.alive) continue;
        if (cr.output) {
            // output crawler finishes its circuit growing remaining supersides
            if (cr.steps >= 4) continue;
            Dir s = side_after(cr.at);
            SiteEvent e;
            e.crawler = i;
            e.kind = (st.in[s] >= 0 || st.emitted[s]) ? SiteEvent::Cross : SiteEvent::Claim;
            out.push_back(e);
            continue;
        }
        if (!unresolved) continue;  // killed at resolution; nothing enabled
        if (cr.steps >= 4) {
            SiteEvent e;
            e.kind = SiteEvent::Resolve;
            e.crawler = i;
            const auto& en = ctx.entries(st.quad(cr.collected));
            if (expand_branches && !en.empty())
                for (int k = 0; k < static_cast<int>(en.size()); ++k) {
                    e.entry = k;
                    out.push_back(e);
                }
            else
                out.push_back(e);
            continue;
        }
        Dir s = side_after(cr.at);
        if (st.in[s] >= 0 || st.emitted[s]) {
            SiteEvent e;
            e.kind = SiteEvent::Cross;
            e.crawler = i;
            out.push_back(e);
        } else if (crawler_full(ctx, st, cr)) {
            SiteEvent e;
            e.kind = SiteEvent::Claim;
            e.crawler = i;
            const auto& en = ctx.entries(st.quad(cr.collected));
            if (expand_branches)
                for (int k = 0; k < static_cast<int>(en.size()); ++k) {
                    e.entry = k;
                    out.push_back(e);
                }
            else
                out.push_back(e);
        }
        // not full at an absent side: the crawler waits
    }
    return out;
}

std::vector<std::pair<Dir, int>> site_fire(const EngineContext& ctx, SiteState& st,
                                           const SiteEvent& e, std::mt19937_64* rng) {
    std::vector<std::pair<Dir, int>> emissions;
    const TAS& sys = *ctx.sys;

    switch (e.kind) {
        case SiteEvent::Lock: {
            int c = static_cast<int>(e.corner);
            if (st.config_final || st.corner_winner[c] >= 0)
                throw std::logic_error("corner competition already placed");
            auto cands = lock_candidates(st, e.corner);
            if (cands.empty()) throw std::logic_error("corner competition with no arrivals");
            Dir w = e.side;
            if (rng)
                w = cands[(*rng)() % cands.size()];
            else if (std::find(cands.begin(), cands.end(), w) == cands.end())
                throw std::logic_error("corner winner did not arrive");
            st.corner_winner[c] = static_cast<int>(w);
            break;
        }
        case SiteEvent::Finalize: {
            if (!finalize_ready(st)) throw std::logic_error("frame not ready to finalize");
            for (int d = 0; d < 4; ++d) {
                if (st.in[d] < 0) continue;
                SideConfig& sc = st.cfg.side[d];
                sc.present = true;
                Dir dd = static_cast<Dir>(d);
                sc.left = st.corner_winner[static_cast<int>(left_corner(dd))] == d ? WinLose::Win
                                                                                   : WinLose::Lose;
                sc.right = st.corner_winner[static_cast<int>(right_corner(dd))] == d
                               ? WinLose::Win
                               : WinLose::Lose;
            }
            st.config_final = true;
            for (Corner c : crawler_initiations(st.cfg)) {
                Dir initiator = corner_sides(c).first;
                if (!st.cfg.side[initiator].present)
                    throw std::logic_error("initiation corner without its side");
                EngineCrawler cr;
                cr.origin = CrawlerOrigin::Corner;
                cr.origin_side = initiator;
                cr.at = route_index(c);
                cr.steps = 0;
                cr.collected = bit(initiator);
                st.crawlers.push_back(cr);
            }
            break;
        }
        case SiteEvent::SpawnProbes: {
            Dir d = e.side;
            if (st.probes[d] || st.cfg.cls(d) != SideClass::WW)
                throw std::logic_error("probes spawned off a win-win side");
            st.probes[d] = true;
            Dir o = opposite(d);
            if (st.center == static_cast<int>(o) && ctx.strength(st.in[d]) == ctx.tau()) {
                // the opposite tau probe already claimed the middle: this side's
                // probe becomes the second, pair-linked crawler (both win-win,
                // both strength tau -- the only tau-tau meeting shape)
                int partner = -1;
                for (int i = 0; i < static_cast<int>(st.crawlers.size()); ++i)
                    if (st.crawlers[i].alive && st.crawlers[i].origin == CrawlerOrigin::Probe &&
                        st.crawlers[i].origin_side == o && st.crawlers[i].pair < 0)
                        partner = i;
                if (st.cfg.cls(d) != SideClass::WW || st.cfg.cls(o) != SideClass::WW)
                    throw std::logic_error("probe meeting without opposite win-win sides");
                if (partner >= 0) {
                    spawn_pair_twin(st, d, partner);
                } else {
                    // the claimant crawler died under a coverage rule; the
                    // center structure still records the opposite glue, so
                    // the arriving probe reads both and roams unpaired
                    EngineCrawler tw;
                    tw.origin = CrawlerOrigin::PairTwin;
                    tw.origin_side = d;
                    tw.at = route_index(right_corner(d));
                    tw.steps = 1;
                    tw.collected = static_cast<std::uint8_t>(bit(d) | bit(o));
                    st.crawlers.push_back(tw);
                }
            }
            break;
        }
        case SiteEvent::Meet: {
            Dir d = axis_side(e.axis), o = opposite(d);
            if (st.met[e.axis] || st.center >= 0 || !st.probes[d] || !st.probes[o])
                throw std::logic_error("probe meeting not enabled");
            if (st.cfg.cls(d) != SideClass::WW || st.cfg.cls(o) != SideClass::WW)
                throw std::logic_error("probe meeting without opposite win-win sides");
            if (!probes_meet(sys, ctx.gt, d, st.in[d], st.in[o]).via_shared_slot)
                throw std::logic_error("probe meeting without a shared slot");
            st.met[e.axis] = true;
            // two pair-linked twins, each already holding both axis glues
            std::uint8_t both = static_cast<std::uint8_t>(bit(d) | bit(o));
            for (Dir s : {d, o}) {
                EngineCrawler tw;
                tw.origin = CrawlerOrigin::PairTwin;
                tw.origin_side = s;
                tw.at = route_index(right_corner(s));
                tw.steps = 1;
                tw.collected = both;
                st.crawlers.push_back(tw);
            }
            int n = static_cast<int>(st.crawlers.size());
            st.crawlers[n - 2].pair = n - 1;
            st.crawlers[n - 1].pair = n - 2;
            break;
        }
        case SiteEvent::ClaimCenter: {
            Dir d = e.side;
            if (st.center >= 0 || !st.probes[d] || st.met[axis_of(d)] ||
                ctx.strength(st.in[d]) != ctx.tau())
                throw std::logic_error("center claim not enabled");
            if (st.cfg.cls(d) != SideClass::WW)
                throw std::logic_error("center claimed off a win-win side");
            st.center = static_cast<int>(d);
            EngineCrawler cr;
            cr.origin = CrawlerOrigin::Probe;
            cr.origin_side = d;
            cr.at = route_index(right_corner(d));
            cr.steps = 1;
            cr.collected = bit(d);
            st.crawlers.push_back(cr);
            Dir o = opposite(d);
            if (st.probes[o] && ctx.strength(st.in[o]) == ctx.tau()) {
                if (st.cfg.cls(o) != SideClass::WW)
                    throw std::logic_error("probe meeting without opposite win-win sides");
                spawn_pair_twin(st, o, static_cast<int>(st.crawlers.size()) - 1);
            }
            break;
        }
        case SiteEvent::Cross: {
            EngineCrawler& cr = st.crawlers[e.crawler];
            Dir s = side_after(cr.at);
            if (!cr.alive || cr.steps >= 4 || (st.in[s] < 0 && !st.emitted[s]))
                throw std::logic_error("cross not enabled");
            if (st.in[s] >= 0) cr.collected |= bit(s);
            if (!cr.output && st.resolved < 0 && cr.pair < 0 &&
                cr.origin != CrawlerOrigin::PairTwin && st.config_final &&
                st.cfg.cls(s) == SideClass::WW && st.in[s] > 0) {
                const auto& own = ctx.entries(st.quad(cr.collected));
                Dir o = opposite(s);
                // A crawler dies on a win-win side only when every tile it
                // could still print is printable by crawlers that side
                // guarantees, AND such a delegate is actually alive. A safe
                // delegate holds at least this crawler's glues and is either
                // a twin (always holds a claimable entry set) or already
                // claimable itself, so it can never park forever; ties on
                // equal knowledge break by index so two peers cannot
                // annihilate each other.
                std::uint8_t informative = 0;
                for (int d = 0; d < 4; ++d)
                    if (st.in[d] > 0) informative |= std::uint8_t(1) << d;
                auto delegate_alive = [&]() {
                    std::uint8_t mine = cr.collected & informative;
                    for (int j = 0; j < static_cast<int>(st.crawlers.size()); ++j) {
                        if (j == e.crawler) continue;
                        const EngineCrawler& other = st.crawlers[j];
                        if (!other.alive || other.output || other.steps >= 4) continue;
                        std::uint8_t theirs = other.collected & informative;
                        if ((theirs & mine) != mine) continue;
                        bool strictly_more = theirs != mine;
                        if (!strictly_more && j > e.crawler) continue;
                        bool twin = other.pair >= 0 || other.origin == CrawlerOrigin::PairTwin;
                        if (twin || !ctx.entries(st.quad(other.collected)).empty()) return true;
                    }
                    return false;
                };
                bool redundant = false;
                if (st.cfg.cls(o) == SideClass::WW && st.in[o] > 0 &&
                    probes_meet(sys, ctx.gt, s, st.in[s], st.in[o]).via_shared_slot) {
                    std::array<int, 4> pairq{0, 0, 0, 0};
                    pairq[s] = st.in[s];
                    pairq[o] = st.in[o];
                    redundant = subset(own, ctx.entries(pairq));
                }
                if (!redundant && ctx.strength(st.in[s]) == ctx.tau()) {
                    std::array<int, 4> tq{0, 0, 0, 0};
                    tq[s] = st.in[s];
                    redundant = subset(own, ctx.entries(tq));
                }
                if (redundant && delegate_alive()) cr.alive = false;
            }
            if (cr.alive) {
                cr.at = (cr.at + 1) & 3;
                cr.steps++;
            }
            break;
        }
        case SiteEvent::Claim: {
            EngineCrawler& cr = st.crawlers[e.crawler];
            Dir s = side_after(cr.at);
            if (!cr.alive || cr.steps >= 4 || st.in[s] >= 0 || st.emitted[s])
                throw std::logic_error("claim not enabled");
            if (!cr.output) {
                const auto& en = ctx.entries(st.quad(cr.collected));
                if (en.empty()) throw std::logic_error("claim by a crawler with no entries");
                resolve_site(st, e.crawler, en[choose_entry(ctx, en, e, rng)]);
            }
            st.emitted[s] = true;
            emissions.emplace_back(s, sys.tiles[st.resolved].glue[s]);
            cr.at = (cr.at + 1) & 3;
            cr.steps++;
            break;
        }
        case SiteEvent::Resolve: {
            EngineCrawler& cr = st.crawlers[e.crawler];
            if (!cr.alive || cr.output || cr.steps < 4 || st.resolved >= 0)
                throw std::logic_error("resolve not enabled");
            const auto& en = ctx.entries(st.quad(cr.collected));
            if (en.empty())
                cr.alive = false;  // gathered four glues, no matching tile
            else
                resolve_site(st, e.crawler, en[choose_entry(ctx, en, e, rng)]);
            break;
        }
    }
    compact_crawlers(st);
    return emissions;
}

std::string site_event_text(const EngineContext& ctx, const SiteState& st, const SiteEvent& e) {
    std::ostringstream out;
    auto glue_label = [&](int g) -> std::string {
        return g > 0 ? ctx.sys->glues[g].label : std::string("null");
    };
    switch (e.kind) {
        case SiteEvent::Lock:
            out << "lock(" << corner_name(e.corner) << ")";
            break;
        case SiteEvent::Finalize:
            out << "frame-final";
            break;
        case SiteEvent::SpawnProbes:
            out << "probes(" << dir_name(e.side) << ") | glue=" << glue_label(st.in[e.side]);
            break;
        case SiteEvent::Meet:
            out << "probes-meet(" << (e.axis == 0 ? "N/S" : "E/W") << ") | shared-slot";
            break;
        case SiteEvent::ClaimCenter:
            out << "claim-center(" << dir_name(e.side) << ") | tau-glue=" << glue_label(st.in[e.side]);
            break;
        case SiteEvent::Cross: {
            const EngineCrawler& cr = st.crawlers[e.crawler];
            out << "cross | crawler=" << e.crawler << "(" << origin_name(cr.origin) << ")"
                << " side=" << dir_name(side_after(cr.at));
            break;
        }
        case SiteEvent::Claim: {
            const EngineCrawler& cr = st.crawlers[e.crawler];
            out << (cr.output ? "emit" : "output") << " | crawler=" << e.crawler << "("
                << origin_name(cr.origin) << ") side=" << dir_name(side_after(cr.at));
            break;
        }
        case SiteEvent::Resolve:
            out << "output | crawler=" << e.crawler << "("
                << origin_name(st.crawlers[e.crawler].origin) << ") full-circuit";
            break;
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// single-site exhaustive harness

SiteCensus explore_site(const TAS& sys, const SiteScenario& sc, std::size_t cap) {
    EngineContext ctx(sys);
    SiteCensus census;

    std::array<int, 4> full{0, 0, 0, 0};
    for (int d = 0; d < 4; ++d)
        if (sc.present >> d & 1) full[d] = sc.glue[d];
    const std::vector<int>& attachable = ctx.entries(full);

    struct HState {
        SiteState site;
        std::uint8_t pending;
    };
    auto hkey = [](const HState& h) { return h.site.key() + static_cast<char>('A' + h.pending); };

    std::map<std::string, int> seen;
    std::deque<HState> queue;
    HState start{SiteState{}, sc.present};
    seen.emplace(hkey(start), 0);
    queue.push_back(start);
    auto fail = [&](const std::string& why) {
        if (census.ok) {
            census.ok = false;
            census.failure = why;
        }
    };

    while (!queue.empty()) {
        HState h = queue.front();
        queue.pop_front();
        ++census.states;
        if (census.states > cap) throw BudgetExceeded("single-site state budget");

        // The output counts and resolved tile are final at the resolution
        // event; the remainder of a resolved trace (output-superside growth
        // racing leftover arrivals) cannot change any census invariant, so
        // resolved states are classified immediately instead of expanded.
        if (h.site.resolved >= 0) {
            const SiteState& st = h.site;
            if (st.resolution_kind == 'p' && st.outputs != 2)
                fail("pair resolution without exactly two records");
            if (st.resolution_kind == 's' && st.outputs != 1)
                fail("single resolution without exactly one record");
            if (std::find(attachable.begin(), attachable.end(), st.resolved) ==
                attachable.end())
                fail("resolved tile is not validly addressed by the inputs");
            census.resolved_tiles.insert(st.resolved);
            ++(st.resolution_kind == 'p' ? census.quiescent_pair : census.quiescent_single);
            continue;
        }

        std::vector<HState> next;
        for (int d = 0; d < 4; ++d)
            if (h.pending >> d & 1) {
                HState n = h;
                n.pending &= static_cast<std::uint8_t>(~(1u << d));
                // if the site's own output superside claimed the edge first,
                // the input superside has nowhere to grow and is discarded
                if (!n.site.emitted[d])
                    site_deliver(ctx, n.site, static_cast<Dir>(d), sc.glue[d]);
                next.push_back(std::move(n));
            }
        for (const SiteEvent& e : site_enabled(ctx, h.site, true)) {
            HState n = h;
            site_fire(ctx, n.site, e, nullptr);
            next.push_back(std::move(n));
        }

        if (next.empty()) {
            // quiescent without a resolution (resolved states were classified
            // above)
            const SiteState& st = h.site;
            if (st.outputs != 0) fail("records printed without a resolution");
            if (!attachable.empty()) fail("attachable tile but the site quiesced unresolved");
            ++census.quiescent_none;
            continue;
        }
        for (HState& n : next) {
            auto [it, fresh] = seen.emplace(hkey(n), 1);
            if (fresh) queue.push_back(std::move(n));
        }
    }

    // completeness across schedules: every attachable tile is printed somewhere
    std::set<int> want(attachable.begin(), attachable.end());
    if (census.ok && census.resolved_tiles != want)
        fail("printable tiles differ from the validly addressed set");
    return census;
}

// ---------------------------------------------------------------------------
// lattice

std::string LatticeState::key() const {
    std::string out;
    for (const auto& [p, st] : sites) {
        out += std::to_string(p.x);
        out += ':';
        out += std::to_string(p.y);
        out += '=';
        out += st.key();
        out += ';';
    }
    return out;
}

LatticeEngine::LatticeEngine(const TAS& sys, int depth) : sys_(sys), ctx_(sys_), depth_(depth) {
    if (sys_.seed.empty()) throw std::invalid_argument("lattice engine needs a seed");
    xmin_ = xmax_ = sys_.seed.begin()->first.x;
    ymin_ = ymax_ = sys_.seed.begin()->first.y;
    for (const auto& [p, t] : sys_.seed) {
        xmin_ = std::min(xmin_, p.x);
        xmax_ = std::max(xmax_, p.x);
        ymin_ = std::min(ymin_, p.y);
        ymax_ = std::max(ymax_, p.y);
    }
    xmin_ -= depth;
    xmax_ += depth;
    ymin_ -= depth;
    ymax_ += depth;

    for (const auto& [p, t] : sys_.seed) {
        SiteState st;
        st.resolved = t;
        st.config_final = true;
        seeds_.sites[p] = st;
    }
    // seed supersides facing empty space are pre-grown (null glues included)
    for (const auto& [p, t] : sys_.seed)
        for (int d = 0; d < 4; ++d) {
            Pos q = neighbor(p, static_cast<Dir>(d));
            if (sys_.seed.count(q)) continue;
            seeds_.sites[p].emitted[d] = true;
            if (!in_window(q)) continue;
            deliveries_[q].emplace_back(opposite(static_cast<Dir>(d)), sys_.tiles[t].glue[d]);
        }
    init_ = seeds_;
    for (const auto& [q, list] : deliveries_)
        for (auto [side, glue] : list) site_deliver(ctx_, init_.sites[q], side, glue);
}

bool LatticeEngine::in_window(Pos p) const {
    return p.x >= xmin_ && p.x <= xmax_ && p.y >= ymin_ && p.y <= ymax_;
}

std::vector<std::pair<Pos, SiteEvent>> LatticeEngine::enabled(const LatticeState& st,
                                                              bool expand_branches) const {
    std::vector<std::pair<Pos, SiteEvent>> out;
    for (const auto& [p, site] : st.sites)
        for (const SiteEvent& e : site_enabled(ctx_, site, expand_branches))
            out.emplace_back(p, e);
    return out;
}

std::string LatticeEngine::fire(LatticeState& st, Pos p, const SiteEvent& e,
                                std::mt19937_64* rng) const {
    SiteState& site = st.sites.at(p);
    std::ostringstream line;
    line << "site(" << p.x << "," << p.y << ") | " << site_event_text(ctx_, site, e);
    int before = site.resolved;
    std::size_t crawlers_before = site.crawlers.size();
    auto emissions = site_fire(ctx_, site, e, rng);
    if (e.kind == SiteEvent::Lock)
        line << " | winner=" << dir_name(static_cast<Dir>(site.corner_winner[static_cast<int>(e.corner)]));
    if (before < 0 && site.resolved >= 0)
        line << " | tile=" << sys_.tiles[site.resolved].name;
    if (e.kind == SiteEvent::Finalize) line << " | crawlers=" << site.crawlers.size();
    if (e.kind != SiteEvent::Finalize && site.crawlers.size() > crawlers_before)
        line << " | spawned=" << site.crawlers.size() - crawlers_before;
    for (auto [d, glue] : emissions) {
        Pos q = neighbor(p, d);
        line << " | grows(" << q.x << "," << q.y << ")";
        if (in_window(q)) site_deliver(ctx_, st.sites[q], opposite(d), glue);
    }
    return line.str();
}

Assembly LatticeEngine::image(const LatticeState& st) const {
    Assembly out;
    for (const auto& [p, site] : st.sites)
        if (site.resolved >= 0) out.emplace(p, site.resolved);
    return out;
}

int LatticeEngine::nonseed_resolved(const LatticeState& st) const {
    int n = 0;
    for (const auto& [p, site] : st.sites)
        if (site.resolved >= 0 && !sys_.seed.count(p)) ++n;
    return n;
}

RunLatticeResult run_lattice(const TAS& sys, int depth, std::uint64_t seed, int max_steps) {
    LatticeEngine eng(sys, depth);
    RunLatticeResult out;
    LatticeState st = eng.initial();
    for (const auto& [p, t] : sys.seed)
        out.trace.push_back("site(" + std::to_string(p.x) + "," + std::to_string(p.y) +
                            ") | seed | tile=" + sys.tiles[t].name);

    std::mt19937_64 sched(stream_seed(seed, "sched"));
    std::map<Pos, std::mt19937_64, PosYX> draws;
    while (true) {
        auto evs = eng.enabled(st, false);
        if (evs.empty()) {
            out.quiescent = true;
            break;
        }
        if (out.steps >= max_steps) throw BudgetExceeded("lattice step budget");
        auto [p, e] = evs[sched() % evs.size()];
        auto it = draws.find(p);
        if (it == draws.end())
            it = draws.emplace(p, std::mt19937_64(stream_seed(seed, "site", p.x, p.y))).first;
        out.trace.push_back(eng.fire(st, p, e, &it->second));
        ++out.steps;
    }
    out.final_image = eng.image(st);
    return out;
}

namespace {

// Macro state: per site, the committed protocol state plus the ordered queue
// of input supersides it has not yet absorbed into a committed step.
struct MacroSite {
    SiteState committed;
    std::vector<std::pair<Dir, int>> pending;
};

struct MacroState {
    std::map<Pos, MacroSite, PosYX> sites;

    std::string key() const {
        std::string out;
        for (const auto& [p, ms] : sites) {
            out += std::to_string(p.x);
            out += ':';
            out += std::to_string(p.y);
            out += '=';
            out += ms.committed.key();
            for (auto [d, g] : ms.pending) {
                out += '<';
                out += static_cast<char>('0' + static_cast<int>(d));
                out += std::to_string(g);
            }
            out += ';';
        }
        return out;
    }
};

// One committed step a site can reach from (committed, queued inputs): the
// first event along some micro-interleaving that resolves the site or grows
// an output superside. Queued inputs are applied in order, with insertion
// points free, so arrival-versus-frame and claim-versus-arrival races are all
// represented.
struct LocalStep {
    SiteState post;
    std::size_t consumed = 0;  // queued inputs absorbed by this step
    bool emits = false;
    Dir dir = N;
    int glue = 0;
};

std::vector<LocalStep> local_horizon(const EngineContext& ctx, const MacroSite& ms,
                                     std::size_t cap) {
    std::vector<LocalStep> out;
    std::set<std::string> result_keys;
    struct Node {
        SiteState st;
        std::size_t k;
    };
    std::set<std::string> seen;
    std::deque<Node> queue;
    auto push = [&](Node&& n) {
        if (seen.size() > cap) throw BudgetExceeded("site horizon budget");
        if (seen.insert(n.st.key() + '@' + std::to_string(n.k)).second)
            queue.push_back(std::move(n));
    };
    push({ms.committed, 0});

    while (!queue.empty()) {
        Node node = queue.front();
        queue.pop_front();
        if (node.k < ms.pending.size()) {
            Node n = node;
            auto [d, g] = ms.pending[n.k];
            site_deliver(ctx, n.st, d, g);
            n.k++;
            push(std::move(n));
        }
        for (const SiteEvent& e : site_enabled(ctx, node.st, true)) {
            // a queued input superside already physically occupies its edge,
            // so the site cannot claim it; the claim-first ordering is the
            // macro path where this site's claim precedes the neighbor's step
            if (e.kind == SiteEvent::Claim) {
                Dir s = side_after(node.st.crawlers[e.crawler].at);
                bool occupied = false;
                for (std::size_t j = node.k; j < ms.pending.size(); ++j)
                    occupied = occupied || ms.pending[j].first == s;
                if (occupied) continue;
            }
            Node n = node;
            auto emissions = site_fire(ctx, n.st, e, nullptr);
            bool stops = !emissions.empty() || n.st.resolved != node.st.resolved;
            if (!stops) {
                push(std::move(n));
                continue;
            }
            LocalStep step{std::move(n.st), n.k, false, N, 0};
            if (!emissions.empty()) {
                step.emits = true;
                step.dir = emissions[0].first;
                step.glue = emissions[0].second;
            }
            std::string rk = step.post.key() + '@' + std::to_string(step.consumed) +
                             (step.emits ? dir_name(step.dir) : "-") + std::to_string(step.glue);
            if (result_keys.insert(rk).second) out.push_back(std::move(step));
        }
    }
    return out;
}

}  // namespace

SimGraph build_engine_graph(const TAS& sys, int depth, std::size_t cap) {
    LatticeEngine eng(sys, depth);
    SimGraph graph;
    graph.exhausted = true;

    auto image_of = [&](const MacroState& s) {
        Assembly out;
        for (const auto& [p, ms] : s.sites)
            if (ms.committed.resolved >= 0) out.emplace(p, ms.committed.resolved);
        return out;
    };
    auto nonseed = [&](const MacroState& s) {
        int n = 0;
        for (const auto& [p, ms] : s.sites)
            if (ms.committed.resolved >= 0 && !eng.is_seed_site(p)) ++n;
        return n;
    };

    std::vector<MacroState> states;
    std::map<std::string, int> index;
    std::deque<int> queue;
    auto add_node = [&](MacroState&& s, int d) {
        auto [it, fresh] = index.emplace(s.key(), static_cast<int>(graph.nodes.size()));
        if (fresh) {
            if (graph.nodes.size() >= cap) throw BudgetExceeded("engine state budget");
            graph.nodes.push_back({image_of(s), true, d});
            graph.succ.emplace_back();
            states.push_back(std::move(s));
            queue.push_back(it->second);
        }
        return it->second;
    };

    // initial macro states: seed sites committed, every arrival order of the
    // pre-grown seed supersides at each perimeter site
    MacroState root;
    for (const auto& [p, st] : eng.seed_only().sites) root.sites[p].committed = st;
    std::vector<MacroState> roots{root};
    for (const auto& [q, list] : eng.seed_deliveries()) {
        std::vector<std::pair<Dir, int>> perm = list;
        std::sort(perm.begin(), perm.end());
        std::vector<MacroState> next;
        do {
            for (MacroState base : roots) {
                base.sites[q].pending = perm;
                next.push_back(std::move(base));
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        roots = std::move(next);
    }
    for (MacroState& r : roots) add_node(std::move(r), 0);

    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (nonseed(states[u]) >= depth) continue;
        // snapshot: add_node may reallocate `states`
        const MacroState cur = states[u];
        for (const auto& [p, ms] : cur.sites) {
            for (LocalStep& step : local_horizon(eng.ctx(), ms, cap)) {
                MacroState next = cur;
                MacroSite& site = next.sites[p];
                site.pending.erase(site.pending.begin(), site.pending.begin() + step.consumed);
                site.committed = std::move(step.post);
                if (step.emits) {
                    Pos q = neighbor(p, step.dir);
                    if (eng.in_window(q))
                        next.sites[q].pending.emplace_back(opposite(step.dir), step.glue);
                }
                int v = add_node(std::move(next), graph.nodes[u].depth + 1);
                graph.succ[u].push_back(v);
            }
        }
    }
    return graph;
}

SimReport check_intrinsic_simulation(const TAS& sys, int depth, std::size_t cap) {
    SimGraph graph = build_engine_graph(sys, depth, cap);
    return check_graph(graph, sys, depth, 0, cap);
}

}  // namespace atam
