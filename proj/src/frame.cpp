#include "atam/frame.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

namespace atam {

// Counterclockwise interior traversal visits corners SE -> NE -> NW -> SW and
// sides E, N, W, S between them. A side's right corner is the one shared with
// the counterclockwise-next side.
Corner right_corner(Dir d) {
    switch (d) {
        case S: return Corner::SE;
        case E: return Corner::NE;
        case N: return Corner::NW;
        case W: return Corner::SW;
    }
    throw std::invalid_argument("bad direction");
}

Corner left_corner(Dir d) {
    switch (d) {
        case S: return Corner::SW;
        case E: return Corner::SE;
        case N: return Corner::NE;
        case W: return Corner::NW;
    }
    throw std::invalid_argument("bad direction");
}

std::pair<Dir, Dir> corner_sides(Corner c) {
    switch (c) {
        case Corner::SE: return {S, E};
        case Corner::NE: return {E, N};
        case Corner::NW: return {N, W};
        case Corner::SW: return {W, S};
    }
    throw std::invalid_argument("bad corner");
}

Dir corner_partner(Corner c, Dir d) {
    auto [a, b] = corner_sides(c);
    if (d == a) return b;
    if (d == b) return a;
    throw std::invalid_argument("side not adjacent to corner");
}

int corner_end(Corner c, Dir d) {
    if (right_corner(d) == c) return 1;
    if (left_corner(d) == c) return 0;
    throw std::invalid_argument("side not adjacent to corner");
}

Dir ccw_next_side(Corner c) {
    switch (c) {
        case Corner::SE: return E;
        case Corner::NE: return N;
        case Corner::NW: return W;
        case Corner::SW: return S;
    }
    throw std::invalid_argument("bad corner");
}

SideClass FrameConfig::cls(Dir d) const {
    const SideConfig& s = side[d];
    if (!s.present) return SideClass::Absent;
    if (s.left == WinLose::Unknown || s.right == WinLose::Unknown)
        throw std::logic_error("side class queried before both corners resolved");
    bool lw = s.left == WinLose::Win, rw = s.right == WinLose::Win;
    if (lw && rw) return SideClass::WW;
    if (lw) return SideClass::WL;
    if (rw) return SideClass::LW;
    return SideClass::LL;
}

int FrameConfig::present_count() const {
    int n = 0;
    for (const auto& s : side) n += s.present ? 1 : 0;
    return n;
}

FrameConfig resolve_competitions(const std::set<Dir>& present, const TieBreak& tie) {
    FrameConfig fc;
    for (Dir d : present) fc.side[d].present = true;
    for (int ci = 0; ci < 4; ++ci) {
        Corner c = static_cast<Corner>(ci);
        auto [a, b] = corner_sides(c);
        bool pa = present.count(a), pb = present.count(b);
        if (!pa && !pb) continue;
        Dir winner;
        if (pa && pb) {
            winner = tie[ci];
            if (winner != a && winner != b)
                throw std::invalid_argument("tie-break names a side not at this corner");
        } else {
            winner = pa ? a : b;
        }
        for (Dir d : {a, b}) {
            if (!present.count(d)) continue;
            WinLose wl = (d == winner) ? WinLose::Win : WinLose::Lose;
            (corner_end(c, d) == 0 ? fc.side[d].left : fc.side[d].right) = wl;
        }
    }
    return fc;
}

std::vector<TieBreak> all_tie_breaks(const std::set<Dir>& present) {
    std::vector<int> shared;
    TieBreak base{};
    for (int ci = 0; ci < 4; ++ci) {
        Corner c = static_cast<Corner>(ci);
        auto [a, b] = corner_sides(c);
        bool pa = present.count(a), pb = present.count(b);
        if (pa && pb) {
            shared.push_back(ci);
            base[ci] = a;
        } else {
            base[ci] = pa ? a : b;  // unshared or empty: value unused/forced
        }
    }
    std::vector<TieBreak> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << shared.size()); ++mask) {
        TieBreak t = base;
        for (std::size_t i = 0; i < shared.size(); ++i) {
            auto [a, b] = corner_sides(static_cast<Corner>(shared[i]));
            t[shared[i]] = (mask >> i & 1) ? b : a;
        }
        out.push_back(t);
    }
    return out;
}

bool is_case_all_wl(const FrameConfig& fc) {
    if (fc.present_count() != 4) return false;
    for (int d = 0; d < 4; ++d)
        if (fc.cls(static_cast<Dir>(d)) != SideClass::WL) return false;
    return true;
}

bool is_case_all_lw(const FrameConfig& fc) {
    if (fc.present_count() != 4) return false;
    for (int d = 0; d < 4; ++d)
        if (fc.cls(static_cast<Dir>(d)) != SideClass::LW) return false;
    return true;
}

std::set<Corner> crawler_initiations(const FrameConfig& fc) {
    // The two cyclic configurations break symmetry by fiat: only the corner
    // between north and west initiates.
    if (is_case_all_wl(fc) || is_case_all_lw(fc)) return {Corner::NW};

    std::set<Corner> out;
    bool lone = fc.present_count() == 1;
    for (int di = 0; di < 4; ++di) {
        Dir d = static_cast<Dir>(di);
        SideClass sc = fc.cls(d);
        if (sc != SideClass::WW && sc != SideClass::WL) continue;
        Corner c = right_corner(d);
        Dir partner = corner_partner(c, d);
        if (fc.side[partner].present || lone) out.insert(c);
    }
    // Three corners can only happen when one WW side faces an LL side with two
    // W/L sides between them; the LL side completes last with full knowledge
    // and withholds the corner it shares with the WW side.
    if (out.size() == 3) {
        for (int di = 0; di < 4; ++di) {
            Dir d = static_cast<Dir>(di);
            if (fc.cls(d) != SideClass::WW) continue;
            Corner c = right_corner(d);
            if (fc.cls(corner_partner(c, d)) == SideClass::LL) out.erase(c);
        }
    }
    return out;
}

void Knowledge::merge(const Knowledge& other) {
    for (int d = 0; d < 4; ++d) {
        if (other.side[d].present) side[d].present = true;
        if (other.side[d].left != WinLose::Unknown) side[d].left = other.side[d].left;
        if (other.side[d].right != WinLose::Unknown) side[d].right = other.side[d].right;
    }
}

bool Knowledge::covers_all(const FrameConfig& truth) const {
    for (int d = 0; d < 4; ++d) {
        if (!truth.side[d].present) continue;
        if (!side[d].present) return false;
        if (side[d].left != truth.side[d].left) return false;
        if (side[d].right != truth.side[d].right) return false;
    }
    return true;
}

bool Knowledge::sound(const FrameConfig& truth) const {
    for (int d = 0; d < 4; ++d) {
        if (side[d].present && !truth.side[d].present) return false;
        if (side[d].left != WinLose::Unknown && side[d].left != truth.side[d].left)
            return false;
        if (side[d].right != WinLose::Unknown && side[d].right != truth.side[d].right)
            return false;
    }
    return true;
}

std::string event_name(const FrameEvent& e) {
    std::ostringstream os;
    switch (e.kind) {
        case FrameEvent::GrowL1Half:
            os << "grow-half(1," << dir_name(e.side) << (e.end ? ",right)" : ",left)");
            break;
        case FrameEvent::PlaceCompetition:
            os << "place-competition(" << corner_name(e.corner) << ")";
            break;
        case FrameEvent::GrowL2Half: {
            static const char* causes[4] = {"won", "neighbor", "wai", "fast"};
            os << "grow-half(2," << dir_name(e.side) << (e.end ? ",right," : ",left,")
               << causes[e.cause] << ")";
            break;
        }
        case FrameEvent::PlaceMiddle:
            os << "place-middle(" << dir_name(e.side) << ")";
            break;
        case FrameEvent::EmitWai:
            os << "emit-wai(" << dir_name(e.side) << ")";
            break;
        case FrameEvent::Complete:
            os << "complete(" << dir_name(e.side) << ")";
            break;
    }
    return os.str();
}

FrameMachine::FrameMachine(std::set<Dir> present, TieBreak tie)
    : present_(std::move(present)), tie_(tie) {
    for (Dir d : present_) config_.side[d].present = true;
    for (Dir d : present_) {
        know_[d].side[d].present = true;  // a side knows it exists
    }
}

namespace {
Corner side_corner(Dir d, int end) { return end == 0 ? left_corner(d) : right_corner(d); }

WinLose status_at(const FrameConfig& fc, Dir d, int end) {
    return end == 0 ? fc.side[d].left : fc.side[d].right;
}

// End of side d holding its winning competition tile; requires class WL/LW.
int winning_end(const FrameConfig& fc, Dir d) {
    return fc.side[d].left == WinLose::Win ? 0 : 1;
}
int losing_end(const FrameConfig& fc, Dir d) {
    return fc.side[d].left == WinLose::Lose ? 0 : 1;
}
}  // namespace

bool FrameMachine::is_enabled(const FrameEvent& e) const {
    switch (e.kind) {
        case FrameEvent::GrowL1Half:
            return present_.count(e.side) && !l1_[e.side][e.end];
        case FrameEvent::PlaceCompetition: {
            if (comp_placed_[static_cast<int>(e.corner)]) return false;
            auto [a, b] = corner_sides(e.corner);
            bool any = false;
            for (Dir d : {a, b}) {
                if (!present_.count(d)) continue;
                any = true;
                if (!l1_[d][corner_end(e.corner, d)]) return false;
            }
            return any;
        }
        case FrameEvent::GrowL2Half: {
            Dir d = e.side;
            if (!present_.count(d) || l2_[d][e.end] || !l1_[d][e.end]) return false;
            Corner c = side_corner(d, e.end);
            if (!comp_placed_[static_cast<int>(c)]) return false;
            WinLose st = status_at(config_, d, e.end);
            switch (e.cause) {
                case 0:  // initiated by own winning competition tile
                    return st == WinLose::Win;
                case 1: {  // initiated by the completed frame of the neighbor
                    if (st != WinLose::Lose) return false;
                    Dir p = corner_partner(c, d);
                    return present_.count(p) && complete_[p];
                }
                case 2:  // initiated by a WAI signal arriving at this end
                    return st == WinLose::Lose && wai_pending_[d][e.end];
                case 3:  // west's losing end initiates its own (fast) L-half
                    return d == W && st == WinLose::Lose;
            }
            return false;
        }
        case FrameEvent::PlaceMiddle:
            return present_.count(e.side) && !middle_[e.side] && l2_[e.side][0] &&
                   l2_[e.side][1];
        case FrameEvent::EmitWai:
            return wai_ready_[e.side] && !wai_sent_[e.side];
        case FrameEvent::Complete: {
            Dir d = e.side;
            if (!present_.count(d) || complete_[d] || !middle_[d]) return false;
            switch (cls(d)) {
                case SideClass::WW:
                    return true;
                case SideClass::WL:
                case SideClass::LW: {
                    int le = losing_end(config_, d);
                    Dir p = corner_partner(side_corner(d, le), d);
                    if (complete_[p]) return true;
                    // West may instead be closed off by its own WAI signal
                    // returning after a full circuit.
                    return d == W && wai_pending_[d][le];
                }
                case SideClass::LL: {
                    for (int end = 0; end < 2; ++end) {
                        Dir p = corner_partner(side_corner(d, end), d);
                        if (!complete_[p]) return false;
                    }
                    return true;
                }
                case SideClass::Absent: return false;
            }
            return false;
        }
    }
    return false;
}

std::vector<FrameEvent> FrameMachine::enabled() const {
    std::vector<FrameEvent> out;
    auto add = [&](FrameEvent e) {
        if (is_enabled(e)) out.push_back(e);
    };
    for (int di = 0; di < 4; ++di) {
        Dir d = static_cast<Dir>(di);
        for (int end = 0; end < 2; ++end) {
            add({FrameEvent::GrowL1Half, d, end});
            for (int cause = 0; cause < 4; ++cause)
                add({FrameEvent::GrowL2Half, d, end, Corner::NW, cause});
        }
        add({FrameEvent::PlaceMiddle, d});
        add({FrameEvent::EmitWai, d});
        add({FrameEvent::Complete, d});
    }
    for (int ci = 0; ci < 4; ++ci)
        add({FrameEvent::PlaceCompetition, N, 0, static_cast<Corner>(ci)});
    return out;
}

void FrameMachine::fire(const FrameEvent& e) {
    if (!is_enabled(e))
        throw std::invalid_argument("frame event not enabled: " + event_name(e));
    switch (e.kind) {
        case FrameEvent::GrowL1Half:
            l1_[e.side][e.end] = true;
            break;
        case FrameEvent::PlaceCompetition: {
            int ci = static_cast<int>(e.corner);
            comp_placed_[ci] = true;
            auto [a, b] = corner_sides(e.corner);
            bool pa = present_.count(a), pb = present_.count(b);
            Dir winner = (pa && pb) ? tie_[ci] : (pa ? a : b);
            if (pa && pb && winner != a && winner != b)
                throw std::invalid_argument("tie-break names a side not at this corner");
            for (Dir d : {a, b}) {
                if (!present_.count(d)) continue;
                WinLose wl = (d == winner) ? WinLose::Win : WinLose::Lose;
                (corner_end(e.corner, d) == 0 ? config_.side[d].left
                                              : config_.side[d].right) = wl;
            }
            // Both participants read the shared competition tile: each learns
            // its own outcome and, if the partner is present, the partner's.
            for (Dir d : {a, b}) {
                if (!present_.count(d)) continue;
                for (Dir o : {a, b}) {
                    if (!present_.count(o)) continue;
                    know_[d].side[o].present = true;
                    WinLose wl = (o == winner) ? WinLose::Win : WinLose::Lose;
                    (corner_end(e.corner, o) == 0 ? know_[d].side[o].left
                                                  : know_[d].side[o].right) = wl;
                }
            }
            break;
        }
        case FrameEvent::GrowL2Half: {
            Dir d = e.side;
            l2_[d][e.end] = true;
            l2cause_[d][e.end] = e.cause;
            Corner c = side_corner(d, e.end);
            if (e.cause == 1) {
                // A completed neighbor frame initiates this half and hands
                // over everything it knows.
                know_[d].merge(know_[corner_partner(c, d)]);
            } else if (e.cause == 2) {
                know_[d].merge(wai_payload_[d][e.end]);
                wai_pending_[d][e.end] = false;
            }
            break;
        }
        case FrameEvent::PlaceMiddle: {
            Dir d = e.side;
            middle_[d] = true;
            SideClass sc = cls(d);
            if (sc == SideClass::WL || sc == SideClass::LW) {
                int le = losing_end(config_, d);
                if (d == W && l2cause_[d][le] == 3) {
                    wai_ready_[d] = true;  // west originates the WAI signal
                } else if (l2cause_[d][le] == 2) {
                    wai_ready_[d] = true;  // forward an incoming WAI onward
                }
            }
            // WW and LL middles never carry a WAI onward.
            break;
        }
        case FrameEvent::EmitWai: {
            Dir d = e.side;
            wai_sent_[d] = true;
            wai_ready_[d] = false;
            // The WAI exits through the winning end toward the neighbor that
            // won't hear from a completed frame any time soon.
            Corner c = side_corner(d, winning_end(config_, d));
            Dir p = corner_partner(c, d);
            if (!present_.count(p) || complete_[p]) break;  // signal dies
            int pend = corner_end(c, p);
            if (p == W) {
                // Returning to west's losing end after a full circuit: this
                // is what unblocks the two cyclic configurations.
                wai_pending_[p][pend] = true;
                wai_payload_[p][pend] = know_[d];
            } else if (!l2_[p][pend]) {
                wai_pending_[p][pend] = true;
                wai_payload_[p][pend] = know_[d];
            }
            // If the neighbor's half already grew, the WAI is redundant and
            // bounces.
            break;
        }
        case FrameEvent::Complete: {
            Dir d = e.side;
            SideClass sc = cls(d);
            if (sc == SideClass::WL || sc == SideClass::LW) {
                int le = losing_end(config_, d);
                Dir p = corner_partner(side_corner(d, le), d);
                if (complete_[p]) {
                    know_[d].merge(know_[p]);
                } else {
                    know_[d].merge(wai_payload_[d][le]);  // west, returned WAI
                    wai_pending_[d][le] = false;
                }
            } else if (sc == SideClass::LL) {
                for (int end = 0; end < 2; ++end)
                    know_[d].merge(know_[corner_partner(side_corner(d, end), d)]);
            }
            complete_[d] = true;
            break;
        }
    }
}

bool FrameMachine::all_complete() const {
    for (Dir d : present_)
        if (!complete_[d]) return false;
    return true;
}

std::string FrameMachine::state_key() const {
    std::string k;
    auto push = [&](int v) { k.push_back(static_cast<char>('0' + v)); };
    for (int d = 0; d < 4; ++d) {
        push(l1_[d][0]);
        push(l1_[d][1]);
        push(l2_[d][0]);
        push(l2_[d][1]);
        push(l2cause_[d][0]);
        push(l2cause_[d][1]);
        push(middle_[d]);
        push(wai_ready_[d]);
        push(wai_sent_[d]);
        push(wai_pending_[d][0]);
        push(wai_pending_[d][1]);
        push(complete_[d]);
        push(static_cast<int>(config_.side[d].left));
        push(static_cast<int>(config_.side[d].right));
        for (int o = 0; o < 4; ++o) {
            push(know_[d].side[o].present);
            push(static_cast<int>(know_[d].side[o].left));
            push(static_cast<int>(know_[d].side[o].right));
        }
    }
    for (int c = 0; c < 4; ++c) push(comp_placed_[c]);
    return k;
}

FrameResult frame_fixpoint(const std::set<Dir>& present, const TieBreak& tie,
                           std::uint64_t seed) {
    FrameMachine m(present, tie);
    std::mt19937_64 rng(seed);
    for (;;) {
        auto ev = m.enabled();
        if (ev.empty()) break;
        m.fire(ev[rng() % ev.size()]);
    }
    FrameResult r;
    r.config = m.config();
    for (int d = 0; d < 4; ++d) r.knowledge[d] = m.knowledge(static_cast<Dir>(d));
    r.completed = m.all_complete();
    return r;
}

}  // namespace atam
