#pragma once
// Frame formation as an explicit asynchronous state machine: corner
// competitions, four-layer growth, the waiting-on-additional-information
// (WAI) signal, and the derived win/lose knowledge that decides where
// crawlers are initiated.

#include "atam/core.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace atam {

enum class Corner : int { NW = 0, NE = 1, SE = 2, SW = 3 };
inline const char* corner_name(Corner c) {
    static const char* names[4] = {"NW", "NE", "SE", "SW"};
    return names[static_cast<int>(c)];
}

// Each side has a LEFT and RIGHT end; the right corner is shared with the
// counterclockwise-next side. Crawlers grow counterclockwise, so the side a
// corner crawler first travels along is the ccw-next side of its corner.
Corner left_corner(Dir d);
Corner right_corner(Dir d);
// The two sides adjacent to a corner: (side whose right corner it is,
// side whose left corner it is).
std::pair<Dir, Dir> corner_sides(Corner c);
// The other side sharing corner c with d.
Dir corner_partner(Corner c, Dir d);
// Whether c is d's left (0) or right (1) end; d must be adjacent to c.
int corner_end(Corner c, Dir d);
// Side a counterclockwise crawler initiated at c travels along first.
Dir ccw_next_side(Corner c);

enum class WinLose : int { Unknown = 0, Win = 1, Lose = 2 };
enum class SideClass : int { Absent = 0, WW, WL, LW, LL };

struct SideConfig {
    bool present = false;
    WinLose left = WinLose::Unknown;
    WinLose right = WinLose::Unknown;
    friend auto operator<=>(const SideConfig&, const SideConfig&) = default;
};

struct FrameConfig {
    std::array<SideConfig, 4> side;  // indexed by Dir
    SideClass cls(Dir d) const;
    int present_count() const;
    friend auto operator<=>(const FrameConfig&, const FrameConfig&) = default;
};

// Per-corner winner choice used when both adjacent sides are present; the
// value is which adjacent side wins. Ignored for unshared corners.
using TieBreak = std::array<Dir, 4>;  // indexed by Corner

// An independent tie-break per corner is required: a single global arrival
// order cannot produce the cyclic all-WL / all-LW configurations.
FrameConfig resolve_competitions(const std::set<Dir>& present, const TieBreak& tie);

// All valid tie-break assignments for a present set (one winner per shared
// corner; unshared corners fixed).
std::vector<TieBreak> all_tie_breaks(const std::set<Dir>& present);

bool is_case_all_wl(const FrameConfig& fc);  // every side present and W/L
bool is_case_all_lw(const FrameConfig& fc);  // every side present and L/W

// Corners at which frame corners initiate crawlers, as a pure function of the
// frame configuration. The general rule: the right corner of a side D
// initiates iff D is WW or WL and the corner's partner side is present (or D
// is the only present side); exceptions: the cyclic all-WL / all-LW cases
// initiate only at NW, and when the rule would yield three corners the WW
// side's corner against the LL side is suppressed.
std::set<Corner> crawler_initiations(const FrameConfig& fc);

// Accumulated (sound, possibly partial) win/lose facts one side holds.
struct Knowledge {
    std::array<SideConfig, 4> side;
    void merge(const Knowledge& other);
    bool covers_all(const FrameConfig& truth) const;
    bool sound(const FrameConfig& truth) const;
};

struct FrameEvent {
    enum Kind : int {
        GrowL1Half,        // side, end
        PlaceCompetition,  // corner
        GrowL2Half,        // side, end, cause
        PlaceMiddle,       // side
        EmitWai,           // side
        Complete,          // side
    } kind;
    Dir side = N;
    int end = 0;  // 0 = left, 1 = right
    Corner corner = Corner::NW;
    int cause = 0;  // GrowL2Half: 0 won, 1 neighbor completed, 2 WAI, 3 west fast
    friend auto operator<=>(const FrameEvent&, const FrameEvent&) = default;
};

std::string event_name(const FrameEvent& e);

// The frame formation algorithm at half/middle/layer granularity. Events are
// fired one at a time by an external scheduler; any interleaving of enabled
// events must reach completion of every present side.
class FrameMachine {
  public:
    FrameMachine(std::set<Dir> present, TieBreak tie);

    std::vector<FrameEvent> enabled() const;
    void fire(const FrameEvent& e);  // throws std::invalid_argument if not enabled

    bool quiescent() const { return enabled().empty(); }
    bool all_complete() const;
    bool complete(Dir d) const { return complete_[d]; }
    FrameConfig config() const { return config_; }
    const Knowledge& knowledge(Dir d) const { return know_[d]; }

    std::string state_key() const;  // canonical serialization for dedup

  private:
    bool is_enabled(const FrameEvent& e) const;
    SideClass cls(Dir d) const { return config_.cls(d); }

    std::set<Dir> present_;
    TieBreak tie_;
    FrameConfig config_;  // statuses fill in as competitions resolve
    std::array<std::array<bool, 2>, 4> l1_{};
    std::array<bool, 4> comp_placed_{};  // by Corner
    std::array<std::array<bool, 2>, 4> l2_{};
    std::array<std::array<int, 2>, 4> l2cause_{};
    std::array<bool, 4> middle_{};
    std::array<bool, 4> wai_ready_{};    // middle may forward/emit a WAI
    std::array<bool, 4> wai_sent_{};
    std::array<std::array<bool, 2>, 4> wai_pending_{};  // arrived, unconsumed
    std::array<std::array<Knowledge, 2>, 4> wai_payload_{};
    std::array<bool, 4> complete_{};
    std::array<Knowledge, 4> know_{};
};

// Runs the machine to quiescence under a seeded pseudorandom schedule.
struct FrameResult {
    FrameConfig config;
    std::array<Knowledge, 4> knowledge;
    bool completed = false;  // every present side's frame finished
};
FrameResult frame_fixpoint(const std::set<Dir>& present, const TieBreak& tie,
                           std::uint64_t seed = 0);

}  // namespace atam
