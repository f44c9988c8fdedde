#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "atam/block_sim.hpp"
#include "atam/core.hpp"
#include "atam/tas_io.hpp"

#include <random>

using namespace atam;

namespace {

TAS east_line_pair() {
  // one attachment: t1 binds east of the seed with a strength-2 glue
  return parse_tas(
      "temperature 2\n"
      "glue x 2\n"
      "tile t0 N=null E=x S=null W=null\n"
      "tile t1 N=null E=null S=null W=x\n"
      "seed 0 0 t0\n");
}

TAS nondet_pair() {
  // two tiles compete for the same site
  return parse_tas(
      "temperature 2\n"
      "glue x 2\n"
      "tile t0 N=null E=x S=null W=null\n"
      "tile t1 N=null E=null S=null W=x\n"
      "tile t2 N=x E=null S=null W=x\n"
      "seed 0 0 t0\n");
}

// A scale-2 simulator of east_line_pair: the seed occupies a full 2x2 block A
// and four more tiles assemble block B to its east, one attachment at a time.
TAS two_block_sim() {
  return parse_tas(
      "temperature 2\n"
      "glue aa 2\nglue ab 2\nglue ac 2\nglue ad 2\n"
      "glue e 2\nglue f 2\nglue g 2\nglue h 2\n"
      "tile a00 N=ab E=aa S=null W=null\n"
      "tile a10 N=ac E=e S=null W=aa\n"
      "tile a01 N=null E=ad S=ab W=null\n"
      "tile a11 N=null E=null S=ac W=ad\n"
      "tile b00 N=g E=f S=null W=e\n"
      "tile b10 N=h E=null S=null W=f\n"
      "tile b01 N=null E=null S=g W=null\n"
      "tile b11 N=null E=null S=h W=null\n"
      "seed 0 0 a00\nseed 1 0 a10\nseed 0 1 a01\nseed 1 1 a11\n");
}

MBlock pattern(int m, std::vector<std::tuple<int, int, int>> cells) {
  MBlock b;
  b.m = m;
  for (auto& [i, j, t] : cells) b.cells[{i, j}] = t;
  return b;
}

BlockRep two_block_rep(const TAS& S) {
  BlockRep rep;
  rep.m = 2;
  auto ti = [&](const char* n) { return S.tile_index(n); };
  rep.rules.emplace_back(pattern(2, {{0, 0, ti("a00")}, {1, 0, ti("a10")},
                                     {0, 1, ti("a01")}, {1, 1, ti("a11")}}),
                         0);
  rep.rules.emplace_back(pattern(2, {{0, 0, ti("b00")}, {1, 0, ti("b10")},
                                     {0, 1, ti("b01")}, {1, 1, ti("b11")}}),
                         1);
  rep.monotone_closure = true;
  return rep;
}

}  // namespace

TEST_CASE("block_at windows") {
  TAS sys = east_line_pair();
  Assembly a = attach(sys.seed, {{1, 0}, 1});
  CHECK(block_at(a, 2, 3, 3).cells.empty());
  MBlock one = block_at(a, 1, 1, 0);
  REQUIRE(one.cells.size() == 1);
  CHECK(one.cells.at({0, 0}) == 1);
  MBlock four = block_at(a, 2, 0, 0);
  CHECK(four.cells.size() == 2);  // both tiles fall in block (0,0) at m=2
  // negative block coordinates use floored division
  Assembly shifted;
  shifted.emplace(Pos{-1, -1}, 0);
  shifted.emplace(Pos{-2, -1}, 1);
  MBlock neg = block_at(shifted, 2, -1, -1);
  CHECK(neg.cells.size() == 2);
  CHECK(neg.cells.at({1, 1}) == 0);
}

TEST_CASE("rep_block and monotonicity validation") {
  TAS S = two_block_sim();
  BlockRep rep = two_block_rep(S);
  MBlock full = rep.rules[0].first;
  CHECK(rep_block(rep, full) == 0);
  MBlock partial = pattern(2, {{0, 0, S.tile_index("a00")}});
  CHECK_FALSE(rep_block(rep, partial).has_value());

  // identity rep is monotone over all single-cell blocks
  TAS T = east_line_pair();
  BlockRep id = identity_rep(T);
  std::vector<MBlock> universe;
  for (int t = 0; t < 2; ++t) universe.push_back(pattern(1, {{0, 0, t}}));
  CHECK(validate_rep(id, universe));

  // a rep mapping a block to X but its superblock to Y is invalid
  BlockRep bad;
  bad.m = 2;
  bad.monotone_closure = false;
  bad.rules.emplace_back(pattern(2, {{0, 0, 0}}), 0);
  bad.rules.emplace_back(pattern(2, {{0, 0, 0}, {1, 0, 1}}), 1);
  std::vector<MBlock> uni{pattern(2, {{0, 0, 0}}), pattern(2, {{0, 0, 0}, {1, 0, 1}})};
  CHECK_FALSE(validate_rep(bad, uni));
}

TEST_CASE("represent at m=1 with identity is the assembly itself") {
  TAS T = nondet_pair();
  BlockRep id = identity_rep(T);
  for (const auto& a : producible_set(T, 2).assemblies) {
    CHECK(represent(id, a) == a);
    CHECK(maps_cleanly(id, a));
  }
}

TEST_CASE("represent omits incomplete blocks and stays monotone") {
  TAS S = two_block_sim();
  BlockRep rep = two_block_rep(S);
  Assembly prev_image;
  Assembly a = S.seed;
  CHECK(represent(rep, a).size() == 1);
  // grow block B cell by cell; the image gains t1 only on the last attachment
  auto grow = [&](const char* name, int x, int y) {
    a = attach(S, a, {{x, y}, S.tile_index(name)});
    Assembly img = represent(rep, a);
    for (const auto& [p, t] : prev_image) CHECK(img.at(p) == t);  // monotone
    prev_image = img;
    CHECK(maps_cleanly(rep, a));
  };
  grow("b00", 2, 0);
  CHECK(represent(rep, a).size() == 1);
  grow("b10", 3, 0);
  grow("b01", 2, 1);
  CHECK(represent(rep, a).size() == 1);
  grow("b11", 3, 1);
  CHECK(represent(rep, a).size() == 2);
  CHECK(represent(rep, a).at(Pos{1, 0}) == 1);
}

TEST_CASE("maps_cleanly flags stray far-away blocks") {
  TAS S = two_block_sim();
  BlockRep rep = two_block_rep(S);
  Assembly a = S.seed;
  CHECK(maps_cleanly(rep, a));
  // a lone tile two block-steps away from every mapped block (synthetic
  // state, not producible; clean-mapping is a pure predicate)
  Assembly stray = S.seed;
  stray.emplace(Pos{8, 0}, S.tile_index("b00"));
  CHECK_FALSE(maps_cleanly(rep, stray));
  // single-block assemblies are always clean
  Assembly lone;
  lone.emplace(Pos{9, 1}, 0);
  CHECK(maps_cleanly(rep, lone));
}

TEST_CASE("identity self-simulation passes all four checks") {
  std::vector<TAS> systems{east_line_pair(), nondet_pair()};
  for (const auto& T : systems) {
    SimReport r = check_simulation(T, T, identity_rep(T), 2);
    CHECK(r.production_ok);
    CHECK(r.clean_ok);
    CHECK(r.dynamics_forward_ok);
    CHECK(r.dynamics_backward_ok);
    CHECK(r.ok());
    CHECK(r.counterexample.empty());
  }
}

TEST_CASE("scale-2 block simulation passes all four checks") {
  TAS S = two_block_sim();
  TAS T = east_line_pair();
  SimReport r = check_simulation(S, T, two_block_rep(S), 1);
  CHECK(r.ok());
}

TEST_CASE("missing simulator tile fails production with a counterexample") {
  TAS T = east_line_pair();
  // S can never realize the t1 attachment: it is just the seed tile
  TAS S = parse_tas(
      "temperature 2\n"
      "tile t0 N=null E=null S=null W=null\n"
      "seed 0 0 t0\n");
  BlockRep rep;
  rep.m = 1;
  rep.rules.emplace_back(pattern(1, {{0, 0, 0}}), 0);
  SimReport r = check_simulation(S, T, rep, 1);
  CHECK_FALSE(r.production_ok);
  CHECK_FALSE(r.ok());
  CHECK_FALSE(r.counterexample.empty());
  CHECK(r.to_text().find("FAIL") != std::string::npos);
}

TEST_CASE("inconsistent branch mapping fails backward dynamics") {
  // T allows only t1 east of the seed; S has a second branch that the rep
  // maps to t2, whose attachment is invalid in T.
  TAS T = parse_tas(
      "temperature 2\n"
      "glue x 2\n"
      "glue y 2\n"
      "tile t0 N=null E=x S=null W=null\n"
      "tile t1 N=null E=null S=null W=x\n"
      "tile t2 N=null E=null S=null W=y\n"
      "seed 0 0 t0\n");
  TAS S = parse_tas(
      "temperature 2\n"
      "glue x 2\n"
      "tile s0 N=null E=x S=null W=null\n"
      "tile s1 N=null E=null S=null W=x\n"
      "tile s2 N=x E=null S=null W=x\n"
      "seed 0 0 s0\n");
  BlockRep rep;
  rep.m = 1;
  rep.rules.emplace_back(pattern(1, {{0, 0, 0}}), 0);
  rep.rules.emplace_back(pattern(1, {{0, 0, 1}}), 1);
  rep.rules.emplace_back(pattern(1, {{0, 0, 2}}), 2);  // invalid in T
  SimReport r = check_simulation(S, T, rep, 1);
  CHECK_FALSE(r.dynamics_backward_ok);
  CHECK_FALSE(r.ok());
}

TEST_CASE("self-simulation over random systems") {
  std::mt19937_64 rng(7);
  int done = 0;
  for (int trial = 0; trial < 40 && done < 15; ++trial) {
    TAS T;
    T.temperature = 1 + static_cast<int>(rng() % 2);
    T.glues.push_back(Glue{"", 0});
    int ng = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < ng; ++i)
      T.glues.push_back(
          Glue{std::string(1, char('a' + i)), 1 + static_cast<int>(rng() % T.temperature)});
    std::set<std::array<int, 4>> quads;
    int nt = 1 + static_cast<int>(rng() % 4);
    while (static_cast<int>(quads.size()) < nt) {
      std::array<int, 4> q;
      for (int d = 0; d < 4; ++d) q[d] = static_cast<int>(rng() % (ng + 1));
      quads.insert(q);
    }
    int i = 0;
    for (auto& q : quads) {
      TileType t;
      t.name = "t" + std::to_string(i++);
      t.glue = q;
      T.tiles.push_back(t);
    }
    T.seed.emplace(Pos{0, 0}, 0);
    try {
      SimReport r = check_simulation(T, T, identity_rep(T), 2, 4, 20000);
      CHECK(r.ok());
      ++done;
    } catch (const BudgetExceeded&) {
      continue;
    }
  }
  CHECK(done >= 15);
}
