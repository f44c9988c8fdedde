#include "atam/tas_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace atam {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream in(line);
  std::string t;
  while (in >> t) {
    if (t[0] == '#') break;
    toks.push_back(t);
  }
  return toks;
}

// Parses "N=<label|null>" for the side named by `key`; returns the label
// or "" for null.
std::string side_label(const std::string& tok, char key, int line) {
  if (tok.size() < 2 || tok[0] != key || tok[1] != '=')
    fail(line, std::string("expected ") + key + "=<label|null>, got '" + tok + "'");
  std::string label = tok.substr(2);
  if (label.empty()) fail(line, std::string("empty label after ") + key + "=");
  if (label == "null") return "";
  return label;
}

int parse_int(const std::string& tok, int line, const std::string& what) {
  try {
    size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(line, "expected integer " + what + ", got '" + tok + "'");
  }
}

}  // namespace

TAS parse_tas(const std::string& text) {
  TAS sys;
  sys.temperature = 0;
  sys.glues.push_back(Glue{"", 0});  // null glue at index 0
  std::unordered_map<std::string, int> glue_by_label;
  std::unordered_map<std::string, int> tile_by_name;

  struct SeedLine { Pos p; std::string tile; int line; };
  std::vector<SeedLine> seeds;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_temperature = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0];
    if (kw == "temperature") {
      if (toks.size() != 2) fail(lineno, "temperature takes one argument");
      if (saw_temperature) fail(lineno, "duplicate temperature line");
      sys.temperature = parse_int(toks[1], lineno, "temperature");
      if (sys.temperature < 1) fail(lineno, "temperature must be positive");
      saw_temperature = true;
    } else if (kw == "glue") {
      if (toks.size() != 3) fail(lineno, "glue takes <label> <strength>");
      if (!saw_temperature) fail(lineno, "temperature must precede glue lines");
      const std::string& label = toks[1];
      if (label == "null") fail(lineno, "'null' is reserved");
      int strength = parse_int(toks[2], lineno, "strength");
      if (strength < 1) fail(lineno, "glue strength must be >= 1");
      if (strength > sys.temperature)
        fail(lineno, "glue strength " + std::to_string(strength) +
                         " exceeds temperature " + std::to_string(sys.temperature));
      auto it = glue_by_label.find(label);
      if (it != glue_by_label.end()) {
        if (sys.glues[it->second].strength != strength)
          fail(lineno, "glue label '" + label + "' shared between unequal strengths");
        continue;  // benign repeat
      }
      glue_by_label.emplace(label, static_cast<int>(sys.glues.size()));
      sys.glues.push_back(Glue{label, strength});
    } else if (kw == "tile") {
      if (toks.size() != 6)
        fail(lineno, "tile takes <name> N=... E=... S=... W=...");
      const std::string& name = toks[1];
      if (tile_by_name.count(name)) fail(lineno, "duplicate tile name '" + name + "'");
      TileType t;
      t.name = name;
      const char keys[4] = {'N', 'E', 'S', 'W'};
      for (int i = 0; i < 4; ++i) {
        std::string label = side_label(toks[2 + i], keys[i], lineno);
        if (label.empty()) {
          t.glue[i] = 0;
        } else {
          auto it = glue_by_label.find(label);
          if (it == glue_by_label.end())
            fail(lineno, "undeclared glue '" + label + "'");
          t.glue[i] = it->second;
        }
      }
      for (const auto& [other_name, idx] : tile_by_name) {
        if (sys.tiles[idx].glue == t.glue)
          fail(lineno, "tile '" + name + "' duplicates glue quadruple of '" +
                           other_name + "'");
      }
      tile_by_name.emplace(name, static_cast<int>(sys.tiles.size()));
      sys.tiles.push_back(std::move(t));
    } else if (kw == "seed") {
      if (toks.size() != 4) fail(lineno, "seed takes <x> <y> <tilename>");
      Pos p{parse_int(toks[1], lineno, "x"), parse_int(toks[2], lineno, "y")};
      seeds.push_back(SeedLine{p, toks[3], lineno});
    } else {
      fail(lineno, "unknown directive '" + kw + "'");
    }
  }

  if (!saw_temperature) fail(lineno, "missing temperature line");
  if (seeds.empty()) fail(lineno, "missing seed line");
  for (const auto& s : seeds) {
    auto it = tile_by_name.find(s.tile);
    if (it == tile_by_name.end()) fail(s.line, "undeclared tile '" + s.tile + "'");
    if (sys.seed.count(s.p))
      fail(s.line, "seed position (" + std::to_string(s.p.x) + "," +
                       std::to_string(s.p.y) + ") placed twice");
    sys.seed.emplace(s.p, it->second);
  }

  validate(sys);  // connectivity, seed stability, remaining invariants
  return sys;
}

TAS load_tas(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tas(buf.str());
}

std::string dump_assembly(const TAS& sys, const Assembly& a) {
  std::ostringstream out;
  for (const auto& [p, t] : a)  // Assembly is already (y,x)-ordered
    out << p.x << ' ' << p.y << ' ' << sys.tiles[t].name << '\n';
  return out.str();
}

std::string dump_tas(const TAS& sys) {
  std::ostringstream out;
  out << "temperature " << sys.temperature << '\n';
  for (std::size_t i = 1; i < sys.glues.size(); ++i)
    out << "glue " << sys.glues[i].label << ' ' << sys.glues[i].strength << '\n';
  auto side = [&](int g) { return g == 0 ? std::string("null") : sys.glues[g].label; };
  for (const auto& t : sys.tiles)
    out << "tile " << t.name << " N=" << side(t.glue[N]) << " E=" << side(t.glue[E])
        << " S=" << side(t.glue[S]) << " W=" << side(t.glue[W]) << '\n';
  for (const auto& [p, t] : sys.seed)
    out << "seed " << p.x << ' ' << p.y << ' ' << sys.tiles[t].name << '\n';
  return out.str();
}

}  // namespace atam
