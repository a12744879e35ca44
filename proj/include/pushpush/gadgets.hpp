#pragma once

// Gadget catalog, port harness and the contract verifier.
//
// Every contract assertion is decided by exhaustive exploration of the
// harnessed gadget: each port is extended outward by a two-cell corridor
// whose far cell is the port's probe, and everything else is sealed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "layout.hpp"
#include "search.hpp"

namespace pushpush {

// ---------------------------------------------------------------------------
// Reference geometries
// ---------------------------------------------------------------------------

namespace gadgets {

// Robot from x pushes the junction block east into the dead-end storage
// corridor and turns north to y. From y the block is backed by wall.
inline GadgetTemplate one_way() {
  return {"one_way",
          footprint_from_ascii({{
              "##.###",
              "##.###",
              "..B..#",
              "######",
          }}),
          {{"x", {0, 2, 0}, Direction::W}, {"y", {2, 0, 0}, Direction::N}},
          {}};
}

// Mutation: a pocket below the junction lets the robot shove the block
// aside when approaching from y.
inline GadgetTemplate one_way_pocket() {
  return {"one_way_pocket",
          footprint_from_ascii({{
              "##.###",
              "##.###",
              "..B..#",
              "##.###",
              "######",
          }}),
          {{"x", {0, 2, 0}, Direction::W}, {"y", {2, 0, 0}, Direction::N}},
          {}};
}

// Block B sits where the y-branch leaves the approach row. Pushed east (from
// the west approach) it slides to the corner where the z-branch turns south
// and lodges there; pushed north (from the south approach) it lodges in the
// corner w where the y-branch turns east.
inline GadgetTemplate fork() {
  return {"fork",
          footprint_from_ascii({{
              "#######",
              "###....",
              "###.###",
              "##.B..#",
              "....#.#",
              "#####.#",
              "#####.#",
          }}),
          {{"x", {0, 4, 0}, Direction::W}, {"y", {6, 1, 0}, Direction::E}, {"z", {5, 6, 0}, Direction::S}},
          {}};
}

// Mutation: the y-branch corner has an overrun cell, so B no longer lodges
// in front of the y-branch when pushed north.
inline GadgetTemplate fork_overrun() {
  return {"fork_overrun",
          footprint_from_ascii({{
              "#######",
              "###.###",
              "###....",
              "###.###",
              "##.B..#",
              "....#.#",
              "#####.#",
              "#####.#",
          }}),
          {{"x", {0, 5, 0}, Direction::W}, {"y", {6, 2, 0}, Direction::E}, {"z", {5, 7, 0}, Direction::S}},
          {}};
}

// in1 -> out1 runs along z = 0; in2 -> out2 climbs to z = 2 and passes over,
// with a wall layer at z = 1 separating the two.
inline GadgetTemplate crossover3d() {
  return {"crossover3d",
          footprint_from_ascii({
              {"##.##", "#####", ".....", "#####", "##.##"},
              {"##.##", "#####", "#####", "#####", "##.##"},
              {"##.##", "##.##", "##.##", "##.##", "##.##"},
          }),
          {{"in1", {0, 2, 0}, Direction::W},
           {"out1", {4, 2, 0}, Direction::E},
           {"in2", {2, 0, 0}, Direction::N},
           {"out2", {2, 4, 0}, Direction::S}},
          {}};
}

// Mutation: the separating layer is open at the crossing.
inline GadgetTemplate crossover3d_leaky() {
  return {"crossover3d_leaky",
          footprint_from_ascii({
              {"##.##", "#####", ".....", "#####", "##.##"},
              {"##.##", "#####", "##.##", "#####", "##.##"},
              {"##.##", "##.##", "##.##", "##.##", "##.##"},
          }),
          {{"in1", {0, 2, 0}, Direction::W},
           {"out1", {4, 2, 0}, Direction::E},
           {"in2", {2, 0, 0}, Direction::N},
           {"out2", {2, 4, 0}, Direction::S}},
          {}};
}

// Key cells of a clause(k) footprint, in local coordinates.
struct ClauseGeometry {
  int k = 0;
  int shaft_row = 0;  // r
  Coord entry;        // s0: robot stands here to push A east
  Coord block_a;      // s1
  Coord crossing;     // K
  std::vector<Coord> wire_corner;  // Q_i: robot stands here to push the wire block south
  std::vector<Coord> wire_block;   // P_i: initial wire block position
  std::vector<Coord> wire_stop;    // shaft cell where a delivered wire block rests
  int width = 0, height = 0;
};

inline ClauseGeometry clause_geometry(int k) {
  if (k < 1) throw Error("clause width must be positive");
  ClauseGeometry g;
  g.k = k;
  const int r = 2 * k + 1;
  g.shaft_row = r;
  g.entry = {2, r, 0};
  g.block_a = {3, r, 0};
  const int crossing = 5 + 2 * k;
  g.crossing = {crossing, r, 0};
  for (int i = 1; i <= k; ++i) {
    const int col = 3 + 2 * i;
    g.wire_corner.push_back({col, r - 2 * i, 0});
    g.wire_block.push_back({col, r - 2 * i + 1, 0});
    g.wire_stop.push_back({col, r, 0});
  }
  g.width = crossing + 4;
  g.height = r + 4;
  return g;
}

// Clause component with k attached wires. Layout (local, y down):
//  * x enters from the west on the shaft row and stands at s0 next to
//    block A; the only way on is to push A east along the shaft.
//  * the robot then drops south from s1 into a bypass that re-enters the
//    shaft from below at the crossing cell K, continues north one cell and
//    leaves east, then north to the y port.
//  * with nothing in the shaft A slides all the way to K; pushed on from
//    below it jams in the corner north of K. Either way y is cut off.
//  * wire i arrives from the west, turns south at its corner and ends in
//    the shaft. Its block, pushed south from the corner, drops into the
//    shaft and makes A stop short of K. Pushed north from the shaft it
//    lodges in the corner, so the wire cannot be entered from the clause.
//
// `prepushed` is a bitmask of wires whose block starts in the shaft.
// `overrun` lengthens the shaft past K (a mutation that breaks the clog).
inline GadgetTemplate clause(int k, unsigned prepushed = 0, bool overrun = false) {
  const ClauseGeometry g = clause_geometry(k);
  const int r = g.shaft_row, kx = g.crossing.x;
  std::vector<std::string> rows(g.height, std::string(g.width, '#'));
  auto open = [&](int x, int y) { rows[y][x] = '.'; };
  for (int x = 0; x <= kx; ++x) open(x, r);
  if (overrun) open(kx + 1, r);
  rows[r][g.block_a.x] = 'B';
  open(3, r + 1);
  for (int x = 3; x <= kx; ++x) open(x, r + 2);
  open(kx, r + 1);
  open(kx, r - 1);
  open(kx + 1, r - 1);
  for (int y = 0; y <= r - 1; ++y) open(kx + 2, y);
  for (int i = 0; i < k; ++i) {
    const Coord q = g.wire_corner[i];
    for (int x = 0; x <= q.x; ++x) open(x, q.y);
    for (int y = q.y; y < r; ++y) open(q.x, y);
    if (prepushed & (1u << i))
      rows[g.wire_stop[i].y][g.wire_stop[i].x] = 'B';
    else
      rows[g.wire_block[i].y][g.wire_block[i].x] = 'B';
  }
  std::string name = "clause" + std::to_string(k);
  if (prepushed) name += "_prepushed" + std::to_string(prepushed);
  if (overrun) name += "_overrun";
  GadgetTemplate t{name, footprint_from_ascii({rows}), {}, {}};
  t.ports.push_back({"x", {0, r, 0}, Direction::W});
  t.ports.push_back({"y", {kx + 2, 0, 0}, Direction::N});
  for (int i = 0; i < k; ++i)
    t.ports.push_back({std::string(1, static_cast<char>('a' + i)), {0, g.wire_corner[i].y, 0}, Direction::W});
  return t;
}

// Key cells of a variable(nT, nF) footprint, in local coordinates.
struct VariableGeometry {
  int n_true = 0, n_false = 0;
  Coord fork_west{2, 3, 0};   // stand here and push E to choose T
  Coord fork_south{3, 4, 0};  // stand here and push N to choose F
  int t_rail_x = 9, f_rail_x = 5;
  std::vector<int> t_rows, f_rows;  // tap rows
  int t_junction_row = 0, f_junction_row = 0;
  int merge_x = 13;
  int width = 16, height = 0;
  Coord t_merge_entry() const { return {t_rail_x, t_junction_row - 1, 0}; }  // push S into the one-way
  Coord f_merge_entry() const { return {f_rail_x, f_junction_row - 1, 0}; }
};

inline VariableGeometry variable_geometry(int n_true, int n_false) {
  if (n_true < 0 || n_false < 0) throw Error("negative tap count");
  VariableGeometry g;
  g.n_true = n_true;
  g.n_false = n_false;
  const int n = n_true + n_false;
  for (int i = 0; i < n; ++i) (i < n_true ? g.t_rows : g.f_rows).push_back(10 + 6 * i);
  const int last = n ? 10 + 6 * (n - 1) : 4;
  g.t_junction_row = last + 6;
  g.f_junction_row = g.t_junction_row + 4;
  g.height = g.f_junction_row + 5;
  return g;
}

// Variable component: fork, then a T rail and an F rail each with wire taps
// exiting east, re-merged through one-way gadgets into b. F taps pass over
// the T rail through crossovers. `merge_blocks` = false removes the merge
// one-way blocks (a mutation).
inline GadgetTemplate variable(int n_true, int n_false, bool merge_blocks = true) {
  const VariableGeometry g = variable_geometry(n_true, n_false);
  const bool three_d = !g.f_rows.empty();
  Canvas cv(Dims{g.width, g.height, three_d ? 3 : 1});

  const auto fk = cv.stamp(fork(), {0, 0, 0}, 0, "fork");
  GadgetTemplate ow = one_way();
  if (!merge_blocks) ow.footprint.remove_block({2, 2, 0});
  // Rotated once clockwise: x enters from the north, storage runs south,
  // y leaves east. The junction sits at local (1, 2).
  const auto ot = cv.stamp(ow, {g.t_rail_x - 1, g.t_junction_row - 2, 0}, 1, "one_way.T");
  const auto of = cv.stamp(ow, {g.f_rail_x - 1, g.f_junction_row - 2, 0}, 1, "one_way.F");

  const int t_rail = cv.new_owner(), f_rail = cv.new_owner(), merge = cv.new_owner();
  cv.route(t_rail, {{7, 1, 0}, {g.t_rail_x, 1, 0}, {g.t_rail_x, g.t_junction_row - 3, 0}}, "T-rail");
  cv.route(f_rail, {{g.f_rail_x, 7, 0}, {g.f_rail_x, g.f_junction_row - 3, 0}}, "F-rail");
  for (int row : g.t_rows) cv.route(t_rail, {{g.t_rail_x + 1, row, 0}, {g.width - 1, row, 0}}, "T-tap");
  for (int row : g.f_rows) cv.route(f_rail, {{g.f_rail_x + 1, row, 0}, {g.width - 1, row, 0}}, "F-tap");
  cv.route(merge,
           {{g.t_rail_x + 3, g.t_junction_row, 0}, {g.merge_x, g.t_junction_row, 0}, {g.merge_x, g.height - 1, 0}},
           "merge");
  cv.route(merge, {{g.f_rail_x + 3, g.f_junction_row, 0}, {g.merge_x, g.f_junction_row, 0}}, "merge");
  cv.connect(fk.owner, t_rail);
  cv.connect(fk.owner, f_rail);
  cv.connect(ot.owner, t_rail);
  cv.connect(of.owner, f_rail);
  cv.connect(ot.owner, merge);
  cv.connect(of.owner, merge);

  GadgetTemplate t;
  t.name = "variable_" + std::to_string(n_true) + "_" + std::to_string(n_false) + (merge_blocks ? "" : "_unguarded");
  t.footprint = cv.finish();
  t.parts = cv.parts();
  t.ports.push_back({"a", {0, 4, 0}, Direction::W});
  t.ports.push_back({"b", {g.merge_x, g.height - 1, 0}, Direction::S});
  for (int i = 0; i < n_true; ++i)
    t.ports.push_back({"t" + std::to_string(i + 1), {g.width - 1, g.t_rows[i], 0}, Direction::E});
  for (int i = 0; i < n_false; ++i)
    t.ports.push_back({"f" + std::to_string(i + 1), {g.width - 1, g.f_rows[i], 0}, Direction::E});
  return t;
}

}  // namespace gadgets

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

struct Harnessed {
  Board board;
  std::map<std::string, CellIndex> probes;
  Coord offset;  // template origin inside the board
};

// Extends every port by a two-cell corridor ending in its probe cell and
// seals everything else. The robot starts at `entry`'s probe; in path mode
// the goal is `exit`'s probe (default: the first other port).
inline Harnessed harness_probes(const GadgetTemplate& t, const std::string& entry = {},
                                const std::string& exit = {}, int margin = 0) {
  if (t.ports.empty()) throw Error("gadget '" + t.name + "' has no ports");
  const Dims fd = t.footprint.dims();
  const int pad = 3 + margin;
  Board b(Dims{fd.w + 2 * pad, fd.h + 2 * pad, fd.d}, Mode::Path);
  for (CellIndex i = 0; i < b.cell_count(); ++i) b.set_wall(b.coord(i));
  const Coord off{pad, pad, 0};
  auto shift = [&](const Coord& c) { return Coord{c.x + off.x, c.y + off.y, c.z}; };
  for (CellIndex i = 0; i < t.footprint.cell_count(); ++i)
    if (!t.footprint.is_wall(i)) b.set_wall(shift(t.footprint.coord(i)), false);
  for (CellIndex blk : t.footprint.initial_blocks()) b.add_block(shift(t.footprint.coord(blk)));

  Harnessed h{std::move(b), {}, off};
  for (const Port& p : t.ports) {
    if (p.dir == Direction::U || p.dir == Direction::D) throw Error("vertical ports are not supported");
    const Coord c = shift(p.cell);
    if (h.board.is_wall(c)) throw Error("port '" + p.name + "' is not an open cell");
    h.board.set_wall(c.step(p.dir), false);
    h.board.set_wall(c.step(p.dir, 2), false);
    h.probes[p.name] = h.board.index(c.step(p.dir, 2));
  }
  const std::string& in = entry.empty() ? t.ports.front().name : entry;
  std::string out = exit;
  if (out.empty())
    for (const Port& p : t.ports)
      if (p.name != in) {
        out = p.name;
        break;
      }
  h.board.set_start(h.board.coord(h.probes.at(t.port(in).name)));
  if (!out.empty()) h.board.set_goal(h.board.coord(h.probes.at(t.port(out).name)));
  else h.board.set_goal(h.board.coord(h.probes.at(in)));
  return h;
}

inline Board harness(const GadgetTemplate& t, const std::string& entry = {}, const std::string& exit = {}) {
  return harness_probes(t, entry, exit).board;
}

// ---------------------------------------------------------------------------
// Contracts
// ---------------------------------------------------------------------------

struct Assertion {
  enum class Kind { Reach, NoReach, After, TapSet };
  Kind kind = Kind::Reach;
  std::string from, to;                // to: unused for TapSet
  std::vector<std::string> tapset;     // TapSet only
  std::shared_ptr<const Assertion> then;  // After only
};

using BehaviorContract = std::vector<Assertion>;

inline Assertion reach(std::string p, std::string q) { return {Assertion::Kind::Reach, std::move(p), std::move(q), {}, {}}; }
inline Assertion noreach(std::string p, std::string q) {
  return {Assertion::Kind::NoReach, std::move(p), std::move(q), {}, {}};
}
inline Assertion after(std::string p, std::string q, Assertion then) {
  return {Assertion::Kind::After, std::move(p), std::move(q), {}, std::make_shared<const Assertion>(std::move(then))};
}
inline Assertion tapset(std::string p, std::vector<std::string> s) {
  return {Assertion::Kind::TapSet, std::move(p), {}, std::move(s), {}};
}

inline std::string to_string(const Assertion& a) {
  switch (a.kind) {
    case Assertion::Kind::Reach: return "reach " + a.from + " " + a.to;
    case Assertion::Kind::NoReach: return "noreach " + a.from + " " + a.to;
    case Assertion::Kind::After: return "after " + a.from + " " + a.to + " " + to_string(*a.then);
    case Assertion::Kind::TapSet: {
      std::string s;
      for (const auto& n : a.tapset) s += (s.empty() ? "" : ",") + n;
      return "tapset " + a.from + " " + (s.empty() ? "-" : s);
    }
  }
  return {};
}

namespace detail {

inline Assertion parse_assertion(const std::vector<std::string>& tok, std::size_t& i, int line) {
  auto need = [&](std::size_t n) {
    if (i + n > tok.size()) throw ParseError(line, 1, "truncated assertion");
  };
  need(1);
  const std::string kw = tok[i++];
  if (kw == "reach" || kw == "noreach") {
    need(2);
    Assertion a = kw == "reach" ? reach(tok[i], tok[i + 1]) : noreach(tok[i], tok[i + 1]);
    i += 2;
    return a;
  }
  if (kw == "after") {
    need(2);
    std::string p = tok[i], q = tok[i + 1];
    i += 2;
    Assertion inner = parse_assertion(tok, i, line);
    if (inner.from != q) throw ParseError(line, 1, "nested assertion must start at '" + q + "'");
    return after(std::move(p), std::move(q), std::move(inner));
  }
  if (kw == "tapset") {
    need(1);
    std::string p = tok[i++];
    std::vector<std::string> set;
    if (i < tok.size() && tok[i] != "-") {
      std::string list = tok[i];
      std::size_t pos = 0;
      while (pos <= list.size()) {
        auto comma = list.find(',', pos);
        if (comma == std::string::npos) comma = list.size();
        if (comma > pos) set.push_back(list.substr(pos, comma - pos));
        pos = comma + 1;
      }
    }
    if (i < tok.size()) ++i;
    return tapset(std::move(p), std::move(set));
  }
  throw ParseError(line, 1, "unknown assertion '" + kw + "'");
}

}  // namespace detail

inline BehaviorContract parse_contract(std::string_view text, int first_line = 1) {
  BehaviorContract out;
  const auto lines = detail::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto tok = detail::header_tokens(lines[n]);
    if (tok.empty() || tok[0].starts_with("#")) continue;
    std::size_t i = 0;
    const int line = first_line + static_cast<int>(n);
    out.push_back(detail::parse_assertion(tok, i, line));
    if (i != tok.size()) throw ParseError(line, 1, "trailing tokens after assertion");
  }
  return out;
}

inline std::string render_contract(const BehaviorContract& c) {
  std::string out;
  for (const auto& a : c) out += to_string(a) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

enum class AssertionVerdict : std::uint8_t { Pass, Fail, Undecided };

inline const char* to_string(AssertionVerdict v) {
  switch (v) {
    case AssertionVerdict::Pass: return "PASS";
    case AssertionVerdict::Fail: return "FAIL";
    case AssertionVerdict::Undecided: return "UNDECIDED";
  }
  return "?";
}

struct AssertionResult {
  std::string assertion;
  AssertionVerdict verdict = AssertionVerdict::Undecided;
  std::string start_port;                 // harness entry used for the trace
  std::optional<MoveSequence> counterexample;  // set for every failure
};

struct VerificationReport {
  std::string gadget;
  std::vector<AssertionResult> results;
  std::size_t states_explored = 0;

  bool all_pass() const {
    return std::all_of(results.begin(), results.end(),
                       [](const AssertionResult& r) { return r.verdict == AssertionVerdict::Pass; });
  }
};

namespace detail {

// Decides assertions over one fully explored state graph.
class ContractChecker {
 public:
  ContractChecker(const Board& board, const StateGraph& g, std::vector<std::string> port_names,
                  std::vector<CellIndex> probes)
      : board_(board), g_(g), names_(std::move(port_names)), probes_(std::move(probes)) {
    const std::size_t n = g.size();
    reverse_begin_.assign(n + 1, 0);
    for (std::size_t e = 0; e < g.edge_target.size(); ++e) ++reverse_begin_[g.edge_target[e] + 1];
    for (std::size_t i = 0; i < n; ++i) reverse_begin_[i + 1] += reverse_begin_[i];
    reverse_src_.resize(g.edge_target.size());
    std::vector<std::uint32_t> fill(reverse_begin_.begin(), reverse_begin_.end() - 1);
    for (std::uint32_t src = 0; src < n; ++src)
      for (std::uint32_t e = g.edge_begin[src]; e < g.edge_begin[src + 1]; ++e)
        reverse_src_[fill[g.edge_target[e]]++] = src;
  }

  std::size_t port_bit(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    throw Error("unknown port '" + name + "'");
  }

  // Nodes at which `a` fails.
  std::vector<char> violators(const Assertion& a) {
    using K = Assertion::Kind;
    switch (a.kind) {
      case K::Reach: return negate(can_reach(a.to));
      case K::NoReach: return can_reach(a.to);
      case K::TapSet: {
        std::vector<char> bad(g_.size(), 0);
        for (const auto& q : names_) {
          if (q == a.from) continue;
          const bool expected = std::find(a.tapset.begin(), a.tapset.end(), q) != a.tapset.end();
          const auto r = can_reach(q);
          for (std::size_t i = 0; i < bad.size(); ++i)
            if (static_cast<bool>(r[i]) != expected) bad[i] = 1;
        }
        return bad;
      }
      case K::After: {
        const auto inner = violators(*a.then);
        std::vector<char> seed(g_.size(), 0);
        const std::uint64_t bit = std::uint64_t{1} << port_bit(a.to);
        for (std::size_t i = 0; i < seed.size(); ++i) seed[i] = (g_.watched_mask[i] & bit) && inner[i];
        return backward(seed);
      }
    }
    return {};
  }

  // Moves from `node` (robot at `robot`) demonstrating that `a` fails there.
  MoveSequence trace(std::uint32_t node, CellIndex robot, const Assertion& a) {
    using K = Assertion::Kind;
    switch (a.kind) {
      case K::Reach: return {};
      case K::NoReach: return walk_to(node, robot, a.to, nullptr);
      case K::TapSet: {
        for (const auto& q : names_) {
          if (q == a.from) continue;
          const bool expected = std::find(a.tapset.begin(), a.tapset.end(), q) != a.tapset.end();
          if (!expected && can_reach(q)[node]) return walk_to(node, robot, q, nullptr);
        }
        return {};
      }
      case K::After: {
        const auto inner = violators(*a.then);
        const std::uint64_t bit = std::uint64_t{1} << port_bit(a.to);
        std::uint32_t hit = 0;
        MoveSequence moves = walk_to(node, robot, a.to, &inner, &hit);
        (void)bit;
        auto rest = trace(hit, probes_[port_bit(a.to)], *a.then);
        moves.insert(moves.end(), rest.begin(), rest.end());
        return moves;
      }
    }
    return {};
  }

 private:
  static std::vector<char> negate(std::vector<char> v) {
    for (auto& c : v) c = !c;
    return v;
  }

  std::vector<char> backward(std::vector<char> set) {
    std::vector<std::uint32_t> queue;
    for (std::uint32_t i = 0; i < set.size(); ++i)
      if (set[i]) queue.push_back(i);
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const std::uint32_t n = queue[h];
      for (std::uint32_t e = reverse_begin_[n]; e < reverse_begin_[n + 1]; ++e) {
        const std::uint32_t s = reverse_src_[e];
        if (!set[s]) {
          set[s] = 1;
          queue.push_back(s);
        }
      }
    }
    return set;
  }

  const std::vector<char>& can_reach(const std::string& port) {
    auto it = reach_cache_.find(port);
    if (it != reach_cache_.end()) return it->second;
    const std::uint64_t bit = std::uint64_t{1} << port_bit(port);
    std::vector<char> seed(g_.size(), 0);
    for (std::size_t i = 0; i < seed.size(); ++i) seed[i] = (g_.watched_mask[i] & bit) != 0;
    return reach_cache_.emplace(port, backward(std::move(seed))).first->second;
  }

  // Forward BFS from `node` to the nearest node whose region holds `port`'s
  // probe (and, if `filter` is given, which is in the filter set); expands
  // the pushes and the final walk onto the probe.
  MoveSequence walk_to(std::uint32_t node, CellIndex robot, const std::string& port,
                       const std::vector<char>* filter, std::uint32_t* reached = nullptr) {
    const std::size_t bit = port_bit(port);
    auto good = [&](std::uint32_t n) {
      return (g_.watched_mask[n] >> bit & 1) && (!filter || (*filter)[n]);
    };
    std::vector<std::uint32_t> parent(g_.size(), static_cast<std::uint32_t>(-1));
    std::vector<std::uint32_t> via(g_.size(), 0);
    std::vector<std::uint32_t> queue{node};
    parent[node] = node;
    std::optional<std::uint32_t> found;
    for (std::size_t h = 0; h < queue.size() && !found; ++h) {
      const std::uint32_t n = queue[h];
      if (good(n)) {
        found = n;
        break;
      }
      for (std::uint32_t e = g_.edge_begin[n]; e < g_.edge_begin[n + 1]; ++e) {
        const std::uint32_t t = g_.edge_target[e];
        if (parent[t] != static_cast<std::uint32_t>(-1)) continue;
        parent[t] = n;
        via[t] = e;
        queue.push_back(t);
      }
    }
    if (!found) throw Error("internal: counterexample target unreachable");
    std::vector<PushDescriptor> pushes;
    for (std::uint32_t n = *found; n != node; n = parent[n]) pushes.push_back(g_.edge_push[via[n]]);
    std::reverse(pushes.begin(), pushes.end());
    auto b = g_.blocks(node);
    auto moves = expand_pushes(board_, State{{b.begin(), b.end()}, robot}, pushes, probes_[bit]);
    if (!moves) throw Error("internal: counterexample expansion failed");
    if (reached) *reached = *found;
    return *moves;
  }

  const Board& board_;
  const StateGraph& g_;
  std::vector<std::string> names_;
  std::vector<CellIndex> probes_;
  std::vector<std::uint32_t> reverse_begin_, reverse_src_;
  std::map<std::string, std::vector<char>> reach_cache_;
};

}  // namespace detail

inline VerificationReport verify_gadget(const GadgetTemplate& t, const BehaviorContract& contract,
                                        const Budget& budget = {1'000'000, 60.0}, int margin = 0) {
  VerificationReport report;
  report.gadget = t.name;
  report.results.resize(contract.size());
  for (std::size_t i = 0; i < contract.size(); ++i) {
    report.results[i].assertion = to_string(contract[i]);
    report.results[i].start_port = contract[i].from;
  }

  std::vector<std::string> starts;
  for (const auto& a : contract)
    if (std::find(starts.begin(), starts.end(), a.from) == starts.end()) starts.push_back(a.from);

  for (const std::string& start : starts) {
    Harnessed h = harness_probes(t, start, {}, margin);
    std::vector<std::string> names;
    std::vector<CellIndex> probes;
    for (const Port& p : t.ports) {
      names.push_back(p.name);
      probes.push_back(h.probes.at(p.name));
    }
    ExploreOptions opts;
    opts.budget = budget;
    opts.watched = probes;
    opts.keep_edges = true;
    const StateGraph g = explore(h.board, initial_state(h.board), opts);
    report.states_explored += g.size();
    if (!g.exhausted) continue;  // left Undecided

    detail::ContractChecker checker(h.board, g, names, probes);
    for (std::size_t i = 0; i < contract.size(); ++i) {
      if (contract[i].from != start) continue;
      auto& res = report.results[i];
      const auto bad = checker.violators(contract[i]);
      if (!bad[0]) {
        res.verdict = AssertionVerdict::Pass;
      } else {
        res.verdict = AssertionVerdict::Fail;
        res.counterexample = checker.trace(0, h.board.start(), contract[i]);
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

struct CatalogEntry {
  std::string family;
  GadgetTemplate gadget;
  BehaviorContract contract;
};

inline BehaviorContract one_way_contract() {
  return {reach("x", "y"), noreach("y", "x"), after("x", "y", reach("y", "x"))};
}

inline BehaviorContract fork_contract() {
  return {reach("x", "y"),
          reach("x", "z"),
          after("x", "y", noreach("y", "z")),
          after("x", "y", reach("y", "x")),
          after("x", "z", noreach("z", "y")),
          after("x", "z", reach("z", "x"))};
}

inline BehaviorContract crossover_contract() {
  return {reach("in1", "out1"), reach("in2", "out2"),   noreach("in1", "out2"),
          noreach("in1", "in2"), noreach("in2", "in1"), noreach("in2", "out1")};
}

inline BehaviorContract variable_contract(int n_true, int n_false) {
  std::vector<std::string> ts, fs;
  for (int i = 1; i <= n_true; ++i) ts.push_back("t" + std::to_string(i));
  for (int i = 1; i <= n_false; ++i) fs.push_back("f" + std::to_string(i));
  BehaviorContract c{reach("a", "b")};
  std::vector<std::string> all{"b"};
  all.insert(all.end(), ts.begin(), ts.end());
  all.insert(all.end(), fs.begin(), fs.end());
  c.push_back(tapset("a", all));
  auto rail = [&](const std::vector<std::string>& mine, const std::vector<std::string>& other) {
    for (const auto& tap : mine) {
      std::vector<std::string> expect{"a", "b"};
      for (const auto& o : mine)
        if (o != tap) expect.push_back(o);
      c.push_back(after("a", tap, tapset(tap, expect)));
    }
    for (const auto& o : other)
      if (!mine.empty()) c.push_back(after("a", mine.front(), noreach(mine.front(), o)));
  };
  rail(ts, fs);
  rail(fs, ts);
  c.push_back(noreach("b", "a"));
  for (const auto& t : ts) c.push_back(noreach("b", t));
  for (const auto& f : fs) c.push_back(noreach("b", f));
  return c;
}

inline BehaviorContract clause_contract(int k, unsigned prepushed) {
  BehaviorContract c;
  std::vector<std::string> wires;
  for (int i = 0; i < k; ++i) wires.emplace_back(1, static_cast<char>('a' + i));
  if (prepushed == 0) {
    c.push_back(noreach("x", "y"));
  } else {
    c.push_back(reach("x", "y"));
    c.push_back(after("x", "y", reach("y", "x")));
  }
  for (const auto& w : wires) {
    c.push_back(noreach("x", w));
    c.push_back(noreach(w, "x"));
    c.push_back(noreach(w, "y"));
  }
  return c;
}

inline std::vector<CatalogEntry> catalog(int max_clause_width = 3) {
  std::vector<CatalogEntry> out;
  out.push_back({"one_way", gadgets::one_way(), one_way_contract()});
  out.push_back({"fork", gadgets::fork(), fork_contract()});
  out.push_back({"crossover3d", gadgets::crossover3d(), crossover_contract()});
  for (auto [t, f] : {std::pair{1, 1}, std::pair{2, 1}})
    out.push_back({"variable", gadgets::variable(t, f), variable_contract(t, f)});
  for (int k = 1; k <= max_clause_width; ++k) {
    out.push_back({"clause", gadgets::clause(k), clause_contract(k, 0)});
    for (int i = 0; i < k; ++i)
      out.push_back({"clause", gadgets::clause(k, 1u << i), clause_contract(k, 1u << i)});
  }
  return out;
}

// One deliberately broken geometry per family, paired with the contract of
// the gadget it imitates. Each must fail verification.
inline std::vector<CatalogEntry> mutants() {
  return {{"one_way", gadgets::one_way_pocket(), one_way_contract()},
          {"fork", gadgets::fork_overrun(), fork_contract()},
          {"crossover3d", gadgets::crossover3d_leaky(), crossover_contract()},
          {"variable", gadgets::variable(1, 1, false), variable_contract(1, 1)},
          {"clause", gadgets::clause(1, 0, true), clause_contract(1, 0)}};
}

// ---------------------------------------------------------------------------
// Gadget library file format
// ---------------------------------------------------------------------------
//
//   gadget <name>
//   pushpush v1
//   mode path
//   dims W H D
//   layer 0 ... (no S or T glyphs)
//   ports:
//   port <name> <x> <y> <z> <dir>
//   contract:
//   <assertion lines>

struct GadgetFile {
  GadgetTemplate gadget;
  BehaviorContract contract;
};

inline std::string render_gadget(const GadgetTemplate& t, const BehaviorContract& contract = {}) {
  std::ostringstream os;
  os << "gadget " << t.name << '\n';
  detail::render_grid(os, t.footprint);
  os << "ports:\n";
  for (const Port& p : t.ports)
    os << "port " << p.name << ' ' << p.cell.x << ' ' << p.cell.y << ' ' << p.cell.z << ' ' << letter(p.dir) << '\n';
  if (!contract.empty()) os << "contract:\n" << render_contract(contract);
  return os.str();
}

inline GadgetFile parse_gadget(std::string_view text) {
  auto lines = detail::split_lines(text);
  std::size_t first = 0;
  while (first < lines.size() && detail::header_tokens(lines[first]).empty()) ++first;
  if (first >= lines.size()) throw ParseError(1, 1, "empty gadget file");
  const auto head = detail::header_tokens(lines[first]);
  if (head.size() != 2 || head[0] != "gadget") throw ParseError(static_cast<int>(first) + 1, 1, "expected 'gadget <name>'");

  std::vector<std::string> grid_lines(lines.begin() + static_cast<std::ptrdiff_t>(first) + 1, lines.end());
  detail::GridParse grid;
  try {
    grid = detail::parse_grid(grid_lines, true);
  } catch (const ParseError& e) {
    throw ParseError(e.line() + static_cast<int>(first) + 1, e.column(), e.message());
  }
  if (grid.starts || grid.goals) throw ParseError(static_cast<int>(first) + 2, 1, "gadget footprints carry no S or T");

  GadgetFile out;
  out.gadget.name = head[1];
  out.gadget.footprint = std::move(grid.board);
  std::size_t i = grid.rest + first + 1;
  auto skip_blank = [&] {
    while (i < lines.size() && detail::header_tokens(lines[i]).empty()) ++i;
  };
  skip_blank();
  if (i >= lines.size() || detail::header_tokens(lines[i]) != std::vector<std::string>{"ports:"})
    throw ParseError(static_cast<int>(i) + 1, 1, "expected 'ports:' stanza");
  ++i;
  for (; i < lines.size(); ++i) {
    const auto tok = detail::header_tokens(lines[i]);
    if (tok.empty()) continue;
    if (tok[0] == "contract:") break;
    const int line = static_cast<int>(i) + 1;
    if (tok.size() != 6 || tok[0] != "port") throw ParseError(line, 1, "expected 'port <name> <x> <y> <z> <dir>'");
    Coord c{};
    try {
      c = {std::stoi(tok[2]), std::stoi(tok[3]), std::stoi(tok[4])};
    } catch (const std::exception&) {
      throw ParseError(line, 1, "malformed port coordinates");
    }
    auto d = tok[5].size() == 1 ? direction_from_letter(tok[5][0]) : std::nullopt;
    if (!d) throw ParseError(line, 1, "malformed port direction '" + tok[5] + "'");
    if (!out.gadget.footprint.contains(c) || out.gadget.footprint.is_wall(c))
      throw ParseError(line, 1, "port '" + tok[1] + "' is not an open footprint cell");
    out.gadget.ports.push_back({tok[1], c, *d});
  }
  if (i < lines.size()) {
    std::string rest;
    for (std::size_t j = i + 1; j < lines.size(); ++j) rest += lines[j] + "\n";
    out.contract = parse_contract(rest, static_cast<int>(i) + 2);
  }
  return out;
}

// Built-in catalog entries and mutation fixtures, by template name.
inline std::vector<GadgetFile> builtin_gadgets() {
  std::vector<GadgetFile> out;
  for (auto& e : catalog()) out.push_back({std::move(e.gadget), std::move(e.contract)});
  for (auto& e : mutants()) out.push_back({std::move(e.gadget), std::move(e.contract)});
  return out;
}

inline GadgetFile load_gadget_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_gadget(ss.str());
}

// Resolves a gadget by file path, built-in name, or <name>.gadget inside
// $PUSHPUSH_GADGET_DIR, in that order.
inline std::optional<GadgetFile> find_gadget(const std::string& name) {
  std::error_code ec;
  if (name.find('/') != std::string::npos || name.ends_with(".gadget")) {
    if (std::filesystem::is_regular_file(name, ec)) return load_gadget_file(name);
    return std::nullopt;
  }
  for (auto& g : builtin_gadgets())
    if (g.gadget.name == name) return g;
  if (const char* dir = std::getenv("PUSHPUSH_GADGET_DIR")) {
    const auto path = std::filesystem::path(dir) / (name + ".gadget");
    if (std::filesystem::is_regular_file(path, ec)) return load_gadget_file(path);
  }
  return std::nullopt;
}

}  // namespace pushpush
