#pragma once

// CNF -> 3D PushPush compiler and witness paths.
//
// Layout (all at z = 0 unless lifted by a crossover):
//
//   s -> variable 1 -> variable 2 -> ... -> variable n          (left column)
//        taps ----------- wires in per-wire channels ---------> clauses
//   clause 1 -> clause 2 -> ... -> clause m -> t                 (right column, below)
//
// Variables are stacked top to bottom. Clauses sit below the variables and
// are stacked bottom to top, so every wire runs east from its tap, south
// down its own channel column, then east into its clause port. Channels are
// ordered so a wire's vertical only ever crosses other wires' tap rows; each
// such crossing becomes a crossover.

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gadgets.hpp"

namespace pushpush {

struct CnfFormula {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;

  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;
};

// Truth value of variable v at index v - 1.
using Assignment = std::vector<bool>;

inline CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula f;
  bool header = false;
  int declared = 0;
  std::vector<int> current;
  int current_line = 0;
  const auto lines = detail::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const int line = static_cast<int>(n) + 1;
    std::istringstream is(lines[n]);
    std::string tok;
    if (!(is >> tok)) continue;
    if (tok[0] == 'c') continue;
    if (tok == "%") break;
    if (tok == "p") {
      if (header) throw ParseError(line, 1, "duplicate header");
      std::string fmt, extra;
      long long v = -1, c = -1;
      if (!(is >> fmt >> v >> c) || fmt != "cnf" || v < 1 || c < 0 || v > 1'000'000 || c > 10'000'000 || (is >> extra))
        throw ParseError(line, 1, "malformed header");
      f.num_vars = static_cast<int>(v);
      declared = static_cast<int>(c);
      header = true;
      continue;
    }
    if (!header) throw ParseError(line, 1, "missing header");
    std::istringstream ls(lines[n]);
    while (ls >> tok) {
      long long lit = 0;
      std::size_t used = 0;
      try {
        lit = std::stoll(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw ParseError(line, 1, "malformed literal '" + tok + "'");
      if (lit == 0) {
        if (current.empty()) throw ParseError(line, 1, "empty clause");
        f.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (lit < -f.num_vars || lit > f.num_vars) throw ParseError(line, 1, "literal out of range");
      if (current.empty()) current_line = line;
      current.push_back(static_cast<int>(lit));
    }
  }
  if (!header) throw ParseError(1, 1, "missing header");
  if (!current.empty()) throw ParseError(current_line, 1, "missing terminator");
  if (static_cast<int>(f.clauses.size()) != declared) throw ParseError(1, 1, "clause count mismatch");
  return f;
}

inline std::string render_dimacs(const CnfFormula& f) {
  std::ostringstream os;
  os << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) {
    for (int lit : c) os << lit << ' ';
    os << "0\n";
  }
  return os.str();
}

inline bool satisfies(const CnfFormula& f, const Assignment& a) {
  if (static_cast<int>(a.size()) != f.num_vars) throw Error("assignment size does not match formula");
  return std::all_of(f.clauses.begin(), f.clauses.end(), [&](const std::vector<int>& c) {
    return std::any_of(c.begin(), c.end(), [&](int lit) { return a[std::abs(lit) - 1] == (lit > 0); });
  });
}

// Brute force over all assignments, counting up with x1 as the high bit so
// the first hit prefers true values for low-numbered variables.
inline std::optional<Assignment> sat_oracle(const CnfFormula& f) {
  if (f.num_vars > 20) throw Error("too many variables");
  const std::uint32_t total = std::uint32_t{1} << f.num_vars;
  Assignment a(f.num_vars);
  for (std::uint32_t bits = 0; bits < total; ++bits) {
    for (int v = 0; v < f.num_vars; ++v) a[v] = !((bits >> (f.num_vars - 1 - v)) & 1);
    if (satisfies(f, a)) return a;
  }
  return std::nullopt;
}

inline Assignment parse_assignment(std::string_view text, int num_vars) {
  Assignment a(num_vars, false);
  std::vector<char> seen(num_vars, 0);
  std::istringstream is{std::string(text)};
  std::string tok;
  while (is >> tok) {
    long long lit = 0;
    std::size_t used = 0;
    try {
      lit = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || lit == 0 || lit < -num_vars || lit > num_vars)
      throw Error("malformed assignment literal '" + tok + "'");
    seen[std::abs(lit) - 1] = 1;
    a[std::abs(lit) - 1] = lit > 0;
  }
  for (int v = 0; v < num_vars; ++v)
    if (!seen[v]) throw Error("assignment misses variable " + std::to_string(v + 1));
  return a;
}

struct CompileOptions {
  int max_clause_width = 3;
};

struct WirePlacement {
  int variable = 0;  // 1-based
  bool positive = true;
  int tap = 0;       // index on its rail
  int clause = 0;    // 0-based
  int slot = 0;      // wire index inside the clause
  std::vector<Coord> route;
};

struct VariablePlacement {
  Coord origin;
  gadgets::VariableGeometry geometry;
  std::vector<int> true_wires, false_wires;  // wire indices in tap order
};

struct ClausePlacement {
  Coord origin;
  gadgets::ClauseGeometry geometry;
  std::vector<int> wires;  // wire index per slot
};

struct CompiledInstance {
  Board board;
  std::vector<Part> manifest;
  std::vector<VariablePlacement> variables;
  std::vector<ClausePlacement> clauses;
  std::vector<WirePlacement> wires;
  int crossovers = 0;
};

namespace detail {

inline Coord offset(const Coord& o, const Coord& c) { return {o.x + c.x, o.y + c.y, o.z + c.z}; }

}  // namespace detail

inline CompiledInstance compile_instance(const CnfFormula& f, const CompileOptions& opts = {}) {
  if (f.num_vars < 1) throw Error("formula has no variables");
  for (const auto& c : f.clauses) {
    if (c.empty()) throw Error("empty clause");
    if (static_cast<int>(c.size()) > opts.max_clause_width) throw Error("unsupported clause width");
    for (int lit : c)
      if (lit == 0 || std::abs(lit) > f.num_vars) throw Error("literal out of range");
  }

  CompiledInstance out;
  const int n = f.num_vars, m = static_cast<int>(f.clauses.size());

  // Wires in clause order; taps numbered per rail in that order.
  out.variables.resize(n);
  out.clauses.resize(m);
  for (int j = 0; j < m; ++j) {
    for (int slot = 0; slot < static_cast<int>(f.clauses[j].size()); ++slot) {
      const int lit = f.clauses[j][slot];
      WirePlacement w;
      w.variable = std::abs(lit);
      w.positive = lit > 0;
      w.clause = j;
      w.slot = slot;
      auto& rail = w.positive ? out.variables[w.variable - 1].true_wires : out.variables[w.variable - 1].false_wires;
      w.tap = static_cast<int>(rail.size());
      rail.push_back(static_cast<int>(out.wires.size()));
      out.clauses[j].wires.push_back(static_cast<int>(out.wires.size()));
      out.wires.push_back(std::move(w));
    }
  }

  // Vertical placement.
  constexpr int VX = 4;
  int y = 1;
  for (auto& v : out.variables) {
    v.geometry = gadgets::variable_geometry(static_cast<int>(v.true_wires.size()), static_cast<int>(v.false_wires.size()));
    v.origin = {VX, y, 0};
    y += v.geometry.height + 3;
  }
  const VariablePlacement& last = out.variables.back();
  const int b_row = last.origin.y + last.geometry.height;  // cell below the last b port
  for (auto& c : out.clauses) c.geometry = gadgets::clause_geometry(static_cast<int>(c.wires.size()));
  int cy = b_row + 4;  // top clause
  for (int j = m - 1; j >= 0; --j) {
    out.clauses[j].origin = {0, cy, 0};
    cy += out.clauses[j].geometry.height + 3;
  }
  const int wires = static_cast<int>(out.wires.size());
  const int channel0 = VX + 19;
  const int CX = wires ? channel0 + 2 * (wires - 1) + 4 : VX + 20;
  for (auto& c : out.clauses) c.origin.x = CX;

  auto target_row = [&](const WirePlacement& w) {
    const auto& c = out.clauses[w.clause];
    return c.origin.y + c.geometry.wire_corner[w.slot].y;
  };
  std::vector<int> order(wires);
  for (int i = 0; i < wires; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return target_row(out.wires[a]) > target_row(out.wires[b]); });
  std::vector<int> channel(wires);
  for (int r = 0; r < wires; ++r) channel[order[r]] = channel0 + 2 * r;

  int width = VX + 17;
  for (const auto& c : out.clauses) width = std::max(width, CX + c.geometry.width + 1);
  const int height = m ? out.clauses.front().origin.y + out.clauses.front().geometry.height + 1 : b_row + 3;

  Canvas cv(Dims{width, height, 3});

  std::vector<Canvas::Stamped> var_st, clause_st;
  for (int i = 0; i < n; ++i) {
    const auto& v = out.variables[i];
    var_st.push_back(cv.stamp(gadgets::variable(v.geometry.n_true, v.geometry.n_false), v.origin, 0,
                              "variable." + std::to_string(i + 1)));
  }
  for (int j = 0; j < m; ++j)
    clause_st.push_back(cv.stamp(gadgets::clause(out.clauses[j].geometry.k), out.clauses[j].origin, 0,
                                 "clause." + std::to_string(j + 1)));

  auto outside = [](const Port& p) { return p.cell.step(p.dir); };

  // s and the variable chain.
  const Coord a1 = var_st[0].ports.at("a").cell;
  const Coord s{1, a1.y, 0};
  {
    const int o = cv.new_owner();
    cv.route(o, {s, outside(var_st[0].ports.at("a"))}, "start");
    cv.connect(o, var_st[0].owner);
  }
  for (int i = 0; i + 1 < n; ++i) {
    const Coord b = outside(var_st[i].ports.at("b"));
    const Coord a = outside(var_st[i + 1].ports.at("a"));
    const int o = cv.new_owner();
    cv.route(o, {b, {b.x, b.y + 1, 0}, {VX - 2, b.y + 1, 0}, {VX - 2, a.y, 0}, a}, "chain");
    cv.connect(o, var_st[i].owner);
    cv.connect(o, var_st[i + 1].owner);
  }

  // Last variable into clause 1 (or straight to t), clause chain, t.
  Coord t;
  {
    const Coord b = outside(var_st[n - 1].ports.at("b"));
    const int o = cv.new_owner();
    cv.connect(o, var_st[n - 1].owner);
    if (m == 0) {
      t = {b.x, b.y + 1, 0};
      cv.route(o, {b, t}, "finish");
    } else {
      const Coord x = outside(clause_st[0].ports.at("x"));
      cv.route(o, {b, {b.x, x.y, 0}, x}, "chain");
      cv.connect(o, clause_st[0].owner);
    }
  }
  for (int j = 0; j + 1 < m; ++j) {
    const Coord yp = outside(clause_st[j].ports.at("y"));
    const Coord x = outside(clause_st[j + 1].ports.at("x"));
    const int o = cv.new_owner();
    cv.route(o, {yp, {yp.x, yp.y - 1, 0}, {CX - 2, yp.y - 1, 0}, {CX - 2, x.y, 0}, x}, "chain");
    cv.connect(o, clause_st[j].owner);
    cv.connect(o, clause_st[j + 1].owner);
  }
  if (m > 0) {
    const Coord yp = outside(clause_st[m - 1].ports.at("y"));
    t = {yp.x, yp.y - 1, 0};
    const int o = cv.new_owner();
    cv.route(o, {yp, t}, "finish");
    cv.connect(o, clause_st[m - 1].owner);
  }

  // Wires.
  for (int w = 0; w < wires; ++w) {
    auto& wp = out.wires[w];
    const auto& vs = var_st[wp.variable - 1];
    const auto& tap = vs.ports.at((wp.positive ? "t" : "f") + std::to_string(wp.tap + 1));
    const auto& port = clause_st[wp.clause].ports.at(std::string(1, static_cast<char>('a' + wp.slot)));
    const Coord from = outside(tap), to = outside(port);
    wp.route = {from, {channel[w], from.y, 0}, {channel[w], to.y, 0}, to};
    const int o = cv.new_owner();
    cv.route(o, wp.route, "wire." + std::to_string(w + 1));
    cv.connect(o, vs.owner);
    cv.connect(o, clause_st[wp.clause].owner);
  }

  out.board = cv.finish();
  out.board.set_start(s);
  out.board.set_goal(t);
  out.board.validate();
  out.crossovers = cv.crossovers();
  out.manifest = cv.parts();
  for (int w = 0; w < wires; ++w) {
    Coord lo = out.wires[w].route.front(), hi = lo;
    for (const Coord& c : out.wires[w].route) {
      lo = {std::min(lo.x, c.x), std::min(lo.y, c.y), 0};
      hi = {std::max(hi.x, c.x), std::max(hi.y, c.y), 0};
    }
    out.manifest.push_back({"wire." + std::to_string(w + 1), lo, hi});
  }
  return out;
}

inline Board compile(const CnfFormula& f, const CompileOptions& opts = {}) { return compile_instance(f, opts).board; }

inline std::string render_manifest(const std::vector<Part>& parts) {
  std::ostringstream os;
  for (const Part& p : parts)
    os << "gadget " << p.name << ' ' << p.lo.x << ' ' << p.lo.y << ' ' << p.lo.z << ' ' << p.hi.x << ' ' << p.hi.y
       << ' ' << p.hi.z << '\n';
  return os.str();
}

inline std::vector<Part> parse_manifest(std::string_view text) {
  std::vector<Part> out;
  const auto lines = detail::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::istringstream is(lines[n]);
    std::string kw;
    if (!(is >> kw)) continue;
    Part p;
    std::string extra;
    if (kw != "gadget" || !(is >> p.name >> p.lo.x >> p.lo.y >> p.lo.z >> p.hi.x >> p.hi.y >> p.hi.z) || (is >> extra))
      throw ParseError(static_cast<int>(n) + 1, 1, "expected 'gadget <name> x0 y0 z0 x1 y1 z1'");
    out.push_back(std::move(p));
  }
  return out;
}

namespace detail {

// Drives the robot through a list of push targets. When a step is blocked
// the intended route is appended anyway (ignoring blocks) and simulation
// stops, so replaying the result fails or ends short of the goal.
class WitnessDriver {
 public:
  explicit WitnessDriver(const Board& b) : board_(b), eng_(b), state_(initial_state(b)) {}

  void walk(const Coord& to) {
    if (stuck_) return;
    const CellIndex target = board_.index(to);
    eng_.mark(state_.blocks);
    if (auto w = eng_.walk(state_.robot, target)) {
      moves_.insert(moves_.end(), w->begin(), w->end());
      state_.robot = target;
      return;
    }
    stuck_ = true;
    const std::vector<CellIndex> none;
    eng_.mark(none);
    if (auto w = eng_.walk(state_.robot, target)) moves_.insert(moves_.end(), w->begin(), w->end());
  }

  void push(const Coord& stand, Direction d) {
    walk(stand);
    if (stuck_) return;
    moves_.push_back(d);
    if (auto next = try_apply_move(board_, state_, d))
      state_ = *std::move(next);
    else
      stuck_ = true;
  }

  MoveSequence take() { return std::move(moves_); }

 private:
  const Board& board_;
  Engine eng_;
  State state_;
  MoveSequence moves_;
  bool stuck_ = false;
};

}  // namespace detail

inline MoveSequence witness_path(const CompiledInstance& ci, const Assignment& a) {
  if (a.size() != ci.variables.size()) throw Error("assignment size does not match formula");
  detail::WitnessDriver drv(ci.board);
  for (std::size_t i = 0; i < ci.variables.size(); ++i) {
    const auto& v = ci.variables[i];
    const auto& g = v.geometry;
    if (a[i])
      drv.push(detail::offset(v.origin, g.fork_west), Direction::E);
    else
      drv.push(detail::offset(v.origin, g.fork_south), Direction::N);
    for (int w : a[i] ? v.true_wires : v.false_wires) {
      const auto& wp = ci.wires[w];
      const auto& c = ci.clauses[wp.clause];
      drv.push(detail::offset(c.origin, c.geometry.wire_corner[wp.slot]), Direction::S);
    }
    drv.push(detail::offset(v.origin, a[i] ? g.t_merge_entry() : g.f_merge_entry()), Direction::S);
  }
  for (const auto& c : ci.clauses) drv.push(detail::offset(c.origin, c.geometry.entry), Direction::E);
  drv.walk(ci.board.coord(*ci.board.goal()));
  return drv.take();
}

inline MoveSequence witness_path(const CnfFormula& f, const Assignment& a, const CompileOptions& opts = {}) {
  return witness_path(compile_instance(f, opts), a);
}

}  // namespace pushpush
