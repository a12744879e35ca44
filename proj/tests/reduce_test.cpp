#include <gtest/gtest.h>

#include <random>
#include <set>

#include "pushpush/reduce.hpp"

using namespace pushpush;

namespace {

const char* kUnsat3x4 = "c unsatisfiable\np cnf 3 4\n1 2 0\n1 -2 0\n-1 3 0\n-1 -3 0\n";
const char* kSat3x4 = "c satisfiable\np cnf 3 4\n1 2 0\n1 -2 0\n-1 2 3 0\n-1 -3 0\n";

bool replays_to_goal(const Board& b, const MoveSequence& m) {
  try {
    return is_goal(b, replay(b, m));
  } catch (const ReplayError&) {
    return false;
  }
}

std::vector<Assignment> all_assignments(int n) {
  std::vector<Assignment> out;
  for (int bits = 0; bits < (1 << n); ++bits) {
    Assignment a(n);
    for (int v = 0; v < n; ++v) a[v] = (bits >> v) & 1;
    out.push_back(a);
  }
  return out;
}

bool inside(const Part& p, const Coord& c) {
  return p.lo.x <= c.x && c.x <= p.hi.x && p.lo.y <= c.y && c.y <= p.hi.y && p.lo.z <= c.z && c.z <= p.hi.z;
}

int count_prefix(const std::vector<Part>& parts, const std::string& prefix) {
  return static_cast<int>(std::count_if(parts.begin(), parts.end(), [&](const Part& p) {
    if (!p.name.starts_with(prefix)) return false;
    return p.name.find('/', prefix.size()) == std::string::npos;
  }));
}

}  // namespace

TEST(Dimacs, ReferenceFormulas) {
  const CnfFormula e1 = parse_dimacs(kUnsat3x4);
  EXPECT_EQ(e1.num_vars, 3);
  EXPECT_EQ(e1.clauses, (std::vector<std::vector<int>>{{1, 2}, {1, -2}, {-1, 3}, {-1, -3}}));
  const CnfFormula e2 = parse_dimacs(kSat3x4);
  EXPECT_EQ(e2.clauses, (std::vector<std::vector<int>>{{1, 2}, {1, -2}, {-1, 2, 3}, {-1, -3}}));
  EXPECT_EQ(parse_dimacs(render_dimacs(e2)), e2);
}

TEST(Dimacs, Errors) {
  auto error_of = [](const std::string& text) -> std::string {
    try {
      parse_dimacs(text);
    } catch (const ParseError& e) {
      return e.message();
    }
    return "no error";
  };
  EXPECT_EQ(error_of("p cnf 2 2\n1 0\n2 0\n-1 0\n"), "clause count mismatch");
  EXPECT_EQ(error_of("1 2 0\n"), "missing header");
  EXPECT_EQ(error_of(""), "missing header");
  EXPECT_EQ(error_of("p cnf 2 1\n1 3 0\n"), "literal out of range");
  EXPECT_EQ(error_of("p cnf 2 1\n1 2\n"), "missing terminator");
  EXPECT_EQ(error_of("p cnf 2 1\n0\n"), "empty clause");
  EXPECT_EQ(error_of("p dnf 2 1\n1 0\n"), "malformed header");
}

TEST(Dimacs, MultiLineClauses) {
  const CnfFormula f = parse_dimacs("p cnf 3 2\n1 -2\n3 0 -1\n0\n");
  EXPECT_EQ(f.clauses, (std::vector<std::vector<int>>{{1, -2, 3}, {-1}}));
}

TEST(SatOracle, Examples) {
  EXPECT_FALSE(sat_oracle(parse_dimacs(kUnsat3x4)));
  const auto e2 = parse_dimacs(kSat3x4);
  const auto a = sat_oracle(e2);
  ASSERT_TRUE(a);
  EXPECT_TRUE(satisfies(e2, *a));
  EXPECT_TRUE(satisfies(e2, {true, true, false}));
  EXPECT_TRUE(sat_oracle(CnfFormula{2, {}}));
  EXPECT_THROW(sat_oracle(CnfFormula{21, {}}), Error);
}

TEST(Compile, Sat3x4Structure) {
  const CnfFormula f = parse_dimacs(kSat3x4);
  const CompiledInstance ci = compile_instance(f);
  EXPECT_EQ(count_prefix(ci.manifest, "variable."), 3);
  EXPECT_EQ(count_prefix(ci.manifest, "clause."), 4);
  EXPECT_EQ(count_prefix(ci.manifest, "wire."), 9);

  // Independent crossing count: wire segments against each other, plus
  // every F tap passing the T rail inside its variable.
  int crossings = 0;
  auto segments = [](const std::vector<Coord>& r) {
    std::vector<std::pair<Coord, Coord>> s;
    for (std::size_t i = 1; i < r.size(); ++i) s.emplace_back(std::min(r[i - 1], r[i]), std::max(r[i - 1], r[i]));
    return s;
  };
  for (const auto& w1 : ci.wires)
    for (const auto& w2 : ci.wires)
      for (auto [a1, b1] : segments(w1.route))
        for (auto [a2, b2] : segments(w2.route)) {
          const bool h = a1.y == b1.y && a1.x != b1.x, v = a2.x == b2.x && a2.y != b2.y;
          if (h && v && a1.x < a2.x && a2.x < b1.x && a2.y < a1.y && a1.y < b2.y) ++crossings;
        }
  for (const auto& v : ci.variables) crossings += v.geometry.n_false;
  const int crossover_parts = static_cast<int>(std::count_if(
      ci.manifest.begin(), ci.manifest.end(), [](const Part& p) { return p.name.find("crossover3d.") != std::string::npos; }));
  EXPECT_EQ(crossover_parts, crossings);
  EXPECT_GE(ci.crossovers, 1);
}

TEST(Compile, PlaneDiscipline) {
  const CompiledInstance ci = compile_instance(parse_dimacs(kSat3x4));
  const Board& b = ci.board;
  for (CellIndex blk : b.initial_blocks()) EXPECT_EQ(b.coord(blk).z, 0);
  std::vector<Part> xo;
  for (const auto& p : ci.manifest)
    if (p.name.find("crossover3d.") != std::string::npos) xo.push_back(p);
  for (CellIndex i = 0; i < b.cell_count(); ++i) {
    const Coord c = b.coord(i);
    if (c.z == 0 || b.is_wall(i)) continue;
    EXPECT_TRUE(std::any_of(xo.begin(), xo.end(), [&](const Part& p) { return inside(p, c); })) << c;
  }
}

TEST(Compile, Deterministic) {
  const CnfFormula f = parse_dimacs(kSat3x4);
  const CompiledInstance a = compile_instance(f), b = compile_instance(f);
  EXPECT_EQ(render_board(a.board), render_board(b.board));
  EXPECT_EQ(render_manifest(a.manifest), render_manifest(b.manifest));
}

TEST(Compile, ClauseWidth) {
  const CnfFormula f = parse_dimacs("p cnf 4 1\n1 2 3 4 0\n");
  try {
    compile(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "unsupported clause width");
  }
  const CompiledInstance ci = compile_instance(f, {4});
  EXPECT_TRUE(replays_to_goal(ci.board, witness_path(ci, {false, false, false, true})));
  EXPECT_FALSE(replays_to_goal(ci.board, witness_path(ci, {false, false, false, false})));
}

TEST(Compile, UnreferencedVariable) {
  const CnfFormula f = parse_dimacs("p cnf 2 1\n1 0\n");
  const CompiledInstance ci = compile_instance(f);
  EXPECT_EQ(ci.variables[1].geometry.n_true + ci.variables[1].geometry.n_false, 0);
  EXPECT_TRUE(replays_to_goal(ci.board, witness_path(ci, {true, false})));
  EXPECT_TRUE(replays_to_goal(ci.board, witness_path(ci, {true, true})));
  EXPECT_EQ(solve(ci.board).verdict, Verdict::Solved);
}

TEST(Compile, NoClauses) {
  const CompiledInstance ci = compile_instance(CnfFormula{1, {}});
  EXPECT_TRUE(replays_to_goal(ci.board, witness_path(ci, {false})));
  EXPECT_EQ(solve(ci.board).verdict, Verdict::Solved);
}

TEST(Witness, SingleClause) {
  const CnfFormula f = parse_dimacs("p cnf 1 1\n1 0\n");
  const CompiledInstance ci = compile_instance(f);
  EXPECT_TRUE(replays_to_goal(ci.board, witness_path(ci, {true})));
  EXPECT_EQ(solve(ci.board).verdict, Verdict::Solved);

  // x1 = F: block A clogs clause 1 and the replay fails inside it.
  const MoveSequence bad = witness_path(ci, {false});
  try {
    replay(ci.board, bad);
    FAIL() << "expected an illegal move";
  } catch (const ReplayError& e) {
    MoveSequence prefix(bad.begin(), bad.begin() + static_cast<std::ptrdiff_t>(e.index()));
    const Coord robot = ci.board.coord(replay(ci.board, prefix).robot);
    const auto clause = std::find_if(ci.manifest.begin(), ci.manifest.end(), [](const Part& p) { return p.name == "clause.1"; });
    ASSERT_NE(clause, ci.manifest.end());
    EXPECT_TRUE(inside(*clause, robot)) << robot;
  }
}

TEST(Witness, SmallestUnsat) {
  const CompiledInstance ci = compile_instance(parse_dimacs("p cnf 1 2\n1 0\n-1 0\n"));
  EXPECT_EQ(solve(ci.board).verdict, Verdict::Unsolvable);
  for (const auto& a : all_assignments(1)) EXPECT_FALSE(replays_to_goal(ci.board, witness_path(ci, a)));
}

TEST(Witness, Sat3x4) {
  const CnfFormula f = parse_dimacs(kSat3x4);
  const CompiledInstance ci = compile_instance(f);
  for (const auto& a : all_assignments(3))
    EXPECT_EQ(replays_to_goal(ci.board, witness_path(ci, a)), satisfies(f, a));
}

TEST(Witness, Unsat3x4AllFail) {
  const CnfFormula f = parse_dimacs(kUnsat3x4);
  const CompiledInstance ci = compile_instance(f);
  for (const auto& a : all_assignments(3)) {
    EXPECT_FALSE(satisfies(f, a));
    EXPECT_FALSE(replays_to_goal(ci.board, witness_path(ci, a)));
  }
}

TEST(Witness, SampledFormulas) {
  std::mt19937 rng(555);
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    std::uniform_int_distribution<int> nv(1, 3), nc(1, 4), width(1, 3);
    CnfFormula f{nv(rng), {}};
    const int m = nc(rng);
    for (int j = 0; j < m; ++j) {
      std::vector<int> c;
      const int k = width(rng);
      std::uniform_int_distribution<int> var(1, f.num_vars), sign(0, 1);
      for (int i = 0; i < k; ++i) c.push_back(var(rng) * (sign(rng) ? 1 : -1));
      f.clauses.push_back(c);
    }
    const CompiledInstance ci = compile_instance(f);
    for (const auto& a : all_assignments(f.num_vars)) {
      EXPECT_EQ(replays_to_goal(ci.board, witness_path(ci, a)), satisfies(f, a)) << render_dimacs(f);
      ++checked;
    }
  }
  EXPECT_GT(checked, 12);
}

TEST(LeakStop, SingleVariable) {
  // After the robot has merged out of the variable, no sequence of moves
  // brings it onto the rail it did not choose, or onto that rail's taps.
  const CnfFormula f = parse_dimacs("p cnf 1 1\n1 0\n");
  const CompiledInstance ci = compile_instance(f);
  const Board& b = ci.board;
  const auto& v = ci.variables[0];
  const auto& g = v.geometry;
  auto rail_cells = [&](bool t_side) {
    std::vector<CellIndex> out;
    auto add = [&](int x, int y) {
      const Coord c{v.origin.x + x, v.origin.y + y, 0};
      if (!b.is_wall(c)) out.push_back(b.index(c));
    };
    if (t_side) {
      for (int y = 1; y < g.t_junction_row; ++y) add(g.t_rail_x, y);
      for (int row : g.t_rows)
        for (int x = g.t_rail_x + 1; x < g.width; ++x) add(x, row);
    } else {
      for (int y = 5; y < g.f_junction_row; ++y) add(g.f_rail_x, y);
      for (int row : g.f_rows)
        for (int x = g.f_rail_x + 1; x < g.width; ++x) add(x, row);
    }
    return out;
  };

  for (const auto& a : all_assignments(1)) {
    const std::vector<CellIndex> rail = rail_cells(!a[0]);
    ASSERT_GT(rail.size(), 10u);
    const MoveSequence w = witness_path(ci, a);
    // Merged out once the robot has stood on the exit port b.
    const CellIndex exit = b.index({v.origin.x + g.merge_x, v.origin.y + g.height - 1, 0});
    bool merged = false;
    State s = initial_state(b);
    std::set<CanonicalState> done;
    int checked = 0;
    for (std::size_t i = 0; i <= w.size(); ++i) {
      if (i > 0) {
        auto n = try_apply_move(b, s, w[i - 1]);
        if (!n) break;
        s = *std::move(n);
      }
      merged |= s.robot == exit;
      if (!merged) continue;
      if (!done.insert(canonicalize(b, s)).second) continue;
      ExploreOptions opts;
      const StateGraph sg = explore(b, s, opts);
      ASSERT_TRUE(sg.exhausted);
      for (std::uint32_t n = 0; n < sg.size(); ++n) {
        const auto region = reachable_region(b, {sg.blocks(n).begin(), sg.blocks(n).end()}, sg.robot[n]);
        for (CellIndex c : rail) ASSERT_FALSE(std::binary_search(region.begin(), region.end(), c)) << b.coord(c);
      }
      ++checked;
    }
    EXPECT_GT(checked, 0);
  }
}

TEST(Manifest, RoundTrip) {
  const CompiledInstance ci = compile_instance(parse_dimacs(kUnsat3x4));
  EXPECT_EQ(parse_manifest(render_manifest(ci.manifest)), ci.manifest);
  EXPECT_THROW(parse_manifest("gadget x 1 2 3\n"), ParseError);
  EXPECT_TRUE(parse_manifest("").empty());
}
