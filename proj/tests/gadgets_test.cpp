#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>

#include "pushpush/gadgets.hpp"

using namespace pushpush;

namespace {

// Replays a counterexample on the harness it was produced for.
State replay_trace(const GadgetTemplate& g, const AssertionResult& r, Harnessed* out = nullptr) {
  Harnessed h = harness_probes(g, r.start_port);
  const State s = replay(h.board, *r.counterexample);
  if (out) *out = std::move(h);
  return s;
}

}  // namespace

TEST(Catalog, AllContractsPass) {
  for (const auto& e : catalog()) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = verify_gadget(e.gadget, e.contract, {1'000'000, 60});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_TRUE(report.all_pass()) << e.gadget.name;
    EXPECT_LE(report.states_explored, 1'000'000u) << e.gadget.name;
    EXPECT_LT(secs, 60.0) << e.gadget.name;
    for (const auto& r : report.results) EXPECT_EQ(r.verdict, AssertionVerdict::Pass) << e.gadget.name << ": " << r.assertion;
  }
}

TEST(Catalog, FamiliesPresent) {
  std::set<std::string> names;
  for (const auto& e : catalog()) names.insert(e.gadget.name);
  for (const char* n : {"one_way", "fork", "crossover3d", "variable_1_1", "variable_2_1", "clause1", "clause2",
                        "clause3", "clause3_prepushed4"})
    EXPECT_TRUE(names.count(n)) << n;
}

TEST(Mutants, FailWithReplayableTraces) {
  for (const auto& e : mutants()) {
    const auto report = verify_gadget(e.gadget, e.contract);
    EXPECT_FALSE(report.all_pass()) << e.gadget.name;
    int failures = 0;
    for (const auto& r : report.results) {
      if (r.verdict != AssertionVerdict::Fail) continue;
      ++failures;
      ASSERT_TRUE(r.counterexample) << r.assertion;
      if (r.assertion.starts_with("reach ")) continue;
      EXPECT_FALSE(r.counterexample->empty()) << r.assertion;
      Harnessed h;
      const State s = replay_trace(e.gadget, r, &h);
      // A violated noreach ends on the forbidden probe; nested assertions
      // end on the probe named last.
      const std::string last = r.assertion.substr(r.assertion.find_last_of(' ') + 1);
      if (h.probes.count(last)) EXPECT_EQ(s.robot, h.probes.at(last)) << e.gadget.name << ": " << r.assertion;
    }
    EXPECT_GT(failures, 0) << e.gadget.name;
  }
}

TEST(Mutants, OnePerFamily) {
  std::set<std::string> fams;
  for (const auto& e : mutants()) fams.insert(e.family);
  EXPECT_EQ(fams, (std::set<std::string>{"one_way", "fork", "crossover3d", "variable", "clause"}));
}

TEST(Verify, TapSetSemantics) {
  const auto g = gadgets::one_way();
  EXPECT_TRUE(verify_gadget(g, {tapset("x", {"y"})}).all_pass());
  const auto bad = verify_gadget(g, {tapset("x", {})});
  ASSERT_EQ(bad.results[0].verdict, AssertionVerdict::Fail);
  Harnessed h;
  const State s = replay_trace(g, bad.results[0], &h);
  EXPECT_EQ(s.robot, h.probes.at("y"));
  EXPECT_TRUE(verify_gadget(g, {tapset("y", {})}).all_pass());
}

TEST(Verify, ReachFailureHasEmptyTrace) {
  const auto r = verify_gadget(gadgets::one_way(), {reach("y", "x")});
  ASSERT_EQ(r.results[0].verdict, AssertionVerdict::Fail);
  ASSERT_TRUE(r.results[0].counterexample);
  EXPECT_TRUE(r.results[0].counterexample->empty());
}

TEST(Verify, UndecidedOnTinyBudget) {
  const auto r = verify_gadget(gadgets::clause(3), clause_contract(3, 0), {1, 60});
  int undecided = 0;
  for (const auto& a : r.results) {
    EXPECT_NE(a.verdict, AssertionVerdict::Fail) << a.assertion;
    undecided += a.verdict == AssertionVerdict::Undecided;
  }
  EXPECT_GT(undecided, 0);
  EXPECT_FALSE(r.all_pass());
}

TEST(Verify, UnknownPortThrows) {
  EXPECT_THROW(verify_gadget(gadgets::one_way(), {reach("x", "q")}), Error);
}

TEST(Rotation, ContractsSurviveQuarterTurns) {
  const std::vector<CatalogEntry> small{{"one_way", gadgets::one_way(), one_way_contract()},
                                        {"fork", gadgets::fork(), fork_contract()},
                                        {"crossover3d", gadgets::crossover3d(), crossover_contract()},
                                        {"clause", gadgets::clause(2), clause_contract(2, 0)},
                                        {"clause", gadgets::clause(2, 2), clause_contract(2, 2)}};
  for (const auto& e : small)
    for (int q = 1; q < 4; ++q)
      EXPECT_TRUE(verify_gadget(rotate(e.gadget, q), e.contract).all_pass()) << e.gadget.name << " q=" << q;
}

TEST(Rotation, FourTurnsIsIdentity) {
  const auto g = gadgets::fork();
  const auto r = rotate(g, 4);
  EXPECT_EQ(r.footprint, g.footprint);
  EXPECT_EQ(r.ports, g.ports);
  const auto q = rotate(g, 1);
  EXPECT_EQ(q.footprint.dims().w, g.footprint.dims().h);
  EXPECT_EQ(q.port("x").dir, Direction::N);
}

TEST(Contract, ParseRenderRoundTrip) {
  const std::string text =
      "reach a b\n"
      "noreach b a\n"
      "after a t1 tapset t1 a,b\n"
      "after a x after x y noreach y z\n"
      "tapset a -\n";
  const auto c = parse_contract(text);
  ASSERT_EQ(c.size(), 5u);
  EXPECT_EQ(render_contract(c), text);
  EXPECT_THROW(parse_contract("after a b reach c d\n"), ParseError);
  EXPECT_THROW(parse_contract("frobnicate a b\n"), ParseError);
  EXPECT_THROW(parse_contract("reach a\n"), ParseError);
}

TEST(GadgetFile, RoundTrip) {
  for (const auto& e : catalog(2)) {
    const std::string text = render_gadget(e.gadget, e.contract);
    const GadgetFile f = parse_gadget(text);
    EXPECT_EQ(f.gadget.name, e.gadget.name);
    EXPECT_EQ(f.gadget.footprint, e.gadget.footprint);
    EXPECT_EQ(f.gadget.ports, e.gadget.ports);
    EXPECT_EQ(render_contract(f.contract), render_contract(e.contract));
  }
}

TEST(GadgetFile, Errors) {
  const std::string grid = "gadget g\npushpush v1\nmode path\ndims 3 1 1\nlayer 0\n...\n";
  EXPECT_NO_THROW(parse_gadget(grid + "ports:\nport a 0 0 0 W\n"));
  EXPECT_THROW(parse_gadget(grid), ParseError);
  EXPECT_THROW(parse_gadget(grid + "ports:\nport a 5 0 0 W\n"), ParseError);
  EXPECT_THROW(parse_gadget(grid + "ports:\nport a 0 0 0 Q\n"), ParseError);
  EXPECT_THROW(parse_gadget("gadget g\npushpush v1\nmode path\ndims 3 1 1\nlayer 0\nS..\nports:\n"), ParseError);
}

TEST(GadgetFile, ShippedLibraryMatchesCatalog) {
  const std::filesystem::path dir = std::filesystem::path(PUSHPUSH_SOURCE_DIR) / "gadgets";
  std::map<std::string, GadgetFile> builtin;
  for (auto& g : builtin_gadgets()) builtin.emplace(g.gadget.name, g);
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".gadget") continue;
    ++files;
    const GadgetFile f = load_gadget_file(entry.path());
    ASSERT_TRUE(builtin.count(f.gadget.name)) << entry.path();
    EXPECT_EQ(render_gadget(f.gadget, f.contract),
              render_gadget(builtin.at(f.gadget.name).gadget, builtin.at(f.gadget.name).contract))
        << entry.path();
  }
  EXPECT_EQ(files, static_cast<int>(builtin.size()));
}

TEST(GadgetFile, LookupByDirectory) {
  const auto tmp = std::filesystem::temp_directory_path() / "pushpush_gadget_dir_test";
  std::filesystem::create_directories(tmp);
  {
    std::ofstream out(tmp / "corridor.gadget");
    out << "gadget corridor\npushpush v1\nmode path\ndims 3 1 1\nlayer 0\n...\n"
           "ports:\nport a 0 0 0 W\nport b 2 0 0 E\ncontract:\nreach a b\nreach b a\n";
  }
  ::setenv("PUSHPUSH_GADGET_DIR", tmp.c_str(), 1);
  auto g = find_gadget("corridor");
  ::unsetenv("PUSHPUSH_GADGET_DIR");
  ASSERT_TRUE(g);
  EXPECT_TRUE(verify_gadget(g->gadget, g->contract).all_pass());
  EXPECT_FALSE(find_gadget("no_such_gadget"));
  std::filesystem::remove_all(tmp);
}

TEST(Canvas, CrossingBecomesOverpass) {
  Canvas cv(Dims{9, 9, 3});
  const int a = cv.new_owner(), b = cv.new_owner();
  cv.route(a, {{0, 4, 0}, {8, 4, 0}}, "h");
  cv.route(b, {{4, 0, 0}, {4, 8, 0}}, "v");
  const Board board = cv.finish();
  EXPECT_EQ(cv.crossovers(), 1);
  EXPECT_FALSE(board.is_wall(Coord{4, 4, 0}));
  EXPECT_TRUE(board.is_wall(Coord{4, 3, 0}));
  EXPECT_TRUE(board.is_wall(Coord{4, 4, 1}));
  EXPECT_FALSE(board.is_wall(Coord{4, 4, 2}));
  // Walking each route end to end stays on its own corridor.
  EXPECT_TRUE(check_reachability(board, {}, board.index({4, 0, 0}), board.index({4, 8, 0}), false));
  EXPECT_TRUE(check_reachability(board, {}, board.index({0, 4, 0}), board.index({8, 4, 0}), false));
  EXPECT_FALSE(check_reachability(board, {}, board.index({0, 4, 0}), board.index({4, 0, 0}), false));
}

TEST(Canvas, Errors) {
  {
    Canvas cv(Dims{9, 9, 3});
    cv.route(cv.new_owner(), {{0, 4, 0}, {8, 4, 0}});
    cv.route(cv.new_owner(), {{4, 3, 0}, {4, 8, 0}}, "v");
    EXPECT_THROW(cv.finish(), Error);  // bend too close
  }
  {
    Canvas cv(Dims{9, 9, 1});
    cv.route(cv.new_owner(), {{0, 4, 0}, {8, 4, 0}});
    cv.route(cv.new_owner(), {{0, 5, 0}, {8, 5, 0}});
    EXPECT_THROW(cv.finish(), Error);  // touching corridors
  }
  {
    Canvas cv(Dims{9, 9, 1});
    cv.route(cv.new_owner(), {{0, 4, 0}, {8, 4, 0}});
    cv.route(cv.new_owner(), {{4, 0, 0}, {4, 8, 0}});
    EXPECT_THROW(cv.finish(), Error);  // needs depth 3
  }
}

TEST(Variable, PartsRecorded) {
  const auto v = gadgets::variable(2, 1);
  std::set<std::string> parts;
  for (const auto& p : v.parts) parts.insert(p.name);
  EXPECT_TRUE(parts.count("fork"));
  EXPECT_TRUE(parts.count("one_way.T"));
  EXPECT_TRUE(parts.count("one_way.F"));
  EXPECT_TRUE(parts.count("crossover3d.1"));
  // One crossing per F tap over the T rail.
  EXPECT_EQ(std::count_if(v.parts.begin(), v.parts.end(), [](const Part& p) { return p.name.starts_with("crossover3d"); }),
            1);
}

TEST(Variable, ZeroTaps) {
  EXPECT_TRUE(verify_gadget(gadgets::variable(0, 0), variable_contract(0, 0)).all_pass());
  EXPECT_TRUE(verify_gadget(gadgets::variable(0, 2), variable_contract(0, 2)).all_pass());
}

TEST(Clause, WideClauseVerifies) {
  EXPECT_TRUE(verify_gadget(gadgets::clause(4), clause_contract(4, 0)).all_pass());
  EXPECT_TRUE(verify_gadget(gadgets::clause(4, 8), clause_contract(4, 8)).all_pass());
}
