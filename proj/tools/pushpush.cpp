// pushpush: command-line front end.
//
// Exit codes: 0 success, 1 negative result (unsolvable, failed check or
// contract), 2 unreadable or malformed input, 3 compile error, 4 budget
// exceeded.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "pushpush/gadgets.hpp"
#include "pushpush/reduce.hpp"
#include "pushpush/serve.hpp"

namespace {

using namespace pushpush;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path);
}

Board load_board(const std::string& path) {
  try {
    return parse_board(read_file(path));
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

CnfFormula load_cnf(const std::string& path) {
  try {
    return parse_dimacs(read_file(path));
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

// Wider clause gadgets are not in the shipped catalog; check every variant
// once before the compiler uses it.
bool clause_width_verified(int k) {
  static std::mutex mu;
  static std::map<int, bool> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(k); it != cache.end()) return it->second;
  bool ok = verify_gadget(gadgets::clause(k), clause_contract(k, 0)).all_pass();
  for (int i = 0; ok && i < k; ++i)
    ok = verify_gadget(gadgets::clause(k, 1u << i), clause_contract(k, 1u << i)).all_pass();
  return cache[k] = ok;
}

struct Options {
  std::string input, output, moves, manifest, assign, format = "v1";
  std::size_t budget_states = Budget{}.max_states;
  double budget_seconds = Budget{}.max_seconds;
  int max_clause_width = 3;
  int port = 8080;
};

int cmd_compile(const Options& o) {
  const CnfFormula f = load_cnf(o.input);
  if (o.max_clause_width > 3) {
    int widest = 0;
    for (const auto& c : f.clauses) widest = std::max(widest, static_cast<int>(c.size()));
    for (int k = 4; k <= std::min(widest, o.max_clause_width); ++k)
      if (!clause_width_verified(k)) {
        std::cerr << "error: clause gadget of width " << k << " failed verification\n";
        return 3;
      }
  }
  CompiledInstance ci;
  try {
    ci = compile_instance(f, {o.max_clause_width});
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  write_file(o.output, render_board(ci.board));
  write_file(o.output + ".manifest", render_manifest(ci.manifest));
  return 0;
}

int cmd_solve(const Options& o) {
  const Board b = load_board(o.input);
  const SolveResult r = solve(b, {o.budget_states, o.budget_seconds});
  std::cout << "format=v1\n" << to_string(r.verdict);
  if (r.moves) std::cout << ' ' << to_string(*r.moves);
  std::cout << "\nstates " << r.states_explored << '\n';
  switch (r.verdict) {
    case Verdict::Solved: return 0;
    case Verdict::Unsolvable: return 1;
    case Verdict::BudgetExceeded: return 4;
  }
  return 1;
}

int cmd_check(const Options& o) {
  const Board b = load_board(o.input);
  MoveSequence moves;
  try {
    moves = parse_moves(read_file(o.moves));
  } catch (const ParseError& e) {
    throw InputError(o.moves + ": " + e.what());
  }
  std::cout << "format=v1\n";
  try {
    const State s = replay(b, moves);
    if (!is_goal(b, s)) {
      std::cout << "FAIL not at goal after " << moves.size() << " moves\n";
      return 1;
    }
  } catch (const ReplayError& e) {
    std::cout << "FAIL " << e.what() << '\n';
    return 1;
  }
  std::cout << "OK " << moves.size() << " moves\n";
  return 0;
}

int cmd_verify(const Options& o) {
  std::optional<GadgetFile> g;
  try {
    g = find_gadget(o.input);
  } catch (const ParseError& e) {
    throw InputError(o.input + ": " + e.what());
  }
  if (!g) {
    std::cerr << "error: unknown gadget '" << o.input << "'\n";
    return 2;
  }
  if (g->contract.empty()) {
    std::cerr << "error: gadget '" << g->gadget.name << "' has no contract\n";
    return 2;
  }
  const auto report = verify_gadget(g->gadget, g->contract, {o.budget_states, o.budget_seconds});
  std::cout << "format=v1\ngadget " << report.gadget << '\n';
  for (const auto& r : report.results) {
    std::cout << to_string(r.verdict) << '\t' << r.assertion << '\n';
    if (r.counterexample)
      std::cout << "\ttrace from " << r.start_port << ": "
                << (r.counterexample->empty() ? "-" : to_string(*r.counterexample)) << '\n';
  }
  std::cout << "states " << report.states_explored << '\n';
  return report.all_pass() ? 0 : 1;
}

int cmd_witness(const Options& o) {
  const CnfFormula f = load_cnf(o.input);
  Assignment a;
  if (!o.assign.empty()) {
    try {
      a = parse_assignment(o.assign, f.num_vars);
    } catch (const Error& e) {
      throw InputError(e.what());
    }
  } else if (auto sat = sat_oracle(f)) {
    a = *sat;
  } else {
    std::cerr << "error: formula is unsatisfiable; pass --assign\n";
    return 1;
  }
  try {
    std::cout << to_string(witness_path(f, a, {o.max_clause_width})) << '\n';
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

int cmd_render(const Options& o) {
  const Board b = load_board(o.input);
  std::vector<Part> parts;
  std::string mpath = o.manifest;
  if (mpath.empty() && std::filesystem::exists(o.input + ".manifest")) mpath = o.input + ".manifest";
  if (!mpath.empty()) {
    try {
      parts = parse_manifest(read_file(mpath));
    } catch (const ParseError& e) {
      throw InputError(mpath + ": " + e.what());
    }
  }
  const Dims d = b.dims();
  std::cout << "format=v1\ndims " << d.w << ' ' << d.h << ' ' << d.d << '\n';
  for (int z = 0; z < d.d; ++z) {
    std::cout << "layer " << z << '\n';
    for (int y = 0; y < d.h; ++y) {
      std::string row;
      for (int x = 0; x < d.w; ++x) {
        const Coord c{x, y, z};
        const CellIndex i = b.index(c);
        if (b.start() == i) row += 'S';
        else if (b.goal() == i) row += 'T';
        else if (b.has_block(i)) row += b.is_storage(i) ? '*' : 'B';
        else if (b.is_storage(i)) row += 'O';
        else row += b.is_wall(i) ? '#' : '.';
      }
      std::cout << row << '\n';
    }
    for (const Part& p : parts)
      if (p.lo.z <= z && z <= p.hi.z)
        std::cout << "  " << p.name << " [" << p.lo.x << ".." << p.hi.x << "] x [" << p.lo.y << ".." << p.hi.y
                  << "]\n";
  }
  return 0;
}

int cmd_serve(const Options& o) {
  Session s;
  if (!o.input.empty()) {
    std::vector<Part> parts;
    if (std::filesystem::exists(o.input + ".manifest")) parts = parse_manifest(read_file(o.input + ".manifest"));
    s.load(load_board(o.input), std::move(parts));
  }
  SessionService svc(std::move(s));
  httplib::Server srv;
  svc.install(srv);
  std::cerr << "listening on http://127.0.0.1:" << o.port << '\n';
  return srv.listen("127.0.0.1", o.port) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PushPush puzzle engine, solver, gadget verifier and SAT reduction"};
  app.require_subcommand(1);
  Options o;
  auto budget = [&](CLI::App* c) {
    c->add_option("--budget-states", o.budget_states, "Canonical state limit");
    c->add_option("--budget-seconds", o.budget_seconds, "Wall-clock limit");
  };
  auto format = [&](CLI::App* c) { c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"v1"})); };

  auto* compile = app.add_subcommand("compile", "Compile DIMACS CNF to a puzzle and manifest");
  compile->add_option("input", o.input, "DIMACS file")->required();
  compile->add_option("output", o.output, "Puzzle file to write")->required();
  compile->add_option("--max-clause-width", o.max_clause_width, "Widest clause accepted")->check(CLI::Range(1, 64));

  auto* solve_cmd = app.add_subcommand("solve", "Exhaustively solve a puzzle");
  solve_cmd->add_option("puzzle", o.input)->required();
  budget(solve_cmd);
  format(solve_cmd);

  auto* check = app.add_subcommand("check", "Replay a move sequence");
  check->add_option("puzzle", o.input)->required();
  check->add_option("moves", o.moves)->required();
  format(check);

  auto* verify = app.add_subcommand("verify-gadget", "Verify a gadget against its contract");
  verify->add_option("gadget", o.input, "Built-in name, file, or name in $PUSHPUSH_GADGET_DIR")->required();
  budget(verify);
  format(verify);

  auto* witness = app.add_subcommand("witness", "Print the witness path for an assignment");
  witness->add_option("input", o.input, "DIMACS file")->required();
  witness->add_option("--assign", o.assign, "Literals, e.g. \"1 2 -3\"; default: first satisfying");
  witness->add_option("--max-clause-width", o.max_clause_width)->check(CLI::Range(1, 64));

  auto* render = app.add_subcommand("render", "Print a puzzle layer by layer with gadget overlays");
  render->add_option("puzzle", o.input)->required();
  render->add_option("--manifest", o.manifest, "Manifest (default: <puzzle>.manifest)");
  format(render);

  auto* serve = app.add_subcommand("serve", "Serve the session API over HTTP");
  serve->add_option("puzzle", o.input);
  serve->add_option("--port", o.port)->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*compile) return cmd_compile(o);
    if (*solve_cmd) return cmd_solve(o);
    if (*check) return cmd_check(o);
    if (*verify) return cmd_verify(o);
    if (*witness) return cmd_witness(o);
    if (*render) return cmd_render(o);
    if (*serve) return cmd_serve(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
