#pragma once

// HTTP endpoints over a single Session. Requires cpp-httplib and
// nlohmann/json on the include path.
//
//   GET  /api/puzzle              {"puzzle": text, "manifest": text}
//   GET  /api/state               state object (below)
//   POST /api/move {"dir": "E"}   state, or 400 {"error": "illegal: wall"}
//   POST /api/undo                state
//   POST /api/reset               state
//   POST /api/load {"puzzle": text, "manifest"?: text}
//   GET  /api/solve?budget=N      {"verdict", "moves", "states"}; 409 if over budget
//   GET  /api/gadgets             {"gadgets": [names]}
//   POST /api/gadgets/{name}/load harnessed gadget board; 404 if unknown
//
// State object: {"format": "v1", "robot": [x,y,z], "blocks": [[x,y,z],...],
//                "moves": "EEN", "goal": bool}

#include <httplib.h>

#include <json.hpp>
#include <mutex>
#include <string>

#include "gadgets.hpp"
#include "reduce.hpp"
#include "session.hpp"

namespace pushpush {

inline nlohmann::json coord_json(const Coord& c) { return nlohmann::json::array({c.x, c.y, c.z}); }

inline nlohmann::json state_json(const Board& board, const State& s, const MoveSequence& history) {
  nlohmann::json blocks = nlohmann::json::array();
  for (CellIndex b : s.blocks) blocks.push_back(coord_json(board.coord(b)));
  return {{"format", "v1"},
          {"robot", coord_json(board.coord(s.robot))},
          {"blocks", std::move(blocks)},
          {"moves", to_string(history)},
          {"goal", is_goal(board, s)}};
}

class SessionService {
 public:
  explicit SessionService(Session session = {}) : session_(std::move(session)) {}

  void install(httplib::Server& srv) {
    srv.Get("/api/puzzle", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(mu_);
      reply(res, 200,
            {{"puzzle", render_board(session_.board())}, {"manifest", render_manifest(session_.manifest())}});
    });
    srv.Get("/api/state", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(mu_);
      reply(res, 200, state());
    });
    srv.Post("/api/move", [this](const httplib::Request& req, httplib::Response& res) {
      auto body = nlohmann::json::parse(req.body, nullptr, false);
      std::optional<Direction> d;
      if (body.is_object() && body.contains("dir") && body["dir"].is_string() && body["dir"].get<std::string>().size() == 1)
        d = direction_from_letter(body["dir"].get<std::string>()[0]);
      if (!d) return reply(res, 400, {{"error", "expected {\"dir\": one of N E S W U D}"}});
      std::lock_guard lock(mu_);
      if (auto why = session_.move(*d)) return reply(res, 400, {{"error", to_string(*why)}});
      reply(res, 200, state());
    });
    srv.Post("/api/undo", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(mu_);
      session_.undo();
      reply(res, 200, state());
    });
    srv.Post("/api/reset", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(mu_);
      session_.reset();
      reply(res, 200, state());
    });
    srv.Post("/api/load", [this](const httplib::Request& req, httplib::Response& res) {
      auto body = nlohmann::json::parse(req.body, nullptr, false);
      if (!body.is_object() || !body.contains("puzzle") || !body["puzzle"].is_string())
        return reply(res, 400, {{"error", "expected {\"puzzle\": text}"}});
      try {
        Board b = parse_board(body["puzzle"].get<std::string>());
        std::vector<Part> manifest;
        if (body.contains("manifest") && body["manifest"].is_string())
          manifest = parse_manifest(body["manifest"].get<std::string>());
        std::lock_guard lock(mu_);
        session_.load(std::move(b), std::move(manifest));
        reply(res, 200, state());
      } catch (const std::exception& e) {
        reply(res, 400, {{"error", e.what()}});
      }
    });
    srv.Get("/api/solve", [this](const httplib::Request& req, httplib::Response& res) {
      Budget budget;
      if (req.has_param("budget")) {
        try {
          budget.max_states = std::stoull(req.get_param_value("budget"));
        } catch (const std::exception&) {
          return reply(res, 400, {{"error", "malformed budget"}});
        }
      }
      // Solve from the current state on a snapshot; the session is not touched.
      std::optional<Board> snap;
      {
        std::lock_guard lock(mu_);
        snap = session_.board();
        Board& snapshot = *snap;
        const State& s = session_.state();
        for (CellIndex b : snapshot.initial_blocks()) snapshot.remove_block(snapshot.coord(b));
        for (CellIndex b : s.blocks) snapshot.add_block(snapshot.coord(b));
        snapshot.set_start(snapshot.coord(s.robot));
      }
      const SolveResult r = solve(*snap, budget);
      nlohmann::json out{{"format", "v1"}, {"verdict", to_string(r.verdict)}, {"states", r.states_explored}};
      if (r.moves) out["moves"] = to_string(*r.moves);
      reply(res, r.verdict == Verdict::BudgetExceeded ? 409 : 200, out);
    });
    srv.Get("/api/gadgets", [](const httplib::Request&, httplib::Response& res) {
      nlohmann::json names = nlohmann::json::array();
      for (const auto& g : builtin_gadgets()) names.push_back(g.gadget.name);
      reply(res, 200, {{"gadgets", std::move(names)}});
    });
    srv.Post("/api/gadgets/:name/load", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string name = req.path_params.at("name");
      std::optional<GadgetFile> g;
      try {
        if (name.find('/') == std::string::npos) g = find_gadget(name);
      } catch (const std::exception& e) {
        return reply(res, 400, {{"error", e.what()}});
      }
      if (!g) return reply(res, 404, {{"error", "unknown gadget '" + name + "'"}});
      Harnessed h = harness_probes(g->gadget);
      std::vector<Part> parts{{g->gadget.name,
                               h.offset,
                               {h.offset.x + g->gadget.footprint.dims().w - 1, h.offset.y + g->gadget.footprint.dims().h - 1,
                                g->gadget.footprint.dims().d - 1}}};
      std::lock_guard lock(mu_);
      session_.load(std::move(h.board), std::move(parts));
      reply(res, 200, state());
    });
  }

  Session snapshot() const {
    std::lock_guard lock(mu_);
    return session_;
  }

 private:
  static void reply(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  nlohmann::json state() const { return state_json(session_.board(), session_.state(), session_.history()); }

  mutable std::mutex mu_;
  Session session_;
};

}  // namespace pushpush
