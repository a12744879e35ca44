#pragma once

// Interactive play session: a board, the current state and the move history.
// Undo truncates the history and replays it from the initial state, since
// max-slide pushes have no inverse.

#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "layout.hpp"

namespace pushpush {

class Session {
 public:
  Session() : Session(default_board()) {}
  explicit Session(Board board, std::vector<Part> manifest = {}) { load(std::move(board), std::move(manifest)); }

  void load(Board board, std::vector<Part> manifest = {}) {
    board.validate();
    board_ = std::move(board);
    manifest_ = std::move(manifest);
    reset();
  }

  // Applies one move; on an illegal move the session is unchanged and the
  // reason is returned.
  std::optional<MoveError> move(Direction d) {
    MoveError why{};
    auto next = try_apply_move(board_, state_, d, &why);
    if (!next) return why;
    state_ = *std::move(next);
    history_.push_back(d);
    return std::nullopt;
  }

  bool undo() {
    if (history_.empty()) return false;
    history_.pop_back();
    state_ = replay(board_, history_);
    return true;
  }

  void reset() {
    history_.clear();
    state_ = initial_state(board_);
  }

  const Board& board() const { return board_; }
  const std::vector<Part>& manifest() const { return manifest_; }
  const State& state() const { return state_; }
  const MoveSequence& history() const { return history_; }
  bool at_goal() const { return is_goal(board_, state_); }

 private:
  static Board default_board() { return parse_board("pushpush v1\nmode path\ndims 3 1 1\nlayer 0\nS.T\n"); }

  Board board_{Dims{1, 1, 1}, Mode::Path};
  std::vector<Part> manifest_;
  State state_;
  MoveSequence history_;
};

}  // namespace pushpush
