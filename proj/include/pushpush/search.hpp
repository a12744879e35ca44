#pragma once

// Canonicalized breadth-first exploration of the PushPush state space.
//
// A canonical state is the block set plus the least cell (in (z, y, x)
// order) of the robot's walk-reachable region. Search proceeds in
// macro-moves: one push, preceded by any walk inside the current region.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "core.hpp"

namespace pushpush {

struct CanonicalState {
  std::vector<CellIndex> blocks;  // sorted
  CellIndex robot_region = kNoCell;

  friend bool operator==(const CanonicalState&, const CanonicalState&) = default;
  friend auto operator<=>(const CanonicalState&, const CanonicalState&) = default;
};

struct PushDescriptor {
  CellIndex block = kNoCell;  // cell the pushed block occupied
  Direction dir = Direction::N;
  CellIndex destination = kNoCell;

  friend bool operator==(const PushDescriptor&, const PushDescriptor&) = default;
};

struct Budget {
  std::size_t max_states = 10'000'000;
  double max_seconds = 300.0;
};

enum class Verdict : std::uint8_t { Solved, Unsolvable, BudgetExceeded };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Solved: return "SOLVED";
    case Verdict::Unsolvable: return "UNSOLVABLE";
    case Verdict::BudgetExceeded: return "BUDGET_EXCEEDED";
  }
  return "?";
}

struct SolveResult {
  Verdict verdict = Verdict::BudgetExceeded;
  std::optional<MoveSequence> moves;
  std::size_t states_explored = 0;
  std::size_t pushes = 0;
};

// Explored portion of the canonical state graph. Node 0 is the start.
// Edges are stored in CSR form and only when requested.
struct StateGraph {
  std::size_t block_count = 0;
  std::vector<CellIndex> pool;  // block_count entries per node
  std::vector<CellIndex> robot;
  std::vector<std::uint32_t> parent;
  std::vector<PushDescriptor> via;          // push that created the node
  std::vector<std::uint64_t> watched_mask;  // bit i: watched cell i lies in the node's region
  std::vector<std::uint32_t> edge_begin;    // size() + 1 entries once complete
  std::vector<std::uint32_t> edge_target;
  std::vector<PushDescriptor> edge_push;
  bool exhausted = false;  // frontier emptied within budget

  std::size_t size() const { return robot.size(); }
  std::span<const CellIndex> blocks(std::size_t node) const {
    return {pool.data() + node * block_count, block_count};
  }
  CanonicalState state(std::size_t node) const {
    auto b = blocks(node);
    return {{b.begin(), b.end()}, robot[node]};
  }
  std::vector<std::uint32_t> path_to(std::uint32_t node) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t n = node; n != 0; n = parent[n]) out.push_back(n);
    out.push_back(0);
    return {out.rbegin(), out.rend()};
  }
};

namespace detail {

// Reusable scratch space for flood fills and occupancy tests over one board.
class Engine {
 public:
  explicit Engine(const Board& board)
      : board_(board), n_(board.cell_count()), nbr_(n_ * 6, kNoCell), occ_(n_, 0), seen_(n_, 0) {
    for (CellIndex i = 0; i < n_; ++i) {
      if (board.is_wall(i)) continue;
      for (Direction d : kAllDirections) {
        const CellIndex j = board.neighbor(i, d);
        if (j != kNoCell && !board.is_wall(j)) nbr_[i * 6 + static_cast<int>(d)] = j;
      }
    }
  }

  const Board& board() const { return board_; }

  // Open neighbor (not wall, on board) or kNoCell.
  CellIndex step(CellIndex i, Direction d) const { return nbr_[i * 6 + static_cast<int>(d)]; }

  void mark(std::span<const CellIndex> blocks) {
    ++occ_stamp_;
    if (occ_stamp_ == 0) {
      std::fill(occ_.begin(), occ_.end(), 0);
      occ_stamp_ = 1;
    }
    for (CellIndex b : blocks) occ_[b] = occ_stamp_;
  }
  void set_occupied(CellIndex i, bool on) { occ_[i] = on ? occ_stamp_ : 0; }
  bool occupied(CellIndex i) const { return occ_[i] == occ_stamp_; }
  bool free(CellIndex i) const { return i != kNoCell && occ_[i] != occ_stamp_; }

  // Flood fill over free cells from `from` given the current marks. The
  // region is left in region(); returns the least index reached.
  CellIndex flood(CellIndex from) {
    next_seen();
    region_.clear();
    region_.push_back(from);
    seen_[from] = seen_stamp_;
    CellIndex least = from;
    for (std::size_t head = 0; head < region_.size(); ++head) {
      const CellIndex c = region_[head];
      const CellIndex* nb = &nbr_[c * 6];
      for (int k = 0; k < 6; ++k) {
        const CellIndex j = nb[k];
        if (j == kNoCell || occ_[j] == occ_stamp_ || seen_[j] == seen_stamp_) continue;
        seen_[j] = seen_stamp_;
        region_.push_back(j);
        if (j < least) least = j;
      }
    }
    return least;
  }
  bool in_region(CellIndex i) const { return seen_[i] == seen_stamp_; }
  const std::vector<CellIndex>& region() const { return region_; }

  // Lexicographically least (N<E<S<W<U<D) shortest walk from `from` to `to`
  // over free cells. Returns nullopt when unreachable.
  std::optional<MoveSequence> walk(CellIndex from, CellIndex to) {
    if (from == to) return MoveSequence{};
    dist_.assign(n_, kNoCell);
    std::vector<CellIndex> queue{to};
    dist_[to] = 0;
    for (std::size_t head = 0; head < queue.size() && dist_[from] == kNoCell; ++head) {
      const CellIndex c = queue[head];
      for (int k = 0; k < 6; ++k) {
        const CellIndex j = nbr_[c * 6 + k];
        if (j == kNoCell || occupied(j) || dist_[j] != kNoCell) continue;
        dist_[j] = dist_[c] + 1;
        queue.push_back(j);
      }
    }
    if (dist_[from] == kNoCell) return std::nullopt;
    MoveSequence moves;
    for (CellIndex c = from; c != to;) {
      for (Direction d : kAllDirections) {
        const CellIndex j = step(c, d);
        if (j != kNoCell && !occupied(j) && dist_[j] + 1 == dist_[c]) {
          moves.push_back(d);
          c = j;
          break;
        }
      }
    }
    return moves;
  }

 private:
  void next_seen() {
    ++seen_stamp_;
    if (seen_stamp_ == 0) {
      std::fill(seen_.begin(), seen_.end(), 0);
      seen_stamp_ = 1;
    }
  }

  const Board& board_;
  std::size_t n_;
  std::vector<CellIndex> nbr_;
  std::vector<std::uint32_t> occ_;
  std::vector<std::uint32_t> seen_;
  std::uint32_t occ_stamp_ = 0;
  std::uint32_t seen_stamp_ = 0;
  std::vector<CellIndex> region_;
  std::vector<CellIndex> dist_;
};

// Open-addressing set of node ids; equality is decided on the full key.
class NodeTable {
 public:
  explicit NodeTable(const StateGraph& g) : g_(g), slots_(1024, kEmpty) {}

  static std::uint64_t hash(std::span<const CellIndex> blocks, CellIndex robot) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ robot;
    for (CellIndex b : blocks) {
      h ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdULL;
    }
    return h ^ (h >> 33);
  }

  // Returns the existing node equal to `node`, or inserts and returns `node`.
  std::uint32_t insert(std::uint32_t node) {
    if ((count_ + 1) * 2 > slots_.size()) grow();
    const std::uint64_t h = hash(g_.blocks(node), g_.robot[node]);
    for (std::size_t s = h & (slots_.size() - 1);; s = (s + 1) & (slots_.size() - 1)) {
      if (slots_[s] == kEmpty) {
        slots_[s] = node;
        ++count_;
        return node;
      }
      if (same(slots_[s], node)) return slots_[s];
    }
  }

 private:
  static constexpr std::uint32_t kEmpty = static_cast<std::uint32_t>(-1);

  bool same(std::uint32_t a, std::uint32_t b) const {
    if (g_.robot[a] != g_.robot[b]) return false;
    auto x = g_.blocks(a), y = g_.blocks(b);
    return std::equal(x.begin(), x.end(), y.begin());
  }
  void grow() {
    std::vector<std::uint32_t> old(slots_.size() * 2, kEmpty);
    old.swap(slots_);
    for (std::uint32_t node : old) {
      if (node == kEmpty) continue;
      const std::uint64_t h = hash(g_.blocks(node), g_.robot[node]);
      std::size_t s = h & (slots_.size() - 1);
      while (slots_[s] != kEmpty) s = (s + 1) & (slots_.size() - 1);
      slots_[s] = node;
    }
  }

  const StateGraph& g_;
  std::vector<std::uint32_t> slots_;
  std::size_t count_ = 0;
};

}  // namespace detail

struct ExploreOptions {
  Budget budget{};
  std::vector<CellIndex> watched;  // at most 64 cells
  bool keep_edges = false;
  // Called on each expanded node with the engine holding that node's region;
  // returning true stops the exploration.
  std::function<bool(std::uint32_t node, const detail::Engine&)> stop;
};

// Breadth-first exploration of canonical states from `start`. The stop
// callback sees nodes in BFS order, so the first hit has minimal depth.
inline StateGraph explore(const Board& board, const State& start, const ExploreOptions& opts,
                          std::optional<std::uint32_t>* stopped_at = nullptr) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  if (opts.watched.size() > 64) throw Error("at most 64 watched cells");

  detail::Engine eng(board);
  StateGraph g;
  g.block_count = start.blocks.size();
  detail::NodeTable table(g);

  eng.mark(start.blocks);
  const CellIndex start_min = eng.flood(start.robot);
  g.pool.insert(g.pool.end(), start.blocks.begin(), start.blocks.end());
  g.robot.push_back(start_min);
  g.parent.push_back(0);
  g.via.push_back({});
  table.insert(0);
  if (opts.keep_edges) g.edge_begin.push_back(0);

  std::vector<CellIndex> scratch(g.block_count);
  for (std::uint32_t head = 0; head < g.size(); ++head) {
    if ((head & 1023) == 1023 &&
        std::chrono::duration<double>(clock::now() - t0).count() > opts.budget.max_seconds)
      return g;

    auto blocks = g.blocks(head);
    eng.mark(blocks);
    eng.flood(g.robot[head]);
    if (!opts.watched.empty()) {
      std::uint64_t mask = 0;
      for (std::size_t w = 0; w < opts.watched.size(); ++w)
        if (eng.in_region(opts.watched[w])) mask |= std::uint64_t{1} << w;
      g.watched_mask.push_back(mask);
    }
    if (opts.stop && opts.stop(head, eng)) {
      if (stopped_at) *stopped_at = head;
      return g;
    }

    // Candidate pushes, in block then direction order. The region must be
    // captured before the successor floods overwrite it.
    struct Candidate {
      std::size_t slot;
      Direction dir;
    };
    std::vector<Candidate> candidates;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const CellIndex b = blocks[k];
      for (Direction d : kAllDirections) {
        const CellIndex stand = eng.step(b, opposite(d));
        const CellIndex beyond = eng.step(b, d);
        if (stand == kNoCell || beyond == kNoCell) continue;
        if (!eng.in_region(stand) || eng.occupied(beyond)) continue;
        candidates.push_back({k, d});
      }
    }

    for (const Candidate& c : candidates) {
      blocks = g.blocks(head);  // pool may have been reallocated
      const CellIndex b = blocks[c.slot];
      CellIndex dest = eng.step(b, c.dir);
      for (CellIndex nx = eng.step(dest, c.dir); eng.free(nx); nx = eng.step(dest, c.dir)) dest = nx;

      std::copy(blocks.begin(), blocks.end(), scratch.begin());
      scratch.erase(scratch.begin() + static_cast<std::ptrdiff_t>(c.slot));
      scratch.insert(std::lower_bound(scratch.begin(), scratch.end(), dest), dest);

      eng.set_occupied(b, false);
      eng.set_occupied(dest, true);
      const CellIndex least = eng.flood(b);
      eng.set_occupied(dest, false);
      eng.set_occupied(b, true);

      const auto candidate = static_cast<std::uint32_t>(g.size());
      g.pool.insert(g.pool.end(), scratch.begin(), scratch.end());
      g.robot.push_back(least);
      const std::uint32_t found = table.insert(candidate);
      const PushDescriptor push{b, c.dir, dest};
      if (found != candidate) {
        g.pool.resize(g.pool.size() - g.block_count);
        g.robot.pop_back();
      } else {
        g.parent.push_back(head);
        g.via.push_back(push);
      }
      if (opts.keep_edges) {
        g.edge_target.push_back(found);
        g.edge_push.push_back(push);
      }
      if (g.size() > opts.budget.max_states) return g;
    }
    if (opts.keep_edges) g.edge_begin.push_back(static_cast<std::uint32_t>(g.edge_target.size()));
  }
  g.exhausted = true;
  return g;
}

// Cells reachable from `robot` by walking only; sorted by index.
inline std::vector<CellIndex> reachable_region(const Board& board, const std::vector<CellIndex>& blocks,
                                               CellIndex robot) {
  detail::Engine eng(board);
  eng.mark(blocks);
  eng.flood(robot);
  std::vector<CellIndex> out = eng.region();
  std::sort(out.begin(), out.end());
  return out;
}

inline CanonicalState canonicalize(const Board& board, const State& state) {
  detail::Engine eng(board);
  eng.mark(state.blocks);
  return {state.blocks, eng.flood(state.robot)};
}

inline CanonicalState canonicalize(const Board& board, const CanonicalState& cs) {
  return canonicalize(board, State{cs.blocks, cs.robot_region});
}

// One successor per legal (block, direction) push whose standing cell the
// robot can walk to. Order: blocks by index, then N<E<S<W<U<D.
inline std::vector<std::pair<CanonicalState, PushDescriptor>> successors(const Board& board,
                                                                         const CanonicalState& cs) {
  detail::Engine eng(board);
  eng.mark(cs.blocks);
  eng.flood(cs.robot_region);
  std::vector<std::pair<CanonicalState, PushDescriptor>> out;
  std::vector<std::pair<CellIndex, Direction>> pushes;
  for (CellIndex b : cs.blocks)
    for (Direction d : kAllDirections) {
      const CellIndex stand = eng.step(b, opposite(d));
      const CellIndex beyond = eng.step(b, d);
      if (stand != kNoCell && beyond != kNoCell && eng.in_region(stand) && !eng.occupied(beyond))
        pushes.emplace_back(b, d);
    }
  for (auto [b, d] : pushes) {
    const CellIndex dest = slide_destination(board, cs.blocks, b, d);
    std::vector<CellIndex> next = cs.blocks;
    next.erase(std::lower_bound(next.begin(), next.end(), b));
    next.insert(std::lower_bound(next.begin(), next.end(), dest), dest);
    out.emplace_back(canonicalize(board, State{next, b}), PushDescriptor{b, d, dest});
  }
  return out;
}

// Expands a chain of pushes into walk-level moves, starting from `robot`.
// Each push is preceded by the least shortest walk to its standing cell.
inline std::optional<MoveSequence> expand_pushes(const Board& board, const State& from,
                                                 std::span<const PushDescriptor> pushes,
                                                 std::optional<CellIndex> finish = std::nullopt) {
  detail::Engine eng(board);
  State s = from;
  MoveSequence out;
  for (const PushDescriptor& p : pushes) {
    eng.mark(s.blocks);
    const CellIndex stand = eng.step(p.block, opposite(p.dir));
    if (stand == kNoCell) return std::nullopt;
    auto w = eng.walk(s.robot, stand);
    if (!w) return std::nullopt;
    out.insert(out.end(), w->begin(), w->end());
    s.robot = stand;
    auto next = try_apply_move(board, s, p.dir);
    if (!next) return std::nullopt;
    out.push_back(p.dir);
    s = *std::move(next);
  }
  if (finish) {
    eng.mark(s.blocks);
    auto w = eng.walk(s.robot, *finish);
    if (!w) return std::nullopt;
    out.insert(out.end(), w->begin(), w->end());
  }
  return out;
}

inline SolveResult solve(const Board& board, const Budget& budget = {}) {
  ExploreOptions opts;
  opts.budget = budget;
  const std::vector<CellIndex> storage = board.storage_cells();
  const std::optional<CellIndex> goal = board.goal();
  const bool path_mode = board.mode() == Mode::Path;
  opts.stop = [&](std::uint32_t, const detail::Engine& eng) {
    if (path_mode) return goal && eng.in_region(*goal);
    return std::all_of(storage.begin(), storage.end(), [&](CellIndex s) { return eng.occupied(s); });
  };

  std::optional<std::uint32_t> hit;
  const State start = initial_state(board);
  StateGraph g = explore(board, start, opts, &hit);

  SolveResult result;
  result.states_explored = g.size();
  if (hit) {
    std::vector<PushDescriptor> pushes;
    for (std::uint32_t n : g.path_to(*hit))
      if (n != 0) pushes.push_back(g.via[n]);
    result.verdict = Verdict::Solved;
    result.pushes = pushes.size();
    result.moves = expand_pushes(board, start, pushes, path_mode ? goal : std::nullopt);
    if (!result.moves) throw Error("internal: solution expansion failed");
  } else {
    result.verdict = g.exhausted ? Verdict::Unsolvable : Verdict::BudgetExceeded;
  }
  return result;
}

inline bool check_reachability(const Board& board, const std::vector<CellIndex>& blocks, CellIndex from,
                               CellIndex to, bool allow_pushes, const Budget& budget = {}) {
  if (!allow_pushes) {
    detail::Engine eng(board);
    eng.mark(blocks);
    eng.flood(from);
    return eng.in_region(to);
  }
  ExploreOptions opts;
  opts.budget = budget;
  opts.stop = [to](std::uint32_t, const detail::Engine& eng) { return eng.in_region(to); };
  std::optional<std::uint32_t> hit;
  explore(board, State{blocks, from}, opts, &hit);
  return hit.has_value();
}

}  // namespace pushpush
