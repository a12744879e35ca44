#pragma once

// Board geometry, move semantics and the puzzle file format.
//
// Cells are addressed either by Coord or by a dense CellIndex
// (z * H * W + y * W + x). Index order coincides with (z, y, x)
// lexicographic order, which the solver relies on for canonical forms.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pushpush {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

enum class MoveError : std::uint8_t { Wall, ImmovableBlock };

inline const char* to_string(MoveError e) {
  return e == MoveError::Wall ? "illegal: wall" : "illegal: immovable block";
}

class IllegalMove : public Error {
 public:
  explicit IllegalMove(MoveError why) : Error(to_string(why)), why_(why) {}
  MoveError why() const noexcept { return why_; }

 private:
  MoveError why_;
};

// Raised by replay(); carries the zero-based index of the offending move.
class ReplayError : public Error {
 public:
  ReplayError(std::size_t index, const std::string& reason)
      : Error("move " + std::to_string(index) + ": " + reason), index_(index), reason_(reason) {}

  std::size_t index() const noexcept { return index_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t index_;
  std::string reason_;
};

// ---------------------------------------------------------------------------
// Direction
// ---------------------------------------------------------------------------

// Enumerator order is the canonical enumeration order N < E < S < W < U < D.
enum class Direction : std::uint8_t { N, E, S, W, U, D };

inline constexpr std::array<Direction, 6> kAllDirections{Direction::N, Direction::E, Direction::S,
                                                         Direction::W, Direction::U, Direction::D};

struct Delta {
  int dx, dy, dz;
};

constexpr Delta delta(Direction d) {
  switch (d) {
    case Direction::N: return {0, -1, 0};
    case Direction::E: return {1, 0, 0};
    case Direction::S: return {0, 1, 0};
    case Direction::W: return {-1, 0, 0};
    case Direction::U: return {0, 0, 1};
    case Direction::D: return {0, 0, -1};
  }
  return {0, 0, 0};
}

constexpr Direction opposite(Direction d) {
  switch (d) {
    case Direction::N: return Direction::S;
    case Direction::E: return Direction::W;
    case Direction::S: return Direction::N;
    case Direction::W: return Direction::E;
    case Direction::U: return Direction::D;
    case Direction::D: return Direction::U;
  }
  return d;
}

constexpr char letter(Direction d) {
  constexpr std::array<char, 6> letters{'N', 'E', 'S', 'W', 'U', 'D'};
  return letters[static_cast<std::size_t>(d)];
}

constexpr std::optional<Direction> direction_from_letter(char c) {
  switch (c) {
    case 'N': return Direction::N;
    case 'E': return Direction::E;
    case 'S': return Direction::S;
    case 'W': return Direction::W;
    case 'U': return Direction::U;
    case 'D': return Direction::D;
    default: return std::nullopt;
  }
}

// Quarter turn about the z axis, clockwise as drawn (y grows downward).
constexpr Direction rotate_cw(Direction d) {
  switch (d) {
    case Direction::N: return Direction::E;
    case Direction::E: return Direction::S;
    case Direction::S: return Direction::W;
    case Direction::W: return Direction::N;
    default: return d;
  }
}

// ---------------------------------------------------------------------------
// Coordinates
// ---------------------------------------------------------------------------

struct Coord {
  int x = 0, y = 0, z = 0;

  friend constexpr bool operator==(const Coord&, const Coord&) = default;
  // (z, y, x) lexicographic, matching CellIndex order.
  friend constexpr std::strong_ordering operator<=>(const Coord& a, const Coord& b) {
    if (auto c = a.z <=> b.z; c != 0) return c;
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }

  constexpr Coord step(Direction d, int n = 1) const {
    const Delta v = delta(d);
    return {x + n * v.dx, y + n * v.dy, z + n * v.dz};
  }
};

inline std::ostream& operator<<(std::ostream& os, const Coord& c) {
  return os << '(' << c.x << ',' << c.y << ',' << c.z << ')';
}

using CellIndex = std::uint32_t;
inline constexpr CellIndex kNoCell = static_cast<CellIndex>(-1);

struct Dims {
  int w = 1, h = 1, d = 1;
  friend constexpr bool operator==(const Dims&, const Dims&) = default;

  constexpr std::size_t cells() const {
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(d);
  }
  constexpr bool contains(const Coord& c) const {
    return c.x >= 0 && c.y >= 0 && c.z >= 0 && c.x < w && c.y < h && c.z < d;
  }
};

enum class Mode : std::uint8_t { Path, Storage };

// ---------------------------------------------------------------------------
// Board
// ---------------------------------------------------------------------------

// Static puzzle geometry. Blocks are kept sorted by index; they are
// indistinguishable, so the vector is a set.
class Board {
 public:
  Board() = default;
  Board(Dims dims, Mode mode) : dims_(dims), mode_(mode), walls_(dims.cells(), 0), storage_(dims.cells(), 0) {
    if (dims.w <= 0 || dims.h <= 0 || dims.d <= 0) throw Error("dimensions must be positive");
  }

  const Dims& dims() const noexcept { return dims_; }
  Mode mode() const noexcept { return mode_; }
  std::size_t cell_count() const noexcept { return walls_.size(); }

  CellIndex index(const Coord& c) const {
    return static_cast<CellIndex>((static_cast<std::size_t>(c.z) * dims_.h + c.y) * dims_.w + c.x);
  }
  Coord coord(CellIndex i) const {
    const int plane = dims_.w * dims_.h;
    const int r = static_cast<int>(i) % plane;
    return {r % dims_.w, r / dims_.w, static_cast<int>(i) / plane};
  }
  bool contains(const Coord& c) const { return dims_.contains(c); }

  // Neighbor in direction d, or kNoCell when it would leave the board.
  CellIndex neighbor(CellIndex i, Direction d) const {
    const int plane = dims_.w * dims_.h;
    const int r = static_cast<int>(i) % plane;
    const int x = r % dims_.w, y = r / dims_.w, z = static_cast<int>(i) / plane;
    switch (d) {
      case Direction::N: return y > 0 ? i - dims_.w : kNoCell;
      case Direction::S: return y + 1 < dims_.h ? i + dims_.w : kNoCell;
      case Direction::W: return x > 0 ? i - 1 : kNoCell;
      case Direction::E: return x + 1 < dims_.w ? i + 1 : kNoCell;
      case Direction::D: return z > 0 ? i - plane : kNoCell;
      case Direction::U: return z + 1 < dims_.d ? i + plane : kNoCell;
    }
    return kNoCell;
  }

  bool is_wall(CellIndex i) const { return walls_[i] != 0; }
  bool is_wall(const Coord& c) const { return !contains(c) || walls_[index(c)] != 0; }
  bool is_storage(CellIndex i) const { return storage_[i] != 0; }

  void set_wall(const Coord& c, bool wall = true) { walls_.at(index(checked(c))) = wall ? 1 : 0; }
  void set_storage(const Coord& c, bool on = true) { storage_.at(index(checked(c))) = on ? 1 : 0; }
  void set_start(const Coord& c) { start_ = index(checked(c)); }
  void set_goal(const Coord& c) { goal_ = index(checked(c)); }
  void clear_goal() { goal_.reset(); }
  void add_block(const Coord& c) {
    const CellIndex i = index(checked(c));
    auto it = std::lower_bound(blocks_.begin(), blocks_.end(), i);
    if (it == blocks_.end() || *it != i) blocks_.insert(it, i);
  }
  void remove_block(const Coord& c) {
    const CellIndex i = index(checked(c));
    auto it = std::lower_bound(blocks_.begin(), blocks_.end(), i);
    if (it != blocks_.end() && *it == i) blocks_.erase(it);
  }
  void set_mode(Mode m) { mode_ = m; }

  CellIndex start() const noexcept { return start_; }
  std::optional<CellIndex> goal() const noexcept { return goal_; }
  const std::vector<CellIndex>& initial_blocks() const noexcept { return blocks_; }
  bool has_block(CellIndex i) const { return std::binary_search(blocks_.begin(), blocks_.end(), i); }

  std::vector<CellIndex> storage_cells() const {
    std::vector<CellIndex> out;
    for (CellIndex i = 0; i < storage_.size(); ++i)
      if (storage_[i]) out.push_back(i);
    return out;
  }

  std::size_t open_cell_count() const {
    return static_cast<std::size_t>(std::count(walls_.begin(), walls_.end(), 0));
  }

  // Throws Error describing the first violated invariant.
  void validate() const {
    if (start_ == kNoCell || start_ >= cell_count()) throw Error("missing start");
    if (is_wall(start_)) throw Error("start is a wall");
    if (has_block(start_)) throw Error("start holds a block");
    if (is_storage(start_)) throw Error("start on a storage cell");
    for (CellIndex b : blocks_)
      if (is_wall(b)) throw Error("block on a wall");
    for (CellIndex i = 0; i < storage_.size(); ++i)
      if (storage_[i] && walls_[i]) throw Error("storage cell on a wall");
    if (mode_ == Mode::Path) {
      if (!goal_) throw Error("path mode requires a goal");
      if (is_wall(*goal_)) throw Error("goal is a wall");
      if (has_block(*goal_)) throw Error("goal holds a block");
      if (is_storage(*goal_)) throw Error("goal on a storage cell");
    } else {
      if (goal_) throw Error("storage mode forbids a goal");
      if (storage_cells().empty()) throw Error("storage mode requires storage cells");
    }
  }

  friend bool operator==(const Board&, const Board&) = default;

 private:
  Coord checked(const Coord& c) const {
    if (!contains(c)) {
      std::ostringstream os;
      os << "coordinate " << c << " out of range";
      throw Error(os.str());
    }
    return c;
  }

  Dims dims_{};
  Mode mode_ = Mode::Path;
  std::vector<std::uint8_t> walls_;
  std::vector<std::uint8_t> storage_;
  CellIndex start_ = kNoCell;
  std::optional<CellIndex> goal_;
  std::vector<CellIndex> blocks_;
};

// ---------------------------------------------------------------------------
// State and moves
// ---------------------------------------------------------------------------

struct State {
  std::vector<CellIndex> blocks;  // sorted
  CellIndex robot = kNoCell;

  bool has_block(CellIndex i) const { return std::binary_search(blocks.begin(), blocks.end(), i); }
  friend bool operator==(const State&, const State&) = default;
  friend auto operator<=>(const State&, const State&) = default;
};

inline State initial_state(const Board& board) { return {board.initial_blocks(), board.start()}; }

// Free means: on the board, not a wall, no block.
inline bool is_free(const Board& board, const std::vector<CellIndex>& blocks, CellIndex i) {
  return i != kNoCell && !board.is_wall(i) && !std::binary_search(blocks.begin(), blocks.end(), i);
}

// Last cell reached by a block at `from` sliding in direction `dir`.
// Throws Error("immovable") when the adjacent cell is not free.
inline CellIndex slide_destination(const Board& board, const std::vector<CellIndex>& blocks, CellIndex from,
                                   Direction dir) {
  CellIndex cur = from;
  for (CellIndex next = board.neighbor(cur, dir); is_free(board, blocks, next); next = board.neighbor(cur, dir))
    cur = next;
  if (cur == from) throw Error("immovable");
  return cur;
}

inline Coord slide_destination(const Board& board, const std::vector<CellIndex>& blocks, const Coord& from,
                               Direction dir) {
  if (!board.contains(from)) throw Error("immovable");
  return board.coord(slide_destination(board, blocks, board.index(from), dir));
}

// Non-throwing move. On success returns the successor; on failure sets *why.
inline std::optional<State> try_apply_move(const Board& board, const State& state, Direction dir,
                                           MoveError* why = nullptr) {
  const CellIndex target = board.neighbor(state.robot, dir);
  if (target == kNoCell || board.is_wall(target)) {
    if (why) *why = MoveError::Wall;
    return std::nullopt;
  }
  auto it = std::lower_bound(state.blocks.begin(), state.blocks.end(), target);
  if (it == state.blocks.end() || *it != target) return State{state.blocks, target};

  const CellIndex beyond = board.neighbor(target, dir);
  if (!is_free(board, state.blocks, beyond)) {
    if (why) *why = MoveError::ImmovableBlock;
    return std::nullopt;
  }
  CellIndex dest = beyond;
  for (CellIndex next = board.neighbor(dest, dir); is_free(board, state.blocks, next);
       next = board.neighbor(dest, dir))
    dest = next;

  State out;
  out.robot = target;
  out.blocks = state.blocks;
  out.blocks.erase(out.blocks.begin() + (it - state.blocks.begin()));
  out.blocks.insert(std::lower_bound(out.blocks.begin(), out.blocks.end(), dest), dest);
  return out;
}

inline State apply_move(const Board& board, const State& state, Direction dir) {
  MoveError why{};
  if (auto next = try_apply_move(board, state, dir, &why)) return *std::move(next);
  throw IllegalMove(why);
}

inline bool is_goal(const Board& board, const State& state) {
  if (board.mode() == Mode::Path) return board.goal() && state.robot == *board.goal();
  for (CellIndex s : board.storage_cells())
    if (!state.has_block(s)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Move sequences
// ---------------------------------------------------------------------------

using MoveSequence = std::vector<Direction>;

inline std::string to_string(const MoveSequence& moves) {
  std::string out;
  out.reserve(moves.size());
  for (Direction d : moves) out.push_back(letter(d));
  return out;
}

// Parses letters over {N,E,S,W,U,D}; surrounding whitespace is ignored.
inline MoveSequence parse_moves(std::string_view text) {
  MoveSequence out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return out;
  const auto last = text.find_last_not_of(" \t\r\n");
  for (std::size_t i = first; i <= last; ++i) {
    auto d = direction_from_letter(text[i]);
    if (!d) throw ParseError(1, static_cast<int>(i) + 1, std::string("unknown move letter '") + text[i] + "'");
    out.push_back(*d);
  }
  return out;
}

inline State replay(const Board& board, const MoveSequence& moves) {
  State s = initial_state(board);
  for (std::size_t i = 0; i < moves.size(); ++i) {
    MoveError why{};
    auto next = try_apply_move(board, s, moves[i], &why);
    if (!next) throw ReplayError(i, to_string(why));
    s = *std::move(next);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Puzzle file format
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.emplace_back(text.substr(pos));
      break;
    }
    std::string line(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return lines;
}

// Header lines may carry a trailing "# comment".
inline std::vector<std::string> header_tokens(const std::string& line) {
  std::string body = line;
  if (auto hash = body.find(" #"); hash != std::string::npos) body.resize(hash);
  std::istringstream is(body);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

inline int parse_positive(const std::string& tok, int line, int col) {
  int v = 0;
  try {
    std::size_t used = 0;
    v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
  } catch (const std::exception&) {
    throw ParseError(line, col, "malformed header: expected integer, got '" + tok + "'");
  }
  if (v <= 0) throw ParseError(line, col, "malformed header: dimensions must be positive");
  return v;
}

// Result of parsing the grid part of a puzzle file; `rest` is the index of
// the first line after the last layer (used by the gadget library format).
struct GridParse {
  Board board;
  int starts = 0;
  int goals = 0;
  std::size_t rest = 0;
};

inline GridParse parse_grid(const std::vector<std::string>& lines, bool allow_missing_endpoints) {
  std::size_t li = 0;
  auto next_nonblank = [&]() {
    while (li < lines.size() && header_tokens(lines[li]).empty()) ++li;
  };
  auto expect_line = [&](const char* what) -> std::vector<std::string> {
    next_nonblank();
    if (li >= lines.size()) throw ParseError(static_cast<int>(li) + 1, 1, std::string("malformed header: missing ") + what);
    return header_tokens(lines[li]);
  };

  auto magic = expect_line("'pushpush v1'");
  if (magic.size() != 2 || magic[0] != "pushpush" || magic[1] != "v1")
    throw ParseError(static_cast<int>(li) + 1, 1, "malformed header: expected 'pushpush v1'");
  ++li;

  auto mode_line = expect_line("mode");
  if (mode_line.size() != 2 || mode_line[0] != "mode" || (mode_line[1] != "path" && mode_line[1] != "storage"))
    throw ParseError(static_cast<int>(li) + 1, 1, "malformed header: expected 'mode path' or 'mode storage'");
  const Mode mode = mode_line[1] == "path" ? Mode::Path : Mode::Storage;
  ++li;

  auto dims_line = expect_line("dims");
  if (dims_line.size() != 4 || dims_line[0] != "dims")
    throw ParseError(static_cast<int>(li) + 1, 1, "malformed header: expected 'dims W H D'");
  const int lno = static_cast<int>(li) + 1;
  Dims dims{parse_positive(dims_line[1], lno, 6), parse_positive(dims_line[2], lno, 6),
            parse_positive(dims_line[3], lno, 6)};
  ++li;

  GridParse out{Board(dims, mode)};
  Board& b = out.board;
  std::optional<Coord> start, goal;

  for (int z = 0; z < dims.d; ++z) {
    auto layer = expect_line("layer stanza");
    if (layer.size() != 2 || layer[0] != "layer" || layer[1] != std::to_string(z))
      throw ParseError(static_cast<int>(li) + 1, 1, "malformed header: expected 'layer " + std::to_string(z) + "'");
    ++li;
    for (int y = 0; y < dims.h; ++y, ++li) {
      if (li >= lines.size())
        throw ParseError(static_cast<int>(li) + 1, 1, "dimension mismatch: expected " + std::to_string(dims.h) + " rows");
      const std::string& row = lines[li];
      const int line_no = static_cast<int>(li) + 1;
      if (static_cast<int>(row.size()) != dims.w)
        throw ParseError(line_no, std::min<int>(static_cast<int>(row.size()), dims.w) + 1,
                         "dimension mismatch: expected " + std::to_string(dims.w) + " columns, got " +
                             std::to_string(row.size()));
      for (int x = 0; x < dims.w; ++x) {
        const Coord c{x, y, z};
        const int col = x + 1;
        switch (row[x]) {
          case '#': b.set_wall(c); break;
          case '.': break;
          case 'B': b.add_block(c); break;
          case 'O': b.set_storage(c); break;
          case '*':
            b.set_storage(c);
            b.add_block(c);
            break;
          case 'S':
            if (start) throw ParseError(line_no, col, "duplicate start");
            start = c;
            ++out.starts;
            break;
          case 'T':
            if (mode != Mode::Path) throw ParseError(line_no, col, "goal glyph in storage mode");
            if (goal) throw ParseError(line_no, col, "duplicate goal");
            goal = c;
            ++out.goals;
            break;
          default:
            throw ParseError(line_no, col, std::string("unknown glyph '") + row[x] + "'");
        }
      }
    }
  }
  if (start) b.set_start(*start);
  if (goal) b.set_goal(*goal);
  if (!allow_missing_endpoints) {
    const int end_line = static_cast<int>(li) + 1;
    if (!start) throw ParseError(end_line, 1, "missing start");
    if (mode == Mode::Path && !goal) throw ParseError(end_line, 1, "missing goal");
    try {
      b.validate();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(end_line, 1, std::string("invariant violation: ") + e.what());
    }
  }
  out.rest = li;
  return out;
}

inline char glyph(const Board& b, CellIndex i) {
  if (b.is_wall(i)) return '#';
  if (i == b.start()) return 'S';
  if (b.goal() && i == *b.goal()) return 'T';
  const bool block = b.has_block(i);
  if (b.is_storage(i)) return block ? '*' : 'O';
  return block ? 'B' : '.';
}

inline void render_grid(std::ostringstream& os, const Board& b) {
  os << "pushpush v1\n";
  os << "mode " << (b.mode() == Mode::Path ? "path" : "storage") << '\n';
  os << "dims " << b.dims().w << ' ' << b.dims().h << ' ' << b.dims().d << '\n';
  for (int z = 0; z < b.dims().d; ++z) {
    os << "layer " << z << '\n';
    for (int y = 0; y < b.dims().h; ++y) {
      for (int x = 0; x < b.dims().w; ++x) os << glyph(b, b.index({x, y, z}));
      os << '\n';
    }
  }
}

}  // namespace detail

inline Board parse_board(std::string_view text) {
  const auto lines = detail::split_lines(text);
  auto grid = detail::parse_grid(lines, false);
  for (std::size_t i = grid.rest; i < lines.size(); ++i)
    if (!detail::header_tokens(lines[i]).empty())
      throw ParseError(static_cast<int>(i) + 1, 1, "dimension mismatch: unexpected trailing content");
  return std::move(grid.board);
}

inline std::string render_board(const Board& board) {
  std::ostringstream os;
  detail::render_grid(os, board);
  return os.str();
}

}  // namespace pushpush
