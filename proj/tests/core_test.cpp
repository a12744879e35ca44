#include <gtest/gtest.h>

#include "pushpush/core.hpp"

using namespace pushpush;

namespace {

Board board2d(const std::vector<std::string>& rows, const char* mode = "path") {
  std::string text = "pushpush v1\nmode " + std::string(mode) + "\ndims " + std::to_string(rows[0].size()) + " " +
                     std::to_string(rows.size()) + " 1\nlayer 0\n";
  for (const auto& r : rows) text += r + "\n";
  return parse_board(text);
}

CellIndex at(const Board& b, int x, int y, int z = 0) { return b.index({x, y, z}); }

}  // namespace

TEST(Parse, SimpleCorridor) {
  const Board b = board2d({"#####", "#S.T#", "#####"});
  EXPECT_EQ(b.dims().w, 5);
  EXPECT_EQ(b.dims().h, 3);
  EXPECT_EQ(b.dims().d, 1);
  EXPECT_EQ(b.start(), at(b, 1, 1));
  ASSERT_TRUE(b.goal());
  EXPECT_EQ(*b.goal(), at(b, 3, 1));
  EXPECT_TRUE(b.initial_blocks().empty());
  EXPECT_TRUE(b.is_wall(at(b, 0, 1)));
  EXPECT_FALSE(b.is_wall(at(b, 2, 1)));
}

TEST(Parse, Errors) {
  auto error_of = [](const std::string& text) -> std::string {
    try {
      parse_board(text);
    } catch (const ParseError& e) {
      return e.message();
    }
    return "no error";
  };
  const std::string head = "pushpush v1\nmode path\ndims 5 3 1\nlayer 0\n";
  EXPECT_EQ(error_of(head + "#####\n#SST#\n#####\n"), "duplicate start");
  EXPECT_EQ(error_of(head + "#####\n#STT#\n#####\n"), "duplicate goal");
  EXPECT_EQ(error_of(head + "#####\n#S?T#\n#####\n"), "unknown glyph '?'");
  EXPECT_EQ(error_of(head + "#####\n#S..#\n#####\n"), "missing goal");
  EXPECT_EQ(error_of(head + "#####\n#..T#\n#####\n"), "missing start");
  EXPECT_NE(error_of(head + "#####\n#S.T##\n#####\n").find("dimension mismatch"), std::string::npos);
  EXPECT_NE(error_of(head + "#####\n#S.T#\n").find("dimension mismatch"), std::string::npos);
  EXPECT_NE(error_of("pushpush v2\nmode path\ndims 1 1 1\nlayer 0\nS\n").find("malformed header"), std::string::npos);
  EXPECT_EQ(error_of("pushpush v1\nmode storage\ndims 3 1 1\nlayer 0\nSOT\n"), "goal glyph in storage mode");
}

TEST(Parse, ErrorPositions) {
  try {
    parse_board("pushpush v1\nmode path\ndims 5 3 1\nlayer 0\n#####\n#S?T#\n#####\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6);
    EXPECT_EQ(e.column(), 3);
  }
}

TEST(Parse, TwoLayerRoundTrip) {
  const std::string text =
      "pushpush v1\n"
      "mode path\n"
      "dims 4 3 2\n"
      "layer 0\n"
      "####\n"
      "#SB#\n"
      "####\n"
      "layer 1\n"
      "####\n"
      "#.T#\n"
      "####\n";
  const Board b = parse_board(text);
  EXPECT_EQ(b.dims().d, 2);
  EXPECT_TRUE(b.is_wall(at(b, 1, 1, 1)) == false);
  EXPECT_EQ(*b.goal(), at(b, 2, 1, 1));
  EXPECT_EQ(render_board(b), text);
  EXPECT_EQ(parse_board(render_board(b)), b);
}

TEST(Parse, StorageGlyphs) {
  const Board b = board2d({"#######", "#SBO*.#", "#######"}, "storage");
  EXPECT_EQ(b.mode(), Mode::Storage);
  EXPECT_EQ(b.storage_cells(), (std::vector<CellIndex>{at(b, 3, 1), at(b, 4, 1)}));
  EXPECT_EQ(b.initial_blocks(), (std::vector<CellIndex>{at(b, 2, 1), at(b, 4, 1)}));
  EXPECT_EQ(parse_board(render_board(b)), b);
}

TEST(Parse, CommentsAndTrailingContent) {
  const Board b = parse_board("pushpush v1 # header\nmode path\ndims 3 1 1\nlayer 0\nS.T\n");
  EXPECT_EQ(b.dims().w, 3);
  EXPECT_THROW(parse_board("pushpush v1\nmode path\ndims 3 1 1\nlayer 0\nS.T\nextra\n"), ParseError);
}

TEST(Slide, CorridorExamples) {
  Board b = board2d({"#########", "#S.B...T#", "#########"});
  const auto blocks = b.initial_blocks();
  EXPECT_EQ(slide_destination(b, blocks, Coord{3, 1, 0}, Direction::E), (Coord{7, 1, 0}));
  b.add_block({5, 1, 0});
  EXPECT_EQ(slide_destination(b, b.initial_blocks(), at(b, 3, 1), Direction::E), at(b, 4, 1));
  try {
    slide_destination(b, b.initial_blocks(), Coord{3, 1, 0}, Direction::N);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "immovable");
  }
}

TEST(Move, PushAdvancesRobotOneCell) {
  const Board b = board2d({"#########", "#S.B...T#", "#########"});
  State s = apply_move(b, initial_state(b), Direction::E);
  EXPECT_EQ(s.robot, at(b, 2, 1));
  s = apply_move(b, s, Direction::E);
  EXPECT_EQ(s.robot, at(b, 3, 1));
  EXPECT_EQ(s.blocks, (std::vector<CellIndex>{at(b, 7, 1)}));
}

TEST(Move, Illegal) {
  const Board b = board2d({"####", "#SB#", "#T##", "####"});
  MoveError why{};
  EXPECT_FALSE(try_apply_move(b, initial_state(b), Direction::E, &why));
  EXPECT_EQ(to_string(why), "illegal: immovable block");
  EXPECT_FALSE(try_apply_move(b, initial_state(b), Direction::N, &why));
  EXPECT_EQ(to_string(why), "illegal: wall");
  EXPECT_FALSE(try_apply_move(b, initial_state(b), Direction::U, &why));
  EXPECT_EQ(to_string(why), "illegal: wall");
  try {
    apply_move(b, initial_state(b), Direction::E);
    FAIL();
  } catch (const IllegalMove& e) {
    EXPECT_STREQ(e.what(), "illegal: immovable block");
  }
}

TEST(Move, OutOfRangeIsWall) {
  const Board b = parse_board("pushpush v1\nmode path\ndims 3 1 1\nlayer 0\nSBT\n");
  MoveError why{};
  EXPECT_FALSE(try_apply_move(b, initial_state(b), Direction::W, &why));
  EXPECT_EQ(why, MoveError::Wall);
  // The block slides onto t and stops at the edge.
  const State s = apply_move(b, initial_state(b), Direction::E);
  EXPECT_EQ(s.blocks, (std::vector<CellIndex>{2}));
  EXPECT_FALSE(try_apply_move(b, s, Direction::E));
}

TEST(Move, WalkLeavesBlocks) {
  const Board b = board2d({"#####", "#S.B#", "#..T#", "#####"});
  const State s0 = initial_state(b);
  const State s1 = apply_move(b, s0, Direction::S);
  EXPECT_EQ(s1.blocks, s0.blocks);
  EXPECT_EQ(s1.robot, at(b, 1, 2));
}

TEST(Move, VerticalPush) {
  const Board b = parse_board(
      "pushpush v1\nmode path\ndims 1 1 4\n"
      "layer 0\nS\nlayer 1\nB\nlayer 2\n.\nlayer 3\nT\n");
  const State s = apply_move(b, initial_state(b), Direction::U);
  EXPECT_EQ(s.robot, b.index({0, 0, 1}));
  EXPECT_EQ(s.blocks, (std::vector<CellIndex>{b.index({0, 0, 3})}));
  EXPECT_FALSE(is_goal(b, s));
}

TEST(Goal, PathAndStorage) {
  const Board p = board2d({"#####", "#S.T#", "#####"});
  EXPECT_FALSE(is_goal(p, initial_state(p)));
  EXPECT_TRUE(is_goal(p, replay(p, parse_moves("EE"))));

  const Board st = board2d({"#######", "#SB.OO#", "#######"}, "storage");
  State s = initial_state(st);
  s.blocks = {at(st, 4, 1)};
  EXPECT_FALSE(is_goal(st, s));
  s.blocks = {at(st, 4, 1), at(st, 5, 1)};
  s.robot = at(st, 1, 1);
  EXPECT_TRUE(is_goal(st, s));
}

TEST(Replay, Examples) {
  const Board b = board2d({"#####", "#S.T#", "#####"});
  EXPECT_EQ(replay(b, parse_moves("EE")).robot, *b.goal());
  EXPECT_EQ(replay(b, parse_moves("EW")).robot, b.start());
  const Board c = board2d({"####", "#SB#", "#T##", "####"});
  try {
    replay(c, parse_moves("E"));
    FAIL();
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.index(), 0u);
    EXPECT_EQ(e.reason(), "illegal: immovable block");
  }
}

TEST(Moves, ParseAndFormat) {
  EXPECT_EQ(to_string(parse_moves(" NESWUD\n")), "NESWUD");
  EXPECT_TRUE(parse_moves("").empty());
  EXPECT_THROW(parse_moves("NX"), ParseError);
}

TEST(Direction, OrderAndOpposites) {
  EXPECT_LT(Direction::N, Direction::E);
  EXPECT_LT(Direction::W, Direction::U);
  for (Direction d : kAllDirections) {
    EXPECT_EQ(opposite(opposite(d)), d);
    EXPECT_EQ(direction_from_letter(letter(d)), d);
    const Coord c = Coord{0, 0, 0}.step(d).step(opposite(d));
    EXPECT_EQ(c, (Coord{0, 0, 0}));
  }
}

TEST(Validate, Invariants) {
  Board b(Dims{3, 1, 1}, Mode::Path);
  EXPECT_THROW(b.validate(), Error);
  b.set_start({0, 0, 0});
  EXPECT_THROW(b.validate(), Error);  // no goal
  b.set_goal({2, 0, 0});
  EXPECT_NO_THROW(b.validate());
  b.add_block({0, 0, 0});
  EXPECT_THROW(b.validate(), Error);
  b.remove_block({0, 0, 0});
  b.set_wall({2, 0, 0});
  EXPECT_THROW(b.validate(), Error);
}

TEST(Validate, DegenerateSingleCell) {
  Board b(Dims{1, 1, 1}, Mode::Path);
  b.set_start({0, 0, 0});
  b.set_goal({0, 0, 0});
  EXPECT_NO_THROW(b.validate());
  const State s = initial_state(b);
  EXPECT_TRUE(is_goal(b, s));
  for (Direction d : kAllDirections) EXPECT_FALSE(try_apply_move(b, s, d));
}
