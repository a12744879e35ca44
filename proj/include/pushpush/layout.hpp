#pragma once

// Gadget templates and the canvas used to assemble them into boards.
//
// A Canvas starts as solid wall. Templates are stamped onto it and
// corridors ("routes") are drawn between their ports as axis-aligned
// polylines in the z = 0 plane. Wherever a horizontal segment of one
// route crosses a vertical segment of another, the vertical one is lifted
// over the crossing through z = 2 (the crossover3d pattern), leaving a wall
// layer at z = 1 between the two. finish() checks that cells of unrelated
// owners never touch.

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "core.hpp"

namespace pushpush {

struct Port {
  std::string name;
  Coord cell;
  Direction dir;  // outward

  friend bool operator==(const Port&, const Port&) = default;
};

// Named sub-rectangle of a layout, inclusive bounds.
struct Part {
  std::string name;
  Coord lo, hi;

  friend bool operator==(const Part&, const Part&) = default;
};

struct GadgetTemplate {
  std::string name;
  Board footprint;  // walls and initial blocks; start and goal unused
  std::vector<Port> ports;
  std::vector<Part> parts;

  const Port& port(const std::string& n) const {
    for (const Port& p : ports)
      if (p.name == n) return p;
    throw Error("unknown port '" + n + "' in gadget '" + name + "'");
  }
  bool has_port(const std::string& n) const {
    for (const Port& p : ports)
      if (p.name == n) return true;
    return false;
  }
};

// Rotation by quarter turns about z; the footprint's bounding box is
// re-anchored at the origin.
inline GadgetTemplate rotate(const GadgetTemplate& t, int quarter_turns) {
  quarter_turns = ((quarter_turns % 4) + 4) % 4;
  GadgetTemplate cur = t;
  for (int k = 0; k < quarter_turns; ++k) {
    const Dims d = cur.footprint.dims();
    auto map = [&](const Coord& c) { return Coord{d.h - 1 - c.y, c.x, c.z}; };
    Board nb(Dims{d.h, d.w, d.d}, cur.footprint.mode());
    for (CellIndex i = 0; i < cur.footprint.cell_count(); ++i) {
      const Coord c = map(cur.footprint.coord(i));
      nb.set_wall(c, cur.footprint.is_wall(i));
      if (cur.footprint.is_storage(i)) nb.set_storage(c);
    }
    for (CellIndex b : cur.footprint.initial_blocks()) nb.add_block(map(cur.footprint.coord(b)));
    GadgetTemplate next{cur.name, std::move(nb), {}, {}};
    for (const Port& p : cur.ports) next.ports.push_back({p.name, map(p.cell), rotate_cw(p.dir)});
    for (const Part& p : cur.parts) {
      const Coord a = map(p.lo), b = map(p.hi);
      next.parts.push_back({p.name,
                            {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)},
                            {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)}});
    }
    cur = std::move(next);
  }
  return cur;
}

// Builds a template footprint from ASCII layers (y rows top to bottom).
// Glyphs: '#' wall, '.' open, 'B' block.
inline Board footprint_from_ascii(const std::vector<std::vector<std::string>>& layers) {
  if (layers.empty() || layers[0].empty()) throw Error("empty footprint");
  const Dims dims{static_cast<int>(layers[0][0].size()), static_cast<int>(layers[0].size()),
                  static_cast<int>(layers.size())};
  Board b(dims, Mode::Path);
  for (int z = 0; z < dims.d; ++z) {
    if (static_cast<int>(layers[z].size()) != dims.h) throw Error("ragged footprint");
    for (int y = 0; y < dims.h; ++y) {
      const std::string& row = layers[z][y];
      if (static_cast<int>(row.size()) != dims.w) throw Error("ragged footprint");
      for (int x = 0; x < dims.w; ++x) {
        switch (row[x]) {
          case '#': b.set_wall({x, y, z}); break;
          case '.': break;
          case 'B': b.add_block({x, y, z}); break;
          default: throw Error(std::string("bad footprint glyph '") + row[x] + "'");
        }
      }
    }
  }
  return b;
}

class Canvas {
 public:
  static constexpr int kWall = -1;

  explicit Canvas(Dims dims) : dims_(dims), owner_(dims.cells(), kWall) {}

  const Dims& dims() const { return dims_; }
  int new_owner() { return next_owner_++; }
  void connect(int a, int b) { allowed_.insert(std::minmax(a, b)); }

  struct Stamped {
    int owner;
    std::map<std::string, Port> ports;  // global coordinates
    Coord lo, hi;
  };

  // Stamps `t` rotated by `quarter_turns` with its bounding box at `at`.
  // Open template cells must land on in-range wall cells.
  Stamped stamp(const GadgetTemplate& t, Coord at, int quarter_turns, const std::string& instance) {
    const GadgetTemplate r = rotate(t, quarter_turns);
    const Board& f = r.footprint;
    const int owner = new_owner();
    for (CellIndex i = 0; i < f.cell_count(); ++i) {
      if (f.is_wall(i)) continue;
      const Coord local = f.coord(i);
      const Coord g{local.x + at.x, local.y + at.y, local.z + at.z};
      if (!dims_.contains(g)) throw Error("gadget '" + instance + "' out of bounds");
      int& o = owner_[idx(g)];
      if (o != kWall) throw Error("gadget '" + instance + "' overlaps existing content");
      o = owner;
    }
    for (CellIndex b : f.initial_blocks()) {
      const Coord c = f.coord(b);
      blocks_.push_back({c.x + at.x, c.y + at.y, c.z + at.z});
    }
    Stamped s{owner, {}, at, {at.x + f.dims().w - 1, at.y + f.dims().h - 1, at.z + f.dims().d - 1}};
    for (const Port& p : r.ports)
      s.ports[p.name] = Port{p.name, {p.cell.x + at.x, p.cell.y + at.y, p.cell.z + at.z}, p.dir};
    parts_.push_back({instance, s.lo, s.hi});
    for (const Part& p : r.parts)
      parts_.push_back({instance + "/" + p.name,
                        {p.lo.x + at.x, p.lo.y + at.y, p.lo.z + at.z},
                        {p.hi.x + at.x, p.hi.y + at.y, p.hi.z + at.z}});
    return s;
  }

  // Axis-aligned polyline in one z plane. Cells of the same owner may overlap.
  void route(int owner, std::vector<Coord> waypoints, std::string name = {}) {
    if (waypoints.empty()) throw Error("empty route");
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
      const Coord a = waypoints[i - 1], b = waypoints[i];
      const int moved = (a.x != b.x) + (a.y != b.y) + (a.z != b.z);
      if (moved > 1 || a.z != b.z) throw Error("route segments must be axis-aligned within one plane");
    }
    routes_.push_back({owner, std::move(waypoints), std::move(name)});
  }

  void place_block(const Coord& c) { blocks_.push_back(c); }

  // Rasterizes routes, inserts crossovers and validates separation.
  // Returns the assembled footprint (no start or goal set).
  Board finish() {
    struct Seg {
      int route;
      Coord a, b;  // a <= b along the varying axis
      bool horizontal;
    };
    std::vector<Seg> segs;
    for (std::size_t r = 0; r < routes_.size(); ++r) {
      const auto& w = routes_[r].waypoints;
      for (std::size_t i = 1; i < w.size(); ++i) {
        Coord a = w[i - 1], b = w[i];
        if (a == b) continue;
        if (b < a) std::swap(a, b);
        segs.push_back({static_cast<int>(r), a, b, a.y == b.y});
      }
    }

    std::set<std::tuple<int, int, int>> lifted;  // (route, x, y) z = 0 cells removed
    struct Lift {
      int route;
      Coord at;
    };
    std::vector<Lift> lifts;
    for (const Seg& h : segs) {
      if (!h.horizontal) continue;
      for (const Seg& v : segs) {
        if (v.horizontal || v.route == h.route || v.a.z != h.a.z) continue;
        if (routes_[v.route].owner == routes_[h.route].owner) continue;
        const int x = v.a.x, y = h.a.y;
        if (!(h.a.x < x && x < h.b.x && v.a.y < y && y < v.b.y)) continue;
        if (y - 2 < v.a.y || y + 2 > v.b.y)
          throw Error("crossing too close to a bend in route '" + routes_[v.route].name + "'");
        if (h.a.z != 0 || dims_.d < 3) throw Error("crossovers need z = 0 routes and depth >= 3");
        lifts.push_back({v.route, {x, y, 0}});
        for (int dy = -1; dy <= 1; ++dy) lifted.insert({v.route, x, y + dy});
      }
    }

    auto claim = [&](const Coord& c, int owner, const std::string& what) {
      if (!dims_.contains(c)) throw Error("route '" + what + "' leaves the board");
      int& o = owner_[idx(c)];
      if (o != kWall && o != owner) throw Error("route '" + what + "' overlaps existing content");
      o = owner;
    };
    for (std::size_t r = 0; r < routes_.size(); ++r) {
      const auto& rt = routes_[r];
      const auto& w = rt.waypoints;
      auto put = [&](const Coord& c) {
        if (c.z == 0 && lifted.count({static_cast<int>(r), c.x, c.y})) return;
        claim(c, rt.owner, rt.name);
      };
      put(w[0]);
      for (std::size_t i = 1; i < w.size(); ++i) {
        Coord c = w[i - 1];
        const Coord end = w[i];
        while (c != end) {
          c.x += (end.x > c.x) - (end.x < c.x);
          c.y += (end.y > c.y) - (end.y < c.y);
          put(c);
        }
      }
    }
    int n = 0;
    for (const Lift& l : lifts) {
      const int owner = routes_[l.route].owner;
      const std::string& nm = routes_[l.route].name;
      const int x = l.at.x, y = l.at.y;
      for (int z = 1; z <= 2; ++z) {
        claim({x, y - 2, z}, owner, nm);
        claim({x, y + 2, z}, owner, nm);
      }
      for (int dy = -1; dy <= 1; ++dy) claim({x, y + dy, 2}, owner, nm);
      parts_.push_back({"crossover3d." + std::to_string(++n), {x - 2, y - 2, 0}, {x + 2, y + 2, 2}});
    }
    crossovers_ = n;

    Board b(dims_, Mode::Path);
    for (CellIndex i = 0; i < owner_.size(); ++i)
      if (owner_[i] == kWall) b.set_wall(b.coord(i));
    for (const Coord& c : blocks_) {
      if (b.is_wall(c)) throw Error("block placed inside a wall");
      b.add_block(c);
    }

    for (CellIndex i = 0; i < owner_.size(); ++i) {
      if (owner_[i] == kWall) continue;
      for (Direction d : kAllDirections) {
        const CellIndex j = b.neighbor(i, d);
        if (j == kNoCell || owner_[j] == kWall || owner_[j] == owner_[i]) continue;
        if (!allowed_.count(std::minmax(owner_[i], owner_[j]))) {
          std::ostringstream os;
          os << "unrelated corridors touch at " << b.coord(i) << " and " << b.coord(j);
          throw Error(os.str());
        }
      }
    }
    return b;
  }

  const std::vector<Part>& parts() const { return parts_; }
  int crossovers() const { return crossovers_; }
  int owner_at(const Coord& c) const { return owner_[idx(c)]; }

 private:
  struct Route {
    int owner;
    std::vector<Coord> waypoints;
    std::string name;
  };

  std::size_t idx(const Coord& c) const {
    return (static_cast<std::size_t>(c.z) * dims_.h + c.y) * dims_.w + c.x;
  }

  Dims dims_;
  std::vector<int> owner_;
  std::vector<Coord> blocks_;
  std::vector<Route> routes_;
  std::vector<Part> parts_;
  std::set<std::pair<int, int>> allowed_;
  int next_owner_ = 0;
  int crossovers_ = 0;
};

}  // namespace pushpush
