#include "ffp/contours.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>

namespace ffp {

namespace {

using Key = std::uint64_t;

// Undirected segment soup keyed by vertex id, chained into polylines.
class SegmentGraph {
 public:
  void add(Key a, Vec2 pa, Key b, Vec2 pb) {
    pos_[a] = pa;
    pos_[b] = pb;
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }

  std::vector<Polyline> chain() {
    std::vector<Polyline> out;
    // Open chains start at vertices of degree != 2 (grid border or junction).
    for (const auto& [v, nbrs] : adj_) {
      if (nbrs.size() == 2) continue;
      for (const Key n : nbrs) {
        if (used(v, n)) continue;
        out.push_back(walk(v, n, false));
      }
    }
    for (const auto& [v, nbrs] : adj_) {
      for (const Key n : nbrs) {
        if (used(v, n)) continue;
        out.push_back(walk(v, n, true));
      }
    }
    return out;
  }

 private:
  static std::pair<Key, Key> edge(Key a, Key b) { return {std::min(a, b), std::max(a, b)}; }
  bool used(Key a, Key b) const { return visited_.count(edge(a, b)) != 0; }

  Polyline walk(Key start, Key next, bool loop) {
    Polyline p;
    p.points.push_back(pos_.at(start));
    Key cur = next;
    visited_.insert(edge(start, cur));
    while (true) {
      if (cur == start) {
        p.closed = true;
        break;
      }
      p.points.push_back(pos_.at(cur));
      const auto& nb = adj_.at(cur);
      if (nb.size() != 2) break;
      Key nxt = nb[0];
      if (used(cur, nxt)) nxt = nb[1];
      if (used(cur, nxt)) break;
      visited_.insert(edge(cur, nxt));
      cur = nxt;
    }
    if (!loop) p.closed = false;
    return p;
  }

  std::map<Key, std::vector<Key>> adj_;
  std::map<Key, Vec2> pos_;
  std::set<std::pair<Key, Key>> visited_;
};

struct CellKeys {
  Key top, bottom, left, right, center;
};

CellKeys cell_keys(const Grid2D& g, int x, int y) {
  const auto w = static_cast<Key>(g.width());
  const auto n = static_cast<Key>(g.size());
  auto hkey = [&](int cx, int cy) { return 2 * (static_cast<Key>(cy) * w + static_cast<Key>(cx)); };
  auto vkey = [&](int cx, int cy) { return 2 * (static_cast<Key>(cy) * w + static_cast<Key>(cx)) + 1; };
  return {hkey(x, y), hkey(x, y + 1), vkey(x, y), vkey(x + 1, y),
          2 * n + static_cast<Key>(y) * w + static_cast<Key>(x)};
}

}  // namespace

std::vector<Polyline> extract_contours(const Field<int>& label_map) {
  const Grid2D& g = label_map.grid();
  SegmentGraph graph;
  for (int y = 0; y + 1 < g.height(); ++y) {
    for (int x = 0; x + 1 < g.width(); ++x) {
      const int tl = label_map(x, y), tr = label_map(x + 1, y);
      const int bl = label_map(x, y + 1), br = label_map(x + 1, y + 1);
      const CellKeys k = cell_keys(g, x, y);
      const double fx = x, fy = y;
      struct Crossing {
        Key key;
        Vec2 pos;
      };
      std::vector<Crossing> cr;
      if (tl != tr) cr.push_back({k.top, {fx + 0.5, fy}});
      if (tr != br) cr.push_back({k.right, {fx + 1.0, fy + 0.5}});
      if (bl != br) cr.push_back({k.bottom, {fx + 0.5, fy + 1.0}});
      if (tl != bl) cr.push_back({k.left, {fx, fy + 0.5}});
      if (cr.empty()) continue;
      std::set<int> distinct{tl, tr, bl, br};
      if (cr.size() == 2 && distinct.size() == 2) {
        graph.add(cr[0].key, cr[0].pos, cr[1].key, cr[1].pos);
      } else if (cr.size() == 4 && distinct.size() == 2) {
        // Diagonal saddle: cut off the top-left and bottom-right corners.
        graph.add(k.top, {fx + 0.5, fy}, k.left, {fx, fy + 0.5});
        graph.add(k.bottom, {fx + 0.5, fy + 1.0}, k.right, {fx + 1.0, fy + 0.5});
      } else {
        const Vec2 c{fx + 0.5, fy + 0.5};
        for (const auto& e : cr) graph.add(e.key, e.pos, k.center, c);
      }
    }
  }
  return graph.chain();
}

std::vector<Polyline> iso_contours(const ScalarField& f, double level) {
  const Grid2D& g = f.grid();
  SegmentGraph graph;
  auto lerp_t = [level](double a, double b) {
    const double d = b - a;
    return d == 0.0 ? 0.5 : std::clamp((level - a) / d, 0.0, 1.0);
  };
  for (int y = 0; y + 1 < g.height(); ++y) {
    for (int x = 0; x + 1 < g.width(); ++x) {
      const double tl = f(x, y), tr = f(x + 1, y), bl = f(x, y + 1), br = f(x + 1, y + 1);
      const bool itl = tl <= level, itr = tr <= level, ibl = bl <= level, ibr = br <= level;
      const CellKeys k = cell_keys(g, x, y);
      const double fx = x, fy = y;
      struct Crossing {
        Key key;
        Vec2 pos;
      };
      std::vector<Crossing> cr;
      if (itl != itr) cr.push_back({k.top, {fx + lerp_t(tl, tr), fy}});
      if (itr != ibr) cr.push_back({k.right, {fx + 1.0, fy + lerp_t(tr, br)}});
      if (ibl != ibr) cr.push_back({k.bottom, {fx + lerp_t(bl, br), fy + 1.0}});
      if (itl != ibl) cr.push_back({k.left, {fx, fy + lerp_t(tl, bl)}});
      if (cr.size() == 2) {
        graph.add(cr[0].key, cr[0].pos, cr[1].key, cr[1].pos);
      } else if (cr.size() == 4) {
        // cr order: top, right, bottom, left
        const bool center_inside = 0.25 * (tl + tr + bl + br) <= level;
        if (center_inside == itl) {
          // The top-left state spans the centre: cut off top-right and bottom-left.
          graph.add(cr[0].key, cr[0].pos, cr[1].key, cr[1].pos);
          graph.add(cr[2].key, cr[2].pos, cr[3].key, cr[3].pos);
        } else {
          graph.add(cr[0].key, cr[0].pos, cr[3].key, cr[3].pos);
          graph.add(cr[1].key, cr[1].pos, cr[2].key, cr[2].pos);
        }
      }
    }
  }
  return graph.chain();
}

double polyline_perimeter(const Polyline& p) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < p.points.size(); ++i) len += norm(p.points[i + 1] - p.points[i]);
  if (p.closed && p.points.size() > 1) len += norm(p.points.front() - p.points.back());
  return len;
}

}  // namespace ffp
