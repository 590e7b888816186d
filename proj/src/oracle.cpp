#include "ffp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace ffp::oracle {

GraphNeighborhood GraphNeighborhood::ring8() {
  return {{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
}

GraphNeighborhood GraphNeighborhood::ring16() {
  GraphNeighborhood n = ring8();
  for (const Offset o : std::vector<Offset>{{2, 1}, {1, 2}, {-1, 2}, {-2, 1}, {-2, -1}, {-1, -2}, {1, -2}, {2, -1}}) {
    n.offsets.push_back(o);
  }
  return n;
}

LocalMetric sample_metric(const RandersMetricField& metric, Vec2 p) {
  const Grid2D& g = metric.grid();
  const double px = std::clamp(p.x, 0.0, static_cast<double>(g.width() - 1));
  const double py = std::clamp(p.y, 0.0, static_cast<double>(g.height() - 1));
  const int x0 = std::min(static_cast<int>(std::floor(px)), g.width() - 2);
  const int y0 = std::min(static_cast<int>(std::floor(py)), g.height() - 2);
  const double fx = px - x0;
  const double fy = py - y0;
  LocalMetric out{{0.0, 0.0, 0.0}, {0.0, 0.0}, 0.0};
  const double wts[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
  const Pixel px4[4] = {{x0, y0}, {x0 + 1, y0}, {x0, y0 + 1}, {x0 + 1, y0 + 1}};
  for (int k = 0; k < 4; ++k) {
    if (wts[k] == 0.0) continue;
    const std::size_t i = g.index(px4[k]);
    out.m = out.m + wts[k] * metric.tensor[i];
    out.omega = out.omega + wts[k] * metric.omega[i];
    out.c += wts[k] * metric.potential(i);
  }
  return out;
}

ScalarField dijkstra_distance(const RandersMetricField& metric, const SeedSets& seeds,
                              const GraphNeighborhood& neighborhood) {
  const Grid2D& g = metric.grid();
  ScalarField dist(g, kInfinity);
  std::vector<std::uint8_t> done(g.size(), 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  for (const auto& set : seeds.sets()) {
    for (const Pixel p : set.points) {
      dist.at(p) = 0.0;
      pq.push({0.0, g.index(p)});
    }
  }
  while (!pq.empty()) {
    const auto [d, i] = pq.top();
    pq.pop();
    if (done[i]) continue;
    done[i] = 1;
    const Pixel x = g.pixel(i);
    for (const Offset o : neighborhood.offsets) {
      const Pixel y{x.x + o.dx, x.y + o.dy};
      if (!g.contains(y)) continue;
      const std::size_t j = g.index(y);
      if (done[j]) continue;
      const Vec2 step{static_cast<double>(o.dx), static_cast<double>(o.dy)};
      const Vec2 mid{x.x + 0.5 * o.dx, x.y + 0.5 * o.dy};
      const double nd = d + sample_metric(metric, mid).eval(step);
      if (nd < dist[j]) {
        dist[j] = nd;
        pq.push({nd, j});
      }
    }
  }
  return dist;
}

double analytic_constant_distance(const Spd2& m, Vec2 omega, double c, Vec2 s, Vec2 x) {
  const Vec2 v = x - s;
  return c * (spd_norm(m, v) - dot(omega, v));
}

double polyline_length(const RandersMetricField& metric, const std::vector<Vec2>& polyline) {
  if (polyline.size() < 2) throw ConfigError("polyline needs at least two vertices");
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
    const Vec2 d = polyline[k + 1] - polyline[k];
    if (d.x == 0.0 && d.y == 0.0) continue;
    len += sample_metric(metric, 0.5 * (polyline[k] + polyline[k + 1])).eval(d);
  }
  return len;
}

ResidualReport eikonal_residual(const ScalarField& u, const RandersMetricField& metric,
                                const Field<std::uint8_t>* exclude) {
  const Grid2D& g = u.grid();
  ResidualReport rep{ScalarField(g, std::nan("")), 0, 0.0, 0.0};
  std::vector<double> abs_vals;
  for (int y = 1; y + 1 < g.height(); ++y) {
    for (int x = 1; x + 1 < g.width(); ++x) {
      if (exclude && (*exclude)(x, y)) continue;
      bool ok = true;
      for (int dy = -1; dy <= 1 && ok; ++dy) {
        for (int dx = -1; dx <= 1 && ok; ++dx) ok = std::isfinite(u(x + dx, y + dy));
      }
      if (!ok) continue;
      const std::size_t i = g.index({x, y});
      const Vec2 grad{0.5 * (u(x + 1, y) - u(x - 1, y)), 0.5 * (u(x, y + 1) - u(x, y - 1))};
      const double c = metric.potential(i);
      const Spd2 inv = spd_inverse((c * c) * metric.tensor[i]);
      const double r = spd_norm(inv, grad + c * metric.omega[i]) - 1.0;
      rep.residual[i] = r;
      abs_vals.push_back(std::abs(r));
    }
  }
  rep.evaluated = abs_vals.size();
  if (!abs_vals.empty()) {
    auto quantile = [&](double q) {
      const std::size_t k = std::min(abs_vals.size() - 1, static_cast<std::size_t>(q * (abs_vals.size() - 1)));
      std::nth_element(abs_vals.begin(), abs_vals.begin() + static_cast<std::ptrdiff_t>(k), abs_vals.end());
      return abs_vals[k];
    };
    rep.median_abs = quantile(0.5);
    rep.p90_abs = quantile(0.9);
  }
  return rep;
}

SimplexResult ternary_simplex_minimize(Vec2 e1, Vec2 e2, double u1, double u2, const LocalMetric& local) {
  const bool f1 = std::isfinite(u1);
  const bool f2 = std::isfinite(u2);
  if (!f1 && !f2) return {};
  // Segment from y = x + e back to x has displacement -e.
  auto objective = [&](double lam) {
    const Vec2 e = lam * e1 + (1.0 - lam) * e2;
    return local.eval(-e) + lam * u1 + (1.0 - lam) * u2;
  };
  if (!f2) return {local.eval(-e1) + u1, 1.0};
  if (!f1) return {local.eval(-e2) + u2, 0.0};
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-10) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (objective(m1) < objective(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  const double mid = 0.5 * (lo + hi);
  SimplexResult best{objective(mid), mid};
  const double v0 = objective(0.0);
  const double v1 = objective(1.0);
  if (v0 < best.value) best = {v0, 0.0};
  if (v1 < best.value) best = {v1, 1.0};
  return best;
}

SweepResult iterated_hopf_lax(const RandersMetricField& metric, const SeedSets& seeds, int max_sweeps, double tol) {
  const Grid2D& g = metric.grid();
  SweepResult res{ScalarField(g, kInfinity), 0, false};
  std::vector<std::uint8_t> is_seed(g.size(), 0);
  for (const auto& set : seeds.sets()) {
    for (const Pixel p : set.points) {
      res.distance.at(p) = 0.0;
      is_seed[g.index(p)] = 1;
    }
  }
  const auto ring = GraphNeighborhood::ring8().offsets;
  const int w = g.width(), h = g.height();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const bool fx = sweep & 1, fy = sweep & 2;
    double max_update = 0.0;
    bool newly_finite = false;
    for (int yy = 0; yy < h; ++yy) {
      const int y = fy ? h - 1 - yy : yy;
      for (int xx = 0; xx < w; ++xx) {
        const int x = fx ? w - 1 - xx : xx;
        const std::size_t i = g.index({x, y});
        if (is_seed[i]) continue;
        const LocalMetric local{metric.tensor[i], metric.omega[i], metric.potential(i)};
        double best = kInfinity;
        for (std::size_t k = 0; k < ring.size(); ++k) {
          const Offset a = ring[k], b = ring[(k + 1) % ring.size()];
          const Pixel za{x + a.dx, y + a.dy}, zb{x + b.dx, y + b.dy};
          const double ua = g.contains(za) ? res.distance.at(za) : kInfinity;
          const double ub = g.contains(zb) ? res.distance.at(zb) : kInfinity;
          const SimplexResult r = ternary_simplex_minimize({double(a.dx), double(a.dy)}, {double(b.dx), double(b.dy)},
                                                           ua, ub, local);
          best = std::min(best, r.value);
        }
        if (best < res.distance[i]) {
          if (std::isfinite(res.distance[i])) {
            max_update = std::max(max_update, res.distance[i] - best);
          } else {
            newly_finite = true;
          }
          res.distance[i] = best;
        }
      }
    }
    res.sweeps = sweep + 1;
    if (!newly_finite && max_update < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace ffp::oracle
