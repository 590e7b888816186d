#include "ffp/fmm.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>

namespace ffp {

SeedSets::SeedSets(std::vector<SeedSet> sets, const Grid2D& grid) {
  std::unordered_map<std::size_t, int> owner;
  std::set<int> labels;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    SeedSet& set = sets[s];
    if (set.label < 1) throw DataError("seed set " + std::to_string(s) + " has label < 1");
    if (!labels.insert(set.label).second) {
      throw DataError("seed label " + std::to_string(set.label) + " used by more than one set");
    }
    if (set.points.empty()) throw DataError("seed set " + std::to_string(s) + " is empty");
    std::vector<Pixel> unique;
    unique.reserve(set.points.size());
    for (std::size_t k = 0; k < set.points.size(); ++k) {
      const Pixel p = set.points[k];
      if (!grid.contains(p)) {
        throw DataError("seed set " + std::to_string(s) + " point " + std::to_string(k) + " (" +
                        std::to_string(p.x) + "," + std::to_string(p.y) + ") is outside the grid");
      }
      const auto [it, inserted] = owner.emplace(grid.index(p), set.label);
      if (!inserted) {
        if (it->second == set.label) continue;
        throw DataError("seed point (" + std::to_string(p.x) + "," + std::to_string(p.y) + ") belongs to labels " +
                        std::to_string(it->second) + " and " + std::to_string(set.label));
      }
      unique.push_back(p);
    }
    set.points = std::move(unique);
  }
  sets_ = std::move(sets);
}

std::size_t SeedSets::point_count() const {
  std::size_t n = 0;
  for (const auto& s : sets_) n += s.points.size();
  return n;
}

SimplexResult simplex_minimize(Vec2 e1, Vec2 e2, double u1, double u2, const Spd2& m, Vec2 omega, double c) {
  const bool f1 = std::isfinite(u1);
  const bool f2 = std::isfinite(u2);
  if (!f1 && !f2) return {};

  const Spd2 mc = (c * c) * m;
  const Vec2 wc = c * omega;
  // Cost of the straight segment from vertex y = x + e to x, i.e. F(x, -e).
  auto edge = [&](Vec2 e) { return spd_norm(mc, e) + dot(wc, e); };

  if (!f2) return {edge(e1) + u1, 1.0};
  if (!f1) return {edge(e2) + u2, 0.0};

  SimplexResult best{edge(e2) + u2, 0.0};
  const double end1 = edge(e1) + u1;
  if (end1 <= best.value) best = {end1, 1.0};

  // f(l) = sqrt(A l² + 2B l + C) + k l + const with d = e1 - e2.
  const Vec2 d = e1 - e2;
  const Vec2 md = mc.apply(d);
  const double a = dot(d, md);
  const double b = dot(e2, md);
  const double cc = mc.quad(e2);
  const double k = dot(wc, d) + (u1 - u2);
  const double disc = a * cc - b * b;
  if (a > k * k && disc > 0.0) {
    const double lam = (-b - k * std::sqrt(disc / (a - k * k))) / a;
    if (lam > 0.0 && lam < 1.0) {
      const Vec2 e = e2 + lam * d;
      const double v = spd_norm(mc, e) + dot(wc, e) + lam * u1 + (1.0 - lam) * u2;
      if (v < best.value) best = {v, lam};
    }
  }
  return best;
}

SimplexResult simplex_minimize(Pixel x, Pixel z1, Pixel z2, double u1, double u2, const RandersMetricField& metric,
                               double dynamic_potential) {
  const std::size_t i = metric.grid().index(x);
  const Vec2 e1{static_cast<double>(z1.x - x.x), static_cast<double>(z1.y - x.y)};
  const Vec2 e2{static_cast<double>(z2.x - x.x), static_cast<double>(z2.y - x.y)};
  return simplex_minimize(e1, e2, u1, u2, metric.tensor[i], metric.omega[i],
                          metric.static_potential[i] * dynamic_potential);
}

int voronoi_index_update(double lambda1, int label_z1, int label_z2) {
  return lambda1 >= 1.0 - lambda1 ? label_z1 : label_z2;
}

HopfLaxResult hopf_lax(Pixel x, const FrontState& state, const RandersMetricField& metric) {
  const Grid2D& grid = metric.grid();
  const std::size_t xi = grid.index(x);
  const Spd2& m = metric.tensor[xi];
  const Vec2 w = metric.omega[xi];
  const double c = metric.static_potential[xi] * state.dynamic_potential[xi];

  std::array<double, 8> u;
  std::array<int, 8> lab;
  for (std::size_t k = 0; k < 8; ++k) {
    const Pixel z{x.x + StencilFan::ring[k].dx, x.y + StencilFan::ring[k].dy};
    if (grid.contains(z) && state.state.at(z) == PointState::Accepted) {
      const std::size_t zi = grid.index(z);
      u[k] = state.distance[zi];
      lab[k] = state.labels[zi];
    } else {
      u[k] = kInfinity;
      lab[k] = 0;
    }
  }

  HopfLaxResult best;
  for (std::size_t k = 0; k < StencilFan::simplex_count; ++k) {
    const std::size_t k2 = (k + 1) % 8;
    if (!std::isfinite(u[k]) && !std::isfinite(u[k2])) continue;
    const Vec2 e1{static_cast<double>(StencilFan::ring[k].dx), static_cast<double>(StencilFan::ring[k].dy)};
    const Vec2 e2{static_cast<double>(StencilFan::ring[k2].dx), static_cast<double>(StencilFan::ring[k2].dy)};
    const SimplexResult r = simplex_minimize(e1, e2, u[k], u[k2], m, w, c);
    if (r.value < best.value) {
      best.value = r.value;
      best.lambda1 = r.lambda1;
      best.simplex = static_cast<int>(k);
      best.label = voronoi_index_update(r.lambda1, lab[k], lab[k2]);
    }
  }
  return best;
}

double dynamic_update_fb(std::size_t z, std::size_t x_min, const ImageBuffer& features, double beta_d) {
  double s = 0.0;
  for (int c = 0; c < features.channels(); ++c) {
    const double d = features.sample(z, c) - features.sample(x_min, c);
    s += d * d;
  }
  return std::exp(beta_d * std::sqrt(s));
}

double dynamic_update_tube(std::size_t z, std::size_t x_min, const ScalarField& zeta, double beta_d) {
  return std::exp(beta_d * std::abs(std::min(zeta[z] - zeta[x_min], 0.0)));
}

namespace {

struct HeapEntry {
  double value;
  std::size_t index;
  // Min-heap on (value, index) so ties resolve by pixel index.
  bool operator<(const HeapEntry& o) const { return value > o.value || (value == o.value && index > o.index); }
};

FrontState initial_state(const Grid2D& grid) {
  return {ScalarField(grid, kInfinity), Field<int>(grid, 0),       Field<PointState>(grid, PointState::Far),
          Field<std::uint8_t>(grid, 0), ScalarField(grid, 1.0), 0, {}};
}

void check_dynamics_grid(const DynamicRule& rule, const Grid2D& grid) {
  if (const auto* f = std::get_if<FeatureDynamics>(&rule)) {
    if (!(f->features.grid() == grid)) throw ConfigError("feature map grid differs from metric grid");
    if (!(f->beta_d >= 0.0)) throw ConfigError("beta_d must be nonnegative");
  } else if (const auto* t = std::get_if<TubeDynamics>(&rule)) {
    if (!(t->zeta.grid() == grid)) throw ConfigError("zeta grid differs from metric grid");
    if (!(t->beta_d >= 0.0)) throw ConfigError("beta_d must be nonnegative");
  }
}

}  // namespace

FrontState run_fast_marching(const RandersMetricField& metric, const SeedSets& seeds, const FmmConfig& config) {
  if (seeds.empty()) throw ConfigError("fast marching needs at least one seed set");
  const Grid2D& grid = metric.grid();
  check_dynamics_grid(config.dynamics, grid);
  if (config.n_th && *config.n_th == 0) throw ConfigError("n_th must be positive");

  FrontState st = initial_state(grid);
  st.dynamic_potential = metric.dynamic_potential;
  std::vector<int> pending_label(grid.size(), 0);
  std::priority_queue<HeapEntry> heap;

  for (const SeedSet& set : seeds.sets()) {
    for (const Pixel p : set.points) {
      if (!grid.contains(p)) throw DataError("seed outside grid");
      const std::size_t i = grid.index(p);
      st.distance[i] = 0.0;
      st.state[i] = PointState::Trial;
      st.labels[i] = set.label;
      st.seed[i] = 1;
      st.dynamic_potential[i] = 1.0;
      heap.push({0.0, i});
    }
  }

  const std::size_t limit = config.n_th.value_or(grid.size());
  st.acceptance_order.reserve(std::min(limit, grid.size()));

  while (!heap.empty() && st.accepted_count < limit) {
    const HeapEntry top = heap.top();
    heap.pop();
    const std::size_t xi = top.index;
    if (st.state[xi] == PointState::Accepted || top.value != st.distance[xi]) continue;

    st.state[xi] = PointState::Accepted;
    if (!st.seed[xi]) st.labels[xi] = pending_label[xi];
    ++st.accepted_count;
    st.acceptance_order.push_back(xi);
    if (config.progress && (st.accepted_count & 0xFFF) == 0) config.progress(st.accepted_count);
    if (st.accepted_count >= limit) break;

    const Pixel x = grid.pixel(xi);
    for (const Offset o : StencilFan::ring) {
      const Pixel z{x.x + o.dx, x.y + o.dy};
      if (!grid.contains(z)) continue;
      const std::size_t zi = grid.index(z);
      if (st.state[zi] == PointState::Accepted || st.seed[zi]) continue;

      if (const auto* f = std::get_if<FeatureDynamics>(&config.dynamics)) {
        st.dynamic_potential[zi] = dynamic_update_fb(zi, xi, f->features, f->beta_d);
      } else if (const auto* t = std::get_if<TubeDynamics>(&config.dynamics)) {
        st.dynamic_potential[zi] = dynamic_update_tube(zi, xi, t->zeta, t->beta_d);
      }

      const HopfLaxResult r = hopf_lax(z, st, metric);
      if (r.value < st.distance[zi]) {
        st.distance[zi] = r.value;
        pending_label[zi] = r.label;
        heap.push({r.value, zi});
      }
      st.state[zi] = PointState::Trial;
    }
  }
  if (config.progress) config.progress(st.accepted_count);
  return st;
}

RepairStats fixed_point_repair(FrontState& state, const RandersMetricField& metric, int max_sweeps, double tol) {
  const Grid2D& grid = metric.grid();
  if (state.accepted_count != grid.size()) {
    throw ConfigError("fixed-point repair needs a full-domain run");
  }
  RepairStats stats;
  std::vector<std::uint8_t> changed(grid.size(), 0);
  // A pixel is re-solved only if a neighbour decreased since its last solve;
  // otherwise the update would reproduce its current value.
  std::vector<std::uint8_t> dirty(grid.size(), 1);
  const int w = grid.width();
  const int h = grid.height();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const bool flip_x = (sweep & 1) != 0;
    const bool flip_y = (sweep & 2) != 0;
    double max_update = 0.0;
    for (int yy = 0; yy < h; ++yy) {
      const int y = flip_y ? h - 1 - yy : yy;
      for (int xx = 0; xx < w; ++xx) {
        const int x = flip_x ? w - 1 - xx : xx;
        const std::size_t i = grid.index({x, y});
        if (!dirty[i]) continue;
        dirty[i] = 0;
        if (state.seed[i]) continue;
        const HopfLaxResult r = hopf_lax({x, y}, state, metric);
        if (r.value < state.distance[i]) {
          max_update = std::max(max_update, state.distance[i] - r.value);
          state.distance[i] = r.value;
          state.labels[i] = r.label;
          changed[i] = 1;
          for (const Offset o : StencilFan::ring) {
            const Pixel z{x + o.dx, y + o.dy};
            if (grid.contains(z)) dirty[grid.index(z)] = 1;
          }
        }
      }
    }
    stats.sweeps = sweep + 1;
    stats.last_max_update = max_update;
    if (max_update < tol) {
      stats.converged = true;
      break;
    }
  }
  stats.changed_pixels = static_cast<std::size_t>(std::count(changed.begin(), changed.end(), 1));
  return stats;
}

double hopf_lax_residual(const FrontState& state, const RandersMetricField& metric) {
  const Grid2D& grid = metric.grid();
  double r = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (state.seed[i] || state.state[i] != PointState::Accepted) continue;
    const double v = hopf_lax_update(grid.pixel(i), state, metric);
    r = std::max(r, std::abs(state.distance[i] - v));
  }
  return r;
}

}  // namespace ffp
