#include "plankit/costmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "plankit/drivable.hpp"

namespace plankit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void fill_obb(const Obb& box, const GridSpec& spec, BinaryMask& mask) {
  // Grid-space AABB of the box corners, then exact per-cell containment.
  double min_r = kInf, max_r = -kInf, min_c = kInf, max_c = -kInf;
  for (const Vec2& corner : box.corners()) {
    const Vec2 g = spec.world_to_grid(corner);
    min_c = std::min(min_c, g.x);
    max_c = std::max(max_c, g.x);
    min_r = std::min(min_r, g.y);
    max_r = std::max(max_r, g.y);
  }
  const int r0 = std::max(0, static_cast<int>(std::floor(min_r)));
  const int r1 = std::min(spec.height - 1, static_cast<int>(std::ceil(max_r)));
  const int c0 = std::max(0, static_cast<int>(std::floor(min_c)));
  const int c1 = std::min(spec.width - 1, static_cast<int>(std::ceil(max_c)));
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      const Vec2 center = spec.grid_to_world(r, c);
      const Vec2 local = box.pose.to_local(center);
      if (std::abs(local.x) <= 0.5 * box.length && std::abs(local.y) <= 0.5 * box.width)
        mask[static_cast<std::size_t>(r) * spec.width + c] = 1;
    }
}

// 1D squared distance transform (Felzenszwalb & Huttenlocher).
void edt_1d(const double* f, double* d, int n, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    double s;
    while (true) {
      if (f[v[k]] == kInf) {
        // Everything so far was empty; restart the envelope at q.
        k = 0;
        v[0] = q;
        z[0] = -kInf;
        z[1] = kInf;
        break;
      }
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
      if (s <= z[k]) {
        --k;
        continue;
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
      break;
    }
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = f[v[k]] == kInf ? kInf : dq * dq + f[v[k]];
  }
}

}  // namespace

BinaryMask rasterize_nondrivable(const Scenario& scenario, const GridSpec& spec) {
  if (spec.height <= 0 || spec.width <= 0 || spec.resolution <= 0.0)
    throw std::invalid_argument("invalid grid spec");
  BinaryMask mask(spec.cells(), 1);
  if (scenario.lanes.empty()) return mask;

  const DrivableMap drivable(scenario);
  for (int r = 0; r < spec.height; ++r)
    for (int c = 0; c < spec.width; ++c) {
      const Vec2 center = spec.grid_to_world(r, c);
      if (drivable.contains(center))
        mask[static_cast<std::size_t>(r) * spec.width + c] = 0;
    }
  return mask;
}

BinaryMask rasterize_obstacles(const Scenario& scenario, const GridSpec& spec,
                               std::optional<int> include_agents_at) {
  if (spec.height <= 0 || spec.width <= 0 || spec.resolution <= 0.0)
    throw std::invalid_argument("invalid grid spec");
  BinaryMask mask(spec.cells(), 0);
  for (const StaticObstacle& obs : scenario.obstacles) fill_obb(obs.obb(), spec, mask);

  if (include_agents_at) {
    const int t = *include_agents_at;
    for (const AgentTrack& agent : scenario.agents) {
      const AgentState& cur = agent.current();
      if (t == 0) {
        if (cur.valid) fill_obb(agent.current_obb(), spec, mask);
        continue;
      }
      const int idx = t - 1;
      if (idx < 0 || idx >= static_cast<int>(agent.future_gt.size())) continue;
      const Vec2 pos = agent.future_gt[static_cast<std::size_t>(idx)];
      const Vec2 prev = idx > 0 ? agent.future_gt[static_cast<std::size_t>(idx - 1)]
                                : cur.pose.position();
      const Vec2 step = pos - prev;
      const double heading =
          step.norm() > 1e-6 ? std::atan2(step.y, step.x) : cur.pose.heading;
      fill_obb({{pos.x, pos.y, heading}, cur.box.length, cur.box.width}, spec, mask);
    }
  }
  return mask;
}

std::vector<double> edt_squared(const BinaryMask& mask, int height, int width) {
  if (mask.size() != static_cast<std::size_t>(height) * width)
    throw std::invalid_argument("mask size mismatch");
  std::vector<double> dist(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) dist[i] = mask[i] ? 0.0 : kInf;

  const int n = std::max(height, width);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  // Columns first, then rows.
  for (int c = 0; c < width; ++c) {
    for (int r = 0; r < height; ++r) f[r] = dist[static_cast<std::size_t>(r) * width + c];
    edt_1d(f.data(), d.data(), height, v.data(), z.data());
    for (int r = 0; r < height; ++r) dist[static_cast<std::size_t>(r) * width + c] = d[r];
  }
  for (int r = 0; r < height; ++r) {
    double* row = dist.data() + static_cast<std::size_t>(r) * width;
    std::copy(row, row + width, f.data());
    edt_1d(f.data(), d.data(), width, v.data(), z.data());
    std::copy(d.data(), d.data() + width, row);
  }
  return dist;
}

Esdf esdf(const BinaryMask& mask, const GridSpec& spec) {
  if (mask.empty()) throw std::invalid_argument("esdf: empty mask");
  BinaryMask inverted(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) inverted[i] = mask[i] ? 0 : 1;

  const std::vector<double> d2_occ = edt_squared(mask, spec.height, spec.width);
  const std::vector<double> d2_free = edt_squared(inverted, spec.height, spec.width);

  const double diag =
      std::hypot(spec.height * spec.resolution, spec.width * spec.resolution);
  Esdf field{spec, std::vector<double>(mask.size())};
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double to_occ =
        d2_occ[i] == kInf ? diag : std::min(diag, std::sqrt(d2_occ[i]) * spec.resolution);
    const double to_free =
        d2_free[i] == kInf ? diag
                           : std::min(diag, std::sqrt(d2_free[i]) * spec.resolution);
    field.values[i] = to_occ - to_free;
  }
  return field;
}

SampleResult sample_with_gradient(const Esdf& field, const Vec2& world_point) {
  const GridSpec& spec = field.spec;
  const Vec2 g = spec.world_to_grid(world_point);

  const double max_c = static_cast<double>(spec.width - 1);
  const double max_r = static_cast<double>(spec.height - 1);
  const bool clamped_c = g.x <= 0.0 || g.x >= max_c;
  const bool clamped_r = g.y <= 0.0 || g.y >= max_r;
  const double u = std::clamp(g.x, 0.0, max_c);
  const double v = std::clamp(g.y, 0.0, max_r);

  const int c0 = std::min(static_cast<int>(u), spec.width - 2);
  const int r0 = std::min(static_cast<int>(v), spec.height - 2);
  const double fu = u - c0;
  const double fv = v - r0;

  const double q00 = field.at(r0, c0);
  const double q01 = field.at(r0, c0 + 1);
  const double q10 = field.at(r0 + 1, c0);
  const double q11 = field.at(r0 + 1, c0 + 1);

  SampleResult out;
  out.value = q00 * (1 - fu) * (1 - fv) + q01 * fu * (1 - fv) + q10 * (1 - fu) * fv +
              q11 * fu * fv;

  double dval_du = (q01 - q00) * (1 - fv) + (q11 - q10) * fv;
  double dval_dv = (q10 - q00) * (1 - fu) + (q11 - q01) * fu;
  if (clamped_c) dval_du = 0.0;
  if (clamped_r) dval_dv = 0.0;

  // Chain through grid = ([R^T (p - p0)].x / res + ..., -[..].y / res + ...).
  const double ch = std::cos(spec.origin.heading), sh = std::sin(spec.origin.heading);
  const double inv_res = 1.0 / spec.resolution;
  const Vec2 du_dworld = {ch * inv_res, sh * inv_res};
  const Vec2 dv_dworld = {sh * inv_res, -ch * inv_res};
  out.gradient = {dval_du * du_dworld.x + dval_dv * dv_dworld.x,
                  dval_du * du_dworld.y + dval_dv * dv_dworld.y};
  return out;
}

std::vector<SampleResult> sample_with_gradient(const Esdf& field,
                                               const std::vector<Vec2>& world_points) {
  std::vector<SampleResult> out;
  out.reserve(world_points.size());
  for (const Vec2& p : world_points) out.push_back(sample_with_gradient(field, p));
  return out;
}

}  // namespace plankit
