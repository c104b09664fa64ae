#include "plankit/lane_graph.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

namespace plankit {

namespace {

ReferenceLine build_reference_line(const std::vector<Vec2>& path,
                                   std::vector<std::string> lane_ids,
                                   double max_length, int n_pts) {
  const std::vector<double> s = cumulative_arclength(path);
  const double total = std::min(s.back(), max_length);

  ReferenceLine ref;
  ref.source_lane_ids = std::move(lane_ids);
  ref.points.reserve(static_cast<std::size_t>(n_pts));
  ref.arclength.reserve(static_cast<std::size_t>(n_pts));
  for (int i = 0; i < n_pts; ++i) {
    const double si = total * static_cast<double>(i) / static_cast<double>(n_pts - 1);
    ref.points.push_back(polyline_interpolate(path, s, si));
    ref.arclength.push_back(si);
  }

  ref.headings.resize(ref.points.size());
  for (std::size_t i = 0; i < ref.points.size(); ++i) {
    const Vec2& a = ref.points[i == 0 ? 0 : i - 1];
    const Vec2& b = ref.points[std::min(i + 1, ref.points.size() - 1)];
    ref.headings[i] = std::atan2(b.y - a.y, b.x - a.x);
  }
  return ref;
}

// True if `needle` appears as a contiguous run inside `hay`.
bool contiguous_subsequence(const std::vector<std::string>& needle,
                            const std::vector<std::string>& hay) {
  if (needle.size() > hay.size()) return false;
  for (std::size_t start = 0; start + needle.size() <= hay.size(); ++start) {
    bool match = true;
    for (std::size_t i = 0; i < needle.size(); ++i)
      if (hay[start + i] != needle[i]) {
        match = false;
        break;
      }
    if (match) return true;
  }
  return false;
}

struct RawPath {
  std::vector<std::string> lane_ids;
  std::vector<Vec2> points;
};

void dfs_paths(const Scenario& scenario, const Lane& lane, double remaining,
               std::vector<std::string>& id_stack, std::vector<Vec2>& point_stack,
               std::vector<RawPath>& out) {
  const std::size_t id_mark = id_stack.size();
  const std::size_t pt_mark = point_stack.size();

  id_stack.push_back(lane.id);
  for (const Vec2& p : lane.centerline) {
    if (!point_stack.empty() && (point_stack.back() - p).norm() < 1e-9) continue;
    point_stack.push_back(p);
  }

  const double used = polyline_length(point_stack);
  bool extended = false;
  if (used < remaining) {
    for (const std::string& succ_id : lane.successors) {
      if (std::find(id_stack.begin(), id_stack.end(), succ_id) != id_stack.end())
        continue;  // cycle guard
      const Lane* succ = scenario.find_lane(succ_id);
      if (!succ) continue;
      dfs_paths(scenario, *succ, remaining, id_stack, point_stack, out);
      extended = true;
    }
  }
  if (!extended && point_stack.size() >= 2)
    out.push_back({id_stack, point_stack});

  id_stack.resize(id_mark);
  point_stack.resize(pt_mark);
}

}  // namespace

Vec2 ReferenceLine::point_at(double s) const {
  return polyline_interpolate(points, arclength, s);
}

double ReferenceLine::heading_at(double s) const {
  if (points.size() < 2) throw std::invalid_argument("empty reference line");
  s = std::clamp(s, 0.0, length());
  auto it = std::upper_bound(arclength.begin(), arclength.end(), s);
  std::size_t i = std::min<std::size_t>(
      std::max<std::ptrdiff_t>(1, it - arclength.begin()), points.size() - 1);
  const double seg = arclength[i] - arclength[i - 1];
  const double t = seg > 0.0 ? (s - arclength[i - 1]) / seg : 0.0;
  const double dh = normalize_angle(headings[i] - headings[i - 1]);
  return normalize_angle(headings[i - 1] + t * dh);
}

double ReferenceLine::curvature_at(double s) const {
  if (points.size() < 2) return 0.0;
  s = std::clamp(s, 0.0, length());
  auto it = std::upper_bound(arclength.begin(), arclength.end(), s);
  std::size_t i = std::min<std::size_t>(
      std::max<std::ptrdiff_t>(1, it - arclength.begin()), points.size() - 1);
  const double ds = arclength[i] - arclength[i - 1];
  if (ds <= 0.0) return 0.0;
  return normalize_angle(headings[i] - headings[i - 1]) / ds;
}

std::vector<ReferenceLine> find_reference_lines(const Scenario& scenario,
                                                const ReferenceLineParams& params) {
  if (params.search_radius <= 0.0 || params.max_length <= 0.0 || params.num_points < 2)
    throw std::invalid_argument("find_reference_lines: invalid parameters");

  const Vec2 av_pos = scenario.av.current().pose.position();

  std::vector<const Lane*> roots;
  for (const Lane& lane : scenario.lanes) {
    const auto s = cumulative_arclength(lane.centerline);
    if (project_to_polyline(lane.centerline, s, av_pos).distance <=
        params.search_radius)
      roots.push_back(&lane);
  }
  if (roots.empty()) return {};

  std::vector<RawPath> raw;
  for (const Lane* root : roots) {
    std::vector<std::string> id_stack;
    std::vector<Vec2> point_stack;
    dfs_paths(scenario, *root, params.max_length, id_stack, point_stack, raw);
  }

  // Drop paths contained in another path; identical sequences keep one.
  std::sort(raw.begin(), raw.end(), [](const RawPath& a, const RawPath& b) {
    if (a.lane_ids.size() != b.lane_ids.size())
      return a.lane_ids.size() > b.lane_ids.size();
    return a.lane_ids < b.lane_ids;
  });
  std::vector<RawPath> kept;
  for (RawPath& p : raw) {
    bool dominated = false;
    for (const RawPath& k : kept)
      if (contiguous_subsequence(p.lane_ids, k.lane_ids)) {
        dominated = true;
        break;
      }
    if (!dominated) kept.push_back(std::move(p));
  }
  std::sort(kept.begin(), kept.end(),
            [](const RawPath& a, const RawPath& b) { return a.lane_ids < b.lane_ids; });

  std::vector<ReferenceLine> refs;
  refs.reserve(kept.size());
  for (RawPath& p : kept)
    refs.push_back(build_reference_line(p.points, std::move(p.lane_ids),
                                        params.max_length, params.num_points));
  return refs;
}

FrenetCoord project(const ReferenceLine& ref, const Vec2& point) {
  if (ref.points.size() < 2) throw std::invalid_argument("empty reference line");
  const PolylineProjection p = project_to_polyline(ref.points, ref.arclength, point);
  return {std::clamp(p.arclength, 0.0, ref.length()), p.lateral};
}

std::optional<std::size_t> nearest_reference_line(
    const std::vector<ReferenceLine>& refs, const Vec2& point) {
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const double d = std::abs(project(refs[i], point).d);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::optional<ReferenceLine> route_reference_line(const Scenario& scenario,
                                                  double max_length) {
  if (scenario.route_lane_ids.empty()) return std::nullopt;

  const Vec2 av_pos = scenario.av.current().pose.position();
  const Lane* start = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Lane& lane : scenario.lanes) {
    if (!scenario.route_lane_ids.count(lane.id)) continue;
    const auto s = cumulative_arclength(lane.centerline);
    const double d = project_to_polyline(lane.centerline, s, av_pos).distance;
    if (d < best_d) {
      best_d = d;
      start = &lane;
    }
  }
  if (!start) return std::nullopt;

  std::vector<std::string> ids;
  std::vector<Vec2> points;
  const Lane* cur = start;
  while (cur) {
    ids.push_back(cur->id);
    for (const Vec2& p : cur->centerline) {
      if (!points.empty() && (points.back() - p).norm() < 1e-9) continue;
      points.push_back(p);
    }
    const Lane* next = nullptr;
    for (const std::string& succ : cur->successors) {
      if (!scenario.route_lane_ids.count(succ)) continue;
      if (std::find(ids.begin(), ids.end(), succ) != ids.end()) continue;
      next = scenario.find_lane(succ);
      break;
    }
    cur = next;
  }
  if (points.size() < 2) return std::nullopt;
  const int n = std::max(2, static_cast<int>(std::min(polyline_length(points),
                                                      max_length)));
  return build_reference_line(points, std::move(ids), max_length, n);
}

}  // namespace plankit
