#include "plankit/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace plankit {

double normalize_angle(double angle) {
  double a = std::fmod(angle + M_PI, 2.0 * M_PI);
  if (a <= 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

std::array<Vec2, 4> Obb::corners() const {
  const Vec2 t = pose.tangent();
  const Vec2 n = t.normal();
  const Vec2 c = pose.position();
  const Vec2 dl = t * (0.5 * length);
  const Vec2 dw = n * (0.5 * width);
  return {c + dl + dw, c + dl - dw, c - dl - dw, c - dl + dw};
}

bool Obb::contains(const Vec2& p) const {
  const Vec2 local = pose.to_local(p);
  return std::abs(local.x) <= 0.5 * length && std::abs(local.y) <= 0.5 * width;
}

namespace {

// Projection radius of a box onto a unit axis.
double obb_projection_radius(const Obb& b, const Vec2& axis) {
  const Vec2 t = b.pose.tangent();
  return 0.5 * b.length * std::abs(t.dot(axis)) +
         0.5 * b.width * std::abs(t.normal().dot(axis));
}

}  // namespace

bool obb_overlap(const Obb& a, const Obb& b) {
  const Vec2 d = b.pose.position() - a.pose.position();
  // Cheap reject on bounding circles.
  const double r = a.bounding_radius() + b.bounding_radius();
  if (d.squared_norm() >= r * r) return false;

  const Vec2 ta = a.pose.tangent();
  const Vec2 tb = b.pose.tangent();
  const std::array<Vec2, 4> axes = {ta, ta.normal(), tb, tb.normal()};
  for (const Vec2& axis : axes) {
    const double sep = std::abs(d.dot(axis));
    if (sep >= obb_projection_radius(a, axis) + obb_projection_radius(b, axis))
      return false;
  }
  return true;
}

double polyline_length(const std::vector<Vec2>& pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += (pts[i] - pts[i - 1]).norm();
  return total;
}

std::vector<double> cumulative_arclength(const std::vector<Vec2>& pts) {
  std::vector<double> s(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i)
    s[i] = s[i - 1] + (pts[i] - pts[i - 1]).norm();
  return s;
}

Vec2 polyline_interpolate(const std::vector<Vec2>& pts,
                          const std::vector<double>& arclength, double s) {
  if (pts.size() < 2) throw std::invalid_argument("polyline needs >= 2 points");
  s = std::clamp(s, arclength.front(), arclength.back());
  auto it = std::upper_bound(arclength.begin(), arclength.end(), s);
  std::size_t i = std::min<std::size_t>(
      std::max<std::ptrdiff_t>(1, it - arclength.begin()), pts.size() - 1);
  const double seg = arclength[i] - arclength[i - 1];
  const double t = seg > 0.0 ? (s - arclength[i - 1]) / seg : 0.0;
  return pts[i - 1] + (pts[i] - pts[i - 1]) * t;
}

PolylineProjection project_to_polyline(const std::vector<Vec2>& pts,
                                       const std::vector<double>& arclength,
                                       const Vec2& point) {
  if (pts.size() < 2) throw std::invalid_argument("polyline needs >= 2 points");
  PolylineProjection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i];
    const Vec2 ab = pts[i + 1] - a;
    const double len2 = ab.squared_norm();
    double t = len2 > 0.0 ? std::clamp((point - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Vec2 foot = a + ab * t;
    const double d2 = (point - foot).squared_norm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best.segment = i;
      best.fraction = t;
      best.arclength = arclength[i] + t * (arclength[i + 1] - arclength[i]);
      const Vec2 tangent = ab.normalized();
      const double side = tangent.cross(point - foot);
      best.distance = std::sqrt(d2);
      best.lateral = side >= 0.0 ? best.distance : -best.distance;
    }
  }
  return best;
}

std::vector<Vec2> resample_polyline(const std::vector<Vec2>& pts, int n) {
  if (pts.size() < 2) throw std::invalid_argument("polyline needs >= 2 points");
  if (n < 2) throw std::invalid_argument("resample count must be >= 2");
  const std::vector<double> s = cumulative_arclength(pts);
  const double total = s.back();
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double si = total * static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back(polyline_interpolate(pts, s, si));
  }
  return out;
}

std::uint64_t Rng::next_u64() {
  // splitmix64
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index over empty range");
  return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
}

bool Rng::bernoulli(double p) { return uniform01() < p; }

}  // namespace plankit
