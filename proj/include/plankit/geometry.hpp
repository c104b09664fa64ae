#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace plankit {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
  Vec2 rotated(double angle) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }
  // Left-hand normal (90 deg counter-clockwise).
  Vec2 normal() const { return {-y, x}; }
  bool operator==(const Vec2& o) const = default;
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Normalizes an angle into (-pi, pi].
double normalize_angle(double angle);

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, (-pi, pi]

  Vec2 position() const { return {x, y}; }
  Vec2 tangent() const { return {std::cos(heading), std::sin(heading)}; }
  // World point of a location given in this pose's frame.
  Vec2 to_world(const Vec2& local) const {
    return position() + local.rotated(heading);
  }
  // This pose's frame coordinates of a world point.
  Vec2 to_local(const Vec2& world) const {
    return (world - position()).rotated(-heading);
  }
  bool operator==(const Pose2D& o) const = default;
};

// Oriented rectangle, center + heading + full extents.
struct Obb {
  Pose2D pose;
  double length = 0.0;  // extent along heading
  double width = 0.0;   // extent across heading

  std::array<Vec2, 4> corners() const;
  double bounding_radius() const { return 0.5 * std::hypot(length, width); }
  bool contains(const Vec2& p) const;
};

// Strict overlap: boxes that merely touch do not intersect.
bool obb_overlap(const Obb& a, const Obb& b);

struct PolylineProjection {
  double arclength = 0.0;  // along the polyline, clamped to [0, total]
  double lateral = 0.0;    // signed, positive left of the local tangent
  double distance = 0.0;   // unsigned point-to-polyline distance
  std::size_t segment = 0;
  double fraction = 0.0;  // position within the segment, [0, 1]
};

double polyline_length(const std::vector<Vec2>& pts);
std::vector<double> cumulative_arclength(const std::vector<Vec2>& pts);

// Point at a given arclength (clamped). Requires >= 2 points.
Vec2 polyline_interpolate(const std::vector<Vec2>& pts,
                          const std::vector<double>& arclength, double s);

PolylineProjection project_to_polyline(const std::vector<Vec2>& pts,
                                       const std::vector<double>& arclength,
                                       const Vec2& point);

// n uniformly spaced samples over the polyline's arclength span.
std::vector<Vec2> resample_polyline(const std::vector<Vec2>& pts, int n);

// Deterministic RNG with a portable uniform mapping (the standard
// distributions are implementation-defined, which would break seed
// reproducibility across toolchains).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64();
  double uniform01();  // [0, 1)
  double uniform(double lo, double hi);
  // Uniform integer in [0, n), n > 0.
  std::size_t uniform_index(std::size_t n);
  bool bernoulli(double p);

 private:
  std::uint64_t state_;
};

}  // namespace plankit
