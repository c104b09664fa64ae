#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "plankit/scene.hpp"

namespace plankit {

// Grid anchored at `origin` (grid center, normally the AV pose); rows run
// toward -y in the origin frame, columns toward +x. Cell (r, c) holds the
// field value at its center.
struct GridSpec {
  int height = 500;
  int width = 500;
  double resolution = 0.2;  // m/cell
  Pose2D origin;

  // Continuous grid coordinates (col, row) of a world point; cell centers
  // map to integer coordinates.
  Vec2 world_to_grid(const Vec2& world) const {
    const Vec2 local = origin.to_local(world);
    return {local.x / resolution + 0.5 * (width - 1),
            -local.y / resolution + 0.5 * (height - 1)};
  }
  Vec2 grid_to_world(double row, double col) const {
    const Vec2 local = {(col - 0.5 * (width - 1)) * resolution,
                        -(row - 0.5 * (height - 1)) * resolution};
    return origin.to_world(local);
  }
  std::size_t cells() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
};

using BinaryMask = std::vector<std::uint8_t>;  // row-major, height * width

struct Esdf {
  GridSpec spec;
  std::vector<double> values;  // meters, positive in free space

  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * spec.width + col];
  }
};

struct SampleResult {
  double value = 0.0;
  Vec2 gradient;  // d(value)/d(world x, y)
};

// Cell = 1 iff its center lies outside every lane strip (between the left
// and right boundaries). Centers exactly on a boundary count as occupied.
BinaryMask rasterize_nondrivable(const Scenario& scenario, const GridSpec& spec);

// Cell = 1 iff covered by a static obstacle box or, when `include_agents_at`
// is set, by an agent box at that time (0 = current frame, k >= 1 = GT future
// step k-1). Boundary cells count as occupied.
BinaryMask rasterize_obstacles(const Scenario& scenario, const GridSpec& spec,
                               std::optional<int> include_agents_at = std::nullopt);

// Exact two-pass squared Euclidean distance transform (lower envelope of
// parabolas); output in squared cell units, exact integers for any mask.
std::vector<double> edt_squared(const BinaryMask& mask, int height, int width);

// Signed distance: distance-to-occupied minus distance-to-free, meters.
// Degenerate all-free / all-occupied masks clamp at the grid diagonal.
Esdf esdf(const BinaryMask& mask, const GridSpec& spec);

// Bilinear interpolation with the analytic gradient of the interpolant.
// Out-of-grid queries clamp to the border with zero gradient along the
// clamped axis.
SampleResult sample_with_gradient(const Esdf& field, const Vec2& world_point);
std::vector<SampleResult> sample_with_gradient(const Esdf& field,
                                               const std::vector<Vec2>& world_points);

}  // namespace plankit
