#include "plankit/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plankit/losses.hpp"

namespace plankit {

namespace {

Esdf random_field(Rng& rng, int size, double resolution) {
  GridSpec spec{size, size, resolution, {}};
  BinaryMask mask(spec.cells(), 0);
  const std::size_t occupied = spec.cells() / 8 + 1;
  for (std::size_t i = 0; i < occupied; ++i)
    mask[rng.uniform_index(mask.size())] = 1;
  return esdf(mask, spec);
}

double relative_error(double analytic, double numeric) {
  const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / scale;
}

GradcheckEntry check_bilinear(Rng& rng) {
  GradcheckEntry entry{"bilinear_sampling_gradient", false, 0.0, 1e-5};
  const Esdf field = random_field(rng, 48, 0.25);
  const double h = 1e-4 * field.spec.resolution;
  for (int i = 0; i < 1000; ++i) {
    // Interior, away from cell-center alignment in both axes.
    const double cell_x = rng.uniform(0.15, 0.85);
    const double cell_y = rng.uniform(0.15, 0.85);
    const double gx = std::floor(rng.uniform01() * (field.spec.width - 3)) + cell_x;
    const double gy = std::floor(rng.uniform01() * (field.spec.height - 3)) + cell_y;
    const Vec2 p = field.spec.grid_to_world(gy, gx);
    const SampleResult s = sample_with_gradient(field, p);
    const double fx = (sample_with_gradient(field, {p.x + h, p.y}).value -
                       sample_with_gradient(field, {p.x - h, p.y}).value) /
                      (2.0 * h);
    const double fy = (sample_with_gradient(field, {p.x, p.y + h}).value -
                       sample_with_gradient(field, {p.x, p.y - h}).value) /
                      (2.0 * h);
    entry.max_error = std::max({entry.max_error, relative_error(s.gradient.x, fx),
                                relative_error(s.gradient.y, fy)});
  }
  entry.pass = entry.max_error < entry.tolerance;
  return entry;
}

Trajectory random_trajectory(Rng& rng, const Esdf& field, int n) {
  Trajectory traj;
  traj.points.resize(static_cast<std::size_t>(n));
  const double span_x = 0.35 * field.spec.width * field.spec.resolution;
  const double span_y = 0.35 * field.spec.height * field.spec.resolution;
  for (int k = 0; k < n; ++k) {
    TrajectoryPoint& p = traj.points[static_cast<std::size_t>(k)];
    p.x = rng.uniform(-span_x, span_x);
    p.y = rng.uniform(-span_y, span_y);
    const double heading = rng.uniform(-M_PI, M_PI);
    p.cos_h = std::cos(heading);
    p.sin_h = std::sin(heading);
    p.vx = rng.uniform(-5.0, 5.0);
    p.vy = rng.uniform(-5.0, 5.0);
  }
  return traj;
}

// Central differences on the six channels; points whose perturbation crosses
// a hinge activation or a cell boundary are skipped (the surface is not
// differentiable there).
GradcheckEntry check_aux_loss(const std::string& name, Rng& rng,
                              const CoveringCircleModel& circles) {
  GradcheckEntry entry{name, false, 0.0, 1e-5};
  const Esdf field = random_field(rng, 40, 0.3);
  const double h = 1e-6;
  const double threshold = circles.radius + circles.epsilon;

  for (int trial = 0; trial < 20; ++trial) {
    const Trajectory traj = random_trajectory(rng, field, 12);

    // Skip kink-adjacent trajectories.
    bool near_kink = false;
    for (const auto& centers : covering_circle_centers(traj, circles))
      for (const Vec2& c : centers) {
        const double d = sample_with_gradient(field, c).value;
        if (std::abs(threshold - d) < 1e-3) near_kink = true;
        const Vec2 g = field.spec.world_to_grid(c);
        const double fx = g.x - std::floor(g.x);
        const double fy = g.y - std::floor(g.y);
        if (fx < 1e-3 || fx > 1.0 - 1e-3 || fy < 1e-3 || fy > 1.0 - 1e-3)
          near_kink = true;
      }
    if (near_kink) continue;

    const AuxLossResult res = drivable_area_loss(traj, field, circles);
    for (std::size_t t = 0; t < traj.size(); ++t) {
      for (int ch = 0; ch < 6; ++ch) {
        auto perturbed = [&](double delta) {
          Trajectory copy = traj;
          TrajectoryPoint& p = copy.points[t];
          switch (ch) {
            case 0: p.x += delta; break;
            case 1: p.y += delta; break;
            case 2: p.cos_h += delta; break;
            case 3: p.sin_h += delta; break;
            case 4: p.vx += delta; break;
            case 5: p.vy += delta; break;
          }
          return drivable_area_loss(copy, field, circles).loss;
        };
        const double numeric = (perturbed(h) - perturbed(-h)) / (2.0 * h);
        entry.max_error =
            std::max(entry.max_error, relative_error(res.grad.rows[t][ch], numeric));
      }
    }
  }
  entry.pass = entry.max_error < entry.tolerance;
  return entry;
}

GradcheckEntry check_contrastive(Rng& rng, double sigma) {
  GradcheckEntry entry{"contrastive_gradient", false, 0.0, 1e-6};
  const int dim = 128;
  const double h = 1e-7;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> z(dim), zp(dim), zn(dim);
    for (int i = 0; i < dim; ++i) {
      z[i] = rng.uniform(-1.0, 1.0);
      zp[i] = rng.uniform(-1.0, 1.0);
      zn[i] = rng.uniform(-1.0, 1.0);
    }
    const ContrastiveResult res = contrastive_loss(z, zp, zn, sigma);
    auto fd = [&](std::vector<double>& vec, int i) {
      const double orig = vec[i];
      vec[i] = orig + h;
      const double up = contrastive_loss(z, zp, zn, sigma).loss;
      vec[i] = orig - h;
      const double down = contrastive_loss(z, zp, zn, sigma).loss;
      vec[i] = orig;
      return (up - down) / (2.0 * h);
    };
    for (int i = 0; i < dim; i += 7) {
      entry.max_error = std::max(entry.max_error, relative_error(res.grad_z[i], fd(z, i)));
      entry.max_error =
          std::max(entry.max_error, relative_error(res.grad_pos[i], fd(zp, i)));
      entry.max_error =
          std::max(entry.max_error, relative_error(res.grad_neg[i], fd(zn, i)));
    }
  }
  entry.pass = entry.max_error < entry.tolerance;
  return entry;
}

GradcheckEntry check_contrastive_values(double sigma) {
  GradcheckEntry entry{"contrastive_reference_values", false, 0.0, 1e-12};
  // Symmetric case: equal similarities -> ln 2. Orthogonal pair keeps both
  // cosines at zero.
  const std::vector<double> z = {1.0, 0.0};
  const std::vector<double> zp = {0.0, 1.0};
  const std::vector<double> zn = {0.0, -1.0};
  const double symmetric = contrastive_loss(z, zp, zn, sigma).loss;
  entry.max_error = std::abs(symmetric - std::log(2.0));

  const std::vector<double> aligned = {2.0, 0.0};
  const std::vector<double> opposed = {-3.0, 0.0};
  const double extreme = contrastive_loss(z, aligned, opposed, 0.1).loss;
  entry.max_error =
      std::max(entry.max_error, std::abs(extreme - std::log1p(std::exp(-20.0))));
  entry.pass = entry.max_error < entry.tolerance;
  return entry;
}

GradcheckEntry check_esdf_exact(Rng& rng) {
  GradcheckEntry entry{"esdf_exactness", false, 0.0, 0.0};
  entry.pass = true;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 32;
    BinaryMask mask(static_cast<std::size_t>(n) * n, 0);
    const std::size_t occupied = 40 + rng.uniform_index(200);
    for (std::size_t i = 0; i < occupied; ++i) mask[rng.uniform_index(mask.size())] = 1;
    const std::vector<double> fast = edt_squared(mask, n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        double best = std::numeric_limits<double>::infinity();
        for (int rr = 0; rr < n; ++rr)
          for (int cc = 0; cc < n; ++cc)
            if (mask[static_cast<std::size_t>(rr) * n + cc])
              best = std::min(best, static_cast<double>((r - rr) * (r - rr) +
                                                        (c - cc) * (c - cc)));
        if (fast[static_cast<std::size_t>(r) * n + c] != best) {
          entry.pass = false;
          entry.max_error += 1.0;
        }
      }
  }
  return entry;
}

GradcheckEntry check_assign_target(Rng& rng, int n_lon) {
  GradcheckEntry entry{"assign_target_enumeration", false, 0.0, 0.0};
  entry.pass = true;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ReferenceLine> refs;
    const int n_refs = 1 + static_cast<int>(rng.uniform_index(3));
    for (int r = 0; r < n_refs; ++r) {
      const double y = rng.uniform(-10.0, 10.0);
      const double len = rng.uniform(40.0, 120.0);
      ReferenceLine ref;
      for (int i = 0; i < 40; ++i) {
        const double s = len * i / 39.0;
        ref.points.push_back({s, y});
        ref.arclength.push_back(s);
        ref.headings.push_back(0.0);
      }
      refs.push_back(std::move(ref));
    }
    const Vec2 endpoint{rng.uniform(-20.0, 160.0), rng.uniform(-12.0, 12.0)};
    const auto got = assign_target({endpoint}, refs, n_lon);
    if (!got) {
      entry.pass = false;
      continue;
    }

    // Enumerate (ref, segment) membership directly.
    std::size_t best_ref = 0;
    double best_lat = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < refs.size(); ++r) {
      const double lat = std::abs(endpoint.y - refs[r].points.front().y);
      if (lat < best_lat) {
        best_lat = lat;
        best_ref = r;
      }
    }
    const double total = refs[best_ref].length();
    int expect = n_lon - 1;
    const double s = std::clamp(endpoint.x, 0.0, total);
    if (s < total) {
      for (int seg = 0; seg < n_lon - 1; ++seg) {
        const double lo = total * seg / (n_lon - 1);
        const double hi = total * (seg + 1) / (n_lon - 1);
        if (s >= lo && s < hi) {
          expect = seg;
          break;
        }
      }
    }
    if (got->ref_index != best_ref || got->lon_index != expect) {
      entry.pass = false;
      entry.max_error += 1.0;
    }
  }
  return entry;
}

}  // namespace

GradcheckReport run_gradcheck(const Config& config, std::uint64_t seed) {
  Rng rng(seed);
  GradcheckReport report;
  report.checks.push_back(check_bilinear(rng));
  report.checks.push_back(check_aux_loss("drivable_area_loss_gradient", rng,
                                         config.circles));
  report.checks.push_back(check_aux_loss("collision_loss_gradient", rng,
                                         config.circles));
  report.checks.push_back(check_contrastive(rng, config.contrastive_sigma));
  report.checks.push_back(check_contrastive_values(config.contrastive_sigma));
  report.checks.push_back(check_esdf_exact(rng));
  report.checks.push_back(check_assign_target(rng, config.planner.proposer.num_lon));
  report.all_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                [](const GradcheckEntry& e) { return e.pass; });
  return report;
}

std::string gradcheck_report_to_json(const GradcheckReport& report) {
  std::ostringstream out;
  out << "{\n  \"checks\": [\n";
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    const GradcheckEntry& e = report.checks[i];
    out << "    {\"name\": \"" << e.name << "\", \"pass\": " << (e.pass ? "true" : "false")
        << ", \"max_error\": " << e.max_error << ", \"tolerance\": " << e.tolerance
        << "}" << (i + 1 < report.checks.size() ? "," : "") << "\n";
  }
  out << "  ],\n  \"all_pass\": " << (report.all_pass ? "true" : "false") << "\n}\n";
  return out.str();
}

}  // namespace plankit
