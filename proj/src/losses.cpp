#include "plankit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plankit {

double heading_normalization_error(const Trajectory& traj) {
  double worst = 0.0;
  for (const TrajectoryPoint& p : traj.points)
    worst = std::max(worst, std::abs(p.cos_h * p.cos_h + p.sin_h * p.sin_h - 1.0));
  return worst;
}

std::vector<std::vector<Vec2>> covering_circle_centers(const Trajectory& traj,
                                                       const CoveringCircleModel& model) {
  std::vector<std::vector<Vec2>> centers(traj.size());
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const TrajectoryPoint& p = traj.points[t];
    centers[t].reserve(model.offsets.size());
    for (double offset : model.offsets)
      centers[t].push_back({p.x + offset * p.cos_h, p.y + offset * p.sin_h});
  }
  return centers;
}

namespace {

AuxLossResult hinge_field_loss(const Trajectory& traj, const Esdf& field,
                               const CoveringCircleModel& model,
                               bool per_step_normalization) {
  AuxLossResult out;
  out.grad.rows.assign(traj.size(), {0, 0, 0, 0, 0, 0});
  if (traj.empty()) return out;

  const double threshold = model.radius + model.epsilon;
  double hinge_sum = 0.0;
  std::size_t active = 0;

  // d(hinge)/d(center) accumulated per point; the count normalizer is
  // treated as a constant (the active mask is detached).
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const TrajectoryPoint& p = traj.points[t];
    for (double offset : model.offsets) {
      const Vec2 center{p.x + offset * p.cos_h, p.y + offset * p.sin_h};
      const SampleResult s = sample_with_gradient(field, center);
      const double cost = threshold - s.value;
      if (cost <= 0.0) continue;
      hinge_sum += cost;
      ++active;
      auto& g = out.grad.rows[t];
      g[0] -= s.gradient.x;
      g[1] -= s.gradient.y;
      g[2] -= s.gradient.x * offset;
      g[3] -= s.gradient.y * offset;
    }
  }

  const double denom = per_step_normalization
                           ? static_cast<double>(traj.size())
                           : static_cast<double>(active) + 1e-6;
  out.loss = hinge_sum / denom;
  for (auto& g : out.grad.rows)
    for (double& v : g) v /= denom;
  return out;
}

}  // namespace

AuxLossResult drivable_area_loss(const Trajectory& traj, const Esdf& field,
                                 const CoveringCircleModel& model,
                                 bool per_step_normalization) {
  return hinge_field_loss(traj, field, model, per_step_normalization);
}

AuxLossResult collision_loss(const Trajectory& traj, const Esdf& obstacle_field,
                             const CoveringCircleModel& model,
                             bool per_step_normalization) {
  return hinge_field_loss(traj, obstacle_field, model, per_step_normalization);
}

std::optional<TargetAssignment> assign_target(const std::vector<Vec2>& gt_positions,
                                              const std::vector<ReferenceLine>& refs,
                                              int n_lon) {
  if (n_lon < 2) throw std::invalid_argument("assign_target: n_lon must be >= 2");
  if (refs.empty()) return std::nullopt;
  if (gt_positions.empty())
    throw std::invalid_argument("assign_target: empty ground truth");

  const Vec2 endpoint = gt_positions.back();
  std::size_t best_ref = 0;
  double best_lat = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const double lat = std::abs(project(refs[i], endpoint).d);
    if (lat < best_lat) {  // ties keep the smaller index
      best_lat = lat;
      best_ref = i;
    }
  }

  const ReferenceLine& ref = refs[best_ref];
  const double s = project(ref, endpoint).s;
  const double total = ref.length();
  const int segments = n_lon - 1;
  int lon;
  if (s >= total) {
    lon = n_lon - 1;  // at or beyond the line end
  } else {
    lon = static_cast<int>(std::floor(s / total * segments));
    lon = std::clamp(lon, 0, segments - 1);
  }
  return TargetAssignment{best_ref, lon};
}

double smooth_l1(double error, double delta) {
  const double a = std::abs(error);
  return a < delta ? 0.5 * a * a / delta : a - 0.5 * delta;
}

namespace {

double mean_smooth_l1(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("smooth-L1: trajectory length mismatch");
  if (a.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const TrajectoryPoint& p = a.points[t];
    const TrajectoryPoint& q = b.points[t];
    sum += smooth_l1(p.x - q.x) + smooth_l1(p.y - q.y) + smooth_l1(p.cos_h - q.cos_h) +
           smooth_l1(p.sin_h - q.sin_h) + smooth_l1(p.vx - q.vx) + smooth_l1(p.vy - q.vy);
  }
  return sum / (6.0 * static_cast<double>(a.size()));
}

double cross_entropy(const std::vector<double>& logits, std::size_t target) {
  if (target >= logits.size())
    throw std::invalid_argument("cross_entropy: target out of range");
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (double l : logits) denom += std::exp(l - max_logit);
  return std::log(denom) - (logits[target] - max_logit);
}

}  // namespace

double imitation_loss(const std::vector<std::vector<Trajectory>>& proposals,
                      const std::vector<double>& score_logits, const Trajectory& free,
                      const Trajectory& gt, const TargetAssignment& target) {
  if (target.ref_index >= proposals.size() ||
      target.lon_index >= static_cast<int>(proposals[target.ref_index].size()))
    throw std::invalid_argument("imitation_loss: target outside the proposal grid");
  const std::size_t n_lon = proposals[target.ref_index].size();
  const std::size_t flat = target.ref_index * n_lon +
                           static_cast<std::size_t>(target.lon_index);
  const Trajectory& assigned =
      proposals[target.ref_index][static_cast<std::size_t>(target.lon_index)];
  return mean_smooth_l1(assigned, gt) + mean_smooth_l1(free, gt) +
         cross_entropy(score_logits, flat);
}

double prediction_loss(const std::vector<std::vector<Vec2>>& pred,
                       const std::vector<std::vector<Vec2>>& gt,
                       const std::vector<std::vector<bool>>& valid_mask) {
  if (pred.size() != gt.size() || pred.size() != valid_mask.size())
    throw std::invalid_argument("prediction_loss: shape mismatch");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t a = 0; a < pred.size(); ++a) {
    if (pred[a].size() != gt[a].size() || pred[a].size() != valid_mask[a].size())
      throw std::invalid_argument("prediction_loss: shape mismatch");
    for (std::size_t t = 0; t < pred[a].size(); ++t) {
      if (!valid_mask[a][t]) continue;
      sum += smooth_l1(pred[a][t].x - gt[a][t].x) + smooth_l1(pred[a][t].y - gt[a][t].y);
      count += 2;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

namespace {

double vec_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double vec_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// d sim(u, v) / d u for fixed v.
std::vector<double> cosine_grad_u(const std::vector<double>& u,
                                  const std::vector<double>& v, double sim) {
  const double nu = vec_norm(u), nv = vec_norm(v);
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    g[i] = (v[i] / nv - sim * u[i] / nu) / nu;
  return g;
}

double log1p_exp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

ContrastiveResult contrastive_loss(const std::vector<double>& z,
                                   const std::vector<double>& z_pos,
                                   const std::vector<double>& z_neg, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("contrastive_loss: sigma must be > 0");
  if (z.size() != z_pos.size() || z.size() != z_neg.size())
    throw std::invalid_argument("contrastive_loss: dimension mismatch");
  if (vec_norm(z) == 0.0 || vec_norm(z_pos) == 0.0 || vec_norm(z_neg) == 0.0)
    throw std::invalid_argument("contrastive_loss: zero vector");

  const double sim_pos = vec_dot(z, z_pos) / (vec_norm(z) * vec_norm(z_pos));
  const double sim_neg = vec_dot(z, z_neg) / (vec_norm(z) * vec_norm(z_neg));

  // loss = log(1 + exp((sim_neg - sim_pos) / sigma))
  const double a = (sim_neg - sim_pos) / sigma;
  ContrastiveResult out;
  out.loss = log1p_exp(a);

  const double p = 1.0 / (1.0 + std::exp(-a));  // d loss / d a
  const double dloss_dsim_pos = -p / sigma;
  const double dloss_dsim_neg = p / sigma;

  const std::vector<double> dpos_dz = cosine_grad_u(z, z_pos, sim_pos);
  const std::vector<double> dneg_dz = cosine_grad_u(z, z_neg, sim_neg);
  const std::vector<double> dpos_dzp = cosine_grad_u(z_pos, z, sim_pos);
  const std::vector<double> dneg_dzn = cosine_grad_u(z_neg, z, sim_neg);

  out.grad_z.resize(z.size());
  out.grad_pos.resize(z.size());
  out.grad_neg.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    out.grad_z[i] = dloss_dsim_pos * dpos_dz[i] + dloss_dsim_neg * dneg_dz[i];
    out.grad_pos[i] = dloss_dsim_pos * dpos_dzp[i];
    out.grad_neg[i] = dloss_dsim_neg * dneg_dzn[i];
  }
  return out;
}

double total_loss(double imitation, double prediction, double auxiliary,
                  double contrastive, const LossWeights& w) {
  return w.imitation * imitation + w.prediction * prediction + w.auxiliary * auxiliary +
         w.contrastive * contrastive;
}

}  // namespace plankit
