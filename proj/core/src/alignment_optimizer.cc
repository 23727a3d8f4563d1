/*
 * Copyright 2026 The DriftAlign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "driftalign/alignment_optimizer.h"

#include <cmath>
#include <limits>
#include <string>

#include "driftalign/error.h"

namespace driftalign {
namespace {

constexpr double kDegenerateNorm = 1e-12;

void CheckDims(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& queries) {
  if (targets.cols() != queries.cols()) {
    throw ValidationError("target dim " + std::to_string(targets.cols()) +
                          " does not match query dim " +
                          std::to_string(queries.cols()));
  }
  if (targets.rows() == 0 || queries.rows() == 0 || targets.cols() == 0) {
    throw ValidationError("empty target or query matrix");
  }
}

}  // namespace

std::string_view ToString(UpdateRule rule) {
  return rule == UpdateRule::kLinearResidual ? "paper_eq8" : "exact_kl";
}

std::string_view ToString(Projection projection) {
  return projection == Projection::kUnitSphere ? "unit_sphere" : "none";
}

UpdateRule ParseUpdateRule(std::string_view name) {
  if (name == "paper_eq8") return UpdateRule::kLinearResidual;
  if (name == "exact_kl") return UpdateRule::kExactKl;
  throw ValidationError("unknown update rule '" + std::string(name) +
                        "' (expected paper_eq8|exact_kl)");
}

Projection ParseProjection(std::string_view name) {
  if (name == "unit_sphere") return Projection::kUnitSphere;
  if (name == "none") return Projection::kNone;
  throw ValidationError("unknown projection '" + std::string(name) +
                        "' (expected unit_sphere|none)");
}

void AlignmentConfig::Validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in [0, 1], got " +
                          std::to_string(alpha));
  }
  if (!(tau_t > 0.0) || !std::isfinite(tau_t)) {
    throw ValidationError("tau_t must be positive, got " + std::to_string(tau_t));
  }
  if (!(tau_i > 0.0) || !std::isfinite(tau_i)) {
    throw ValidationError("tau_i must be positive, got " + std::to_string(tau_i));
  }
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) {
    throw ValidationError("eta0 must be positive, got " + std::to_string(eta0));
  }
  if (iterations == 0) throw ValidationError("iterations must be at least 1");
}

std::size_t PseudoLabelMatrix::HardenedCount() const {
  std::size_t n = 0;
  for (const bool h : hardened) n += h ? 1 : 0;
  return n;
}

OptimizerState OptimizerState::Initial(Eigen::MatrixXd queries,
                                       const AlignmentConfig& cfg) {
  OptimizerState state;
  state.q_bar = std::move(queries);
  state.eta = cfg.eta0;
  return state;
}

void NormalizeRows(Eigen::MatrixXd& m, std::string_view what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double n = m.row(i).norm();
    if (!(n >= kDegenerateNorm)) {
      throw DegenerateError("degenerate " + std::string(what) + " " +
                            std::to_string(i) + ": norm " + std::to_string(n));
    }
    m.row(i) /= n;
  }
}

SimilarityDistribution ComputeSimilarityDistribution(
    const Eigen::MatrixXd& targets, const Eigen::MatrixXd& queries,
    double tau) {
  CheckDims(targets, queries);
  if (!(tau > 0.0)) throw ValidationError("temperature must be positive");
  Eigen::MatrixXd logits = targets * queries.transpose();
  logits /= tau;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    auto row = logits.row(i);
    const double max = row.maxCoeff();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      row(j) = std::exp(row(j) - max);
      sum += row(j);
    }
    row /= sum;
  }
  return {std::move(logits)};
}

PseudoLabelMatrix HardenPseudoLabels(const SimilarityDistribution& p_prime,
                                     double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in [0, 1]");
  }
  PseudoLabelMatrix out{p_prime.values,
                        std::vector<bool>(
                            static_cast<std::size_t>(p_prime.values.rows()))};
  for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
    auto row = out.values.row(i);
    Eigen::Index argmax = 0;
    for (Eigen::Index j = 1; j < row.size(); ++j) {
      if (row(j) > row(argmax)) argmax = j;
    }
    if (row(argmax) > alpha) {
      row.setZero();
      row(argmax) = 1.0;
      out.hardened[static_cast<std::size_t>(i)] = true;
    }
  }
  return out;
}

double KlObjective(const PseudoLabelMatrix& p_prime,
                   const SimilarityDistribution& p) {
  const auto& a = p_prime.values;
  const auto& b = p.values;
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("KL operands differ in shape");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double pa = a(i, j);
      if (pa <= 0.0) continue;
      const double pb = b(i, j);
      if (pb <= 0.0) return std::numeric_limits<double>::infinity();
      total += pa * (std::log(pa) - std::log(pb));
    }
  }
  return total;
}

Eigen::MatrixXd ComputeUpdate(const Eigen::MatrixXd& targets,
                              const Eigen::MatrixXd& q_bar,
                              const PseudoLabelMatrix& p_prime,
                              const AlignmentConfig& cfg) {
  CheckDims(targets, q_bar);
  if (p_prime.values.rows() != targets.rows() ||
      p_prime.values.cols() != q_bar.rows()) {
    throw ValidationError(
        "pseudo-label matrix is " + std::to_string(p_prime.values.rows()) +
        "x" + std::to_string(p_prime.values.cols()) + ", expected " +
        std::to_string(targets.rows()) + "x" + std::to_string(q_bar.rows()));
  }
  Eigen::MatrixXd residual;
  if (cfg.update_rule == UpdateRule::kLinearResidual) {
    residual = targets * q_bar.transpose();
    residual /= cfg.tau_i;
  } else {
    residual = ComputeSimilarityDistribution(targets, q_bar, cfg.tau_i).values;
  }
  residual -= p_prime.values;
  return targets.transpose() * residual;
}

OptimizerState Step(OptimizerState state, const Eigen::MatrixXd& delta,
                    std::size_t num_targets, const AlignmentConfig& cfg) {
  if (delta.rows() != state.q_bar.cols() || delta.cols() != state.q_bar.rows()) {
    throw ValidationError("update is " + std::to_string(delta.rows()) + "x" +
                          std::to_string(delta.cols()) + ", expected " +
                          std::to_string(state.q_bar.cols()) + "x" +
                          std::to_string(state.q_bar.rows()));
  }
  if (num_targets == 0) throw ValidationError("num_targets must be positive");

  const double grad_norm = delta.norm();
  if (state.prev_grad_norm && grad_norm > *state.prev_grad_norm) {
    state.eta /= 2.0;
    ++state.halvings;
  }
  const double scale =
      state.eta / (static_cast<double>(num_targets) * cfg.tau_i);
  state.q_bar.noalias() -= scale * delta.transpose();
  if (cfg.projection == Projection::kUnitSphere) {
    NormalizeRows(state.q_bar, "query row");
  }
  state.prev_grad_norm = grad_norm;
  ++state.iteration;
  return state;
}

AlignResult Align(const Eigen::MatrixXd& queries,
                  const Eigen::MatrixXd& targets, const AlignmentConfig& cfg,
                  const ProgressObserver& observer) {
  cfg.Validate();
  CheckDims(targets, queries);

  Eigen::MatrixXd start = queries;
  if (cfg.projection == Projection::kUnitSphere) NormalizeRows(start, "query row");

  PseudoLabelMatrix p_prime = HardenPseudoLabels(
      ComputeSimilarityDistribution(targets, start, cfg.tau_t), cfg.alpha);
  const std::size_t hardened_rows = p_prime.HardenedCount();

  const auto num_targets = static_cast<std::size_t>(targets.rows());
  OptimizerState state = OptimizerState::Initial(std::move(start), cfg);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    if (cfg.refresh_pseudo_labels && it > 0) {
      p_prime = HardenPseudoLabels(
          ComputeSimilarityDistribution(targets, state.q_bar, cfg.tau_t),
          cfg.alpha);
    }
    double objective = 0.0;
    if (observer) {
      objective = KlObjective(
          p_prime,
          ComputeSimilarityDistribution(targets, state.q_bar, cfg.tau_i));
    }
    const Eigen::MatrixXd delta =
        ComputeUpdate(targets, state.q_bar, p_prime, cfg);
    state = Step(std::move(state), delta, num_targets, cfg);
    if (observer) {
      observer(IterationRecord{state.iteration, state.eta,
                               *state.prev_grad_norm, objective});
    }
  }
  return AlignResult{std::move(state.q_bar), state.eta, state.halvings,
                     hardened_rows};
}

}  // namespace driftalign
