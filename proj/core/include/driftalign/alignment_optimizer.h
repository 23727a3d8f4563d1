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

// Test-time distribution alignment of query embeddings.
//
// Given queries Q (S x d) and fixed targets X (N x d), each target row gets a
// distribution over queries, P' = softmax(X Q^T / tau_t). Confident rows of P'
// are hardened into one-hot pseudo-labels. A learnable copy Q_bar of the
// queries is then moved by gradient steps so that P = softmax(X Q_bar^T /
// tau_i) approaches P' in KL divergence. Targets never move.
//
// All arithmetic is double precision; embeddings are only truncated to
// float when written to disk.

#ifndef DRIFTALIGN_ALIGNMENT_OPTIMIZER_H_
#define DRIFTALIGN_ALIGNMENT_OPTIMIZER_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace driftalign {

enum class UpdateRule {
  // delta = X^T (X Q_bar^T / tau_i - P'), named "paper_eq8" on the command
  // line. This is the gradient of a squared error, not of the KL objective;
  // combined with unit-sphere projection on cosine-scale data it converges
  // to the least-variance direction of X.
  kLinearResidual,
  // delta = X^T (P - P'), tau_i times the analytic KL gradient.
  kExactKl,
};

enum class Projection { kUnitSphere, kNone };

std::string_view ToString(UpdateRule rule);
std::string_view ToString(Projection projection);
UpdateRule ParseUpdateRule(std::string_view name);
Projection ParseProjection(std::string_view name);

struct AlignmentConfig {
  double alpha = 0.6;
  double tau_t = 0.03;
  double tau_i = 0.1;
  double eta0 = 10.0;
  std::size_t iterations = 2000;
  UpdateRule update_rule = UpdateRule::kExactKl;
  Projection projection = Projection::kUnitSphere;
  // Recompute P' from the current Q_bar at tau_t every iteration instead of
  // holding the one built from the original queries.
  bool refresh_pseudo_labels = false;

  void Validate() const;
};

// N x S, rows are probability distributions over queries.
struct SimilarityDistribution {
  Eigen::MatrixXd values;
};

// P' after hardening. hardened[i] is set iff row i was replaced by a one-hot.
struct PseudoLabelMatrix {
  Eigen::MatrixXd values;
  std::vector<bool> hardened;

  std::size_t HardenedCount() const;
};

struct OptimizerState {
  Eigen::MatrixXd q_bar;  // S x d
  double eta = 0.0;
  std::optional<double> prev_grad_norm;
  std::size_t iteration = 0;
  std::size_t halvings = 0;

  static OptimizerState Initial(Eigen::MatrixXd queries,
                                const AlignmentConfig& cfg);
};

struct IterationRecord {
  std::size_t iteration;  // 1-based
  double eta;             // learning rate applied in this iteration
  double grad_norm;       // Frobenius norm of delta
  double objective;       // KL(P' || P) before the step
};

using ProgressObserver = std::function<void(const IterationRecord&)>;

// Row i is the max-subtracted softmax over j of x_i . q_j / tau.
SimilarityDistribution ComputeSimilarityDistribution(
    const Eigen::MatrixXd& targets, const Eigen::MatrixXd& queries, double tau);

// Rows whose maximum is strictly greater than alpha become one-hot at the
// argmax (lowest index on ties); the rest are copied unchanged.
PseudoLabelMatrix HardenPseudoLabels(const SimilarityDistribution& p_prime,
                                     double alpha);

// sum_i sum_j p'_ij (log p'_ij - log p_ij), with 0 log 0 = 0. Returns
// +infinity if some p_ij is 0 where p'_ij > 0.
double KlObjective(const PseudoLabelMatrix& p_prime,
                   const SimilarityDistribution& p);

// d x S update direction for Q_bar^T.
Eigen::MatrixXd ComputeUpdate(const Eigen::MatrixXd& targets,
                              const Eigen::MatrixXd& q_bar,
                              const PseudoLabelMatrix& p_prime,
                              const AlignmentConfig& cfg);

// One descent step: halves eta if ||delta||_F strictly exceeds the previous
// norm, applies Q_bar^T -= eta / (N tau_i) * delta, then projects rows onto
// the unit sphere if configured. Throws DegenerateError naming the query
// index when a row's norm falls below 1e-12 under projection.
OptimizerState Step(OptimizerState state, const Eigen::MatrixXd& delta,
                    std::size_t num_targets, const AlignmentConfig& cfg);

struct AlignResult {
  Eigen::MatrixXd q_bar;
  double final_eta = 0.0;
  std::size_t halvings = 0;
  std::size_t hardened_rows = 0;  // in the initial P'
};

// Runs cfg.iterations steps starting from Q_bar = Q (rows normalized first
// under unit-sphere projection). Deterministic for fixed inputs.
AlignResult Align(const Eigen::MatrixXd& queries,
                  const Eigen::MatrixXd& targets, const AlignmentConfig& cfg,
                  const ProgressObserver& observer = {});

// Scales each row to unit L2 norm; throws DegenerateError for rows with norm
// below 1e-12.
void NormalizeRows(Eigen::MatrixXd& m, std::string_view what = "row");

}  // namespace driftalign

#endif  // DRIFTALIGN_ALIGNMENT_OPTIMIZER_H_
