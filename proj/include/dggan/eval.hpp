#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dggan/graph.hpp"
#include "dggan/matrix.hpp"
#include "dggan/model.hpp"

namespace dggan {

/// s_u . t_v. Ranking uses the raw score; the sigmoid is monotone.
double score_pair(const DiscriminatorParams& disc, NodeId u, NodeId v);

struct ScoredPair {
  NodeId u = 0;
  NodeId v = 0;
  bool positive = false;
  double score = 0.0;
};

std::vector<ScoredPair> score_pairs(const DiscriminatorParams& disc, const LabeledPairSet& set);

/// Mann-Whitney AUC: fraction of (positive, negative) pairs ordered
/// correctly, ties counting one half. Throws ArgumentError on empty input.
double auc(std::span<const double> positive_scores, std::span<const double> negative_scores);
double auc(std::span<const ScoredPair> pairs);

/// Mean precision@k over `sources` for each k. For source u all v != u are
/// ranked by s_u . t_v descending, ties by ascending id; hits are counted
/// against u's out-neighbors in `graph`. Sources must have out-degree >= 1.
/// `threads` > 1 splits sources across threads; results do not depend on it.
std::vector<double> precision_at_k(const DiscriminatorParams& disc, const DirectedGraph& graph,
                                   std::span<const NodeId> sources,
                                   std::span<const std::size_t> k_values, std::size_t threads = 1);

// ---------------------------------------------------------------------------
// Node classification

struct LogRegOptions {
  double l2 = 1e-4;
  std::size_t iterations = 500;
  double learning_rate = 0.1;
};

/// One-vs-rest logistic regression. `classes` lists the class ids in row
/// order of `weights`.
struct ClassifierParams {
  std::vector<int> classes;
  Matrix weights;  // classes x features
  std::vector<double> bias;
  double l2 = 0.0;
};

/// Objective for one binary problem: mean log-loss + l2 * ||w||^2 / 2
/// (bias unregularised). Writes the gradient into grad_w / grad_b.
double logreg_objective(const Matrix& features, std::span<const double> targets,
                        std::span<const double> w, double b, double l2, std::span<double> grad_w,
                        double& grad_b);

/// Full-batch gradient descent, one binary model per class present in
/// `labels`. Throws ArgumentError if fewer than two classes are present.
ClassifierParams train_logreg(const Matrix& features, std::span<const int> labels,
                              const LogRegOptions& options = {});

/// Per-class probability sigmoid(w_c . x + b_c) for one feature row.
std::vector<double> class_scores(const ClassifierParams& clf, std::span<const double> x);
std::vector<int> predict(const ClassifierParams& clf, const Matrix& features);

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
};

/// Single-label multi-class F1. Macro averages over every class appearing in
/// either list.
F1Scores f1_scores(std::span<const int> predicted, std::span<const int> truth);

/// Row u is [s_u ; t_u].
Matrix concat_features(const DiscriminatorParams& disc);

}  // namespace dggan
