#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dggan/eval.hpp"
#include "dggan/graph.hpp"
#include "dggan/trainer.hpp"

namespace dggan {

// All protocols derive their random streams from one master seed:
//   "split"            held-out edge removal
//   "sparsity"         further edge subsampling of the training graph
//   "eval/<fraction>"  negatives for one reversed fraction
//   "init" / "train"   parameter init and training (inside train())
//   "classify"         label splits
//   "reconstruct"      source sampling

std::string eval_stream_name(double reversed_fraction);

struct LinkPredictionResult {
  std::uint64_t seed = 0;
  double reversed_fraction = 0.0;
  double auc = 0.0;
  std::size_t positives = 0;
  std::size_t reversed_negatives = 0;
};

struct LinkPredictionRun {
  LinkSplit split;
  std::vector<std::pair<double, LabeledPairSet>> tests;
  TrainResult trained;
  std::vector<LinkPredictionResult> results;
};

/// Builds one test set per reversed fraction from the same held-out
/// positives.
std::vector<std::pair<double, LabeledPairSet>> build_test_sets(
    const LinkSplit& split, const DirectedGraph& full, std::span<const double> reversed_fractions,
    std::uint64_t seed);

/// Split once, train on the training graph with config.seed = seed, and
/// score each reversed-fraction test set.
LinkPredictionRun run_link_prediction(const DirectedGraph& g, TrainConfig config,
                                      double removal_fraction,
                                      std::span<const double> reversed_fractions,
                                      std::uint64_t seed);

std::vector<LinkPredictionResult> evaluate_link_prediction(
    const DiscriminatorParams& disc, std::span<const std::pair<double, LabeledPairSet>> tests,
    std::uint64_t seed);

/// AUC of the symmetric score s_u . s_v, which cannot tell (u,v) from (v,u).
double symmetric_auc(const DiscriminatorParams& disc, const LabeledPairSet& set);

struct SparsityResult {
  double edge_ratio = 1.0;
  double auc = 0.0;
  std::size_t train_edges = 0;
};

/// Same split and test set (reversed = 0.5) as run_link_prediction; the
/// training graph is thinned to each ratio (non-isolation preserved) and
/// the model retrained. Ratio 1.0 reproduces the link-prediction run.
std::vector<SparsityResult> run_sparsity_sweep(const DirectedGraph& g, const TrainConfig& config,
                                               double removal_fraction,
                                               std::span<const double> edge_ratios,
                                               std::uint64_t seed);

inline constexpr double kSweepReversedFraction = 0.5;

struct ClassificationResult {
  double train_ratio = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double majority_rate = 0.0;  // test accuracy of always predicting the training majority
};

struct ClassificationOptions {
  std::vector<double> train_ratios{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t repeats = 10;
  LogRegOptions logreg;
  /// Permute labels among labeled nodes before splitting (null-model control).
  bool shuffle_labels = false;
  std::size_t max_resamples = 100;
};

/// Random train/test split of the labeled nodes per ratio and repeat,
/// one-vs-rest logistic regression on `features`, F1 averaged over repeats.
std::vector<ClassificationResult> run_classification(const Matrix& features,
                                                     const NodeLabels& labels,
                                                     const ClassificationOptions& options,
                                                     std::uint64_t seed);

/// Samples round(fraction * |V|) nodes (at least one) and keeps those with
/// out-degree >= 1, in ascending id order.
std::vector<NodeId> sample_reconstruction_sources(const DirectedGraph& g, double fraction,
                                                  std::uint64_t seed);

}  // namespace dggan
