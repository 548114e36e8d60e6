#include "dggan/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "dggan/error.hpp"

namespace dggan {
namespace {

std::string format_fraction(double f) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", f);
  return buf;
}

}  // namespace

std::string eval_stream_name(double reversed_fraction) {
  return "eval/" + format_fraction(reversed_fraction);
}

std::vector<std::pair<double, LabeledPairSet>> build_test_sets(
    const LinkSplit& split, const DirectedGraph& full, std::span<const double> reversed_fractions,
    std::uint64_t seed) {
  if (split.held_out.empty()) throw ArgumentError("no held-out edges to evaluate on");
  std::vector<std::pair<double, LabeledPairSet>> tests;
  for (double f : reversed_fractions) {
    Rng rng = Rng::stream(seed, eval_stream_name(f));
    tests.emplace_back(f, build_test_set(split.held_out, full, f, rng));
  }
  return tests;
}

std::vector<LinkPredictionResult> evaluate_link_prediction(
    const DiscriminatorParams& disc, std::span<const std::pair<double, LabeledPairSet>> tests,
    std::uint64_t seed) {
  std::vector<LinkPredictionResult> out;
  for (const auto& [fraction, set] : tests) {
    const auto scored = score_pairs(disc, set);
    out.push_back({seed, fraction, auc(scored), set.count_positive(),
                   set.count_kind(PairKind::kReversedPositive)});
  }
  return out;
}

LinkPredictionRun run_link_prediction(const DirectedGraph& g, TrainConfig config,
                                      double removal_fraction,
                                      std::span<const double> reversed_fractions,
                                      std::uint64_t seed) {
  if (reversed_fractions.empty()) throw ArgumentError("no reversed fractions given");
  LinkPredictionRun run;
  run.split = split_link_prediction(g, removal_fraction, seed);
  run.tests = build_test_sets(run.split, g, reversed_fractions, seed);
  config.seed = seed;
  run.trained = train(run.split.train, config);
  run.results = evaluate_link_prediction(run.trained.model.disc, run.tests, seed);
  return run;
}

double symmetric_auc(const DiscriminatorParams& disc, const LabeledPairSet& set) {
  std::vector<double> pos, neg;
  for (const auto& p : set.pairs) {
    const double s = pair_score(disc.source.row(p.u), disc.source.row(p.v));
    (p.positive ? pos : neg).push_back(s);
  }
  return auc(pos, neg);
}

std::vector<SparsityResult> run_sparsity_sweep(const DirectedGraph& g, const TrainConfig& config,
                                               double removal_fraction,
                                               std::span<const double> edge_ratios,
                                               std::uint64_t seed) {
  if (edge_ratios.empty()) throw ArgumentError("no edge ratios given");
  for (double r : edge_ratios) {
    if (!(r > 0.0 && r <= 1.0)) throw ArgumentError("edge ratios must lie in (0, 1]");
  }
  const LinkSplit split = split_link_prediction(g, removal_fraction, seed);
  const double reversed[] = {kSweepReversedFraction};
  const auto tests = build_test_sets(split, g, reversed, seed);

  std::vector<SparsityResult> out;
  for (double r : edge_ratios) {
    TrainConfig cfg = config;
    cfg.seed = seed;
    DirectedGraph thinned;
    const DirectedGraph* train_graph = &split.train;
    if (r < 1.0) {
      Rng rng = Rng::stream(seed, "sparsity/" + format_fraction(r));
      thinned = split_link_prediction(split.train, 1.0 - r, rng).train;
      train_graph = &thinned;
    }
    const TrainResult trained = train(*train_graph, cfg);
    const auto results = evaluate_link_prediction(trained.model.disc, tests, seed);
    out.push_back({r, results.front().auc, train_graph->edge_count()});
  }
  return out;
}

std::vector<ClassificationResult> run_classification(const Matrix& features,
                                                     const NodeLabels& labels,
                                                     const ClassificationOptions& options,
                                                     std::uint64_t seed) {
  if (labels.class_of.size() != features.rows()) {
    throw ArgumentError("label map and feature matrix disagree on node count");
  }
  std::vector<NodeId> nodes;
  std::vector<int> classes;
  for (NodeId u = 0; u < labels.class_of.size(); ++u) {
    if (labels.class_of[u]) {
      nodes.push_back(u);
      classes.push_back(*labels.class_of[u]);
    }
  }
  if (std::set<int>(classes.begin(), classes.end()).size() < 2) {
    throw ArgumentError("classification needs labeled nodes from at least two classes");
  }
  if (options.repeats == 0) throw ArgumentError("repeats must be >= 1");
  if (options.shuffle_labels) {
    Rng shuffle_rng = Rng::stream(seed, "classify/shuffle");
    shuffle_rng.shuffle(std::span<int>(classes));
  }

  Rng rng = Rng::stream(seed, "classify");
  std::vector<std::size_t> order(nodes.size());
  std::vector<ClassificationResult> out;
  for (double ratio : options.train_ratios) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ArgumentError("train ratios must lie in (0, 1)");
    const auto n_train = static_cast<std::size_t>(std::clamp<long long>(
        std::llround(ratio * static_cast<double>(nodes.size())), 1,
        static_cast<long long>(nodes.size()) - 1));
    ClassificationResult acc{ratio, 0.0, 0.0, 0.0};
    for (std::size_t rep = 0; rep < options.repeats; ++rep) {
      std::set<int> train_classes;
      std::size_t attempt = 0;
      do {
        if (attempt++ > options.max_resamples) {
          throw ArgumentError("could not draw a training split with two classes at ratio " +
                              format_fraction(ratio));
        }
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(std::span<std::size_t>(order));
        train_classes.clear();
        for (std::size_t i = 0; i < n_train; ++i) train_classes.insert(classes[order[i]]);
      } while (train_classes.size() < 2);

      Matrix x_train(n_train, features.cols());
      Matrix x_test(nodes.size() - n_train, features.cols());
      std::vector<int> y_train(n_train), y_test(nodes.size() - n_train);
      std::map<int, std::size_t> freq;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::size_t idx = order[i];
        const auto row = features.row(nodes[idx]);
        if (i < n_train) {
          std::copy(row.begin(), row.end(), x_train.row(i).begin());
          y_train[i] = classes[idx];
          ++freq[classes[idx]];
        } else {
          std::copy(row.begin(), row.end(), x_test.row(i - n_train).begin());
          y_test[i - n_train] = classes[idx];
        }
      }
      const ClassifierParams clf = train_logreg(x_train, y_train, options.logreg);
      const F1Scores f1 = f1_scores(predict(clf, x_test), y_test);
      const int majority =
          std::max_element(freq.begin(), freq.end(), [](const auto& a, const auto& b) {
            return a.second < b.second;
          })->first;
      acc.micro_f1 += f1.micro;
      acc.macro_f1 += f1.macro;
      acc.majority_rate += static_cast<double>(std::count(y_test.begin(), y_test.end(), majority)) /
                           static_cast<double>(y_test.size());
    }
    const double r = static_cast<double>(options.repeats);
    acc.micro_f1 /= r;
    acc.macro_f1 /= r;
    acc.majority_rate /= r;
    out.push_back(acc);
  }
  return out;
}

std::vector<NodeId> sample_reconstruction_sources(const DirectedGraph& g, double fraction,
                                                  std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ArgumentError("sample fraction must lie in (0, 1]");
  const std::size_t n = g.node_count();
  const auto m = static_cast<std::size_t>(
      std::clamp<long long>(std::llround(fraction * static_cast<double>(n)), 1,
                            static_cast<long long>(n)));
  std::vector<NodeId> ids(n);
  for (NodeId u = 0; u < n; ++u) ids[u] = u;
  Rng rng = Rng::stream(seed, "reconstruct");
  rng.shuffle(std::span<NodeId>(ids));
  ids.resize(m);
  std::erase_if(ids, [&](NodeId u) { return g.out_degree(u) == 0; });
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace dggan
