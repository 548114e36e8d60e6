#include "dggan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <thread>

#include "dggan/error.hpp"
#include "dggan/simd/kernels.hpp"

namespace dggan {

double score_pair(const DiscriminatorParams& disc, NodeId u, NodeId v) {
  return pair_score(disc.source.row(u), disc.target.row(v));
}

std::vector<ScoredPair> score_pairs(const DiscriminatorParams& disc, const LabeledPairSet& set) {
  std::vector<ScoredPair> out;
  out.reserve(set.pairs.size());
  for (const auto& p : set.pairs) out.push_back({p.u, p.v, p.positive, score_pair(disc, p.u, p.v)});
  return out;
}

double auc(std::span<const double> positive_scores, std::span<const double> negative_scores) {
  if (positive_scores.empty() || negative_scores.empty()) {
    throw ArgumentError("AUC needs at least one positive and one negative score");
  }
  std::vector<double> neg(negative_scores.begin(), negative_scores.end());
  for (double x : neg) {
    if (std::isnan(x)) throw ArgumentError("AUC input contains NaN");
  }
  std::sort(neg.begin(), neg.end());
  std::uint64_t wins = 0;
  std::uint64_t ties = 0;
  for (double p : positive_scores) {
    if (std::isnan(p)) throw ArgumentError("AUC input contains NaN");
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    wins += static_cast<std::uint64_t>(lo - neg.begin());
    ties += static_cast<std::uint64_t>(hi - lo);
  }
  return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
         (static_cast<double>(positive_scores.size()) * static_cast<double>(neg.size()));
}

double auc(std::span<const ScoredPair> pairs) {
  std::vector<double> pos, neg;
  for (const auto& p : pairs) (p.positive ? pos : neg).push_back(p.score);
  return auc(pos, neg);
}

std::vector<double> precision_at_k(const DiscriminatorParams& disc, const DirectedGraph& graph,
                                   std::span<const NodeId> sources,
                                   std::span<const std::size_t> k_values, std::size_t threads) {
  const std::size_t n = graph.node_count();
  if (disc.node_count() != n) throw ArgumentError("model and graph node counts differ");
  if (sources.empty()) throw ArgumentError("precision@k needs at least one source");
  if (k_values.empty()) throw ArgumentError("precision@k needs at least one k");
  std::size_t k_max = 0;
  for (std::size_t k : k_values) {
    if (k == 0 || k > n - 1) {
      throw ArgumentError("k = " + std::to_string(k) + " outside [1, " + std::to_string(n - 1) +
                          "]");
    }
    k_max = std::max(k_max, k);
  }
  for (NodeId u : sources) {
    if (u >= n || graph.out_degree(u) == 0) {
      throw ArgumentError("source " + std::to_string(u) + " has no out-edges");
    }
  }

  // per_source[i * |k| + j] = P@k_j for sources[i]
  std::vector<double> per_source(sources.size() * k_values.size(), 0.0);
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<std::pair<double, NodeId>> ranked;
    ranked.reserve(n);
    std::vector<std::size_t> hits(k_max + 1);
    for (std::size_t i = begin; i < end; ++i) {
      const NodeId u = sources[i];
      const auto s_u = disc.source.row(u);
      ranked.clear();
      for (NodeId v = 0; v < n; ++v) {
        if (v != u) ranked.emplace_back(pair_score(s_u, disc.target.row(v)), v);
      }
      std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k_max),
                        ranked.end(), [](const auto& a, const auto& b) {
                          return a.first > b.first || (a.first == b.first && a.second < b.second);
                        });
      hits[0] = 0;
      for (std::size_t r = 0; r < k_max; ++r) {
        hits[r + 1] = hits[r] + (graph.has_edge(u, ranked[r].second) ? 1 : 0);
      }
      for (std::size_t j = 0; j < k_values.size(); ++j) {
        per_source[i * k_values.size() + j] =
            static_cast<double>(hits[k_values[j]]) / static_cast<double>(k_values[j]);
      }
    }
  };

  threads = std::clamp<std::size_t>(threads, 1, sources.size());
  if (threads == 1) {
    work(0, sources.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (sources.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(sources.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  std::vector<double> mean(k_values.size(), 0.0);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = 0; j < k_values.size(); ++j) mean[j] += per_source[i * k_values.size() + j];
  }
  for (double& m : mean) m /= static_cast<double>(sources.size());
  return mean;
}

// ---------------------------------------------------------------------------
// Logistic regression

double logreg_objective(const Matrix& features, std::span<const double> targets,
                        std::span<const double> w, double b, double l2, std::span<double> grad_w,
                        double& grad_b) {
  const auto& k = simd::active();
  const std::size_t n = features.rows();
  const std::size_t f = features.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  grad_b = 0.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = features.row(i);
    const double z = k.dot(w.data(), x.data(), f) + b;
    loss += softplus(z) - targets[i] * z;
    const double r = (sigmoid(z) - targets[i]) * inv_n;
    k.axpy(r, x.data(), grad_w.data(), f);
    grad_b += r;
  }
  loss *= inv_n;
  loss += 0.5 * l2 * k.dot(w.data(), w.data(), f);
  k.axpy(l2, w.data(), grad_w.data(), f);
  return loss;
}

ClassifierParams train_logreg(const Matrix& features, std::span<const int> labels,
                              const LogRegOptions& options) {
  if (labels.size() != features.rows()) throw ArgumentError("one label per feature row required");
  const std::set<int> present(labels.begin(), labels.end());
  if (present.size() < 2) throw ArgumentError("logistic regression needs at least two classes");
  if (!(options.l2 >= 0.0) || !(options.learning_rate > 0.0)) {
    throw ArgumentError("l2 must be >= 0 and learning rate > 0");
  }

  ClassifierParams clf;
  clf.classes.assign(present.begin(), present.end());
  clf.weights = Matrix(clf.classes.size(), features.cols());
  clf.bias.assign(clf.classes.size(), 0.0);
  clf.l2 = options.l2;

  std::vector<double> targets(labels.size());
  std::vector<double> grad_w(features.cols());
  for (std::size_t c = 0; c < clf.classes.size(); ++c) {
    for (std::size_t i = 0; i < labels.size(); ++i) targets[i] = labels[i] == clf.classes[c];
    auto w = clf.weights.row(c);
    double& b = clf.bias[c];
    for (std::size_t it = 0; it < options.iterations; ++it) {
      double grad_b = 0.0;
      // Data term explicitly, L2 term as a proximal step; the fixed point is
      // the same but large l2 cannot make the iteration diverge.
      logreg_objective(features, targets, w, b, 0.0, grad_w, grad_b);
      simd::axpy(-options.learning_rate, grad_w, w);
      const double shrink = 1.0 / (1.0 + options.learning_rate * options.l2);
      for (double& v : w) v *= shrink;
      b -= options.learning_rate * grad_b;
    }
  }
  return clf;
}

std::vector<double> class_scores(const ClassifierParams& clf, std::span<const double> x) {
  std::vector<double> out(clf.classes.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = sigmoid(simd::dot(clf.weights.row(c), x) + clf.bias[c]);
  }
  return out;
}

std::vector<int> predict(const ClassifierParams& clf, const Matrix& features) {
  std::vector<int> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto scores = class_scores(clf, features.row(i));
    const auto best = std::max_element(scores.begin(), scores.end()) - scores.begin();
    out[i] = clf.classes[static_cast<std::size_t>(best)];
  }
  return out;
}

F1Scores f1_scores(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw ArgumentError("prediction and truth lengths differ");
  if (truth.empty()) throw ArgumentError("F1 needs at least one prediction");
  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0;
  };
  std::map<int, Counts> per_class;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] == truth[i]) {
      ++per_class[truth[i]].tp;
    } else {
      ++per_class[predicted[i]].fp;
      ++per_class[truth[i]].fn;
    }
  }
  Counts total;
  double macro = 0.0;
  for (const auto& [cls, c] : per_class) {
    const std::size_t denom = 2 * c.tp + c.fp + c.fn;
    macro += denom ? 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom) : 0.0;
    total.tp += c.tp;
    total.fp += c.fp;
    total.fn += c.fn;
  }
  F1Scores out;
  out.macro = macro / static_cast<double>(per_class.size());
  out.micro = 2.0 * static_cast<double>(total.tp) /
              static_cast<double>(2 * total.tp + total.fp + total.fn);
  return out;
}

Matrix concat_features(const DiscriminatorParams& disc) {
  const std::size_t d = disc.dim();
  Matrix out(disc.node_count(), 2 * d);
  for (std::size_t u = 0; u < disc.node_count(); ++u) {
    auto row = out.row(u);
    std::copy_n(disc.source.row(u).begin(), d, row.begin());
    std::copy_n(disc.target.row(u).begin(), d, row.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return out;
}

}  // namespace dggan
