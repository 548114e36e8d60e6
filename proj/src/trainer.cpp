#include "dggan/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <limits>
#include <unordered_set>

#include "dggan/error.hpp"

namespace dggan {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_grads(const RowGradients& g, const char* what) {
  for (std::size_t k = 0; k < g.touched().size(); ++k) check_finite(g.values(k), what);
}

void check_grads(const MlpParams& g, const char* what) {
  for (const auto& l : g.layers) {
    check_finite(l.weight.values(), what);
    check_finite(l.bias, what);
  }
}

void add_row_penalty(const Matrix& params, RowGradients& grads, double l2) {
  for (std::size_t k = 0; k < grads.touched().size(); ++k) {
    const NodeId u = grads.touched()[k];
    const auto p = params.row(u);
    auto g = grads.row(u);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += l2 * p[j];
  }
}

void add_weight_penalty(const MlpParams& params, MlpParams& grads, double l2) {
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto w = params.layers[i].weight.values();
    auto g = grads.layers[i].weight.values();
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += l2 * w[j];
  }
}

class Trainer {
 public:
  Trainer(const DirectedGraph& g, const TrainConfig& config, const TrainHooks& hooks)
      : g_(g),
        config_(config),
        hooks_(hooks),
        rng_(Rng::stream(config.seed, "train")),
        opt_d_(config.optimizer, config.adam),
        opt_g_(config.optimizer, config.adam) {
    Rng init_rng = Rng::stream(config.seed, "init");
    model_ = init_params(g.node_count(), config.model, init_rng);
    slot_s_ = opt_d_.add_tensor(model_.disc.source.size());
    slot_t_ = opt_d_.add_tensor(model_.disc.target.size());
    slot_z_ = opt_g_.add_tensor(model_.gen.latent.size());
    if (model_.gen.source_mlp) slot_ms_ = register_mlp(opt_g_, *model_.gen.source_mlp);
    slot_mt_ = register_mlp(opt_g_, model_.gen.target_mlp);
    d_grads_ = make_discriminator_grads(model_.disc);
    g_grads_ = make_generator_grads(model_.gen);
    for (std::size_t i = 0; i < g.edge_count(); ++i) edge_order_.push_back(i);
    for (NodeId u = 0; u < g.node_count(); ++u) node_order_.push_back(u);
  }

  TrainResult run() {
    start_ = Clock::now();
    for (std::size_t epoch = 0; epoch < config_.n_epoch; ++epoch) {
      for (std::size_t i = 0; i < config_.n_d; ++i) {
        run_iteration(epoch, Phase::kDiscriminator, d_iter_++);
      }
      for (std::size_t i = 0; i < config_.n_g; ++i) {
        run_iteration(epoch, Phase::kGenerator, g_iter_++);
      }
      if (hooks_.on_epoch_end) hooks_.on_epoch_end(epoch + 1, model_);
    }
    return {std::move(model_), std::move(report_)};
  }

 private:
  void run_iteration(std::size_t epoch, Phase phase, std::size_t iteration) {
    double loss = 0.0;
    try {
      loss = phase == Phase::kDiscriminator ? discriminator_iteration() : generator_iteration();
    } catch (const NumericError& e) {
      throw NumericError("epoch " + std::to_string(epoch) +
                         (phase == Phase::kDiscriminator ? ", D iteration " : ", G iteration ") +
                         std::to_string(iteration) + ": " + e.what());
    }
    IterationRecord rec{epoch, phase, iteration, loss,
                        config_.deterministic ? 0.0 : seconds_since(start_)};
    report_.records.push_back(rec);
    if (hooks_.on_iteration) hooks_.on_iteration(rec, model_);
  }

  double discriminator_iteration() {
    if (config_.coverage == Coverage::kSampled) {
      batch_edges_ = sample_edge_batch(g_, config_.batch_size, rng_);
      return discriminator_step();
    }
    rng_.shuffle(std::span<std::size_t>(edge_order_));
    const auto edges = g_.edges();
    double total = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < edge_order_.size(); start += config_.batch_size) {
      const std::size_t end = std::min(edge_order_.size(), start + config_.batch_size);
      batch_edges_.clear();
      for (std::size_t i = start; i < end; ++i) batch_edges_.push_back(edges[edge_order_[i]]);
      total += discriminator_step();
      ++steps;
    }
    return total / static_cast<double>(steps);
  }

  double generator_iteration() {
    if (config_.coverage == Coverage::kSampled) {
      batch_nodes_ = sample_node_batch(g_.node_count(), config_.batch_size, rng_);
      return generator_step();
    }
    rng_.shuffle(std::span<NodeId>(node_order_));
    double total = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < node_order_.size(); start += config_.batch_size) {
      const std::size_t end = std::min(node_order_.size(), start + config_.batch_size);
      batch_nodes_.assign(node_order_.begin() + static_cast<std::ptrdiff_t>(start),
                          node_order_.begin() + static_cast<std::ptrdiff_t>(end));
      total += generator_step();
      ++steps;
    }
    return total / static_cast<double>(steps);
  }

  // Fakes for both endpoints of every sampled edge, generator frozen.
  double discriminator_step() {
    fakes_.clear();
    for (const Edge& e : batch_edges_) {
      for (NodeId anchor : {e.src, e.dst}) {
        for (std::size_t k = 0; k < config_.n_s; ++k) {
          FakeNeighbors f = generate_fake(model_.gen, anchor, rng_);
          if (f.source) fakes_.push_back(std::move(*f.source));
          fakes_.push_back(std::move(f.target));
        }
      }
    }
    const double loss = discriminator_loss_and_grads(model_.disc, batch_edges_, fakes_, d_grads_);
    if (config_.l2_d > 0.0) {
      add_row_penalty(model_.disc.source, d_grads_.source, config_.l2_d);
      add_row_penalty(model_.disc.target, d_grads_.target, config_.l2_d);
    }
    check_grads(d_grads_.source, "source embeddings");
    check_grads(d_grads_.target, "target embeddings");
    opt_d_.begin_step();
    opt_d_.apply_rows(slot_s_, model_.disc.source, d_grads_.source, config_.lr_d);
    opt_d_.apply_rows(slot_t_, model_.disc.target, d_grads_.target, config_.lr_d);
    return loss;
  }

  double generator_step() {
    const Matrix noise =
        draw_generator_noise(batch_nodes_.size(), config_.n_s, model_.gen.dim(), rng_);
    const double loss = generator_loss_and_grads(model_.disc, model_.gen, batch_nodes_,
                                                 config_.n_s, noise, g_grads_);
    if (config_.l2_g > 0.0) {
      add_row_penalty(model_.gen.latent, g_grads_.latent, config_.l2_g);
      if (model_.gen.source_mlp) add_weight_penalty(*model_.gen.source_mlp, *g_grads_.source_mlp, config_.l2_g);
      add_weight_penalty(model_.gen.target_mlp, g_grads_.target_mlp, config_.l2_g);
    }
    check_grads(g_grads_.latent, "latent means");
    if (g_grads_.source_mlp) check_grads(*g_grads_.source_mlp, "source generator");
    check_grads(g_grads_.target_mlp, "target generator");
    opt_g_.begin_step();
    opt_g_.apply_rows(slot_z_, model_.gen.latent, g_grads_.latent, config_.lr_g);
    if (model_.gen.source_mlp) {
      apply_mlp(opt_g_, slot_ms_, *model_.gen.source_mlp, *g_grads_.source_mlp, config_.lr_g);
    }
    apply_mlp(opt_g_, slot_mt_, model_.gen.target_mlp, g_grads_.target_mlp, config_.lr_g);
    return loss;
  }

  const DirectedGraph& g_;
  const TrainConfig& config_;
  const TrainHooks& hooks_;
  Rng rng_;
  Model model_;
  TrainReport report_;
  Optimizer opt_d_;
  Optimizer opt_g_;
  std::size_t slot_s_ = 0, slot_t_ = 0, slot_z_ = 0, slot_ms_ = 0, slot_mt_ = 0;
  DiscriminatorGrads d_grads_;
  GeneratorGrads g_grads_;
  std::vector<FakeNeighbor> fakes_;
  std::vector<Edge> batch_edges_;
  std::vector<NodeId> batch_nodes_;
  std::vector<std::size_t> edge_order_;
  std::vector<NodeId> node_order_;
  std::size_t d_iter_ = 0;
  std::size_t g_iter_ = 0;
  Clock::time_point start_;
};

}  // namespace

std::string_view to_string(Coverage c) { return c == Coverage::kSampled ? "sampled" : "full"; }

std::optional<Coverage> parse_coverage(std::string_view text) {
  if (text == "sampled") return Coverage::kSampled;
  if (text == "full") return Coverage::kFullPass;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (model.dim == 0) throw ArgumentError("embedding dimension must be >= 1");
  if (n_g == 0 || n_d == 0 || n_s == 0) throw ArgumentError("n_g, n_d and n_s must be >= 1");
  if (batch_size == 0) throw ArgumentError("batch size must be >= 1");
  if (!(lr_d > 0.0) || !(lr_g > 0.0)) throw ArgumentError("learning rates must be positive");
  if (!(model.sigma > 0.0) || !std::isfinite(model.sigma)) {
    throw ArgumentError("sigma must be positive");
  }
  for (bool source : {true, false}) {
    for (std::size_t w : model.resolved_hidden(source)) {
      if (w == 0) throw ArgumentError("hidden layer width must be >= 1");
    }
  }
}

std::size_t TrainReport::count(Phase phase) const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [phase](const auto& r) { return r.phase == phase; }));
}

std::vector<double> TrainReport::losses(Phase phase) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.phase == phase) out.push_back(r.loss);
  }
  return out;
}

void TrainReport::write_csv(std::ostream& out) const {
  out << "epoch,phase,iter,loss,seconds\n";
  char buf[128];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%zu,%s,%zu,%.9g,%.6f\n", r.epoch,
                  r.phase == Phase::kDiscriminator ? "D" : "G", r.iteration, r.loss, r.seconds);
    out << buf;
  }
}

TrainResult train(const DirectedGraph& g, const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (g.edge_count() == 0) throw ArgumentError("cannot train on a graph without edges");
  Trainer trainer(g, config, hooks);
  return trainer.run();
}

DirectedGraph synthetic_graph(std::size_t nodes, double avg_out_degree, std::uint64_t seed) {
  if (nodes < 2) throw ArgumentError("synthetic graph needs at least two nodes");
  Rng rng = Rng::stream(seed, "synthetic");
  const auto per_node = static_cast<std::size_t>(
      std::clamp(std::llround(avg_out_degree), 1LL, static_cast<long long>(nodes - 1)));
  std::vector<Edge> edges;
  edges.reserve(nodes * per_node);
  std::unordered_set<NodeId> picked;
  for (NodeId u = 0; u < nodes; ++u) {
    picked.clear();
    while (picked.size() < per_node) {
      const auto v = static_cast<NodeId>(rng.index(nodes));
      if (v != u && picked.insert(v).second) edges.push_back({u, v});
    }
  }
  return DirectedGraph::from_edges(nodes, std::move(edges));
}

std::vector<EpochTiming> measure_epoch_scaling(std::span<const std::size_t> node_counts,
                                               double avg_out_degree, const TrainConfig& config,
                                               std::size_t epochs, std::size_t repeats) {
  if (node_counts.size() < 3) throw ArgumentError("scaling measurement needs at least 3 sizes");
  if (epochs == 0 || repeats == 0) throw ArgumentError("epochs and repeats must be >= 1");
  std::vector<EpochTiming> out;
  for (std::size_t n : node_counts) {
    const DirectedGraph g = synthetic_graph(n, avg_out_degree, config.seed);
    TrainConfig cfg = config;
    cfg.n_epoch = epochs + 1;  // the first epoch is warm-up
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < repeats; ++r) {
      Clock::time_point first_end;
      Clock::time_point last_end;
      TrainHooks hooks;
      hooks.on_epoch_end = [&](std::size_t epoch, const Model&) {
        if (epoch == 1) first_end = Clock::now();
        last_end = Clock::now();
      };
      train(g, cfg, hooks);
      best = std::min(best, std::chrono::duration<double>(last_end - first_end).count() /
                                static_cast<double>(epochs));
    }
    const double d = static_cast<double>(config.model.dim);
    out.push_back({g.node_count(), g.edge_count(), best,
                   static_cast<double>(config.n_s) *
                       (static_cast<double>(config.n_d) * static_cast<double>(g.edge_count()) +
                        static_cast<double>(config.n_g) * static_cast<double>(g.node_count())) *
                       d * d});
  }
  return out;
}

double scaling_r_squared(std::span<const EpochTiming> timings) {
  const double n = static_cast<double>(timings.size());
  double mx = 0.0, my = 0.0;
  for (const auto& t : timings) {
    mx += t.cost_model;
    my += t.seconds_per_epoch;
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (const auto& t : timings) {
    sxy += (t.cost_model - mx) * (t.seconds_per_epoch - my);
    sxx += (t.cost_model - mx) * (t.cost_model - mx);
    syy += (t.seconds_per_epoch - my) * (t.seconds_per_epoch - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return (sxy * sxy) / (sxx * syy);
}

}  // namespace dggan
