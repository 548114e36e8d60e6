#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dggan/graph.hpp"
#include "dggan/model.hpp"
#include "dggan/optimizer.hpp"

namespace dggan {

/// How much data one D or G iteration consumes.
///   kSampled:  one optimizer step on batch_size uniformly drawn edges/nodes.
///   kFullPass: a shuffled pass over every edge (D) or node (G) in
///              mini-batches of batch_size, one optimizer step per batch.
enum class Coverage : std::uint8_t { kSampled, kFullPass };

std::string_view to_string(Coverage c);
std::optional<Coverage> parse_coverage(std::string_view text);

struct TrainConfig {
  ModelConfig model;
  std::size_t n_epoch = 50;
  std::size_t n_g = 5;
  std::size_t n_d = 15;
  std::size_t n_s = 5;
  std::size_t batch_size = 1024;
  double lr_d = 1e-3;
  double lr_g = 1e-4;
  /// L2 penalty (l2/2 * ||row||^2) on every embedding row touched by a
  /// discriminator step, and on latent rows and MLP weights in a generator
  /// step. Zero disables it.
  double l2_d = 1e-3;
  double l2_g = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  AdamSettings adam;
  Coverage coverage = Coverage::kSampled;
  std::uint64_t seed = 1;
  /// Reports carry zero wall-clock so outputs are byte-reproducible.
  bool deterministic = false;

  void validate() const;
};

enum class Phase : std::uint8_t { kDiscriminator, kGenerator };

struct IterationRecord {
  std::size_t epoch = 0;
  Phase phase = Phase::kDiscriminator;
  std::size_t iteration = 0;  // global, per phase, starting at 0
  double loss = 0.0;
  double seconds = 0.0;       // wall-clock since training started
};

struct TrainReport {
  std::vector<IterationRecord> records;

  std::size_t count(Phase phase) const;
  std::vector<double> losses(Phase phase) const;
  /// CSV `epoch,phase,iter,loss,seconds`.
  void write_csv(std::ostream& out) const;
};

struct TrainResult {
  Model model;
  TrainReport report;
};

struct TrainHooks {
  /// Called after each completed epoch (1-based).
  std::function<void(std::size_t epoch, const Model&)> on_epoch_end;
  /// Called after each D or G iteration, before the next one starts.
  std::function<void(const IterationRecord&, const Model&)> on_iteration;
};

/// Alternating adversarial training: per epoch, n_d discriminator iterations
/// (generator frozen) followed by n_g generator iterations (discriminator
/// frozen). Randomness: Rng::stream(seed, "init") for parameters and
/// Rng::stream(seed, "train") for all sampling.
TrainResult train(const DirectedGraph& g, const TrainConfig& config, const TrainHooks& hooks = {});

struct EpochTiming {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double seconds_per_epoch = 0.0;
  /// n_s * (n_d * |E| + n_g * |V|) * d^2
  double cost_model = 0.0;
};

/// Random directed graph with `nodes` nodes and about `avg_out_degree`
/// out-edges per node; every node keeps at least one edge.
DirectedGraph synthetic_graph(std::size_t nodes, double avg_out_degree, std::uint64_t seed);

/// Times `epochs` training epochs on synthetic graphs of the given node
/// counts (edges proportional) and returns seconds per epoch, best of
/// `repeats` runs. Needs at least three sizes.
std::vector<EpochTiming> measure_epoch_scaling(std::span<const std::size_t> node_counts,
                                               double avg_out_degree, const TrainConfig& config,
                                               std::size_t epochs = 1, std::size_t repeats = 3);

/// Least-squares fit seconds = a + b * cost_model; returns R^2.
double scaling_r_squared(std::span<const EpochTiming> timings);

}  // namespace dggan
