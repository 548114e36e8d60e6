#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dggan/graph.hpp"
#include "dggan/matrix.hpp"
#include "dggan/rng.hpp"

namespace dggan {

// ---------------------------------------------------------------------------
// Generator MLPs

enum class Activation : std::uint8_t { kIdentity = 0, kLeakyRelu = 1, kRelu = 2, kTanh = 3 };

inline constexpr double kLeakySlope = 0.2;

std::string_view to_string(Activation a);
std::optional<Activation> parse_activation(std::string_view text);

struct DenseLayer {
  Matrix weight;  // out x in
  std::vector<double> bias;
  Activation activation = Activation::kIdentity;

  std::size_t in_dim() const { return weight.cols(); }
  std::size_t out_dim() const { return weight.rows(); }
  bool operator==(const DenseLayer&) const = default;
};

/// Feed-forward network d -> ... -> d. Hidden layers use their own
/// activation; the last layer is always linear.
struct MlpParams {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }
  std::size_t parameter_count() const;
  /// Throws ArgumentError unless layers chain and both ends equal `dim`.
  void validate(std::size_t dim) const;
  /// Same shapes, every value zero.
  MlpParams zeros_like() const;
  bool operator==(const MlpParams&) const = default;
};

/// Intermediate values kept by the forward pass for backpropagation.
struct MlpTrace {
  std::vector<std::vector<double>> inputs;  // input to each layer
  std::vector<std::vector<double>> pre;     // pre-activation of each layer
};

std::vector<double> mlp_forward(const MlpParams& mlp, std::span<const double> z);
std::vector<double> mlp_forward(const MlpParams& mlp, std::span<const double> z, MlpTrace& trace);

/// Accumulates d(loss)/d(params) into `grads` and d(loss)/d(z) into
/// `grad_input`, given d(loss)/d(output).
void mlp_backward(const MlpParams& mlp, const MlpTrace& trace, std::span<const double> grad_output,
                  MlpParams& grads, std::span<double> grad_input);

// ---------------------------------------------------------------------------
// Parameters

/// Real-node embeddings scored by the discriminator.
struct DiscriminatorParams {
  Matrix source;  // node_count x d, row u is s_u
  Matrix target;  // node_count x d, row u is t_u

  std::size_t node_count() const { return source.rows(); }
  std::size_t dim() const { return source.cols(); }
  void validate() const;
  bool operator==(const DiscriminatorParams&) const = default;
};

/// Shared per-node latent means and the two neighbor generators. With a
/// single generator (target neighbors only) `source_mlp` is empty.
struct GeneratorParams {
  Matrix latent;  // node_count x d, row u is z_u
  double sigma = 1.0;
  std::optional<MlpParams> source_mlp;
  MlpParams target_mlp;

  bool single_generator() const { return !source_mlp.has_value(); }
  std::size_t node_count() const { return latent.rows(); }
  std::size_t dim() const { return latent.cols(); }
  void validate() const;
  bool operator==(const GeneratorParams&) const = default;
};

struct ModelConfig {
  std::size_t dim = 128;
  double sigma = 1.0;
  bool single_generator = false;
  /// Hidden layer widths of each generator MLP; the output layer d is implied.
  std::vector<std::size_t> source_hidden{0};  // 0 means "same as dim"
  std::vector<std::size_t> target_hidden{0};
  Activation hidden_activation = Activation::kLeakyRelu;

  std::vector<std::size_t> resolved_hidden(bool source) const;
};

struct Model {
  DiscriminatorParams disc;
  GeneratorParams gen;
  bool operator==(const Model&) const = default;
};

/// Embedding rows uniform in [-0.5/d, 0.5/d]; MLP weights uniform in
/// [-1/sqrt(fan_in), 1/sqrt(fan_in)]; biases zero.
Model init_params(std::size_t node_count, const ModelConfig& config, Rng& rng);

MlpParams init_mlp(std::size_t dim, std::span<const std::size_t> hidden, Activation activation,
                   Rng& rng);

// ---------------------------------------------------------------------------
// Sampling and scoring

/// z_u + sigma * eps with eps standard normal.
std::vector<double> sample_latent(const GeneratorParams& gen, NodeId u, Rng& rng);

enum class NeighborRole : std::uint8_t { kSource, kTarget };

struct FakeNeighbor {
  NodeId owner = 0;
  NeighborRole role = NeighborRole::kTarget;
  std::vector<double> embedding;  // s_{u^s} or t_{u^t}
  std::vector<double> latent;     // the z draw that produced it
};

struct FakeNeighbors {
  std::optional<FakeNeighbor> source;  // absent with a single generator
  FakeNeighbor target;
};

/// One latent draw feeds both generators.
FakeNeighbors generate_fake(const GeneratorParams& gen, NodeId u, Rng& rng);

double sigmoid(double x);
/// log(1 + exp(x)) without overflow.
double softplus(double x);

/// Raw score s . t.
double pair_score(std::span<const double> s, std::span<const double> t);
/// sigmoid(s . t)
double discriminate(std::span<const double> s, std::span<const double> t);

// ---------------------------------------------------------------------------
// Losses and gradients

/// Gradient rows for a node-indexed matrix; only touched rows are stored, in
/// order of first touch.
class RowGradients {
 public:
  RowGradients() = default;
  RowGradients(std::size_t node_count, std::size_t dim);

  /// Zero-initialised on first access.
  std::span<double> row(NodeId u);
  /// Empty span if the row was never touched.
  std::span<const double> find(NodeId u) const;

  const std::vector<NodeId>& touched() const { return rows_; }
  std::span<const double> values(std::size_t k) const { return {data_.data() + k * dim_, dim_}; }
  std::size_t dim() const { return dim_; }
  std::size_t node_count() const { return slot_.size(); }
  void clear();

 private:
  std::size_t dim_ = 0;
  std::vector<std::int32_t> slot_;
  std::vector<NodeId> rows_;
  std::vector<double> data_;
};

struct DiscriminatorGrads {
  RowGradients source;
  RowGradients target;
};

struct DiscriminatorStep {
  double loss = 0.0;
  DiscriminatorGrads grads;
};

/// L_D = mean over positives of -log D(s_u, t_v)
///     + mean over fakes of -log(1 - D(fake pair)),
/// where a fake source of u is scored as (s_{u^s}, t_u) and a fake target as
/// (s_u, t_{u^t}). Fake embeddings are constants; gradients reach only the
/// rows of real nodes. Throws NumericError on a non-finite term.
DiscriminatorStep discriminator_loss_and_grads(const DiscriminatorParams& disc,
                                               std::span<const Edge> positives,
                                               std::span<const FakeNeighbor> fakes);
double discriminator_loss_and_grads(const DiscriminatorParams& disc,
                                    std::span<const Edge> positives,
                                    std::span<const FakeNeighbor> fakes, DiscriminatorGrads& out);

struct GeneratorGrads {
  RowGradients latent;
  std::optional<MlpParams> source_mlp;
  MlpParams target_mlp;
};

struct GeneratorStep {
  double loss = 0.0;
  GeneratorGrads grads;
};

/// Standard-normal noise for a generator step: row i * samples + k is the
/// k-th draw for nodes[i].
Matrix draw_generator_noise(std::size_t batch, std::size_t samples, std::size_t dim, Rng& rng);

/// L_G = mean over u of mean over draws of
///       [log(1 - D(s_{u^s}, t_u)) + log(1 - D(s_u, t_{u^t}))],
/// with the draws reparameterised as z = z_u + sigma * eps so that gradients
/// reach z_u and both MLPs. The discriminator receives nothing.
GeneratorStep generator_loss_and_grads(const DiscriminatorParams& disc, const GeneratorParams& gen,
                                       std::span<const NodeId> nodes, std::size_t samples,
                                       Rng& rng);
double generator_loss_and_grads(const DiscriminatorParams& disc, const GeneratorParams& gen,
                                std::span<const NodeId> nodes, std::size_t samples,
                                const Matrix& noise, GeneratorGrads& out);

GeneratorGrads make_generator_grads(const GeneratorParams& gen);
DiscriminatorGrads make_discriminator_grads(const DiscriminatorParams& disc);

}  // namespace dggan
