#include "dggan/model.hpp"

#include <cmath>
#include <sstream>

#include "dggan/error.hpp"
#include "dggan/simd/kernels.hpp"

namespace dggan {
namespace {

double activate(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity:
      return x;
    case Activation::kLeakyRelu:
      return x > 0.0 ? x : kLeakySlope * x;
    case Activation::kRelu:
      return x > 0.0 ? x : 0.0;
    case Activation::kTanh:
      return std::tanh(x);
  }
  return x;
}

double activation_slope(Activation a, double pre) {
  switch (a) {
    case Activation::kIdentity:
      return 1.0;
    case Activation::kLeakyRelu:
      return pre > 0.0 ? 1.0 : kLeakySlope;
    case Activation::kRelu:
      return pre > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: {
      const double t = std::tanh(pre);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

void fill_uniform(std::span<double> values, double bound, Rng& rng) {
  for (double& v : values) v = rng.uniform(-bound, bound);
}

[[noreturn]] void non_finite(const char* what, NodeId u, NodeId v, double score) {
  std::ostringstream msg;
  msg << "non-finite " << what << " for pair (" << u << ", " << v << "), score " << score;
  throw NumericError(msg.str());
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kLeakyRelu:
      return "leaky_relu";
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
  }
  return "unknown";
}

std::optional<Activation> parse_activation(std::string_view text) {
  for (Activation a :
       {Activation::kIdentity, Activation::kLeakyRelu, Activation::kRelu, Activation::kTanh}) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// MLP

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

void MlpParams::validate(std::size_t dim) const {
  if (layers.empty()) throw ArgumentError("MLP needs at least one layer");
  if (input_dim() != dim || output_dim() != dim) {
    throw ArgumentError("MLP must map dimension " + std::to_string(dim) + " to itself");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.bias.size() != l.out_dim()) throw ArgumentError("MLP bias size mismatch");
    if (i + 1 < layers.size() && layers[i + 1].in_dim() != l.out_dim()) {
      throw ArgumentError("MLP layer dimensions do not chain");
    }
  }
  if (layers.back().activation != Activation::kIdentity) {
    throw ArgumentError("MLP output layer must be linear");
  }
}

MlpParams MlpParams::zeros_like() const {
  MlpParams z;
  z.layers.reserve(layers.size());
  for (const auto& l : layers) {
    z.layers.push_back({Matrix(l.out_dim(), l.in_dim()), std::vector<double>(l.out_dim(), 0.0),
                        l.activation});
  }
  return z;
}

std::vector<double> mlp_forward(const MlpParams& mlp, std::span<const double> z) {
  const auto& k = simd::active();
  std::vector<double> x(z.begin(), z.end());
  std::vector<double> y;
  for (const auto& layer : mlp.layers) {
    y.resize(layer.out_dim());
    k.gemv(layer.weight.data(), x.data(), layer.bias.data(), y.data(), layer.out_dim(),
           layer.in_dim());
    if (layer.activation != Activation::kIdentity) {
      for (double& v : y) v = activate(layer.activation, v);
    }
    std::swap(x, y);
  }
  return x;
}

std::vector<double> mlp_forward(const MlpParams& mlp, std::span<const double> z, MlpTrace& trace) {
  const auto& k = simd::active();
  trace.inputs.resize(mlp.layers.size());
  trace.pre.resize(mlp.layers.size());
  std::vector<double> x(z.begin(), z.end());
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    const auto& layer = mlp.layers[i];
    trace.inputs[i] = x;
    auto& pre = trace.pre[i];
    pre.resize(layer.out_dim());
    k.gemv(layer.weight.data(), x.data(), layer.bias.data(), pre.data(), layer.out_dim(),
           layer.in_dim());
    x.resize(layer.out_dim());
    for (std::size_t j = 0; j < pre.size(); ++j) x[j] = activate(layer.activation, pre[j]);
  }
  return x;
}

void mlp_backward(const MlpParams& mlp, const MlpTrace& trace, std::span<const double> grad_output,
                  MlpParams& grads, std::span<double> grad_input) {
  const auto& k = simd::active();
  std::vector<double> g(grad_output.begin(), grad_output.end());
  std::vector<double> g_in;
  for (std::size_t i = mlp.layers.size(); i-- > 0;) {
    const auto& layer = mlp.layers[i];
    auto& grad_layer = grads.layers[i];
    if (layer.activation != Activation::kIdentity) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        g[j] *= activation_slope(layer.activation, trace.pre[i][j]);
      }
    }
    k.ger(1.0, g.data(), trace.inputs[i].data(), grad_layer.weight.data(), layer.out_dim(),
          layer.in_dim());
    k.axpy(1.0, g.data(), grad_layer.bias.data(), g.size());
    g_in.assign(layer.in_dim(), 0.0);
    k.gemv_t_acc(layer.weight.data(), g.data(), g_in.data(), layer.out_dim(), layer.in_dim());
    std::swap(g, g_in);
  }
  k.axpy(1.0, g.data(), grad_input.data(), grad_input.size());
}

// ---------------------------------------------------------------------------
// Parameters

void DiscriminatorParams::validate() const {
  if (source.rows() != target.rows() || source.cols() != target.cols()) {
    throw ArgumentError("source and target matrices differ in shape");
  }
  for (const Matrix* m : {&source, &target}) {
    for (double v : m->values()) {
      if (!std::isfinite(v)) throw NumericError("non-finite discriminator parameter");
    }
  }
}

void GeneratorParams::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ArgumentError("sigma must be finite and >= 0");
  target_mlp.validate(dim());
  if (source_mlp) source_mlp->validate(dim());
}

std::vector<std::size_t> ModelConfig::resolved_hidden(bool source) const {
  std::vector<std::size_t> widths = source ? source_hidden : target_hidden;
  for (auto& w : widths) {
    if (w == 0) w = dim;
  }
  return widths;
}

MlpParams init_mlp(std::size_t dim, std::span<const std::size_t> hidden, Activation activation,
                   Rng& rng) {
  MlpParams mlp;
  std::size_t in = dim;
  for (std::size_t i = 0; i <= hidden.size(); ++i) {
    const bool last = i == hidden.size();
    const std::size_t out = last ? dim : hidden[i];
    DenseLayer layer{Matrix(out, in), std::vector<double>(out, 0.0),
                     last ? Activation::kIdentity : activation};
    fill_uniform(layer.weight.values(), 1.0 / std::sqrt(static_cast<double>(in)), rng);
    mlp.layers.push_back(std::move(layer));
    in = out;
  }
  return mlp;
}

Model init_params(std::size_t node_count, const ModelConfig& config, Rng& rng) {
  if (config.dim == 0) throw ArgumentError("embedding dimension must be >= 1");
  if (node_count == 0) throw ArgumentError("node count must be >= 1");
  const double bound = 0.5 / static_cast<double>(config.dim);
  Model m;
  m.disc.source = Matrix(node_count, config.dim);
  m.disc.target = Matrix(node_count, config.dim);
  m.gen.latent = Matrix(node_count, config.dim);
  fill_uniform(m.disc.source.values(), bound, rng);
  fill_uniform(m.disc.target.values(), bound, rng);
  fill_uniform(m.gen.latent.values(), bound, rng);
  m.gen.sigma = config.sigma;
  if (!config.single_generator) {
    m.gen.source_mlp =
        init_mlp(config.dim, config.resolved_hidden(true), config.hidden_activation, rng);
  }
  m.gen.target_mlp =
      init_mlp(config.dim, config.resolved_hidden(false), config.hidden_activation, rng);
  return m;
}

// ---------------------------------------------------------------------------
// Sampling and scoring

std::vector<double> sample_latent(const GeneratorParams& gen, NodeId u, Rng& rng) {
  const auto mean = gen.latent.row(u);
  std::vector<double> z(mean.begin(), mean.end());
  for (double& v : z) v += gen.sigma * rng.normal();
  return z;
}

FakeNeighbors generate_fake(const GeneratorParams& gen, NodeId u, Rng& rng) {
  std::vector<double> z = sample_latent(gen, u, rng);
  FakeNeighbors out;
  if (gen.source_mlp) {
    out.source = FakeNeighbor{u, NeighborRole::kSource, mlp_forward(*gen.source_mlp, z), z};
  }
  out.target = FakeNeighbor{u, NeighborRole::kTarget, mlp_forward(gen.target_mlp, z), std::move(z)};
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double pair_score(std::span<const double> s, std::span<const double> t) { return simd::dot(s, t); }

double discriminate(std::span<const double> s, std::span<const double> t) {
  return sigmoid(pair_score(s, t));
}

// ---------------------------------------------------------------------------
// RowGradients

RowGradients::RowGradients(std::size_t node_count, std::size_t dim)
    : dim_(dim), slot_(node_count, -1) {}

std::span<double> RowGradients::row(NodeId u) {
  std::int32_t& s = slot_[u];
  if (s < 0) {
    s = static_cast<std::int32_t>(rows_.size());
    rows_.push_back(u);
    data_.resize(data_.size() + dim_, 0.0);
  }
  return {data_.data() + static_cast<std::size_t>(s) * dim_, dim_};
}

std::span<const double> RowGradients::find(NodeId u) const {
  if (u >= slot_.size() || slot_[u] < 0) return {};
  return {data_.data() + static_cast<std::size_t>(slot_[u]) * dim_, dim_};
}

void RowGradients::clear() {
  for (NodeId u : rows_) slot_[u] = -1;
  rows_.clear();
  data_.clear();
}

DiscriminatorGrads make_discriminator_grads(const DiscriminatorParams& disc) {
  return {RowGradients(disc.node_count(), disc.dim()), RowGradients(disc.node_count(), disc.dim())};
}

GeneratorGrads make_generator_grads(const GeneratorParams& gen) {
  GeneratorGrads g;
  g.latent = RowGradients(gen.node_count(), gen.dim());
  if (gen.source_mlp) g.source_mlp = gen.source_mlp->zeros_like();
  g.target_mlp = gen.target_mlp.zeros_like();
  return g;
}

// ---------------------------------------------------------------------------
// Discriminator loss

double discriminator_loss_and_grads(const DiscriminatorParams& disc,
                                    std::span<const Edge> positives,
                                    std::span<const FakeNeighbor> fakes, DiscriminatorGrads& out) {
  if (positives.empty()) throw ArgumentError("discriminator step needs positive pairs");
  if (fakes.empty()) throw ArgumentError("discriminator step needs fake pairs");
  out.source.clear();
  out.target.clear();
  const auto& k = simd::active();
  const std::size_t d = disc.dim();

  const double inv_pos = 1.0 / static_cast<double>(positives.size());
  double pos_sum = 0.0;
  for (const Edge& e : positives) {
    const auto s = disc.source.row(e.src);
    const auto t = disc.target.row(e.dst);
    const double x = k.dot(s.data(), t.data(), d);
    const double term = softplus(-x);
    if (!std::isfinite(term)) non_finite("positive loss", e.src, e.dst, x);
    pos_sum += term;
    const double dx = -sigmoid(-x) * inv_pos;
    k.axpy(dx, t.data(), out.source.row(e.src).data(), d);
    k.axpy(dx, s.data(), out.target.row(e.dst).data(), d);
  }

  const double inv_fake = 1.0 / static_cast<double>(fakes.size());
  double fake_sum = 0.0;
  for (const FakeNeighbor& f : fakes) {
    const NodeId a = f.owner;
    if (f.role == NeighborRole::kSource) {
      const auto t = disc.target.row(a);
      const double x = k.dot(f.embedding.data(), t.data(), d);
      const double term = softplus(x);
      if (!std::isfinite(term)) non_finite("fake-source loss", a, a, x);
      fake_sum += term;
      k.axpy(sigmoid(x) * inv_fake, f.embedding.data(), out.target.row(a).data(), d);
    } else {
      const auto s = disc.source.row(a);
      const double x = k.dot(s.data(), f.embedding.data(), d);
      const double term = softplus(x);
      if (!std::isfinite(term)) non_finite("fake-target loss", a, a, x);
      fake_sum += term;
      k.axpy(sigmoid(x) * inv_fake, f.embedding.data(), out.source.row(a).data(), d);
    }
  }
  return pos_sum * inv_pos + fake_sum * inv_fake;
}

DiscriminatorStep discriminator_loss_and_grads(const DiscriminatorParams& disc,
                                               std::span<const Edge> positives,
                                               std::span<const FakeNeighbor> fakes) {
  DiscriminatorStep step{0.0, make_discriminator_grads(disc)};
  step.loss = discriminator_loss_and_grads(disc, positives, fakes, step.grads);
  return step;
}

// ---------------------------------------------------------------------------
// Generator loss

Matrix draw_generator_noise(std::size_t batch, std::size_t samples, std::size_t dim, Rng& rng) {
  Matrix noise(batch * samples, dim);
  for (double& v : noise.values()) v = rng.normal();
  return noise;
}

double generator_loss_and_grads(const DiscriminatorParams& disc, const GeneratorParams& gen,
                                std::span<const NodeId> nodes, std::size_t samples,
                                const Matrix& noise, GeneratorGrads& out) {
  if (nodes.empty()) throw ArgumentError("generator step needs nodes");
  if (samples == 0) throw ArgumentError("generator step needs at least one sample per node");
  if (noise.rows() != nodes.size() * samples || noise.cols() != gen.dim()) {
    throw ArgumentError("noise matrix shape does not match batch");
  }
  out.latent.clear();
  for (auto& l : out.target_mlp.layers) {
    l.weight.fill(0.0);
    l.bias.assign(l.bias.size(), 0.0);
  }
  if (out.source_mlp) {
    for (auto& l : out.source_mlp->layers) {
      l.weight.fill(0.0);
      l.bias.assign(l.bias.size(), 0.0);
    }
  }

  const auto& k = simd::active();
  const std::size_t d = gen.dim();
  const double scale = 1.0 / static_cast<double>(nodes.size() * samples);
  double total = 0.0;
  std::vector<double> z(d), grad_z(d), grad_out(d);
  MlpTrace trace;

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId u = nodes[i];
    const auto mean = gen.latent.row(u);
    const auto s_u = disc.source.row(u);
    const auto t_u = disc.target.row(u);
    for (std::size_t draw = 0; draw < samples; ++draw) {
      const auto eps = noise.row(i * samples + draw);
      for (std::size_t j = 0; j < d; ++j) z[j] = mean[j] + gen.sigma * eps[j];
      grad_z.assign(d, 0.0);

      if (gen.source_mlp) {
        const auto fake_s = mlp_forward(*gen.source_mlp, z, trace);
        const double x = k.dot(fake_s.data(), t_u.data(), d);
        const double term = -softplus(x);
        if (!std::isfinite(term)) non_finite("generator source loss", u, u, x);
        total += term;
        const double dx = -sigmoid(x) * scale;
        for (std::size_t j = 0; j < d; ++j) grad_out[j] = dx * t_u[j];
        mlp_backward(*gen.source_mlp, trace, grad_out, *out.source_mlp, grad_z);
      }

      const auto fake_t = mlp_forward(gen.target_mlp, z, trace);
      const double x = k.dot(s_u.data(), fake_t.data(), d);
      const double term = -softplus(x);
      if (!std::isfinite(term)) non_finite("generator target loss", u, u, x);
      total += term;
      const double dx = -sigmoid(x) * scale;
      for (std::size_t j = 0; j < d; ++j) grad_out[j] = dx * s_u[j];
      mlp_backward(gen.target_mlp, trace, grad_out, out.target_mlp, grad_z);

      k.axpy(1.0, grad_z.data(), out.latent.row(u).data(), d);
    }
  }
  return total * scale;
}

GeneratorStep generator_loss_and_grads(const DiscriminatorParams& disc, const GeneratorParams& gen,
                                       std::span<const NodeId> nodes, std::size_t samples,
                                       Rng& rng) {
  const Matrix noise = draw_generator_noise(nodes.size(), samples, gen.dim(), rng);
  GeneratorStep step{0.0, make_generator_grads(gen)};
  step.loss = generator_loss_and_grads(disc, gen, nodes, samples, noise, step.grads);
  return step;
}

}  // namespace dggan
