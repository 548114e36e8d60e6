#include "dggan/optimizer.hpp"

#include <cmath>

#include "dggan/error.hpp"
#include "dggan/simd/kernels.hpp"

namespace dggan {

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::kAdam ? "adam" : "sgd"; }

std::optional<OptimizerKind> parse_optimizer(std::string_view text) {
  if (text == "adam") return OptimizerKind::kAdam;
  if (text == "sgd") return OptimizerKind::kSgd;
  return std::nullopt;
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite gradient in ") + what);
  }
}

Optimizer::Optimizer(OptimizerKind kind, AdamSettings adam) : kind_(kind), adam_(adam) {
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) ||
      !(adam.epsilon > 0.0)) {
    throw ArgumentError("adam betas must lie in [0, 1) and epsilon must be positive");
  }
}

std::size_t Optimizer::add_tensor(std::size_t size) {
  sizes_.push_back(size);
  if (kind_ == OptimizerKind::kAdam) {
    state_.first.emplace_back(size, 0.0);
    state_.second.emplace_back(size, 0.0);
  }
  return sizes_.size() - 1;
}

void Optimizer::update(std::size_t slot, std::size_t offset, std::span<double> params,
                       std::span<const double> grads, double lr) {
  const auto& k = simd::active();
  if (kind_ == OptimizerKind::kSgd) {
    k.axpy(-lr, grads.data(), params.data(), params.size());
    return;
  }
  if (state_.step == 0) throw ArgumentError("begin_step() must precede apply()");
  const double t = static_cast<double>(state_.step);
  const double c1 = 1.0 / (1.0 - std::pow(adam_.beta1, t));
  const double c2 = 1.0 / (1.0 - std::pow(adam_.beta2, t));
  k.adam(params.data(), grads.data(), state_.first[slot].data() + offset,
         state_.second[slot].data() + offset, params.size(), adam_.beta1, adam_.beta2, c1, c2, lr,
         adam_.epsilon);
}

void Optimizer::apply(std::size_t slot, std::span<double> params, std::span<const double> grads,
                      double lr) {
  if (slot >= sizes_.size() || params.size() != sizes_[slot] || grads.size() != params.size()) {
    throw ArgumentError("optimizer tensor shape mismatch");
  }
  check_finite(grads, "optimizer input");
  update(slot, 0, params, grads, lr);
}

void Optimizer::apply_rows(std::size_t slot, Matrix& params, const RowGradients& grads, double lr) {
  if (slot >= sizes_.size() || params.size() != sizes_[slot] || grads.dim() != params.cols()) {
    throw ArgumentError("optimizer tensor shape mismatch");
  }
  for (std::size_t k = 0; k < grads.touched().size(); ++k) {
    check_finite(grads.values(k), "optimizer input");
  }
  const std::size_t d = params.cols();
  for (std::size_t k = 0; k < grads.touched().size(); ++k) {
    const NodeId u = grads.touched()[k];
    update(slot, static_cast<std::size_t>(u) * d, params.row(u), grads.values(k), lr);
  }
}

std::size_t register_mlp(Optimizer& opt, const MlpParams& mlp) {
  std::size_t first = 0;
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    const std::size_t w = opt.add_tensor(mlp.layers[i].weight.size());
    opt.add_tensor(mlp.layers[i].bias.size());
    if (i == 0) first = w;
  }
  return first;
}

void apply_mlp(Optimizer& opt, std::size_t first_slot, MlpParams& params, const MlpParams& grads,
               double lr) {
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    opt.apply(first_slot + 2 * i, params.layers[i].weight.values(), grads.layers[i].weight.values(),
              lr);
    opt.apply(first_slot + 2 * i + 1, params.layers[i].bias, grads.layers[i].bias, lr);
  }
}

}  // namespace dggan
