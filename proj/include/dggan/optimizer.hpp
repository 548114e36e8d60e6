#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dggan/matrix.hpp"
#include "dggan/model.hpp"

namespace dggan {

enum class OptimizerKind : std::uint8_t { kAdam, kSgd };

std::string_view to_string(OptimizerKind kind);
std::optional<OptimizerKind> parse_optimizer(std::string_view text);

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Per-tensor moment buffers plus the shared step counter. Moments mirror
/// the registered tensor sizes; SGD keeps none.
struct OptimizerState {
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
};

/// First-order optimizer over a fixed set of registered tensors.
///
/// Each update call is one step: `begin_step()` advances the bias-correction
/// counter, then every tensor touched in that step is passed to `apply` or
/// `apply_rows`. Row updates are lazy: rows without a gradient keep both
/// their value and their moments.
class Optimizer {
 public:
  explicit Optimizer(OptimizerKind kind, AdamSettings adam = {});

  /// Returns the slot id used in later apply calls.
  std::size_t add_tensor(std::size_t size);

  void begin_step() { ++state_.step; }

  /// Throws NumericError on a non-finite gradient before touching params.
  void apply(std::size_t slot, std::span<double> params, std::span<const double> grads, double lr);
  void apply_rows(std::size_t slot, Matrix& params, const RowGradients& grads, double lr);

  OptimizerKind kind() const { return kind_; }
  const OptimizerState& state() const { return state_; }

 private:
  void update(std::size_t slot, std::size_t offset, std::span<double> params,
              std::span<const double> grads, double lr);

  OptimizerKind kind_;
  AdamSettings adam_;
  OptimizerState state_;
  std::vector<std::size_t> sizes_;
};

/// Registers every tensor of an MLP (weight then bias per layer) and returns
/// the first slot id.
std::size_t register_mlp(Optimizer& opt, const MlpParams& mlp);
void apply_mlp(Optimizer& opt, std::size_t first_slot, MlpParams& params, const MlpParams& grads,
               double lr);

/// Throws NumericError naming `what` if any value is not finite.
void check_finite(std::span<const double> values, const char* what);

}  // namespace dggan
