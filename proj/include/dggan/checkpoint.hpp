#pragma once

#include <filesystem>
#include <iosfwd>

#include "dggan/graph.hpp"
#include "dggan/model.hpp"

namespace dggan {

/// Binary checkpoint layout (all integers and floats little-endian):
///
///   char[8]  "DGGANCKP"
///   u32      version (1)
///   u64      node_count
///   u64      d
///   f64      sigma
///   u8       single_generator
///   per MLP (source unless single_generator, then target):
///     u32    layer_count
///     per layer: u64 in, u64 out, u8 activation
///   f64[]    S, T, Z (node_count x d each, row-major)
///   per MLP, per layer: f64[] weight (out x in, row-major), f64[] bias
inline constexpr char kCheckpointMagic[8] = {'D', 'G', 'G', 'A', 'N', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Model& model);
Model read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Model& model);
Model load_checkpoint(const std::filesystem::path& path);

/// Text export: header "node_count d", then per node
/// "label<TAB>s_1 ... s_d<TAB>t_1 ... t_d" with 9 significant digits.
void write_embeddings(std::ostream& out, const DiscriminatorParams& disc, const NodeIdMap& ids);

}  // namespace dggan
