#include "dggan/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "dggan/error.hpp"

namespace dggan {
namespace {

template <class T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  const U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(U)> bytes;
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  std::array<unsigned char, sizeof(U)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ParseError("checkpoint truncated");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

void put_values(std::ostream& out, std::span<const double> values) {
  for (double v : values) put_le(out, v);
}

void get_values(std::istream& in, std::span<double> values) {
  for (double& v : values) v = get_le<double>(in);
}

void put_shape(std::ostream& out, const MlpParams& mlp) {
  put_le(out, static_cast<std::uint32_t>(mlp.layers.size()));
  for (const auto& l : mlp.layers) {
    put_le(out, static_cast<std::uint64_t>(l.in_dim()));
    put_le(out, static_cast<std::uint64_t>(l.out_dim()));
    put_le(out, static_cast<std::uint8_t>(l.activation));
  }
}

MlpParams get_shape(std::istream& in) {
  const auto count = get_le<std::uint32_t>(in);
  if (count == 0 || count > 1024) throw ParseError("checkpoint: bad MLP layer count");
  MlpParams mlp;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto in_dim = get_le<std::uint64_t>(in);
    const auto out_dim = get_le<std::uint64_t>(in);
    const auto act = get_le<std::uint8_t>(in);
    if (act > static_cast<std::uint8_t>(Activation::kTanh)) {
      throw ParseError("checkpoint: unknown activation tag");
    }
    if (in_dim == 0 || out_dim == 0 || in_dim > (1u << 20) || out_dim > (1u << 20)) {
      throw ParseError("checkpoint: bad MLP layer shape");
    }
    mlp.layers.push_back({Matrix(out_dim, in_dim), std::vector<double>(out_dim, 0.0),
                          static_cast<Activation>(act)});
  }
  return mlp;
}

void put_tensors(std::ostream& out, const MlpParams& mlp) {
  for (const auto& l : mlp.layers) {
    put_values(out, l.weight.values());
    put_values(out, l.bias);
  }
}

void get_tensors(std::istream& in, MlpParams& mlp) {
  for (auto& l : mlp.layers) {
    get_values(in, l.weight.values());
    get_values(in, l.bias);
  }
}

}  // namespace

void write_checkpoint(std::ostream& out, const Model& model) {
  const auto& disc = model.disc;
  const auto& gen = model.gen;
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  put_le(out, kCheckpointVersion);
  put_le(out, static_cast<std::uint64_t>(disc.node_count()));
  put_le(out, static_cast<std::uint64_t>(disc.dim()));
  put_le(out, gen.sigma);
  put_le(out, static_cast<std::uint8_t>(gen.single_generator() ? 1 : 0));
  if (gen.source_mlp) put_shape(out, *gen.source_mlp);
  put_shape(out, gen.target_mlp);
  put_values(out, disc.source.values());
  put_values(out, disc.target.values());
  put_values(out, gen.latent.values());
  if (gen.source_mlp) put_tensors(out, *gen.source_mlp);
  put_tensors(out, gen.target_mlp);
  if (!out) throw Error("checkpoint write failed");
}

Model read_checkpoint(std::istream& in) {
  char magic[sizeof kCheckpointMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw ParseError("not a dggan checkpoint (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto node_count = get_le<std::uint64_t>(in);
  const auto dim = get_le<std::uint64_t>(in);
  if (node_count == 0 || dim == 0 || dim > (1u << 20) || node_count > (1ull << 32)) {
    throw ParseError("checkpoint: bad node count or dimension");
  }
  Model m;
  m.gen.sigma = get_le<double>(in);
  const bool single = get_le<std::uint8_t>(in) != 0;
  if (!single) m.gen.source_mlp = get_shape(in);
  m.gen.target_mlp = get_shape(in);
  m.disc.source = Matrix(node_count, dim);
  m.disc.target = Matrix(node_count, dim);
  m.gen.latent = Matrix(node_count, dim);
  get_values(in, m.disc.source.values());
  get_values(in, m.disc.target.values());
  get_values(in, m.gen.latent.values());
  if (m.gen.source_mlp) get_tensors(in, *m.gen.source_mlp);
  get_tensors(in, m.gen.target_mlp);
  try {
    m.gen.validate();
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  return m;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  write_checkpoint(out, model);
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

void write_embeddings(std::ostream& out, const DiscriminatorParams& disc, const NodeIdMap& ids) {
  if (ids.size() != disc.node_count()) {
    throw ArgumentError("id map has " + std::to_string(ids.size()) + " nodes, model has " +
                        std::to_string(disc.node_count()));
  }
  out << disc.node_count() << " " << disc.dim() << "\n";
  char buf[32];
  for (NodeId u = 0; u < disc.node_count(); ++u) {
    out << ids.label(u);
    for (const Matrix* m : {&disc.source, &disc.target}) {
      out << '\t';
      const auto row = m->row(u);
      for (std::size_t j = 0; j < row.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.9g", row[j]);
        if (j) out << ' ';
        out << buf;
      }
    }
    out << '\n';
  }
}

}  // namespace dggan
