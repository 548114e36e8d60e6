#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

#include "dggan/checkpoint.hpp"
#include "dggan/error.hpp"

namespace dggan {
namespace {

Model random_model(bool single, std::uint64_t seed) {
  ModelConfig c;
  c.dim = 5;
  c.single_generator = single;
  c.source_hidden = {7, 3};
  c.target_hidden = {4};
  c.hidden_activation = Activation::kTanh;
  Rng rng(seed);
  auto m = init_params(9, c, rng);
  m.gen.sigma = 0.25;
  return m;
}

std::string bytes(const Model& m) {
  std::ostringstream out;
  write_checkpoint(out, m);
  return out.str();
}

TEST(Checkpoint, RoundTrip) {
  for (bool single : {false, true}) {
    const auto m = random_model(single, 3);
    std::istringstream in(bytes(m));
    const auto back = read_checkpoint(in);
    EXPECT_EQ(back, m);
    EXPECT_EQ(back.gen.single_generator(), single);
  }
}

TEST(Checkpoint, HeaderLayout) {
  const auto m = random_model(true, 1);
  const auto b = bytes(m);
  ASSERT_GT(b.size(), 37u);
  EXPECT_EQ(b.substr(0, 8), "DGGANCKP");
  std::uint32_t version = 0;
  std::uint64_t nodes = 0;
  std::uint64_t dim = 0;
  double sigma = 0.0;
  std::memcpy(&version, b.data() + 8, 4);
  std::memcpy(&nodes, b.data() + 12, 8);
  std::memcpy(&dim, b.data() + 20, 8);
  std::memcpy(&sigma, b.data() + 28, 8);
  EXPECT_EQ(version, kCheckpointVersion);
  EXPECT_EQ(nodes, 9u);
  EXPECT_EQ(dim, 5u);
  EXPECT_EQ(sigma, 0.25);
  EXPECT_EQ(b[36], 1);  // single-generator flag
}

TEST(Checkpoint, RejectsCorruptInput) {
  const auto good = bytes(random_model(false, 2));
  auto bad_magic = good;
  bad_magic[0] = 'X';
  std::istringstream a(bad_magic);
  EXPECT_THROW(read_checkpoint(a), ParseError);
  std::istringstream b(good.substr(0, good.size() - 3));
  EXPECT_THROW(read_checkpoint(b), ParseError);
  auto bad_version = good;
  bad_version[8] = 9;
  std::istringstream c(bad_version);
  EXPECT_THROW(read_checkpoint(c), ParseError);
  EXPECT_THROW(load_checkpoint("/nonexistent/model.ckpt"), ParseError);
}

TEST(Embeddings, TextExport) {
  std::istringstream edges("a b\nb c\n");
  const auto loaded = parse_edge_list(edges);
  DiscriminatorParams disc{Matrix(3, 2), Matrix(3, 2)};
  disc.source(0, 0) = 1.0 / 3.0;
  disc.target(2, 1) = -2.5;
  std::ostringstream out;
  write_embeddings(out, disc, loaded.ids);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "3 2");
  std::getline(lines, line);
  EXPECT_EQ(line, "a\t0.333333333 0\t0 0");
  std::getline(lines, line);
  std::getline(lines, line);
  EXPECT_EQ(line, "c\t0 0\t0 -2.5");
}

}  // namespace
}  // namespace dggan
