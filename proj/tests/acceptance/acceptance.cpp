// Acceptance run: prints one PASS/FAIL line per criterion that needs no
// external data. Usage: dggan_acceptance <path to dggan binary>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "acceptance/common.hpp"
#include "dggan/eval.hpp"
#include "dggan/experiments.hpp"
#include "support/fixtures.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

namespace dggan::acceptance {
namespace {

namespace fs = std::filesystem;

void gradient_suite(Reporter& r) {
  Stopwatch clock;
  double worst = 0.0;
  std::string where;
  std::size_t coordinates = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto inst = testing::make_instance(seed);
    for (const auto& res : {testing::check_discriminator(inst), testing::check_generator(inst)}) {
      coordinates += res.coordinates;
      if (res.worst_relative_error > worst) {
        worst = res.worst_relative_error;
        where = format("instance %llu %s", static_cast<unsigned long long>(seed),
                       res.worst_coordinate.c_str());
      }
    }
  }
  const double secs = clock.seconds();
  r.check(1, "gradient suite", worst < 1e-4 && secs < 60.0,
          format("50 instances, %zu partials, worst relative error %.3g at %s (< 1e-4), %.1fs (< 60s)",
                 coordinates, worst, where.c_str(), secs));
}

void metric_oracles(Reporter& r) {
  Rng rng(2024);
  std::size_t auc_mismatch = 0;
  for (int instance = 0; instance < 200; ++instance) {
    std::vector<double> pos(1 + rng.index(40));
    std::vector<double> neg(1 + rng.index(40));
    const bool ties = instance % 3 == 0;
    for (auto* v : {&pos, &neg}) {
      for (double& x : *v) x = ties ? static_cast<double>(rng.index(5)) : rng.normal();
    }
    if (auc(pos, neg) != testing::brute_force_auc(pos, neg)) ++auc_mismatch;
  }

  struct F1Fixture {
    std::vector<int> truth, pred;
    double micro, macro;
  };
  const std::vector<F1Fixture> fixtures{
      {{0, 1, 2, 1}, {0, 1, 2, 1}, 1.0, 1.0},
      {{0, 0, 1}, {0, 1, 1}, 2.0 / 3.0, 2.0 / 3.0},
      {{0, 0}, {0, 1}, 0.5, 1.0 / 3.0},
      {{0, 0, 0, 1, 1, 2}, {0, 1, 0, 1, 2, 2}, 4.0 / 6.0, (0.8 + 0.5 + 2.0 / 3.0) / 3.0},
  };
  std::size_t f1_mismatch = 0;
  for (const auto& f : fixtures) {
    const auto got = f1_scores(f.pred, f.truth);
    if (std::abs(got.micro - f.micro) > 1e-15 || std::abs(got.macro - f.macro) > 1e-15) ++f1_mismatch;
  }

  std::size_t pk_mismatch = 0;
  std::size_t pk_instances = 0;
  for (int instance = 0; instance < 30; ++instance) {
    const std::size_t n = 6 + rng.index(95);
    const auto g = testing::random_graph(n, std::min<std::size_t>(3 * n, n * (n - 1) / 2), rng);
    DiscriminatorParams disc{Matrix(n, 3), Matrix(n, 3)};
    for (Matrix* m : {&disc.source, &disc.target}) {
      for (double& v : m->values()) v = instance % 2 ? rng.normal() : static_cast<double>(rng.index(3));
    }
    std::vector<NodeId> sources;
    for (NodeId u = 0; u < n; ++u) {
      if (g.out_degree(u) > 0) sources.push_back(u);
    }
    const std::vector<std::size_t> ks{1, 2, 5, n - 1};
    const auto want = testing::naive_precision(disc, g, sources, ks);
    const auto got = precision_at_k(disc, g, sources, ks, 2);
    ++pk_instances;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (std::abs(got[i] - want[i]) > 1e-12) ++pk_mismatch;
    }
  }
  r.check(2, "metric oracles", auc_mismatch + f1_mismatch + pk_mismatch == 0,
          format("auc exact on %zu/200, f1 fixtures %zu/%zu, precision@k %zu instances with %zu mismatches",
                 200 - auc_mismatch, fixtures.size() - f1_mismatch, fixtures.size(), pk_instances,
                 pk_mismatch));
}

void direction_learnability(Reporter& r) {
  Stopwatch clock;
  const auto g = testing::bipartite_graph(100, 10, 5);
  const std::vector<double> fractions{1.0};
  const auto run = run_link_prediction(g, testing::direction_task_config(), 0.5, fractions, 1);
  const double a = run.results[0].auc;
  const double sym = symmetric_auc(run.trained.model.disc, run.tests[0].second);
  const double secs = clock.seconds();
  r.check(3, "direction learnability", a >= 0.95 && sym >= 0.4 && sym <= 0.6 && secs < 300.0,
          format("200-node A->B graph, reversed=1.0: AUC %.4f (>= 0.95), symmetric AUC %.4f (in [0.4, 0.6]), "
                 "%.1fs (< 300s)",
                 a, sym, secs));
}

void complexity(Reporter& r) {
  TrainConfig c;
  c.model.dim = 16;
  c.n_d = 3;
  c.n_g = 1;
  c.batch_size = 256;
  c.coverage = Coverage::kFullPass;
  const std::vector<std::size_t> sizes{1000, 2000, 4000, 6000, 8000};
  const auto timings = measure_epoch_scaling(sizes, 4.0, c, 1, 3);
  const double r2 = scaling_r_squared(timings);
  std::string pts;
  for (const auto& t : timings) pts += format(" %zu:%.3fs", t.edges, t.seconds_per_epoch);
  r.check(6, "complexity", r2 >= 0.9,
          format("R^2 %.4f (>= 0.9) over %zu sizes, edges:seconds%s", r2, timings.size(), pts.c_str()));
}

void reconstruction(Reporter& r) {
  const auto g = testing::random_dag(50, 50, 7);
  TrainConfig c;
  c.model.dim = 16;
  c.n_epoch = 600;  // P@1 plateaus by here on these graphs
  c.batch_size = 128;
  const auto trained = train(g, c);
  std::vector<NodeId> sources;
  std::size_t max_out = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (g.out_degree(u) > 0) sources.push_back(u);
    max_out = std::max(max_out, g.out_degree(u));
  }
  std::vector<std::size_t> ks(g.node_count() - 1);
  for (std::size_t k = 1; k <= ks.size(); ++k) ks[k - 1] = k;
  const auto p = precision_at_k(trained.model.disc, g, sources, ks);
  bool monotone = true;
  std::size_t first_rise = 0;
  for (std::size_t k = max_out + 1; k < ks.size(); ++k) {
    if (p[k] > p[k - 1]) {  // p[k] is P@(k+1)
      monotone = false;
      first_rise = k + 1;
      break;
    }
  }
  r.check(7, "reconstruction memorization", p[0] >= 0.8 && monotone,
          format("50-node DAG, %zu edges, %zu sources: mean P@1 %.4f (>= 0.8), max out-degree %zu, "
                 "curve non-increasing beyond it: %s",
                 g.edge_count(), sources.size(), p[0], max_out,
                 monotone ? "yes" : format("no, rises at k=%zu", first_rise).c_str()));
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int shell(const std::string& command) {
  const int rc = std::system((command + " >/dev/null 2>&1").c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

void determinism(Reporter& r, const fs::path& tool) {
  const fs::path root = fs::temp_directory_path() / "dggan_acceptance_replay";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto g = synthetic_graph(60, 3.0, 11);
  {
    std::ofstream edges(root / "edges.tsv");
    for (const auto& e : g.edges()) edges << "v" << e.src << '\t' << "v" << e.dst << '\n';
    std::ofstream labels(root / "labels.txt");
    for (NodeId u = 0; u < g.node_count(); ++u) labels << "v" << u << ' ' << "c" << u % 3 << '\n';
  }
  const std::string common = " --edges " + quote(root / "edges.tsv") +
                             " --dim 8 --epochs 2 --batch-size 32 --deterministic";
  const fs::path ckpt = root / "train" / "model.ckpt";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"train", "train" + common},
      {"linkpred", "linkpred" + common + " --seed 1..3"},
      {"reconstruct", "reconstruct --edges " + quote(root / "edges.tsv") + " --checkpoint " + quote(ckpt) +
                          " --deterministic"},
      {"classify", "classify --edges " + quote(root / "edges.tsv") + " --checkpoint " + quote(ckpt) +
                       " --labels " + quote(root / "labels.txt") + " --repeats 2 --deterministic"},
      {"sweep", "sweep" + common + " --ratios 0.5,1.0"},
      {"stats", "stats --edges " + quote(root / "edges.tsv") + " --deterministic"},
  };
  std::size_t compared = 0;
  std::vector<std::string> problems;
  for (const auto& [name, args] : commands) {
    const fs::path first = root / name;
    const fs::path second = root / (name + "_replay");
    if (shell(quote(tool) + " " + args + " --out " + quote(first)) != 0) {
      problems.push_back(name + " failed");
      continue;
    }
    if (shell(quote(tool) + " replay " + quote(first / (name + ".manifest")) + " --out " + quote(second)) != 0) {
      problems.push_back(name + " replay failed");
      continue;
    }
    for (const auto& entry : fs::directory_iterator(first)) {
      if (entry.path().extension() == ".manifest") continue;
      const fs::path other = second / entry.path().filename();
      ++compared;
      if (!fs::exists(other) || read_file(entry.path()) != read_file(other)) {
        problems.push_back(name + "/" + entry.path().filename().string() + " differs");
      }
    }
  }
  std::string detail = format("%zu commands replayed from manifests, %zu output files compared", commands.size(),
                              compared);
  for (const auto& p : problems) detail += "; " + p;
  r.check(9, "determinism", problems.empty() && compared > 0, detail);
  if (problems.empty()) fs::remove_all(root);
}

}  // namespace
}  // namespace dggan::acceptance

int main(int argc, char** argv) {
  using namespace dggan::acceptance;
  if (argc != 2) {
    std::cerr << "usage: dggan_acceptance <dggan binary>\n";
    return 2;
  }
  Reporter r;
  gradient_suite(r);
  metric_oracles(r);
  direction_learnability(r);
  r.report(4, "link prediction on Cora", Status::kBlocked, "needs the Cora graph; see dggan_acceptance_cora");
  r.report(5, "reversal stability on Cora", Status::kBlocked, "needs the Cora graph; see dggan_acceptance_cora");
  complexity(r);
  reconstruction(r);
  r.report(8, "classification on Cora", Status::kBlocked, "needs Cora labels; see dggan_acceptance_cora");
  determinism(r, argv[1]);
  return r.exit_code();
}
