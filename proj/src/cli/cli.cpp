#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dggan/checkpoint.hpp"
#include "dggan/cli.hpp"
#include "dggan/error.hpp"
#include "dggan/eval.hpp"
#include "dggan/experiments.hpp"
#include "dggan/graph.hpp"
#include "dggan/simd/kernels.hpp"
#include "dggan/trainer.hpp"

namespace dggan::cli {
namespace fs = std::filesystem;

namespace {

// Shortest text that parses back to the same double.
std::string format_real(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

std::string format_metric(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Every flag value lives here, whichever command is running.
struct Settings {
  // common
  std::string seed = "1";
  bool deterministic = false;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::string config;
  std::string out = ".";
  std::string simd = "auto";
  // inputs
  std::string edges;
  std::string delimiter = "auto";
  std::string checkpoint;
  std::string split_manifest;
  std::string labels;
  // training
  std::size_t dim = 128;
  std::size_t epochs = TrainConfig{}.n_epoch;
  std::size_t n_g = 5;
  std::size_t n_d = 15;
  std::size_t n_s = TrainConfig{}.n_s;
  std::size_t batch_size = TrainConfig{}.batch_size;
  double lr_d = TrainConfig{}.lr_d;
  double lr_g = TrainConfig{}.lr_g;
  double l2_d = TrainConfig{}.l2_d;
  double l2_g = TrainConfig{}.l2_g;
  double sigma = ModelConfig{}.sigma;
  bool single_generator = false;
  std::string mlp_s_layers = "0";
  std::string mlp_t_layers = "0";
  std::string activation{to_string(ModelConfig{}.hidden_activation)};
  std::string optimizer{to_string(TrainConfig{}.optimizer)};
  double adam_beta1 = AdamSettings{}.beta1;
  double adam_beta2 = AdamSettings{}.beta2;
  double adam_eps = AdamSettings{}.epsilon;
  std::string coverage{to_string(TrainConfig{}.coverage)};
  // protocols
  double removal = 0.5;
  std::string reversed = "0,0.5,1";
  double sample_frac = 0.10;
  std::string k = "1..10";
  std::string train_ratios = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  std::size_t repeats = 10;
  double logreg_l2 = LogRegOptions{}.l2;
  std::size_t logreg_iterations = LogRegOptions{}.iterations;
  double logreg_lr = LogRegOptions{}.learning_rate;
  std::size_t checkpoint_every = 0;
  bool shuffle_labels = false;
  std::string ratios = "0.1,0.3,0.5,0.7,0.9";
};

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ArgumentError("invalid boolean '" + text + "'");
}

template <class T>
T parse_number(const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ArgumentError("invalid number '" + text + "'");
  }
  return value;
}

// One command-line option that can also be supplied by a config file and is
// written back into the run manifest.
struct Entry {
  std::string key;
  CLI::Option* option = nullptr;
  std::function<void(const std::string&)> assign;
  std::function<std::string()> render;
  bool in_csv_header = true;
  bool from_config = false;

  bool is_set() const { return option->count() > 0 || from_config; }
};

class Registry {
 public:
  explicit Registry(CLI::App* app) : app_(app) {}

  CLI::App* app() const { return app_; }

  template <class T>
  CLI::Option* add(const std::string& key, T& var, const std::string& help) {
    Entry e;
    e.key = key;
    e.option = app_->add_option("--" + key, var, help)->capture_default_str();
    if constexpr (std::is_same_v<T, std::string>) {
      e.assign = [&var](const std::string& v) { var = v; };
      e.render = [&var] { return var; };
    } else if constexpr (std::is_floating_point_v<T>) {
      e.assign = [&var](const std::string& v) { var = parse_number<T>(v); };
      e.render = [&var] { return format_real(var); };
    } else {
      e.assign = [&var](const std::string& v) { var = parse_number<T>(v); };
      e.render = [&var] { return std::to_string(var); };
    }
    entries_.push_back(std::move(e));
    return entries_.back().option;
  }

  CLI::Option* flag(const std::string& key, bool& var, const std::string& help) {
    Entry e;
    e.key = key;
    e.option = app_->add_flag("--" + key, var, help);
    e.assign = [&var](const std::string& v) { var = parse_bool(v); };
    e.render = [&var] { return std::string(var ? "true" : "false"); };
    entries_.push_back(std::move(e));
    return entries_.back().option;
  }

  void exclude_from_csv_header(std::string_view key) { find(key)->in_csv_header = false; }

  Entry* find(std::string_view key) {
    for (auto& e : entries_) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }

  bool is_set(std::string_view key) {
    const Entry* e = find(key);
    return e != nullptr && e->is_set();
  }

  std::vector<Entry>& entries() { return entries_; }

 private:
  CLI::App* app_;
  std::vector<Entry> entries_;
};

void add_common(Registry& r, Settings& s) {
  r.add("seed", s.seed, "Master seed; linkpred also accepts lists such as 1..10 or 1,4,9");
  r.flag("deterministic", s.deterministic, "Zero wall-clock columns so outputs are byte-reproducible");
  r.add("threads", s.threads, "Evaluation threads (0: all cores)");
  r.add("out", s.out, "Output directory");
  r.add("simd", s.simd, "Kernel backend: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  r.app()->add_option("--config", s.config, "key=value file; flags on the command line win");
  r.exclude_from_csv_header("threads");
  r.exclude_from_csv_header("out");
}

void add_edges(Registry& r, Settings& s) {
  r.add("edges", s.edges, "Edge list, one `src dst` per line");
  r.add("delimiter", s.delimiter, "auto, tab, space, comma or a single character");
}

void add_training(Registry& r, Settings& s) {
  r.add("dim", s.dim, "Embedding dimension d");
  r.add("epochs", s.epochs, "Training epochs");
  r.add("n-g", s.n_g, "Generator iterations per epoch");
  r.add("n-d", s.n_d, "Discriminator iterations per epoch");
  r.add("n-s", s.n_s, "Fake neighbors per node");
  r.add("batch-size", s.batch_size, "Edges or nodes per step");
  r.add("lr-d", s.lr_d, "Discriminator learning rate");
  r.add("lr-g", s.lr_g, "Generator learning rate");
  r.add("l2-d", s.l2_d, "L2 penalty on discriminator rows");
  r.add("l2-g", s.l2_g, "L2 penalty on generator parameters");
  r.add("sigma", s.sigma, "Latent noise scale");
  r.flag("single-generator", s.single_generator, "Target generator only");
  r.add("mlp-s-layers", s.mlp_s_layers, "Source MLP hidden widths, e.g. 128,128 (0: d, none: linear)");
  r.add("mlp-t-layers", s.mlp_t_layers, "Target MLP hidden widths");
  r.add("activation", s.activation, "Hidden activation: identity, leaky_relu, relu, tanh");
  r.add("optimizer", s.optimizer, "adam or sgd");
  r.add("adam-beta1", s.adam_beta1, "Adam beta1");
  r.add("adam-beta2", s.adam_beta2, "Adam beta2");
  r.add("adam-eps", s.adam_eps, "Adam epsilon");
  r.add("coverage", s.coverage, "sampled: one batch per iteration; full: every edge per iteration");
}

// ---------------------------------------------------------------------------

std::optional<char> resolve_delimiter(const std::string& text) {
  if (text == "auto") return std::nullopt;
  if (text == "tab") return '\t';
  if (text == "space") return ' ';
  if (text == "comma") return ',';
  if (text.size() == 1) return text[0];
  throw ArgumentError("invalid --delimiter '" + text + "'");
}

std::vector<std::size_t> resolve_hidden(const std::string& text, std::size_t dim) {
  if (text == "none" || text.empty()) return {};
  auto widths = parse_real_list(text);
  std::vector<std::size_t> out;
  for (double w : widths) {
    if (w < 0 || w != std::floor(w)) throw ArgumentError("invalid layer width in '" + text + "'");
    out.push_back(w == 0 ? dim : static_cast<std::size_t>(w));
  }
  return out;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  if (v.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

fs::path absolute_path(const std::string& p) { return fs::absolute(p).lexically_normal(); }

void require(bool ok, const std::string& message) {
  if (!ok) throw ArgumentError(message);
}

class BackendGuard {
 public:
  BackendGuard() : saved_(simd::active_backend()) {}
  ~BackendGuard() { simd::set_backend(saved_); }
  BackendGuard(const BackendGuard&) = delete;
  BackendGuard& operator=(const BackendGuard&) = delete;

 private:
  simd::Backend saved_;
};

// State of one command invocation: resolved settings, the files it has
// written so far, and the manifest it will leave behind.
class Run {
 public:
  Run(std::string command, Settings& s, Registry& reg, std::ostream& out, std::ostream& err)
      : command_(std::move(command)), s_(s), reg_(reg), out_(out), err_(err),
        started_(utc_timestamp()) {}

  ~Run() {
    if (committed_) return;
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

  Run(const Run&) = delete;
  Run& operator=(const Run&) = delete;

  Settings& s() { return s_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  const std::string& command() const { return command_; }

  void apply_config() {
    if (s_.config.empty()) return;
    std::ifstream in(s_.config);
    if (!in) throw ArgumentError("cannot open config file " + s_.config);
    for (const auto& e : parse_config(in, s_.config)) {
      const auto where = s_.config + ":" + std::to_string(e.line);
      if (e.key == "command") {
        require(e.value == command_, where + ": config is for command '" + e.value + "'");
        continue;
      }
      Entry* entry = reg_.find(e.key);
      require(entry != nullptr, where + ": unknown key '" + e.key + "' for " + command_);
      if (entry->option->count() > 0) continue;
      try {
        entry->assign(e.value);
      } catch (const ArgumentError& ex) {
        throw ArgumentError(where + ": " + e.key + ": " + ex.what());
      }
      entry->from_config = true;
    }
  }

  bool is_set(std::string_view key) { return reg_.is_set(key); }

  void resolve_common() {
    if (s_.threads == 0) s_.threads = std::max(1u, std::thread::hardware_concurrency());
    if (s_.simd == "scalar") {
      simd::set_backend(simd::Backend::kScalar);
    } else if (s_.simd == "avx2") {
      require(simd::set_backend(simd::Backend::kAvx2), "avx2 kernels are not available on this machine");
    } else {
      require(s_.simd == "auto", "invalid --simd '" + s_.simd + "'");
    }
    s_.simd = std::string(simd::backend_name(simd::active_backend()));
    for (std::string* p : {&s_.edges, &s_.checkpoint, &s_.split_manifest, &s_.labels}) {
      if (!p->empty()) *p = absolute_path(*p).string();
    }
    s_.out = absolute_path(s_.out).string();
    dir_ = s_.out;
    fs::create_directories(dir_);
  }

  std::uint64_t single_seed() {
    const auto seeds = parse_seed_list(s_.seed);
    require(seeds.size() == 1, command_ + " takes a single --seed");
    return seeds.front();
  }

  LoadedGraph load_graph() {
    require(!s_.edges.empty(), "--edges is required");
    auto loaded = load_edge_list(s_.edges, resolve_delimiter(s_.delimiter));
    if (loaded.self_loops_dropped > 0) {
      err_ << "warning: dropped " << loaded.self_loops_dropped << " self-loops\n";
    }
    if (loaded.duplicates_dropped > 0) {
      err_ << "warning: dropped " << loaded.duplicates_dropped << " duplicate edges\n";
    }
    return loaded;
  }

  Model load_model(std::size_t node_count) {
    require(!s_.checkpoint.empty(), "--checkpoint is required");
    Model model = load_checkpoint(s_.checkpoint);
    if (model.disc.source.rows() != node_count) {
      throw ArgumentError("checkpoint has " + std::to_string(model.disc.source.rows()) +
                          " nodes but the graph has " + std::to_string(node_count));
    }
    return model;
  }

  TrainConfig train_config(std::uint64_t seed) {
    require(!(s_.single_generator && is_set("mlp-s-layers")),
            "--single-generator conflicts with --mlp-s-layers");
    TrainConfig c;
    c.model.dim = s_.dim;
    c.model.sigma = s_.sigma;
    c.model.single_generator = s_.single_generator;
    c.model.source_hidden = resolve_hidden(s_.mlp_s_layers, s_.dim);
    c.model.target_hidden = resolve_hidden(s_.mlp_t_layers, s_.dim);
    const auto activation = parse_activation(s_.activation);
    require(activation.has_value(), "invalid --activation '" + s_.activation + "'");
    c.model.hidden_activation = *activation;
    c.n_epoch = s_.epochs;
    c.n_g = s_.n_g;
    c.n_d = s_.n_d;
    c.n_s = s_.n_s;
    c.batch_size = s_.batch_size;
    c.lr_d = s_.lr_d;
    c.lr_g = s_.lr_g;
    c.l2_d = s_.l2_d;
    c.l2_g = s_.l2_g;
    const auto optimizer = parse_optimizer(s_.optimizer);
    require(optimizer.has_value(), "invalid --optimizer '" + s_.optimizer + "'");
    c.optimizer = *optimizer;
    c.adam = {s_.adam_beta1, s_.adam_beta2, s_.adam_eps};
    const auto coverage = parse_coverage(s_.coverage);
    require(coverage.has_value(), "invalid --coverage '" + s_.coverage + "'");
    c.coverage = *coverage;
    c.seed = seed;
    c.deterministic = s_.deterministic;
    c.validate();
    s_.mlp_s_layers = join_sizes(c.model.source_hidden);
    s_.mlp_t_layers = join_sizes(c.model.target_hidden);
    return c;
  }

  fs::path output(const std::string& name) {
    const fs::path p = dir_ / name;
    written_.push_back(p);
    return p;
  }

  void write_text(const std::string& name, const std::string& content) {
    const auto path = output(name);
    std::ofstream f(path, std::ios::binary);
    f << content;
    f.close();
    if (!f) throw Error("cannot write " + path.string());
  }

  /// Comment lines recording the configuration that produced a CSV.
  std::string csv_header() {
    std::string h = "# dggan " + std::string(kToolVersion) + " " + command_ + "\n";
    for (auto& e : reg_.entries()) {
      if (e.in_csv_header && !skipped(e)) h += "# " + e.key + "=" + e.render() + "\n";
    }
    return h;
  }

  void finish() {
    std::string m = "# dggan run manifest\n";
    m += "# version " + std::string(kToolVersion) + "\n";
    m += "# started " + started_ + "\n";
    m += "# finished " + utc_timestamp() + "\n";
    for (auto& e : reg_.entries()) {
      if (e.key == "edges" || e.key == "checkpoint" || e.key == "split-manifest" ||
          e.key == "labels") {
        const auto value = e.render();
        if (!value.empty()) m += "# sha256 " + e.key + "=" + sha256_file(value) + "\n";
      }
    }
    m += "command=" + command_ + "\n";
    for (auto& e : reg_.entries()) {
      if (!skipped(e)) m += e.key + "=" + e.render() + "\n";
    }
    write_text(command_ + ".manifest", m);
    committed_ = true;
  }

 private:
  bool skipped(const Entry& e) const {
    return e.key == "mlp-s-layers" && s_.single_generator;
  }

  std::string command_;
  Settings& s_;
  Registry& reg_;
  std::ostream& out_;
  std::ostream& err_;
  std::string started_;
  fs::path dir_;
  std::vector<fs::path> written_;
  bool committed_ = false;
};

// ---------------------------------------------------------------------------
// Commands

void cmd_train(Run& run) {
  auto& s = run.s();
  const auto seed = run.single_seed();
  const auto loaded = run.load_graph();
  const auto config = run.train_config(seed);
  TrainHooks hooks;
  if (s.checkpoint_every > 0) {
    hooks.on_epoch_end = [&](std::size_t epoch, const Model& model) {
      if (epoch % s.checkpoint_every == 0 && epoch < config.n_epoch) {
        save_checkpoint(run.output("model_epoch" + std::to_string(epoch) + ".ckpt"), model);
      }
    };
  }
  const auto result = train(loaded.graph, config, hooks);

  save_checkpoint(run.output("model.ckpt"), result.model);
  std::ostringstream emb;
  write_embeddings(emb, result.model.disc, loaded.ids);
  run.write_text("embeddings.tsv", emb.str());
  std::ostringstream report;
  report << run.csv_header();
  result.report.write_csv(report);
  run.write_text("train_report.csv", report.str());
  run.out() << "trained " << loaded.graph.node_count() << " nodes, " << loaded.graph.edge_count()
            << " edges, " << config.n_epoch << " epochs -> " << s.out << "\n";
}

void warn_test_sets(Run& run, std::uint64_t seed,
                    const std::vector<std::pair<double, LabeledPairSet>>& tests) {
  for (const auto& [fraction, set] : tests) {
    for (const auto& w : set.warnings) {
      run.err() << "warning: seed " << seed << ", reversed " << fraction << ": " << w << "\n";
    }
  }
}

void cmd_linkpred(Run& run) {
  auto& s = run.s();
  const auto loaded = run.load_graph();
  std::ostringstream csv;
  csv << "seed,reversed_fraction,auc\n";
  auto emit = [&](const std::vector<LinkPredictionResult>& rows) {
    for (const auto& r : rows) {
      csv << r.seed << "," << format_metric(r.reversed_fraction) << "," << format_metric(r.auc)
          << "\n";
    }
  };

  const bool scoring = !s.checkpoint.empty() || !s.split_manifest.empty();
  if (scoring) {
    require(!s.checkpoint.empty() && !s.split_manifest.empty(),
            "--checkpoint and --split-manifest must be given together");
    const auto seed = run.single_seed();
    const Model model = run.load_model(loaded.graph.node_count());
    std::ifstream in(s.split_manifest);
    if (!in) throw Error("cannot open " + s.split_manifest);
    const auto manifest = read_split_manifest(in, loaded.ids, s.split_manifest);
    require(!manifest.tests.empty(), "split manifest has no test sets");
    emit(evaluate_link_prediction(model.disc, manifest.tests, seed));
  } else {
    require(s.removal >= 0.0 && s.removal < 1.0, "--removal must lie in [0, 1)");
    const auto fractions = parse_real_list(s.reversed);
    for (double f : fractions) require(f >= 0.0 && f <= 1.0, "--reversed values must lie in [0, 1]");
    const auto seeds = parse_seed_list(s.seed);
    for (const auto seed : seeds) {
      const auto config = run.train_config(seed);
      const auto result = run_link_prediction(loaded.graph, config, s.removal, fractions, seed);
      if (result.split.shortfall()) {
        run.err() << "warning: seed " << seed << ": removed " << result.split.held_out.size()
                  << " of " << result.split.requested
                  << " requested edges without isolating a node\n";
      }
      warn_test_sets(run, seed, result.tests);
      SplitManifest manifest;
      manifest.header = {"seed=" + std::to_string(seed), "removal=" + format_real(s.removal),
                         "edges=" + s.edges};
      manifest.held_out = result.split.held_out;
      manifest.tests = result.tests;
      std::ostringstream split;
      write_split_manifest(split, manifest, loaded.ids);
      run.write_text("split_seed" + std::to_string(seed) + ".tsv", split.str());
      emit(result.results);
      for (const auto& r : result.results) {
        run.out() << "seed " << seed << " reversed " << r.reversed_fraction << " auc "
                  << format_metric(r.auc) << "\n";
      }
    }
  }
  // Header last: training resolves layer widths that the header records.
  run.write_text("linkpred.csv", run.csv_header() + csv.str());
}

void cmd_reconstruct(Run& run) {
  auto& s = run.s();
  const auto seed = run.single_seed();
  const auto loaded = run.load_graph();
  const Model model = run.load_model(loaded.graph.node_count());
  require(s.sample_frac > 0.0 && s.sample_frac <= 1.0, "--sample-frac must lie in (0, 1]");
  auto ks = parse_size_list(s.k);
  const std::size_t max_k = loaded.graph.node_count() - 1;
  if (!run.is_set("k") && ks.back() > max_k) {
    // The default 1..10 does not fit tiny graphs; explicit values are checked as given.
    std::erase_if(ks, [&](std::size_t k) { return k > max_k; });
    run.err() << "warning: graph has " << loaded.graph.node_count() << " nodes; using k <= " << max_k << "\n";
  }
  const auto sources = sample_reconstruction_sources(loaded.graph, s.sample_frac, seed);
  if (sources.empty()) throw Error("no sampled node has an out-edge");
  const auto precision = precision_at_k(model.disc, loaded.graph, sources, ks, s.threads);
  std::ostringstream csv;
  csv << run.csv_header() << "k,mean_precision\n";
  for (std::size_t i = 0; i < ks.size(); ++i) {
    csv << ks[i] << "," << format_metric(precision[i]) << "\n";
  }
  run.write_text("reconstruct.csv", csv.str());
  run.out() << "precision@k over " << sources.size() << " sources -> " << s.out << "\n";
}

void cmd_classify(Run& run) {
  auto& s = run.s();
  const auto seed = run.single_seed();
  const auto loaded = run.load_graph();
  const Model model = run.load_model(loaded.graph.node_count());
  require(!s.labels.empty(), "--labels is required");
  const auto labels = load_labels(s.labels, loaded.ids, resolve_delimiter(s.delimiter));
  std::vector<bool> seen(labels.class_count(), false);
  for (const auto& c : labels.class_of) {
    if (c) seen[static_cast<std::size_t>(*c)] = true;
  }
  if (std::count(seen.begin(), seen.end(), true) < 2) {
    throw Error(s.labels + ": fewer than two classes among labeled graph nodes");
  }
  if (model.disc.source.cols() != 64) {
    run.err() << "warning: classification expects --dim 64 embeddings; checkpoint has d="
              << model.disc.source.cols() << "\n";
  }
  ClassificationOptions options;
  options.train_ratios = parse_real_list(s.train_ratios);
  options.repeats = s.repeats;
  options.logreg = {s.logreg_l2, s.logreg_iterations, s.logreg_lr};
  options.shuffle_labels = s.shuffle_labels;
  const auto results = run_classification(concat_features(model.disc), labels, options, seed);
  std::ostringstream csv;
  csv << run.csv_header() << "train_ratio,micro_f1,macro_f1\n";
  for (const auto& r : results) {
    csv << format_metric(r.train_ratio) << "," << format_metric(r.micro_f1) << ","
        << format_metric(r.macro_f1) << "\n";
    run.out() << "ratio " << r.train_ratio << " micro " << format_metric(r.micro_f1) << " macro "
              << format_metric(r.macro_f1) << " majority " << format_metric(r.majority_rate)
              << "\n";
  }
  run.write_text("classify.csv", csv.str());
}

void cmd_sweep(Run& run) {
  auto& s = run.s();
  const auto seed = run.single_seed();
  const auto loaded = run.load_graph();
  require(s.removal >= 0.0 && s.removal < 1.0, "--removal must lie in [0, 1)");
  const auto ratios = parse_real_list(s.ratios);
  for (double r : ratios) require(r > 0.0 && r <= 1.0, "--ratios values must lie in (0, 1]");
  const auto config = run.train_config(seed);
  const auto results = run_sparsity_sweep(loaded.graph, config, s.removal, ratios, seed);
  std::ostringstream csv;
  csv << run.csv_header() << "edge_ratio,auc\n";
  for (const auto& r : results) {
    csv << format_metric(r.edge_ratio) << "," << format_metric(r.auc) << "\n";
    run.out() << "edge ratio " << r.edge_ratio << " (" << r.train_edges << " edges) auc "
              << format_metric(r.auc) << "\n";
  }
  run.write_text("sweep.csv", csv.str());
}

void cmd_stats(Run& run) {
  const auto loaded = run.load_graph();
  const auto st = graph_stats(loaded.graph);
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"nodes", std::to_string(st.nodes)},
      {"edges", std::to_string(st.edges)},
      {"average_degree", format_metric(st.average_degree)},
      {"zero_in_degree", std::to_string(st.zero_in_degree)},
      {"zero_out_degree", std::to_string(st.zero_out_degree)},
      {"bidirectional_edges", std::to_string(st.bidirectional_edges)},
      {"max_out_degree", std::to_string(st.max_out_degree)},
      {"max_in_degree", std::to_string(st.max_in_degree)},
  };
  std::ostringstream csv;
  csv << run.csv_header() << "statistic,value\n";
  for (const auto& [name, value] : rows) {
    csv << name << "," << value << "\n";
    run.out() << name << "\t" << value << "\n";
  }
  run.write_text("stats.csv", csv.str());
}

struct Command {
  const char* name;
  const char* help;
  void (*body)(Run&);
  std::function<void(Registry&, Settings&)> options;
};

std::vector<Command> commands() {
  return {
      {"train", "Train a model and export its embeddings", cmd_train,
       [](Registry& r, Settings& s) {
         add_common(r, s);
         add_edges(r, s);
         add_training(r, s);
         r.add("checkpoint-every", s.checkpoint_every, "Also save model_epochK.ckpt every K epochs (0: off)");
       }},
      {"linkpred", "Split, train and score directed link prediction", cmd_linkpred,
       [](Registry& r, Settings& s) {
         add_common(r, s);
         add_edges(r, s);
         add_training(r, s);
         r.add("removal", s.removal, "Fraction of edges held out");
         r.add("reversed", s.reversed, "Reversed-negative fractions, comma separated");
         r.add("checkpoint", s.checkpoint, "Score this model instead of training");
         r.add("split-manifest", s.split_manifest, "Held-out split to score against");
       }},
      {"reconstruct", "Precision@k of graph reconstruction", cmd_reconstruct,
       [](Registry& r, Settings& s) {
         add_common(r, s);
         add_edges(r, s);
         r.add("checkpoint", s.checkpoint, "Trained model");
         r.add("sample-frac", s.sample_frac, "Fraction of nodes sampled as sources");
         r.add("k", s.k, "k values, e.g. 1..10 or 1,2,5,10");
       }},
      {"classify", "Node classification on concatenated embeddings", cmd_classify,
       [](Registry& r, Settings& s) {
         add_common(r, s);
         add_edges(r, s);
         r.add("checkpoint", s.checkpoint, "Trained model");
         r.add("labels", s.labels, "`node label` lines");
         r.add("train-ratios", s.train_ratios, "Labeled-node training ratios");
         r.add("repeats", s.repeats, "Random splits per ratio");
         r.add("logreg-l2", s.logreg_l2, "L2 strength of the classifier");
         r.add("logreg-iterations", s.logreg_iterations, "Gradient steps");
         r.add("logreg-lr", s.logreg_lr, "Gradient step size");
         r.flag("shuffle-labels", s.shuffle_labels, "Permute labels (null-model control)");
       }},
      {"sweep", "Link prediction AUC against training edge ratio", cmd_sweep,
       [](Registry& r, Settings& s) {
         add_common(r, s);
         add_edges(r, s);
         add_training(r, s);
         r.add("removal", s.removal, "Fraction of edges held out");
         r.add("ratios", s.ratios, "Training edge ratios in (0, 1]");
       }},
      {"stats", "Node, edge and degree summary", cmd_stats,
       [](Registry& r, Settings& s) {
         add_common(r, s);
         add_edges(r, s);
       }},
  };
}

int report_error(std::ostream& err, const std::string& message, int code) {
  err << "error: " << message << "\n";
  return code;
}

int run_replay(const std::string& manifest_path, const std::vector<std::string>& passthrough,
               std::ostream& out, std::ostream& err) {
  std::ifstream in(manifest_path);
  if (!in) return report_error(err, "cannot open manifest " + manifest_path, kExitUsage);
  std::vector<std::pair<std::string, std::string>> digests;
  std::string line;
  while (std::getline(in, line)) {
    static constexpr std::string_view kPrefix = "# sha256 ";
    if (line.rfind(kPrefix, 0) != 0) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    digests.emplace_back(line.substr(kPrefix.size(), eq - kPrefix.size()), line.substr(eq + 1));
  }
  in.clear();
  in.seekg(0);
  std::string command;
  std::vector<ConfigEntry> entries;
  try {
    entries = parse_config(in, manifest_path);
  } catch (const ArgumentError& e) {
    return report_error(err, e.what(), kExitUsage);
  }
  for (const auto& e : entries) {
    if (e.key == "command") command = e.value;
  }
  if (command.empty()) return report_error(err, manifest_path + ": no command= line", kExitUsage);
  for (const auto& [key, expected] : digests) {
    for (const auto& e : entries) {
      if (e.key != key) continue;
      try {
        if (sha256_file(e.value) != expected) {
          return report_error(err, "sha256 mismatch: " + key + " " + e.value +
                                       " changed since the manifest was written",
                              kExitFailure);
        }
      } catch (const std::exception& ex) {
        return report_error(err, ex.what(), kExitFailure);
      }
    }
  }
  std::vector<std::string> args{command, "--config", manifest_path};
  args.insert(args.end(), passthrough.begin(), passthrough.end());
  return run(args, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings settings;
  CLI::App app{"Directed graph embedding with adversarially generated neighbors", "dggan"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  const auto table = commands();
  std::vector<std::unique_ptr<Registry>> registries;
  for (const auto& c : table) {
    auto* sub = app.add_subcommand(c.name, c.help);
    registries.push_back(std::make_unique<Registry>(sub));
    c.options(*registries.back(), settings);
  }

  std::string replay_manifest;
  std::string replay_out;
  std::size_t replay_threads = 0;
  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay->add_option("manifest", replay_manifest, "A <command>.manifest file")->required();
  auto* replay_out_opt = replay->add_option("--out", replay_out, "Write outputs here instead");
  auto* replay_threads_opt = replay->add_option("--threads", replay_threads, "Evaluation threads");

  std::vector<std::string> argv_storage{"dggan"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (replay->parsed()) {
    std::vector<std::string> passthrough;
    if (replay_out_opt->count() > 0) passthrough.insert(passthrough.end(), {"--out", replay_out});
    if (replay_threads_opt->count() > 0) {
      passthrough.insert(passthrough.end(), {"--threads", std::to_string(replay_threads)});
    }
    return run_replay(replay_manifest, passthrough, out, err);
  }

  for (std::size_t i = 0; i < table.size(); ++i) {
    auto& reg = *registries[i];
    if (!reg.app()->parsed()) continue;
    BackendGuard backend;
    try {
      Run r(table[i].name, settings, reg, out, err);
      r.apply_config();
      r.resolve_common();
      table[i].body(r);
      r.finish();
      return kExitOk;
    } catch (const ArgumentError& e) {
      return report_error(err, e.what(), kExitUsage);
    } catch (const std::exception& e) {
      return report_error(err, e.what(), kExitFailure);
    }
  }
  return report_error(err, "no command given", kExitUsage);
}

}  // namespace dggan::cli
