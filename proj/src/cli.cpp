#include "syntaxprobe/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "syntaxprobe/corpus.hpp"
#include "syntaxprobe/embedding.hpp"
#include "syntaxprobe/error.hpp"
#include "syntaxprobe/hash.hpp"
#include "syntaxprobe/probe.hpp"
#include "syntaxprobe/results.hpp"
#include "syntaxprobe/synth.hpp"
#include "syntaxprobe/tree.hpp"
#include "syntaxprobe/tree_kernel.hpp"

namespace syntaxprobe {

namespace fs = std::filesystem;

namespace {

enum class LogLevel { Error, Warn, Info, Debug };

struct Context {
  std::ostream& out;
  std::ostream& err;
  LogLevel level = LogLevel::Info;

  void log(LogLevel at, const std::string& msg) const {
    if (at <= level) err << "[syntaxprobe] " << msg << '\n';
  }
};

std::string num(double v) { return nlohmann::json(v).dump(); }

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Records the normalized command line and the hashes of every input so the
// run can be replayed with `--replay`.
void write_run_json(const std::string& out_dir, const std::string& subcommand,
                    const std::vector<std::string>& argv,
                    const nlohmann::ordered_json& config,
                    const std::vector<std::string>& inputs) {
  nlohmann::ordered_json j;
  j["tool"] = "syntaxprobe";
  j["subcommand"] = subcommand;
  j["argv"] = argv;
  j["config"] = config;
  nlohmann::ordered_json hashes = nlohmann::ordered_json::object();
  for (const std::string& path : inputs) hashes[path] = sha256_file(path);
  j["inputs"] = hashes;
  std::ofstream out(fs::path(out_dir) / "run.json", std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write run.json in " + out_dir);
  out << j.dump(2) << '\n';
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + dir + ": " + ec.message());
}

// ---------------------------------------------------------------- filter

struct FilterOptions {
  std::string corpus;
  std::size_t max_words = 52;
  bool drop_non_latin = false;
  std::string out;

  std::vector<std::string> argv() const {
    std::vector<std::string> a{"filter", "--corpus", corpus, "--max-words",
                               std::to_string(max_words), "--out", out};
    if (drop_non_latin) a.push_back("--drop-non-latin");
    return a;
  }
};

int cmd_filter(const FilterOptions& o, const Context& ctx) {
  if (o.max_words < 1) throw Error(Errc::InvalidConfig, "--max-words must be >= 1");
  ensure_dir(o.out);
  const CorpusManifest corpus = read_corpus_tsv(o.corpus);
  FilterResult by_length = filter_corpus(corpus, o.max_words);
  std::size_t non_latin = 0;
  CorpusManifest result = std::move(by_length.manifest);
  if (o.drop_non_latin) {
    FilterResult latin = remove_non_latin(result);
    non_latin = latin.dropped;
    result = std::move(latin.manifest);
  }
  write_corpus_tsv((fs::path(o.out) / "corpus.tsv").string(), result);

  nlohmann::ordered_json cfg;
  cfg["max_words"] = o.max_words;
  cfg["drop_non_latin"] = o.drop_non_latin;
  write_run_json(o.out, "filter", o.argv(), cfg, {o.corpus});

  ctx.out << "input " << corpus.size() << "\n"
          << "dropped_too_long " << by_length.dropped << "\n";
  if (o.drop_non_latin) ctx.out << "dropped_non_latin " << non_latin << "\n";
  ctx.out << "kept " << result.size() << "\n"
          << corpus.size() << " -> " << result.size() << " utterances\n";
  return kExitOk;
}

// ---------------------------------------------------------------- gram

struct GramOptions {
  std::string trees;
  std::string corpus;  // optional, supplies utterance IDs
  double lambda = 0.5;
  unsigned jobs = 1;
  std::string out;

  std::vector<std::string> argv() const {
    std::vector<std::string> a{"gram", "--trees", trees, "--lambda", num(lambda),
                               "--jobs", std::to_string(jobs), "--out", out};
    if (!corpus.empty()) {
      a.push_back("--corpus");
      a.push_back(corpus);
    }
    return a;
  }
};

int cmd_gram(const GramOptions& o, const Context& ctx) {
  const KernelParams params(o.lambda);
  ensure_dir(o.out);
  std::vector<Tree> trees;
  for (const Tree& t : read_tree_file(o.trees)) trees.push_back(delexicalize(t));

  std::vector<std::string> ids;
  if (!o.corpus.empty()) {
    ids = read_corpus_tsv(o.corpus).ids();
    if (ids.size() != trees.size())
      throw Error(Errc::RowMismatch, o.corpus + " has " +
                                         std::to_string(ids.size()) +
                                         " utterances, " + o.trees + " has " +
                                         std::to_string(trees.size()) + " trees");
  } else {
    for (std::size_t i = 0; i < trees.size(); ++i)
      ids.push_back(std::to_string(i + 1));
  }

  const Eigen::MatrixXd g = gram_matrix(trees, params, o.jobs);

  std::ofstream csv(fs::path(o.out) / "gram.csv", std::ios::binary);
  if (!csv) throw Error(Errc::Io, "cannot write gram.csv");
  csv << join(ids, ',') << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      if (j) csv << ',';
      std::snprintf(buf, sizeof buf, "%.17g", g(i, j));
      csv << buf;
    }
    csv << '\n';
  }
  csv.close();
  save_embedding_table((fs::path(o.out) / "gram.wemb").string(),
                       EmbeddingTable(0, g, ids));

  nlohmann::ordered_json cfg;
  cfg["lambda"] = o.lambda;
  std::vector<std::string> inputs{o.trees};
  if (!o.corpus.empty()) inputs.push_back(o.corpus);
  write_run_json(o.out, "gram", o.argv(), cfg, inputs);
  ctx.log(LogLevel::Info, "wrote " + std::to_string(g.rows()) + "x" +
                              std::to_string(g.cols()) + " Gram matrix to " + o.out);
  return kExitOk;
}

// ---------------------------------------------------------------- probe

struct ProbeOptions {
  std::string kind = "depth";
  std::string corpus;
  std::string trees;
  std::string embeddings;
  std::vector<std::string> feature_sets{"EMB"};
  ProbeConfig config;
  std::string vocab;
  std::size_t min_count = 1;
  bool bow_binary = false;
  bool rsa = false;
  std::string out;

  std::vector<std::string> argv() const {
    std::vector<std::string> grid;
    for (double a : config.alpha_grid) grid.push_back(num(a));
    std::vector<std::string> a{
        "probe", "--kind", kind, "--corpus", corpus, "--trees", trees,
        "--embeddings", embeddings, "--feature-set", join(feature_sets, ','),
        "--alpha-grid", join(grid, ','), "--folds", std::to_string(config.folds),
        "--train-fraction", num(config.train_fraction), "--seed",
        std::to_string(config.seed), "--n-anchors",
        std::to_string(config.n_anchors), "--lambda", num(config.lambda),
        "--min-count", std::to_string(min_count), "--jobs",
        std::to_string(config.jobs), "--out", out};
    if (config.standardize) a.push_back("--standardize");
    if (bow_binary) a.push_back("--bow-binary");
    if (rsa) a.push_back("--rsa");
    if (!vocab.empty()) {
      a.push_back("--vocab");
      a.push_back(vocab);
    }
    return a;
  }
};

int cmd_probe(const ProbeOptions& o, const Context& ctx) {
  const ProbeKind kind = parse_probe_kind(o.kind);
  std::vector<FeatureSet> sets;
  for (const std::string& name : o.feature_sets) sets.push_back(parse_feature_set(name));
  if (sets.empty()) throw Error(Errc::InvalidConfig, "no feature set given");
  o.config.validate();
  if (kind == ProbeKind::TreeKernel)
    for (FeatureSet fs : sets)
      if (fs != FeatureSet::Emb && fs != FeatureSet::Bow)
        throw Error(Errc::UnsupportedFeatureSet,
                    "tree-kernel probe supports EMB and BOW, not " + to_string(fs));
  ensure_dir(o.out);

  const CorpusManifest corpus = read_corpus_tsv(o.corpus);
  const std::vector<Tree> trees = read_tree_file(o.trees);
  if (trees.size() != corpus.size())
    throw Error(Errc::RowMismatch, o.corpus + " has " +
                                       std::to_string(corpus.size()) +
                                       " utterances, " + o.trees + " has " +
                                       std::to_string(trees.size()) + " trees");
  const std::vector<std::string> ids = corpus.ids();
  const auto layers = discover_layers(o.embeddings);
  if (layers.empty())
    throw Error(Errc::Io, "no layer_<k>.wemb files in " + o.embeddings);

  ReferenceFeatures refs;
  refs.word_count = word_count_feature(corpus);
  const bool need_bow = std::any_of(sets.begin(), sets.end(), [](FeatureSet fs) {
    return fs == FeatureSet::Bow || fs == FeatureSet::EmbBow;
  });
  if (need_bow) {
    const BowVocabulary vocab = o.vocab.empty()
                                    ? build_vocabulary({&corpus}, o.min_count)
                                    : read_vocabulary(o.vocab);
    refs.bow = bow_features(corpus, vocab, o.bow_binary);
    ctx.log(LogLevel::Info, "bag-of-words vocabulary: " +
                                std::to_string(vocab.size()) + " tokens");
  }

  std::vector<double> depths;
  std::optional<TreeKernelTask> task;
  std::vector<Tree> delex;
  if (kind == ProbeKind::TreeDepth) {
    for (const Tree& t : trees) depths.push_back(static_cast<double>(tree_depth(t)));
  } else {
    for (const Tree& t : trees) delex.push_back(delexicalize(t));
    task = prepare_treekernel(ids, delex, o.config, o.config.seed);
    ctx.log(LogLevel::Info, "anchors: " + std::to_string(task->anchors.ids.size()) +
                                ", probe population: " +
                                std::to_string(task->population.size()));
  }

  const std::string fingerprint = [&] {
    nlohmann::ordered_json j = config_to_json(o.config);
    j["probe"] = o.kind;
    j["feature_sets"] = o.feature_sets;
    j["bow_binary"] = o.bow_binary;
    j["min_count"] = o.min_count;
    return sha256_hex(j.dump());
  }();

  std::vector<std::vector<ProbeResult>> per_layer(layers.size());
  std::vector<std::optional<double>> rsa(layers.size());
  auto run_layer = [&](std::size_t li) {
    const auto& [layer, path] = layers[li];
    const EmbeddingTable table = load_embedding_table(path);
    if (table.layer_id() != layer)
      throw Error(Errc::BadFormat, path + " declares layer " +
                                       std::to_string(table.layer_id()));
    for (const std::string& id : ids) table.row_of(id);
    for (FeatureSet fs : sets) {
      ProbeConfig cfg = o.config;
      cfg.feature_set = fs;
      ProbeResult r = kind == ProbeKind::TreeDepth
                          ? probe_treedepth(table, ids, depths, refs, cfg)
                          : probe_treekernel(table, ids, *task, refs, cfg);
      r.config_fingerprint = fingerprint;
      per_layer[li].push_back(r);
    }
    if (o.rsa && kind == ProbeKind::TreeKernel)
      rsa[li] = rsa_baseline(table, ids, delex, task->anchors,
                             KernelParams(o.config.lambda));
    write_results_jsonl(
        (fs::path(o.out) / ("layer_" + std::to_string(layer) + ".jsonl")).string(),
        per_layer[li]);
  };

  const unsigned jobs =
      std::max(1u, std::min<unsigned>(o.config.jobs, static_cast<unsigned>(layers.size())));
  if (jobs == 1) {
    for (std::size_t li = 0; li < layers.size(); ++li) {
      run_layer(li);
      ctx.log(LogLevel::Debug, "layer " + std::to_string(layers[li].first) + " done");
    }
  } else {
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w)
      workers.emplace_back([&, w] {
        for (std::size_t li = w; li < layers.size(); li += jobs) {
          try {
            run_layer(li);
          } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    for (auto& t : workers) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<ProbeResult> all;
  for (const auto& rs : per_layer) all.insert(all.end(), rs.begin(), rs.end());
  write_results_jsonl((fs::path(o.out) / "results.jsonl").string(), all);
  write_wide_csv((fs::path(o.out) / "results.csv").string(), all);
  if (o.rsa && kind == ProbeKind::TreeKernel) {
    std::ofstream csv(fs::path(o.out) / "rsa.csv", std::ios::binary);
    csv << "layer,rsa\n";
    char buf[64];
    for (std::size_t li = 0; li < layers.size(); ++li) {
      std::snprintf(buf, sizeof buf, "%.10f", *rsa[li]);
      csv << layers[li].first << ',' << buf << '\n';
    }
  }

  std::vector<std::string> inputs{o.corpus, o.trees};
  for (const auto& [layer, path] : layers) {
    inputs.push_back(path);
    inputs.push_back(manifest_path_for(path));
  }
  if (!o.vocab.empty()) inputs.push_back(o.vocab);
  std::sort(inputs.begin(), inputs.end());
  inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());
  nlohmann::ordered_json cfg = config_to_json(o.config);
  cfg["probe"] = o.kind;
  cfg["feature_sets"] = o.feature_sets;
  cfg["bow_binary"] = o.bow_binary;
  cfg["min_count"] = o.min_count;
  cfg["fingerprint"] = fingerprint;
  write_run_json(o.out, "probe", o.argv(), cfg, inputs);

  ctx.out << wide_csv(all);
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  SynthSpec spec;
  std::string signal = "NONE";
  std::size_t layers = 1;
  std::string out;

  std::vector<std::string> argv() const {
    return {"synth", "--n-utterances", std::to_string(spec.n_utterances),
            "--max-depth", std::to_string(spec.max_depth), "--signal", signal,
            "--noise-sigma", num(spec.noise_sigma), "--dim",
            std::to_string(spec.dim), "--vocab-size",
            std::to_string(spec.vocab_size), "--kernel-anchors",
            std::to_string(spec.kernel_anchors), "--nonterminals",
            join(spec.nonterminals, ','), "--pos-tags", join(spec.pos_tags, ','),
            "--expand-probability", num(spec.expand_probability), "--layers",
            std::to_string(layers), "--seed", std::to_string(spec.seed),
            "--out", out};
  }
};

int cmd_synth(SynthOptions o, const Context& ctx) {
  o.spec.signal = parse_synth_signal(o.signal);
  o.spec.validate();
  if (o.layers < 1) throw Error(Errc::InvalidConfig, "--layers must be >= 1");
  ensure_dir(o.out);
  const fs::path emb_dir = fs::path(o.out) / "embeddings";
  ensure_dir(emb_dir.string());

  const std::vector<Tree> trees = synth_trees(o.spec);
  const CorpusManifest corpus = synth_corpus(trees);
  write_corpus_tsv((fs::path(o.out) / "corpus.tsv").string(), corpus);
  write_tree_file((fs::path(o.out) / "trees.txt").string(), trees);
  const std::vector<std::string> ids = corpus.ids();
  for (std::size_t k = 0; k < o.layers; ++k) {
    const EmbeddingTable table =
        synth_embeddings(trees, ids, o.spec, static_cast<std::uint32_t>(k));
    save_embedding_table(
        (emb_dir / ("layer_" + std::to_string(k) + ".wemb")).string(), table);
  }

  nlohmann::ordered_json cfg;
  cfg["n_utterances"] = o.spec.n_utterances;
  cfg["max_depth"] = o.spec.max_depth;
  cfg["signal"] = o.signal;
  cfg["noise_sigma"] = o.spec.noise_sigma;
  cfg["dim"] = o.spec.dim;
  cfg["vocab_size"] = o.spec.vocab_size;
  cfg["kernel_anchors"] = o.spec.kernel_anchors;
  cfg["nonterminals"] = o.spec.nonterminals;
  cfg["pos_tags"] = o.spec.pos_tags;
  cfg["expand_probability"] = o.spec.expand_probability;
  cfg["layers"] = o.layers;
  cfg["seed"] = o.spec.seed;
  write_run_json(o.out, "synth", o.argv(), cfg, {});
  ctx.log(LogLevel::Info, "wrote " + std::to_string(trees.size()) +
                              " utterances and " + std::to_string(o.layers) +
                              " layer(s) to " + o.out);
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportOptions {
  std::vector<std::string> results;
  std::string out;

  std::vector<std::string> argv() const {
    std::vector<std::string> a{"report", "--out", out, "--results"};
    a.insert(a.end(), results.begin(), results.end());
    return a;
  }
};

int cmd_report(const ReportOptions& o, const Context& ctx) {
  ensure_dir(o.out);
  std::map<std::string, std::vector<ProbeResult>> by_kind;
  for (const std::string& path : o.results)
    for (ProbeResult& r : read_results_jsonl(path))
      by_kind[to_string(r.kind)].push_back(std::move(r));
  for (const auto& [kind, rs] : by_kind) {
    const std::string file = "report_" + kind + ".csv";
    write_wide_csv((fs::path(o.out) / file).string(), rs);
    ctx.out << "# " << kind << " (test R2)\n" << wide_csv(rs);
  }
  write_run_json(o.out, "report", o.argv(), nlohmann::ordered_json::object(),
                 o.results);
  return kExitOk;
}

// ---------------------------------------------------------------- replay

std::vector<std::string> load_replay(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadFormat, path + ": " + e.what());
  }
  if (!j.contains("argv") || !j["argv"].is_array())
    throw Error(Errc::BadFormat, path + " has no argv");
  const nlohmann::json inputs = j.value("inputs", nlohmann::json::object());
  for (const auto& [file, hash] : inputs.items())
    if (sha256_file(file) != hash.get<std::string>())
      throw Error(Errc::BadFormat, "input " + file + " changed since " + path);
  return j["argv"].get<std::vector<std::string>>();
}

int exit_code_for(const Error& e) {
  switch (category(e.code())) {
    case ErrorCategory::Usage: return kExitUsage;
    case ErrorCategory::Numerical: return kExitNumerical;
    case ErrorCategory::Data: return kExitData;
  }
  return kExitData;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Probe utterance embeddings for syntactic structure", "syntaxprobe"};
  app.require_subcommand(0, 1);

  std::string replay;
  std::string log_level = "info";
  app.add_option("--replay", replay, "Re-run the command recorded in a run.json")
      ->check(CLI::ExistingFile);
  app.add_option("--log-level", log_level, "error, warn, info or debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));

  FilterOptions filter;
  auto* filter_cmd = app.add_subcommand("filter", "Drop long or non-Latin utterances");
  filter_cmd->add_option("--corpus", filter.corpus, "Corpus TSV (id<TAB>transcript)")
      ->required()->check(CLI::ExistingFile);
  filter_cmd->add_option("--max-words", filter.max_words, "Keep utterances with at most this many words")
      ->capture_default_str();
  filter_cmd->add_flag("--drop-non-latin", filter.drop_non_latin,
                       "Also drop transcripts with non-Latin letters");
  filter_cmd->add_option("--out", filter.out, "Output directory")->required();

  GramOptions gram;
  auto* gram_cmd = app.add_subcommand("gram", "Normalized tree-kernel Gram matrix");
  gram_cmd->add_option("--trees", gram.trees, "Tree-per-line file")
      ->required()->check(CLI::ExistingFile);
  gram_cmd->add_option("--corpus", gram.corpus, "Corpus TSV supplying utterance IDs")
      ->check(CLI::ExistingFile);
  gram_cmd->add_option("--lambda", gram.lambda, "Fragment decay in (0, 1]")->capture_default_str();
  gram_cmd->add_option("--jobs", gram.jobs, "Worker threads")->capture_default_str();
  gram_cmd->add_option("--out", gram.out, "Output directory")->required();

  ProbeOptions probe;
  auto* probe_cmd = app.add_subcommand("probe", "Run the TreeDepth or TreeKernel probe on every layer");
  probe_cmd->add_option("--kind", probe.kind, "depth or kernel")
      ->check(CLI::IsMember({"depth", "kernel"}))->capture_default_str();
  probe_cmd->add_option("--corpus", probe.corpus, "Corpus TSV")
      ->required()->check(CLI::ExistingFile);
  probe_cmd->add_option("--trees", probe.trees, "Tree-per-line file aligned with the corpus")
      ->required()->check(CLI::ExistingFile);
  probe_cmd->add_option("--embeddings", probe.embeddings, "Directory of layer_<k>.wemb files")
      ->required()->check(CLI::ExistingDirectory);
  probe_cmd->add_option("--feature-set", probe.feature_sets,
                        "EMB, EMB+WC, EMB+BOW, WC, BOW (comma separated)")
      ->delimiter(',')->capture_default_str();
  probe_cmd->add_option("--alpha-grid", probe.config.alpha_grid, "Ridge alphas (comma separated)")
      ->delimiter(',');
  probe_cmd->add_option("--folds", probe.config.folds, "Cross-validation folds")->capture_default_str();
  probe_cmd->add_option("--train-fraction", probe.config.train_fraction, "Training share of the split")
      ->capture_default_str();
  probe_cmd->add_option("--seed", probe.config.seed, "Seed for every random stage")
      ->envname("SYNTAXPROBE_SEED")->capture_default_str();
  probe_cmd->add_option("--n-anchors", probe.config.n_anchors, "Anchor utterances (kernel probe)")
      ->capture_default_str();
  probe_cmd->add_option("--lambda", probe.config.lambda, "Tree-kernel decay")->capture_default_str();
  probe_cmd->add_flag("--standardize", probe.config.standardize, "Scale features to unit variance");
  probe_cmd->add_option("--vocab", probe.vocab, "Bag-of-words vocabulary, one token per line")
      ->check(CLI::ExistingFile);
  probe_cmd->add_option("--min-count", probe.min_count, "Vocabulary frequency cutoff")
      ->capture_default_str();
  probe_cmd->add_flag("--bow-binary", probe.bow_binary, "Presence instead of counts");
  probe_cmd->add_flag("--rsa", probe.rsa, "Also compute the classic RSA baseline (kernel probe)");
  probe_cmd->add_option("--jobs", probe.config.jobs, "Layers processed concurrently")
      ->capture_default_str();
  probe_cmd->add_option("--out", probe.out, "Output directory")->required();

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with known signal");
  synth_cmd->add_option("--n-utterances", synth.spec.n_utterances)->capture_default_str();
  synth_cmd->add_option("--max-depth", synth.spec.max_depth)->capture_default_str();
  synth_cmd->add_option("--signal", synth.signal, "NONE, DEPTH_LINEAR, KERNEL_LINEAR, BOW_LINEAR")
      ->check(CLI::IsMember({"NONE", "DEPTH_LINEAR", "KERNEL_LINEAR", "BOW_LINEAR"}))
      ->capture_default_str();
  synth_cmd->add_option("--noise-sigma", synth.spec.noise_sigma)->capture_default_str();
  synth_cmd->add_option("--dim", synth.spec.dim)->capture_default_str();
  synth_cmd->add_option("--vocab-size", synth.spec.vocab_size)->capture_default_str();
  synth_cmd->add_option("--nonterminals", synth.spec.nonterminals, "Phrase labels (comma separated)")
      ->delimiter(',')->capture_default_str();
  synth_cmd->add_option("--pos-tags", synth.spec.pos_tags, "Preterminal labels (comma separated)")
      ->delimiter(',')->capture_default_str();
  synth_cmd->add_option("--expand-probability", synth.spec.expand_probability)->capture_default_str();
  synth_cmd->add_option("--kernel-anchors", synth.spec.kernel_anchors)->capture_default_str();
  synth_cmd->add_option("--layers", synth.layers)->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed)
      ->envname("SYNTAXPROBE_SEED")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Merge results into per-layer R2 tables");
  report_cmd->add_option("--results", report.results, "results.jsonl files")
      ->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", report.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Context ctx{out, err};
  if (log_level == "error") ctx.level = LogLevel::Error;
  else if (log_level == "warn") ctx.level = LogLevel::Warn;
  else if (log_level == "debug") ctx.level = LogLevel::Debug;

  try {
    if (!replay.empty()) {
      if (!app.get_subcommands().empty()) {
        err << "--replay cannot be combined with a subcommand\n";
        return kExitUsage;
      }
      return run_cli(load_replay(replay), out, err);
    }
    if (filter_cmd->parsed()) return cmd_filter(filter, ctx);
    if (gram_cmd->parsed()) return cmd_gram(gram, ctx);
    if (probe_cmd->parsed()) return cmd_probe(probe, ctx);
    if (synth_cmd->parsed()) return cmd_synth(synth, ctx);
    if (report_cmd->parsed()) return cmd_report(report, ctx);
    err << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace syntaxprobe
