#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "syntaxprobe/cli.hpp"
#include "syntaxprobe/corpus.hpp"
#include "syntaxprobe/embedding.hpp"
#include "syntaxprobe/results.hpp"
#include "syntaxprobe/tree.hpp"
#include "syntaxprobe/tree_kernel.hpp"

namespace sp = syntaxprobe;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = sp::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

std::vector<std::vector<double>> read_csv_matrix(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string synth(const fs::path& dir, const std::string& signal,
                  const std::string& n, std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"synth", "--signal", signal, "--n-utterances", n,
                                "--seed", "3", "--out", dir.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  const Outcome r = run(args);
  EXPECT_EQ(r.code, 0) << r.err;
  return dir.string();
}

}  // namespace

TEST(CliFilter, KeepsShortUtterancesAndIsIdempotent) {
  const fs::path dir = oracle::scratch("cli_filter");
  spit(dir / "in.tsv", "u1\tthe dog\nu2\tthe big dog barks\nu3\thi\n");
  const Outcome r = run({"filter", "--corpus", (dir / "in.tsv").string(), "--max-words",
                     "2", "--out", (dir / "a").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "a" / "corpus.tsv"), "u1\tthe dog\nu3\thi\n");
  EXPECT_NE(r.out.find("3 -> 2 utterances"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "a" / "run.json"));

  const Outcome again = run({"filter", "--corpus", (dir / "a" / "corpus.tsv").string(),
                         "--max-words", "2", "--out", (dir / "b").string()});
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(slurp(dir / "b" / "corpus.tsv"), slurp(dir / "a" / "corpus.tsv"));
}

TEST(CliFilter, DropNonLatin) {
  const fs::path dir = oracle::scratch("cli_latin");
  spit(dir / "in.tsv", "a\tdas café\nb\tпривет world\nc\tthe dog barks\n");
  const Outcome r = run({"filter", "--corpus", (dir / "in.tsv").string(),
                     "--drop-non-latin", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "corpus.tsv"), "a\tdas café\nc\tthe dog barks\n");
  EXPECT_NE(r.out.find("dropped_non_latin 1"), std::string::npos);
}

TEST(CliFilter, ErrorsCarryLineNumbers) {
  const fs::path dir = oracle::scratch("cli_filter_bad");
  spit(dir / "in.tsv", "u1\tok\nbroken line\n");
  const Outcome r = run({"filter", "--corpus", (dir / "in.tsv").string(), "--out",
                     (dir / "o").string()});
  EXPECT_EQ(r.code, sp::kExitData);
  EXPECT_NE(r.err.find(":2:"), std::string::npos);
}

TEST(CliGram, SingleAndDisjointTrees) {
  const fs::path dir = oracle::scratch("cli_gram");
  spit(dir / "one.txt", "(S (NP (DT the) (NN dog)) (VP (VBZ barks)))\n");
  ASSERT_EQ(run({"gram", "--trees", (dir / "one.txt").string(), "--out",
                 (dir / "one").string()}).code, 0);
  EXPECT_EQ(read_csv_matrix(dir / "one" / "gram.csv"),
            (std::vector<std::vector<double>>{{1.0}}));

  spit(dir / "two.txt", "(A (B x))\n(C (D y))\n");
  ASSERT_EQ(run({"gram", "--trees", (dir / "two.txt").string(), "--out",
                 (dir / "two").string()}).code, 0);
  EXPECT_EQ(read_csv_matrix(dir / "two" / "gram.csv"),
            (std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, 1.0}}));
  const auto table = sp::load_embedding_table((dir / "two" / "gram.wemb").string());
  EXPECT_EQ(table.rows(), 2u);
}

TEST(CliGram, MatchesLibraryOnFiveTrees) {
  const fs::path dir = oracle::scratch("cli_gram5");
  synth(dir / "s", "NONE", "5", {"--nonterminals", "S,NP,VP", "--pos-tags", "DT,NN"});
  const Outcome r = run({"gram", "--trees", (dir / "s" / "trees.txt").string(),
                     "--corpus", (dir / "s" / "corpus.tsv").string(), "--jobs", "2",
                     "--out", (dir / "g").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<sp::Tree> delex;
  for (const auto& t : sp::read_tree_file((dir / "s" / "trees.txt").string()))
    delex.push_back(sp::delexicalize(t));
  const Eigen::MatrixXd g = sp::gram_matrix(delex, sp::KernelParams(0.5));
  const auto csv = read_csv_matrix(dir / "g" / "gram.csv");
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) EXPECT_EQ(csv[i][j], g(i, j));
  EXPECT_EQ(slurp(dir / "g" / "gram.csv").substr(0, 9), "utt000000");
}

TEST(CliGram, BadLambdaIsUsageError) {
  const fs::path dir = oracle::scratch("cli_gram_lambda");
  spit(dir / "t.txt", "(A (B x))\n");
  const Outcome r = run({"gram", "--trees", (dir / "t.txt").string(), "--lambda", "1.5",
                     "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, sp::kExitUsage);
}

TEST(CliSynth, SmallCorpusAndReproducibility) {
  const fs::path dir = oracle::scratch("cli_synth");
  synth(dir / "a", "DEPTH_LINEAR", "10", {"--layers", "2"});
  synth(dir / "b", "DEPTH_LINEAR", "10", {"--layers", "2"});
  EXPECT_EQ(sp::read_corpus_tsv((dir / "a" / "corpus.tsv").string()).size(), 10u);
  EXPECT_EQ(sp::read_tree_file((dir / "a" / "trees.txt").string()).size(), 10u);
  for (const char* f : {"corpus.tsv", "trees.txt", "embeddings/layer_0.wemb",
                        "embeddings/layer_1.wemb", "embeddings/layer_0.jsonl"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  const auto [h, data] = sp::read_wemb((dir / "a" / "embeddings" / "layer_1.wemb").string());
  EXPECT_EQ(h.rows, 10u);
  EXPECT_EQ(h.layer_id, 1u);
}

TEST(CliProbe, DepthRoundTrip) {
  const fs::path dir = oracle::scratch("cli_probe");
  const std::string s = synth(dir / "s", "DEPTH_LINEAR", "200",
                              {"--layers", "3", "--noise-sigma", "0.5", "--dim", "8"});
  const Outcome r = run({"probe", "--kind", "depth", "--corpus", s + "/corpus.tsv",
                     "--trees", s + "/trees.txt", "--embeddings", s + "/embeddings",
                     "--feature-set", "EMB,WC,EMB+WC", "--seed", "5", "--jobs", "2",
                     "--out", (dir / "p").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto results = sp::read_results_jsonl((dir / "p" / "results.jsonl").string());
  ASSERT_EQ(results.size(), 9u);
  for (const auto& res : results) {
    if (res.feature_set != sp::FeatureSet::Wc) EXPECT_GT(res.test_r2, 0.9);
    EXPECT_EQ(res.config_fingerprint, results[0].config_fingerprint);
  }
  const std::string csv = slurp(dir / "p" / "results.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "layer,EMB,EMB+WC,WC");
  EXPECT_EQ(r.out, csv);
  for (int k = 0; k < 3; ++k)
    EXPECT_TRUE(fs::exists(dir / "p" / ("layer_" + std::to_string(k) + ".jsonl")));
}

TEST(CliProbe, KernelWithRsaAndSingleLayer) {
  const fs::path dir = oracle::scratch("cli_probe_kernel");
  const std::string s = synth(dir / "s", "KERNEL_LINEAR", "120");
  const Outcome r = run({"probe", "--kind", "kernel", "--corpus", s + "/corpus.tsv",
                     "--trees", s + "/trees.txt", "--embeddings", s + "/embeddings",
                     "--feature-set", "EMB,BOW", "--n-anchors", "30", "--rsa",
                     "--out", (dir / "p").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "p" / "results.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_TRUE(fs::exists(dir / "p" / "rsa.csv"));
  const auto results = sp::read_results_jsonl((dir / "p" / "results.jsonl").string());
  EXPECT_EQ(results[0].n_anchors, 30u);
}

TEST(CliProbe, KernelRejectsWordCountFeatures) {
  const fs::path dir = oracle::scratch("cli_probe_kernel_wc");
  const std::string s = synth(dir / "s", "NONE", "60");
  const Outcome r = run({"probe", "--kind", "kernel", "--corpus", s + "/corpus.tsv",
                     "--trees", s + "/trees.txt", "--embeddings", s + "/embeddings",
                     "--feature-set", "EMB+WC", "--out", (dir / "p").string()});
  EXPECT_EQ(r.code, sp::kExitUsage);
}

TEST(CliProbe, DeterministicOutputsAndReplay) {
  const fs::path dir = oracle::scratch("cli_probe_det");
  const std::string s = synth(dir / "s", "DEPTH_LINEAR", "100",
                              {"--noise-sigma", "1", "--dim", "4", "--layers", "2"});
  std::vector<std::string> args{"probe", "--corpus", s + "/corpus.tsv", "--trees",
                                s + "/trees.txt", "--embeddings", s + "/embeddings",
                                "--feature-set", "EMB,BOW", "--seed", "11",
                                "--out", (dir / "a").string()};
  ASSERT_EQ(run(args).code, 0);
  args.back() = (dir / "b").string();
  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(slurp(dir / "a" / "results.jsonl"), slurp(dir / "b" / "results.jsonl"));
  EXPECT_EQ(slurp(dir / "a" / "results.csv"), slurp(dir / "b" / "results.csv"));

  const std::string before = slurp(dir / "a" / "results.jsonl");
  fs::remove(dir / "a" / "results.jsonl");
  const Outcome replay = run({"--replay", (dir / "a" / "run.json").string()});
  ASSERT_EQ(replay.code, 0) << replay.err;
  EXPECT_EQ(slurp(dir / "a" / "results.jsonl"), before);

  // A changed input is refused.
  spit(s + "/corpus.tsv", slurp(s + "/corpus.tsv") + "");
  std::ofstream(s + "/trees.txt", std::ios::app) << "";
  auto j = nlohmann::json::parse(slurp(dir / "a" / "run.json"));
  j["inputs"][s + "/corpus.tsv"] = std::string(64, '0');
  spit(dir / "tampered.json", j.dump());
  EXPECT_EQ(run({"--replay", (dir / "tampered.json").string()}).code, sp::kExitData);
}

TEST(CliProbe, SeedFromEnvironment) {
  const fs::path dir = oracle::scratch("cli_probe_env");
  const std::string s = synth(dir / "s", "NONE", "80", {"--dim", "4"});
  ::setenv("SYNTAXPROBE_SEED", "21", 1);
  const Outcome r = run({"probe", "--corpus", s + "/corpus.tsv", "--trees",
                     s + "/trees.txt", "--embeddings", s + "/embeddings", "--out",
                     (dir / "p").string()});
  ::unsetenv("SYNTAXPROBE_SEED");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(sp::read_results_jsonl((dir / "p" / "results.jsonl").string())[0].seed, 21u);
}

TEST(CliProbe, DataErrors) {
  const fs::path dir = oracle::scratch("cli_probe_err");
  const std::string s = synth(dir / "s", "NONE", "40", {"--dim", "4"});
  // Manifest that names an utterance the corpus does not have.
  sp::write_manifest_jsonl(s + "/embeddings/layer_0.jsonl",
                           [&] {
                             auto ids = sp::read_corpus_tsv(s + "/corpus.tsv").ids();
                             ids[7] = "stranger";
                             return ids;
                           }());
  const Outcome r = run({"probe", "--corpus", s + "/corpus.tsv", "--trees",
                     s + "/trees.txt", "--embeddings", s + "/embeddings", "--out",
                     (dir / "p").string()});
  EXPECT_EQ(r.code, sp::kExitData);
  EXPECT_NE(r.err.find("utt000007"), std::string::npos) << r.err;

  fs::create_directories(dir / "empty");
  EXPECT_EQ(run({"probe", "--corpus", s + "/corpus.tsv", "--trees", s + "/trees.txt",
                 "--embeddings", (dir / "empty").string(), "--out",
                 (dir / "q").string()}).code,
            sp::kExitData);
}

TEST(CliReport, MergesResults) {
  const fs::path dir = oracle::scratch("cli_report");
  const std::string s = synth(dir / "s", "DEPTH_LINEAR", "80", {"--dim", "4"});
  ASSERT_EQ(run({"probe", "--corpus", s + "/corpus.tsv", "--trees", s + "/trees.txt",
                 "--embeddings", s + "/embeddings", "--out", (dir / "p").string()})
                .code,
            0);
  const Outcome r = run({"report", "--results", (dir / "p" / "results.jsonl").string(),
                     "--out", (dir / "r").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "r" / "report_depth.csv"), slurp(dir / "p" / "results.csv"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"frobnicate"}).code, sp::kExitUsage);
  EXPECT_EQ(run({"probe"}).code, sp::kExitUsage);
  EXPECT_EQ(run({}).code, sp::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, sp::kExitOk);
  const fs::path dir = oracle::scratch("cli_usage");
  EXPECT_EQ(run({"synth", "--signal", "LOUD", "--out", dir.string()}).code,
            sp::kExitUsage);
}
