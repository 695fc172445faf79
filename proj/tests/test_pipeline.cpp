// Copyright 2026 The charnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "charnet/common.hpp"
#include "charnet/csv.hpp"
#include "charnet/pipeline.hpp"

namespace pl = charnet::pipeline;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kFixture = fs::path(CHARNET_DATA_DIR) / "fixture";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("charnet_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ingest -> mentions -> chart -> extract -> graph on the bundled fixture.
void run_text_stages(const fs::path& out) {
  pl::ingest({kFixture / "manifest.json", kFixture / "aliases.tsv", std::nullopt, out});
  pl::mentions({out / "corpus.json", kFixture / "aliases.tsv", out});
  pl::chart({out / "corpus.json", out / "mentions.csv", kFixture / "aliases.tsv",
             {"bilbo", "gandalf", "thorin", "smaug", "bard"}, std::nullopt, out});
  pl::ExtractOptions ex;
  ex.corpus = out / "corpus.json";
  ex.mentions = out / "mentions.csv";
  ex.out = out;
  pl::extract(ex);
  pl::GraphOptions g;
  g.edges = out / "edges.csv";
  g.out = out;
  pl::graph(g);
}

}  // namespace

TEST(ConfigHash, StableAndSensitive) {
  const json a = {{"seed", 1}, {"dims", 20}};
  EXPECT_EQ(pl::config_hash(a), pl::config_hash(json::parse(a.dump())));
  EXPECT_EQ(pl::config_hash(a).size(), 16u);
  EXPECT_NE(pl::config_hash(a), pl::config_hash({{"seed", 2}, {"dims", 20}}));
  // FNV-1a 64 of "{}"
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : std::string("{}")) h = (h ^ c) * 0x100000001b3ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  EXPECT_EQ(pl::config_hash(json::object()), buf);
}

TEST(WriteArtifact, Sidecar) {
  const auto dir = scratch("sidecar");
  pl::StageResult r;
  const json opts = {{"k", "v"}};
  pl::write_artifact(dir / "x.csv", "a,b\n", "demo", opts, r);
  EXPECT_EQ(slurp(dir / "x.csv"), "a,b\n");
  const auto meta = json::parse(slurp(dir / "x.csv.meta.json"));
  EXPECT_EQ(meta["stage"], "demo");
  EXPECT_EQ(meta["config"], opts);
  EXPECT_EQ(meta["config_hash"], pl::config_hash(opts));
  ASSERT_EQ(r.outputs.size(), 1u);
}

TEST(Fixture, TextStagesMatchGold) {
  const auto out = scratch("gold");
  run_text_stages(out);
  EXPECT_EQ(slurp(out / "edges.csv"), slurp(kFixture / "gold_edges.csv"));

  const auto counts = json::parse(slurp(out / "mention_counts.json"));
  const auto gold_counts = json::parse(slurp(kFixture / "gold_mention_counts.json"));
  for (const auto& [id, n] : gold_counts.items())
    EXPECT_EQ(counts["characters"][id]["tale"], n) << id;

  const auto metrics = json::parse(slurp(out / "metrics.json"));
  const auto gold_metrics = json::parse(slurp(kFixture / "gold_metrics.json"));
  for (const auto& [k, v] : gold_metrics.items())
    EXPECT_NEAR(metrics[k].get<double>(), v.get<double>(), 1e-12) << k;

  const auto got = charnet::csv::parse(slurp(out / "chart.csv"));
  const auto want = charnet::csv::parse(slurp(kFixture / "gold_chart.csv"));
  ASSERT_EQ(got.size(), want.size());
  EXPECT_EQ(got[0], want[0]);
  for (std::size_t r = 1; r < want.size(); ++r) {
    ASSERT_EQ(got[r].size(), want[r].size());
    EXPECT_EQ(got[r][0], want[r][0]);
    for (std::size_t c = 1; c < want[r].size(); ++c)
      EXPECT_NEAR(std::stod(got[r][c]), std::stod(want[r][c]), 1e-12) << want[r][0] << " col " << c;
  }
  for (const auto& f : fs::directory_iterator(out)) {
    const auto name = f.path().filename().string();
    if (name.ends_with(".meta.json")) continue;
    EXPECT_TRUE(fs::exists(f.path().string() + ".meta.json")) << name;
  }
}

TEST(Fixture, WindowStrategy) {
  const auto out = scratch("window");
  pl::ingest({kFixture / "manifest.json", kFixture / "aliases.tsv", std::nullopt, out});
  pl::mentions({out / "corpus.json", kFixture / "aliases.tsv", out});
  pl::ExtractOptions ex{out / "corpus.json", out / "mentions.csv", "window", 2000, false, out};
  pl::extract(ex);
  const auto meta = json::parse(slurp(out / "edges.csv.meta.json"));
  EXPECT_EQ(meta["config"]["strategy"], "window");
  EXPECT_EQ(meta["config"]["window_chars"], 2000);
  EXPECT_GT(slurp(out / "edges.csv").size(), 10u);
}

TEST(Stages, DownstreamReruns) {
  const auto out = scratch("downstream");
  run_text_stages(out);
  pl::EmbedOptions le;
  le.method = "le";
  le.graph = out / "graph.graphml";
  le.dims = 2;
  le.out = out;
  pl::embed(le);
  pl::EmbedOptions n2v;
  n2v.method = "node2vec";
  n2v.graph = out / "graph.graphml";
  n2v.dims = 4;
  n2v.out = out;
  pl::embed(n2v);
  pl::TrainOptions tr;
  tr.task = "classify";
  tr.graph = out / "graph.graphml";
  tr.labels = out / "labels.json";
  tr.epochs = 20;
  tr.out = out;
  // the fixture has a single work, hence a single class
  EXPECT_THROW(pl::train(tr), charnet::Error);
  tr.task = "linkpred";
  tr.features = out / "embedding_node2vec.csv";
  tr.holdout = 0.3;
  tr.out = out / "lp";
  pl::train(tr);
  const std::string first = slurp(out / "lp" / "link_scores.csv");
  pl::train(tr);
  EXPECT_EQ(slurp(out / "lp" / "link_scores.csv"), first);
  EXPECT_TRUE(fs::exists(out / "lp" / "loss.csv"));
  EXPECT_TRUE(fs::exists(out / "embedding_le_2d.csv"));
}

TEST(Stages, BenchmarkClassifyAndEvaluate) {
  const auto out = scratch("bench");
  pl::fixture({2024, out});
  pl::TrainOptions tr;
  tr.task = "classify";
  tr.graph = out / "benchmark" / "graph.graphml";
  tr.labels = out / "benchmark" / "labels.json";
  tr.epochs = 200;
  tr.lr = 0.01;
  tr.out = out / "cls";
  pl::train(tr);
  const auto rows = charnet::csv::parse(slurp(out / "cls" / "predictions.csv"));
  EXPECT_EQ(rows.size(), 91u);
  EXPECT_EQ(charnet::csv::parse(slurp(out / "cls" / "hidden.csv"))[0].size(), 21u);

  const json cfg = {{"seed", 5},
                    {"graphs", {{{"name", "bench"}, {"graphml", "benchmark/graph.graphml"}, {"labels", "benchmark/labels.json"}}}},
                    {"methods", {"logistic"}},
                    {"features", {"ohe"}},
                    {"folds", 3}};
  std::ofstream(out / "exp.json") << cfg.dump();
  pl::evaluate({out / "exp.json", std::nullopt, out / "eval"});
  const std::string csv1 = slurp(out / "eval" / "results.csv");
  pl::evaluate({out / "exp.json", std::nullopt, out / "eval"});
  EXPECT_EQ(slurp(out / "eval" / "results.csv"), csv1);
  EXPECT_EQ(std::count(csv1.begin(), csv1.end(), '\n'), 2);
}

TEST(Stages, MissingInputFails) {
  const auto out = scratch("missing");
  EXPECT_THROW(pl::mentions({out / "nope.json", kFixture / "aliases.tsv", out}), charnet::Error);
  EXPECT_THROW(pl::ingest({out / "nope.json", std::nullopt, std::nullopt, out}), charnet::Error);
}
