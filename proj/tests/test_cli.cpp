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
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kFixture = fs::path(CHARNET_DATA_DIR) / "fixture";

struct Run {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("charnet_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run charnet(const std::string& args) {
  const fs::path tmp = fs::temp_directory_path();
  const std::string pid = std::to_string(::getpid());
  const fs::path out = tmp / ("charnet_cli_stdout_" + pid), err = tmp / ("charnet_cli_stderr_" + pid);
  const std::string cmd = std::string("\"") + CHARNET_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

void pipeline(const fs::path& out) {
  const auto aliases = q(kFixture / "aliases.tsv");
  ASSERT_EQ(charnet("ingest --manifest " + q(kFixture / "manifest.json") + " --aliases " + aliases + " --out " + q(out))
                .status,
            0);
  ASSERT_EQ(charnet("mentions --corpus " + q(out / "corpus.json") + " --aliases " + aliases + " --out " + q(out)).status,
            0);
  ASSERT_EQ(charnet("chart --corpus " + q(out / "corpus.json") + " --mentions " + q(out / "mentions.csv") +
                    " --aliases " + aliases + " --characters bilbo,gandalf,thorin,smaug,bard --out " + q(out))
                .status,
            0);
  ASSERT_EQ(charnet("extract --strategy sentence --corpus " + q(out / "corpus.json") + " --mentions " +
                    q(out / "mentions.csv") + " --out " + q(out))
                .status,
            0);
  ASSERT_EQ(charnet("graph --strategy sentence --edges " + q(out / "edges.csv") + " --seed 3 --out " + q(out)).status, 0);
  ASSERT_EQ(charnet("embed node2vec --graph " + q(out / "graph.graphml") + " --dims 4 --p 1 --q 4 --seed 2 --out " +
                    q(out))
                .status,
            0);
  ASSERT_EQ(charnet("train linkpred --graph " + q(out / "graph.graphml") + " --features " +
                    q(out / "embedding_node2vec.csv") + " --holdout 0.3 --epochs 50 --lr 0.01 --seed 2 --out " +
                    q(out / "lp"))
                .status,
            0);
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  return files;
}

}  // namespace

TEST(Cli, NoArgumentsIsUsage) {
  const auto r = charnet("");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("ingest"), std::string::npos);
}

TEST(Cli, UnknownFlagIsUsage) {
  EXPECT_EQ(charnet("graph --bogus 1 --edges x --out y").status, 2);
  EXPECT_EQ(charnet("frobnicate").status, 2);
  EXPECT_EQ(charnet("extract --strategy parse --corpus a --mentions b --out c").status, 2);
}

TEST(Cli, MissingRequiredIsUsage) {
  const auto r = charnet("mentions --out /tmp");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("--corpus"), std::string::npos) << r.err;
}

TEST(Cli, StageFailureNamesStage) {
  const auto dir = scratch("failure");
  const auto r = charnet("mentions --corpus " + q(dir / "none.json") + " --aliases " + q(kFixture / "aliases.tsv") +
                         " --out " + q(dir));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("stage 'mentions'"), std::string::npos) << r.err;
}

TEST(Cli, FixtureMatchesGold) {
  const auto out = scratch("gold");
  pipeline(out);
  EXPECT_EQ(slurp(out / "edges.csv"), slurp(kFixture / "gold_edges.csv"));
  const auto metrics = json::parse(slurp(out / "metrics.json"));
  const auto gold = json::parse(slurp(kFixture / "gold_metrics.json"));
  for (const auto& [k, v] : gold.items()) EXPECT_NEAR(metrics[k].get<double>(), v.get<double>(), 1e-12) << k;
  for (const auto& [name, body] : tree(out))
    if (!name.ends_with(".meta.json")) {
      ASSERT_TRUE(fs::exists(out / (name + ".meta.json"))) << name;
      const auto meta = json::parse(slurp(out / (name + ".meta.json")));
      EXPECT_EQ(meta["config_hash"].get<std::string>().size(), 16u);
    }
}

TEST(Cli, RerunsAreByteIdentical) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  pipeline(a);
  pipeline(b);
  auto ta = tree(a), tb = tree(b);
  ASSERT_EQ(ta.size(), tb.size());
  // paths embedded in sidecars differ between the two roots
  for (auto& [name, body] : ta) {
    ASSERT_TRUE(tb.count(name)) << name;
    if (name.ends_with(".meta.json")) continue;
    EXPECT_EQ(body, tb[name]) << name;
  }
}

TEST(Cli, ConfigFileSuppliesOptions) {
  const auto out = scratch("config");
  const json cfg = {{"seed", 7},
                    {"window_chars", 2000},
                    {"strategy", "window"},
                    {"ingest", {{"manifest", (kFixture / "manifest.json").string()}}},
                    {"out", out.string()}};
  std::ofstream(out / "cfg.json") << cfg.dump();
  EXPECT_EQ(charnet("--config " + q(out / "cfg.json") + " ingest").status, 0);
  EXPECT_TRUE(fs::exists(out / "corpus.json"));
  ASSERT_EQ(charnet("mentions --corpus " + q(out / "corpus.json") + " --aliases " + q(kFixture / "aliases.tsv") +
                    " --out " + q(out))
                .status,
            0);
  EXPECT_EQ(charnet("--config " + q(out / "cfg.json") + " extract --corpus " + q(out / "corpus.json") +
                    " --mentions " + q(out / "mentions.csv"))
                .status,
            0);
  const auto meta = json::parse(slurp(out / "edges.csv.meta.json"));
  EXPECT_EQ(meta["config"]["strategy"], "window");
  EXPECT_EQ(meta["config"]["window_chars"], 2000);
}

TEST(Cli, FixtureAndEvaluate) {
  const auto out = scratch("evaluate");
  ASSERT_EQ(charnet("fixture --seed 2024 --out " + q(out)).status, 0);
  const json exp = {{"seed", 1},
                    {"graphs", {{{"name", "bench"}, {"graphml", "benchmark/graph.graphml"}, {"labels", "benchmark/labels.json"}}}},
                    {"methods", {"logistic"}},
                    {"features", {"ohe"}},
                    {"folds", 3}};
  std::ofstream(out / "exp.json") << exp.dump();
  const auto r = charnet("evaluate --config " + q(out / "exp.json") + " --out " + q(out / "res"));
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "res" / "results.csv"));
  const json missing = {{"graphs", {{{"name", "g"}, {"graphml", "nowhere.graphml"}}}}};
  std::ofstream(out / "bad.json") << missing.dump();
  const auto bad = charnet("evaluate --config " + q(out / "bad.json") + " --out " + q(out / "res"));
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.err.find("charnet graph"), std::string::npos) << bad.err;
}
