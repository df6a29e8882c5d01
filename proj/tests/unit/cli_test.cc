// Copyright 2026 The ftqa Authors.
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

#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <string>

#include "test_support.h"

namespace ftqa {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct RunResult {
  int status = -1;
  std::string output;
};

RunResult RunCli(const std::string &args) {
  const std::string command = std::string(FTQA_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE *pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return r;
  char buffer[4096];
  size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) r.output.append(buffer, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

constexpr const char kSmallModel[] =
    " --embed-dim 8 --rnn-hidden 4 --ffn-dim 8 --mlp-dims 8 --layers 2";

class CliWorkflow : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir();
    const RunResult synth = RunCli("synth --out " + Path("data") +
                                   " --entities 40 --train-questions 40 --test-questions 20");
    ASSERT_EQ(synth.status, 0) << synth.output;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::string Path(const std::string &name) { return dir_->File(name); }
  static std::string Corpus() {
    return " --documents " + Path("data/documents.jsonl") + " --entities " +
           Path("data/entities.jsonl");
  }
  static testing::TempDir *dir_;
};

testing::TempDir *CliWorkflow::dir_ = nullptr;

TEST_F(CliWorkflow, EndToEnd) {
  RunResult r = RunCli("ingest" + Corpus() + " --out " + Path("ingest"));
  ASSERT_EQ(r.status, 0) << r.output;
  for (const char *f : {"documents.jsonl", "entities.jsonl", "sentences.jsonl", "mentions.jsonl",
                        "config.json"}) {
    EXPECT_TRUE(fs::exists(Path(std::string("ingest/") + f))) << f;
  }

  r = RunCli("build-graph" + Corpus() + " --out " + Path("graph"));
  ASSERT_EQ(r.status, 0) << r.output;
  for (const char *f : {"graph.bin", "nodes.jsonl", "edges.jsonl", "index.bin", "config.json"}) {
    EXPECT_TRUE(fs::exists(Path(std::string("graph/") + f))) << f;
  }

  r = RunCli("train-scorer" + Corpus() + " --graph " + Path("graph") + " --questions " +
             Path("data/questions.train.jsonl") + " --out " + Path("scorer.json"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_TRUE(fs::exists(Path("scorer.json.config.json")));

  for (const char *split : {"train", "test"}) {
    const std::string name = split;
    r = RunCli("ground" + Corpus() + " --graph " + Path("graph") + " --scorer " +
               Path("scorer.json") + " --questions " + Path("data/questions." + name + ".jsonl") +
               " --split " + (name == "train" ? "train" : "eval") + " --out " +
               Path("grounded-" + name));
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("answer recall"), std::string::npos);
  }

  r = RunCli("train --grounded " + Path("grounded-train") + " --out " + Path("run") +
             " --epochs 2 --learning-rate 0.01" + kSmallModel);
  ASSERT_EQ(r.status, 0) << r.output;
  for (const char *f : {"loss.jsonl", "epoch-1.ckpt", "epoch-2.ckpt", "model.ckpt", "config.json"}) {
    EXPECT_TRUE(fs::exists(Path(std::string("run/") + f))) << f;
  }

  r = RunCli("evaluate --checkpoint " + Path("run/model.ckpt") + " --grounded " +
             Path("grounded-test") + " --out " + Path("eval"));
  ASSERT_EQ(r.status, 0) << r.output;
  const json metrics = json::parse(testing::ReadFile(Path("eval/metrics.json")));
  EXPECT_EQ(metrics["evaluated"], 20);
  EXPECT_TRUE(metrics.contains("accuracy"));
  EXPECT_TRUE(metrics.contains("recall_after_filtering"));
  EXPECT_TRUE(fs::exists(Path("eval/predictions.jsonl")));

  // Evaluating twice gives the same bytes.
  r = RunCli("evaluate --checkpoint " + Path("run/model.ckpt") + " --grounded " +
             Path("grounded-test") + " --out " + Path("eval2"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(testing::ReadFile(Path("eval/metrics.json")),
            testing::ReadFile(Path("eval2/metrics.json")));

  r = RunCli("trace --checkpoint " + Path("run/model.ckpt") + " --grounded " +
             Path("grounded-test/test-0001.json") + " --out " + Path("trace"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_TRUE(fs::exists(Path("trace.json")));
  EXPECT_NE(testing::ReadFile(Path("trace.dot")).find("digraph"), std::string::npos);

  r = RunCli("answer" + Corpus() + " --graph " + Path("graph") + " --scorer " +
             Path("scorer.json") + " --checkpoint " + Path("run/model.ckpt") +
             " --question \"Who admired nobody at all?\"");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("unanswerable"), std::string::npos) << r.output;
}

TEST(CliTest, GradCheckPasses) {
  const RunResult r = RunCli("gradcheck");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("PASS: max relative error"), std::string::npos) << r.output;
}

TEST(CliTest, InvalidSettingNamesTheFlag) {
  const RunResult r = RunCli("gradcheck --top-k-eval 0");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("--top-k-eval"), std::string::npos) << r.output;
}

TEST(CliTest, UnknownAblationIsRejected) {
  const RunResult r = RunCli("gradcheck --ablate no-such-thing");
  EXPECT_NE(r.status, 0);
}

TEST(CliTest, MissingSubcommandFails) {
  EXPECT_NE(RunCli("").status, 0);
}

}  // namespace
}  // namespace ftqa
