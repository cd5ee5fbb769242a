// Copyright 2026 The ephyspack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sstream>

#include "cli.h"
#include "ephyspack/ingest.h"
#include "ephyspack/query.h"
#include "json.hpp"
#include "support/fixtures.h"

namespace ephyspack {
namespace {

using testing::TempDir;

struct Result {
  int rc;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int rc = cli::run(args, {out, err});
  return {rc, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream ss(text);
  for (std::string l; std::getline(ss, l);) v.push_back(l);
  return v;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir;
    file_ = dir_->file("s.eph").string();
    auto r = run({"gen", "--seed", "7", "--out", file_, "--mode", "probabilistic", "--created-time",
                  testing::kFixedCreated});
    ASSERT_EQ(r.rc, 0) << r.err;
  }
  static void TearDownTestSuite() { delete dir_; }
  static TempDir* dir_;
  static std::string file_;
};
TempDir* Cli::dir_ = nullptr;
std::string Cli::file_;

TEST_F(Cli, LsMatchesInventory) {
  auto r = run({"ls", file_, "--format", "jsonl"});
  ASSERT_EQ(r.rc, 0);
  Container c = Container::open(file_);
  const auto inv = inventory(c);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), inv.size());
  for (std::size_t k = 0; k < ls.size(); ++k) {
    auto j = nlohmann::json::parse(ls[k]);
    EXPECT_EQ(j["path"], inv[k].path);
    EXPECT_EQ(j["kind"], std::string(inventory_kind_name(inv[k].kind)));
  }
  auto text = run({"ls", file_});
  EXPECT_EQ(lines(text.out).size(), inv.size());
}

TEST_F(Cli, EveryJsonlLineParses) {
  const std::vector<std::vector<std::string>> cmds = {
      {"info", file_},
      {"info", file_, "/data/spikes", "--related"},
      {"ls", file_, "--source", "tt1", "--descendants"},
      {"validate", file_},
      {"validate", "--rules"},
      {"slice", file_, "/data/raw", "--offset", "0,1", "--extent", "3,2"},
      {"prov", file_, "/data/spike_histogram", "--up"},
      {"prov", file_, "--search", "seed"},
      {"groups", file_},
      {"groups", file_, "session1"},
  };
  for (auto args : cmds) {
    args.push_back("--format");
    args.push_back("jsonl");
    auto r = run(args);
    EXPECT_EQ(r.rc, 0) << args[0] << ": " << r.err;
    EXPECT_FALSE(r.out.empty()) << args[0];
    for (const auto& l : lines(r.out)) EXPECT_TRUE(nlohmann::json::accept(l)) << l;
  }
}

TEST_F(Cli, SliceValues) {
  auto r = run({"slice", file_, "/data/raw", "--offset", "5,0", "--extent", "2,4", "--format", "jsonl"});
  ASSERT_EQ(r.rc, 0) << r.err;
  Container c = Container::open(file_);
  auto want = std::get<std::vector<double>>(read_region(c, "/data/raw", {5, 0}, {2, 4}));
  std::vector<double> got;
  for (const auto& l : lines(r.out)) {
    auto j = nlohmann::json::parse(l);
    auto collect = [&](const nlohmann::json& node, auto&& self) -> void {
      if (node.is_array()) {
        for (const auto& x : node) self(x, self);
      } else if (node.is_number()) {
        got.push_back(node.get<double>());
      }
    };
    collect(j.contains("values") ? j["values"] : j, collect);
  }
  EXPECT_EQ(got, want);
}

TEST_F(Cli, SourceFilterFindsTetrodeData) {
  auto r = run({"ls", file_, "--source", "tt1", "--descendants"});
  ASSERT_EQ(r.rc, 0);
  EXPECT_NE(r.out.find("/data/raw"), std::string::npos);
  EXPECT_NE(r.out.find("/data/spikes"), std::string::npos);
  EXPECT_EQ(run({"ls", file_, "--source", "tt1"}).out, "");
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"validate", file_}).rc, cli::kExitOk);
  EXPECT_EQ(run({"validate", dir_->file("missing").string()}).rc, cli::kExitUsage);
  EXPECT_EQ(run({"info", file_, "/data/none"}).rc, cli::kExitFindings);
  EXPECT_EQ(run({"ls", file_, "--source", "nobody"}).rc, cli::kExitFindings);
  EXPECT_EQ(run({"slice", file_, "/data/raw", "--offset", "9999,0", "--extent", "1,1"}).rc, cli::kExitUsage);
  EXPECT_EQ(run({"slice", file_, "/data/raw", "--offset", "-1"}).rc, cli::kExitUsage);
  EXPECT_EQ(run({"bogus"}).rc, cli::kExitUsage);
  EXPECT_EQ(run({}).rc, cli::kExitUsage);
  EXPECT_EQ(run({"ls", file_, "--format", "xml"}).rc, cli::kExitUsage);

  const std::string bad = dir_->file("bad.eph").string();
  ASSERT_EQ(run({"mutate", file_, "--id", "scale-prob-row", "--out", bad}).rc, 0);
  auto v = run({"validate", bad});
  EXPECT_EQ(v.rc, cli::kExitFindings);
  EXPECT_NE(v.out.find("E004"), std::string::npos);
  auto err = run({"info", file_, "/data/none"});
  EXPECT_EQ(err.err.find("NoSuchEntity: NoSuchEntity"), std::string::npos) << err.err;
}

TEST_F(Cli, ReadCommandsNeverWrite) {
  const std::string before = testing::read_bytes(file_);
  for (const auto& args : std::vector<std::vector<std::string>>{{"info", file_},
                                                                {"ls", file_},
                                                                {"validate", file_},
                                                                {"validate", file_, "--fast"},
                                                                {"slice", file_, "/data/temperature"},
                                                                {"prov", file_, "--search", ""},
                                                                {"groups", file_, "session1"}}) {
    run(args);
  }
  EXPECT_EQ(testing::read_bytes(file_), before);
}

TEST_F(Cli, ValidateIsDeterministicAcrossThreads) {
  const std::string bad = dir_->file("bad2.eph").string();
  ASSERT_EQ(run({"mutate", file_, "--id", "flip-chunk-byte", "--out", bad}).rc, 0);
  const auto one = run({"validate", bad, "--threads", "1"});
  for (const char* t : {"2", "8"}) EXPECT_EQ(run({"validate", bad, "--threads", t}).out, one.out);
  EXPECT_NE(one.out.find("C005"), std::string::npos);
}

TEST(CliCreate, CreateAndGenRefuseToOverwrite) {
  TempDir dir;
  const std::string f = dir.file("c.eph").string();
  auto r = run({"create", f, "--session-start", "2026-01-05T09:30:00+01:00", "--id", "lab=L1"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(run({"validate", f}).rc, 0);
  EXPECT_NE(run({"info", f}).out.find("lab"), std::string::npos);
  EXPECT_EQ(run({"create", f}).rc, cli::kExitUsage);
  EXPECT_EQ(run({"gen", "--seed", "1", "--out", f}).rc, cli::kExitUsage);
  EXPECT_EQ(run({"create", dir.file("d.eph").string(), "--session-start", "tomorrow"}).rc, cli::kExitUsage);
}

}  // namespace
}  // namespace ephyspack
