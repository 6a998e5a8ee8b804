// Copyright 2026 The heatloss Authors
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

#include <array>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Run {
  int status = -1;
  std::string out;  // stdout and stderr together
};

Run run(const std::string& args) {
  const std::string cmd = std::string(HEATLOSS_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("heatloss_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream(dir_ / "scene.json")
        << R"({"width": 32, "height": 24, "boxes": [{"cx": 8, "cy": 8, "w": 6, "h": 6},
                                                     {"cx": 22, "cy": 14, "w": 4, "h": 8}]})";
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

float grid_value(const std::string& bytes, int width, int x, int y) {
  const auto nl = bytes.find('\n');
  float v = 0;
  std::memcpy(&v, bytes.data() + nl + 1 + 4 * (y * width + x), 4);
  return v;
}

TEST_F(Cli, RenderGroundTruthHasUnitCenters) {
  const auto r = run("render-gt --annotation " + path("scene.json") + " --out-prefix " + path("gt") +
                     " --eta 1 --eps-sigma 3");
  ASSERT_EQ(r.status, 0) << r.out;
  const std::string heat = slurp(path("gt.heatmap.grid"));
  EXPECT_EQ(heat.substr(0, 11), "GRID 32 24\n");
  EXPECT_EQ(grid_value(heat, 32, 8, 8), 1.0f);
  EXPECT_EQ(grid_value(heat, 32, 22, 14), 1.0f);
  EXPECT_TRUE(fs::exists(path("gt.mask.grid")));
  EXPECT_TRUE(fs::exists(path("gt.binary.grid")));
}

TEST_F(Cli, GradCheckPasses) {
  const auto r = run("grad-check --variant MASK_FOCAL_POLY1 --instances 50 --size 8 --seed 3");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("\"pass\": true"), std::string::npos) << r.out;
}

TEST_F(Cli, EvalLossDimensionMismatch) {
  ASSERT_EQ(run("render-gt --annotation " + path("scene.json") + " --out-prefix " + path("gt")).status, 0);
  ASSERT_EQ(run("render-gt --annotation " + path("scene.json") + " --out-prefix " + path("half") +
                " --stride 2")
                .status,
            0);
  const auto bad = run("eval-loss --pred " + path("half.heatmap.grid") + " --annotation " +
                       path("scene.json") + " --variant MASK_FOCAL");
  EXPECT_NE(bad.status, 0);
  EXPECT_NE(bad.out.find("DIM_MISMATCH"), std::string::npos) << bad.out;

  const auto good = run("eval-loss --pred " + path("gt.heatmap.grid") + " --annotation " +
                        path("scene.json") + " --variant HEATMAP_FOCAL --grad-out " + path("grad.grid"));
  EXPECT_EQ(good.status, 0) << good.out;
  EXPECT_NE(good.out.find("\"value\""), std::string::npos);
  EXPECT_TRUE(fs::exists(path("grad.grid")));
}

TEST_F(Cli, PeaksAndCounting) {
  ASSERT_EQ(run("render-gt --annotation " + path("scene.json") + " --out-prefix " + path("gt")).status, 0);
  const auto r = run("peaks --heatmap " + path("gt.heatmap.grid") + " --annotation " + path("scene.json") +
                     " --out " + path("peaks.json"));
  ASSERT_EQ(r.status, 0) << r.out;
  const std::string peaks = slurp(path("peaks.json"));
  EXPECT_NE(peaks.find("\"count\": 2"), std::string::npos) << peaks;
  EXPECT_NE(peaks.find("\"matched\": 2"), std::string::npos) << peaks;

  std::ofstream(path("counts.json")) << R"({"per_image": [{"pred": 3, "truth": 4}, {"pred": 5, "truth": 4}]})";
  const auto c = run("eval-count --counts " + path("counts.json") + " --out " + path("report.json"));
  ASSERT_EQ(c.status, 0) << c.out;
  EXPECT_NE(slurp(path("report.json")).find("\"mae\": 1.0"), std::string::npos);
}

TEST_F(Cli, RerunsAreByteIdentical) {
  for (const char* tag : {"a", "b"}) {
    ASSERT_EQ(run("synth --seed 42 --out " + path(std::string("scene_") + tag + ".json")).status, 0);
    ASSERT_EQ(run("fit --seed 42 --variant MASK_FOCAL --steps 100 --out-prefix " + path(std::string("fit_") + tag)).status, 0);
  }
  EXPECT_EQ(slurp(path("scene_a.json")), slurp(path("scene_b.json")));
  EXPECT_EQ(slurp(path("fit_a.trace.csv")), slurp(path("fit_b.trace.csv")));
  EXPECT_EQ(slurp(path("fit_a.pred.grid")), slurp(path("fit_b.pred.grid")));
}

TEST_F(Cli, UsageErrors) {
  const auto missing_seed = run("synth --out " + path("s.json"));
  EXPECT_EQ(missing_seed.status, 64);
  EXPECT_NE(missing_seed.out.find("USAGE_ERROR"), std::string::npos);
  EXPECT_EQ(run("fit --variant MASK_FOCAL --out-prefix " + path("f")).status, 64);
  EXPECT_EQ(run("grad-check --variant MASK_FOCAL").status, 64);
  EXPECT_EQ(run("no-such-command").status, 64);
  const auto io = run("peaks --heatmap " + path("missing.grid") + " --out " + path("p.json"));
  EXPECT_EQ(io.status, 2);
  EXPECT_NE(io.out.find("IO_ERROR"), std::string::npos);
}

TEST_F(Cli, Experiment) {
  std::ofstream(path("exp.json")) << R"({
    "scenes": [{"synth": {"n_heads": 1, "width": 24, "height": 24}}, "scene.json"],
    "variants": [{"variant": "MASK_FOCAL", "gamma": 4, "beta": 0.5}],
    "fit": {"steps": 200}
  })";
  const auto a = run("experiment --config " + path("exp.json") + " --seed 1 --threads 1 --out " + path("a.json"));
  const auto b = run("experiment --config " + path("exp.json") + " --seed 1 --threads 3 --out " + path("b.json"));
  ASSERT_EQ(a.status, 0) << a.out;
  ASSERT_EQ(b.status, 0) << b.out;
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_NE(slurp(path("a.json")).find("\"m\": 2"), std::string::npos);
}

}  // namespace
