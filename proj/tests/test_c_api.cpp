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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "heatloss/heatloss.h"

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("heatloss_c_api_" + name);
}

hl_scene* two_box_scene() {
  hl_scene* scene = nullptr;
  EXPECT_EQ(hl_scene_create(32, 24, &scene), HL_OK);
  const hl_box a{8, 8, 6, 6}, b{22, 14, 4, 8};
  EXPECT_EQ(hl_scene_add_box(scene, &a), HL_OK);
  EXPECT_EQ(hl_scene_add_box(scene, &b), HL_OK);
  return scene;
}

TEST(CApi, StatusNamesAndVersion) {
  EXPECT_STREQ(hl_status_name(HL_OK), "OK");
  EXPECT_STREQ(hl_status_name(HL_ERR_DIM_MISMATCH), "DIM_MISMATCH");
  EXPECT_STREQ(hl_status_name(HL_ERR_NON_FINITE), "NON_FINITE_LOSS");
  EXPECT_STRNE(hl_version(), "");
  int v = -1;
  EXPECT_EQ(hl_variant_parse("MASK_FOCAL_POLY1", &v), HL_OK);
  EXPECT_EQ(v, HL_MASK_FOCAL_POLY1);
  EXPECT_STREQ(hl_variant_name(HL_HEATMAP_FOCAL), "HEATMAP_FOCAL");
  EXPECT_EQ(hl_variant_parse("nope", &v), HL_ERR_INVALID_ARGUMENT);
}

TEST(CApi, GridLifecycleAndErrors) {
  const double values[6] = {0, 0.25, 0.5, 0.75, 1, 0.125};
  hl_grid* g = nullptr;
  ASSERT_EQ(hl_grid_create(3, 2, values, &g), HL_OK);
  EXPECT_EQ(hl_grid_width(g), 3);
  EXPECT_EQ(hl_grid_height(g), 2);
  EXPECT_EQ(std::memcmp(hl_grid_data(g), values, sizeof values), 0);

  const auto path = temp_file("grid.grid");
  ASSERT_EQ(hl_grid_save(g, path.c_str()), HL_OK);
  hl_grid* back = nullptr;
  ASSERT_EQ(hl_grid_load(path.c_str(), &back), HL_OK);
  EXPECT_EQ(std::memcmp(hl_grid_data(back), values, sizeof values), 0);
  hl_grid_destroy(back);
  std::filesystem::remove(path);

  hl_grid* bad = nullptr;
  EXPECT_EQ(hl_grid_create(0, 2, nullptr, &bad), HL_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(bad, nullptr);
  EXPECT_NE(std::string(hl_last_error()), "");
  EXPECT_EQ(hl_grid_create(3, 2, values, nullptr), HL_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(hl_grid_load("/nonexistent/x.grid", &bad), HL_ERR_IO);
  hl_grid_destroy(g);
  hl_grid_destroy(nullptr);
}

TEST(CApi, RenderAndLoss) {
  hl_scene* scene = two_box_scene();
  EXPECT_EQ(hl_scene_box_count(scene), 2u);
  const hl_sigma_params sigma = hl_sigma_params_default();
  hl_grid* heat = nullptr;
  ASSERT_EQ(hl_render_heatmap(scene, &sigma, 1, &heat), HL_OK);
  EXPECT_EQ(hl_grid_data(heat)[8 * 32 + 8], 1.0);

  hl_gt* gt = nullptr;
  ASSERT_EQ(hl_gt_from_scene(scene, &sigma, HL_MASK_FOCAL, 1, &gt), HL_OK);
  EXPECT_EQ(hl_gt_n_objects(gt), 2);

  hl_grid* pred = nullptr;
  ASSERT_EQ(hl_grid_create(32, 24, nullptr, &pred), HL_OK);
  hl_loss_config cfg = hl_loss_config_default(HL_MASK_FOCAL);
  double value = 0;
  hl_grid* grad = nullptr;
  int degenerate = -1;
  ASSERT_EQ(hl_loss_eval(pred, gt, &cfg, &value, &grad, &degenerate), HL_OK);
  EXPECT_GT(value, 0.0);
  EXPECT_EQ(degenerate, 0);
  EXPECT_EQ(hl_grid_width(grad), 32);

  hl_grid* wrong = nullptr;
  ASSERT_EQ(hl_grid_create(16, 24, nullptr, &wrong), HL_OK);
  EXPECT_EQ(hl_loss_eval(wrong, gt, &cfg, &value, nullptr, nullptr), HL_ERR_DIM_MISMATCH);

  hl_gt* soft = nullptr;
  ASSERT_EQ(hl_gt_create(heat, nullptr, 2, &soft), HL_OK);
  cfg = hl_loss_config_default(HL_ALPHA_FOCAL);
  EXPECT_EQ(hl_loss_eval(pred, soft, &cfg, &value, nullptr, nullptr), HL_ERR_INVALID_GT);
  cfg = hl_loss_config_default(HL_HEATMAP_FOCAL);
  EXPECT_EQ(hl_loss_eval(pred, soft, &cfg, &value, nullptr, nullptr), HL_OK);

  hl_gt_destroy(soft);
  hl_grid_destroy(wrong);
  hl_grid_destroy(grad);
  hl_grid_destroy(pred);
  hl_gt_destroy(gt);
  hl_grid_destroy(heat);
  hl_scene_destroy(scene);
}

TEST(CApi, FocalScalarAndGradCheck) {
  double v = 0;
  ASSERT_EQ(hl_focal_scalar(0.5, 1, 0.0, 1e-4, &v), HL_OK);
  EXPECT_NEAR(v, std::log(2.0), 1e-15);
  EXPECT_EQ(hl_focal_scalar(0.5, 3, 0.0, 1e-4, &v), HL_ERR_INVALID_ARGUMENT);
  double dev = 1;
  ASSERT_EQ(hl_grad_check(HL_MASK_FOCAL_POLY1, 20, 8, 1, &dev), HL_OK);
  EXPECT_LE(dev, hl_grad_check_tolerance());
}

TEST(CApi, PeaksAndMetrics) {
  hl_scene* scene = two_box_scene();
  const hl_sigma_params sigma = hl_sigma_params_default();
  hl_grid* heat = nullptr;
  ASSERT_EQ(hl_render_heatmap(scene, &sigma, 1, &heat), HL_OK);
  hl_peak_set* peaks = nullptr;
  ASSERT_EQ(hl_extract_peaks(heat, 3, 0.3, &peaks), HL_OK);
  ASSERT_EQ(hl_peak_set_size(peaks), 2u);
  int x = 0, y = 0;
  double score = 0;
  ASSERT_EQ(hl_peak_set_get(peaks, 0, &x, &y, &score), HL_OK);
  EXPECT_EQ(x, 8);
  EXPECT_EQ(y, 8);
  EXPECT_EQ(hl_peak_set_get(peaks, 5, &x, &y, &score), HL_ERR_INVALID_ARGUMENT);
  int matched = 0, missed = 0, spurious = 0;
  ASSERT_EQ(hl_match_localizations(peaks, scene, 0.5, 1, &matched, &missed, &spurious), HL_OK);
  EXPECT_EQ(matched, 2);
  int count = 0;
  EXPECT_EQ(hl_count_image(heat, 4, 0.3, &count), HL_ERR_INVALID_ARGUMENT);

  const int pred[2] = {0, 10}, truth[2] = {0, 0};
  hl_count_report* report = nullptr;
  ASSERT_EQ(hl_compute_metrics(pred, truth, 2, &report), HL_OK);
  EXPECT_NEAR(hl_count_report_mae(report), 5.0, 1e-12);
  EXPECT_NEAR(hl_count_report_rmse(report), std::sqrt(50.0), 1e-12);
  char* json = nullptr;
  ASSERT_EQ(hl_count_report_to_json(report, &json), HL_OK);
  EXPECT_NE(std::string(json).find("\"rmse\""), std::string::npos);
  hl_string_free(json);
  hl_count_report_destroy(report);
  EXPECT_EQ(hl_compute_metrics(pred, truth, 0, &report), HL_ERR_INVALID_ARGUMENT);

  hl_peak_set_destroy(peaks);
  hl_grid_destroy(heat);
  hl_scene_destroy(scene);
}

TEST(CApi, SynthAndFit) {
  hl_synth_params sp = hl_synth_params_default();
  sp.seed = 42;
  sp.width = 32;
  sp.height = 32;
  sp.n_heads = 2;
  sp.min_center_gap = 12;
  hl_scene* scene = nullptr;
  ASSERT_EQ(hl_generate_scene(&sp, &scene), HL_OK);
  EXPECT_EQ(hl_scene_box_count(scene), 2u);

  hl_fit_config fc = hl_fit_config_default();
  fc.steps = 50;
  fc.record_every = 10;
  const hl_sigma_params sigma = hl_sigma_params_default();
  hl_fit_trace* trace = nullptr;
  ASSERT_EQ(hl_fit_direct(scene, &sigma, &fc, &trace), HL_OK);
  EXPECT_EQ(hl_fit_trace_length(trace), 5u);
  int step = -1;
  double loss = 0;
  ASSERT_EQ(hl_fit_trace_get(trace, 4, &step, &loss), HL_OK);
  EXPECT_EQ(step, 40);
  EXPECT_LT(hl_fit_trace_final_loss(trace), loss);
  EXPECT_EQ(hl_fit_trace_gt_count(trace), 2);
  EXPECT_EQ(hl_grid_width(hl_fit_trace_final_pred(trace)), 32);
  hl_fit_trace_destroy(trace);

  sp.n_heads = 100;
  hl_scene* none = nullptr;
  EXPECT_EQ(hl_generate_scene(&sp, &none), HL_ERR_INFEASIBLE);
  EXPECT_NE(std::string(hl_last_error()).find("gap"), std::string::npos);
  hl_scene_destroy(scene);
}

TEST(CApi, SceneJsonAndExperiment) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto cfg_path = temp_file("experiment.json");
  std::ofstream(cfg_path) << R"({
    "scenes": [{"synth": {"n_heads": 1, "width": 24, "height": 24}}],
    "variants": [{"variant": "MASK_FOCAL", "gamma": 4, "beta": 0.5}],
    "fit": {"steps": 200}
  })";
  char* out = nullptr;
  ASSERT_EQ(hl_experiment_run(cfg_path.c_str(), 7, 2, &out), HL_OK);
  EXPECT_NE(std::string(out).find("MASK_FOCAL"), std::string::npos);
  hl_string_free(out);
  std::ofstream(cfg_path) << R"({"scenes": 3})";
  EXPECT_EQ(hl_experiment_run(cfg_path.c_str(), 7, 2, &out), HL_ERR_SCHEMA);
  std::filesystem::remove(cfg_path);
  (void)dir;
}

}  // namespace
