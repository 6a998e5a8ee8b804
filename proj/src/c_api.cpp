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

#include "heatloss/heatloss.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "heatloss/annotations.hpp"
#include "heatloss/counting.hpp"
#include "heatloss/gradcheck.hpp"
#include "heatloss/io.hpp"
#include "heatloss/loss.hpp"
#include "heatloss/synth.hpp"

struct hl_grid {
  heatloss::Grid grid;
};
struct hl_scene {
  heatloss::SceneAnnotation scene;
};
struct hl_anchor_set {
  heatloss::AnchorSet anchors;
};
struct hl_point_list {
  std::vector<heatloss::Point> points;
};
struct hl_gt {
  heatloss::GroundTruthBundle gt;
  hl_grid heatmap;
  hl_grid mask;
};
struct hl_peak_set {
  heatloss::PeakSet peaks;
};
struct hl_count_report {
  heatloss::CountReport report;
};
struct hl_fit_trace {
  heatloss::FitTrace trace;
  hl_grid final_pred;
};

namespace {

using heatloss::ErrorCode;

thread_local std::string g_last_error;

hl_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return HL_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDimMismatch: return HL_ERR_DIM_MISMATCH;
    case ErrorCode::kSchemaViolation: return HL_ERR_SCHEMA;
    case ErrorCode::kIoError: return HL_ERR_IO;
    case ErrorCode::kInvalidGroundTruth: return HL_ERR_INVALID_GT;
    case ErrorCode::kInfeasibleSynth: return HL_ERR_INFEASIBLE;
    case ErrorCode::kNonFiniteLoss: return HL_ERR_NON_FINITE;
    case ErrorCode::kInternal: return HL_ERR_INTERNAL;
  }
  return HL_ERR_INTERNAL;
}

template <typename F>
hl_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return HL_OK;
  } catch (const heatloss::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return HL_ERR_SCHEMA;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HL_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr)
    heatloss::fail(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

heatloss::LossVariant to_variant(int v) {
  if (v < HL_FOCAL_SCALAR || v > HL_MASK_FOCAL_POLY1)
    heatloss::fail(ErrorCode::kInvalidArgument, "unknown loss variant " + std::to_string(v));
  return static_cast<heatloss::LossVariant>(v);
}

heatloss::LossConfig to_cpp(const hl_loss_config& c) {
  return {to_variant(c.variant), c.alpha, c.beta, c.gamma, c.eps1, c.clamp};
}

hl_loss_config to_c(const heatloss::LossConfig& c) {
  return {static_cast<int>(c.variant), c.alpha, c.beta, c.gamma, c.eps1, c.clamp};
}

heatloss::SigmaParams to_cpp(const hl_sigma_params& s) { return {s.eta, s.eps_sigma}; }

heatloss::BoxAnnotation to_cpp(const hl_box& b) { return {b.cx, b.cy, b.w, b.h}; }

heatloss::FitConfig to_cpp(const hl_fit_config& c) {
  if (c.init < HL_INIT_UNIFORM_HALF || c.init > HL_INIT_SEEDED_NOISE)
    heatloss::fail(ErrorCode::kInvalidArgument, "unknown fit init " + std::to_string(c.init));
  heatloss::FitConfig f;
  f.loss = to_cpp(c.loss);
  f.steps = c.steps;
  f.learning_rate = c.learning_rate;
  f.init = static_cast<heatloss::FitInit>(c.init);
  f.record_every = c.record_every;
  f.seed = c.seed;
  f.peak_window = c.peak_window;
  f.peak_threshold = c.peak_threshold;
  return f;
}

}  // namespace

extern "C" {

const char* hl_last_error(void) { return g_last_error.c_str(); }

const char* hl_status_name(hl_status status) {
  switch (status) {
    case HL_OK: return "OK";
    case HL_ERR_INVALID_ARGUMENT: return "INVALID_ARGUMENT";
    case HL_ERR_DIM_MISMATCH: return "DIM_MISMATCH";
    case HL_ERR_SCHEMA: return "SCHEMA_VIOLATION";
    case HL_ERR_IO: return "IO_ERROR";
    case HL_ERR_INVALID_GT: return "INVALID_GROUND_TRUTH";
    case HL_ERR_INFEASIBLE: return "INFEASIBLE_SYNTH";
    case HL_ERR_NON_FINITE: return "NON_FINITE_LOSS";
    case HL_ERR_INTERNAL: return "INTERNAL";
  }
  return "INTERNAL";
}

void hl_string_free(char* s) { std::free(s); }

const char* hl_version(void) { return "0.1.0"; }

hl_sigma_params hl_sigma_params_default(void) {
  const heatloss::SigmaParams s;
  return {s.eta, s.eps_sigma};
}

hl_loss_config hl_loss_config_default(hl_variant variant) {
  heatloss::LossConfig c;
  c.variant = static_cast<heatloss::LossVariant>(variant);
  return to_c(c);
}

hl_synth_params hl_synth_params_default(void) {
  const heatloss::SynthParams p;
  return {p.seed, p.width, p.height, p.n_heads, p.min_side, p.max_side, p.min_center_gap};
}

hl_fit_config hl_fit_config_default(void) {
  const heatloss::FitConfig f;
  return {to_c(f.loss), f.steps, f.learning_rate, static_cast<int>(f.init), f.record_every,
          f.seed, f.peak_window, f.peak_threshold};
}

const char* hl_variant_name(int variant) {
  if (variant < HL_FOCAL_SCALAR || variant > HL_MASK_FOCAL_POLY1) return "UNKNOWN";
  return heatloss::variant_name(static_cast<heatloss::LossVariant>(variant)).data();
}

hl_status hl_variant_parse(const char* name, int* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    const auto v = heatloss::parse_variant(name);
    if (!v) heatloss::fail(ErrorCode::kInvalidArgument, std::string("unknown loss variant \"") + name + "\"");
    *out = static_cast<int>(*v);
  });
}

hl_status hl_fit_init_parse(const char* name, int* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    const auto v = heatloss::parse_fit_init(name);
    if (!v) heatloss::fail(ErrorCode::kInvalidArgument, std::string("unknown fit init \"") + name + "\"");
    *out = static_cast<int>(*v);
  });
}

hl_status hl_grid_create(int width, int height, const double* values, hl_grid** out) {
  return guarded([&] {
    need(out, "out");
    heatloss::Grid g(width, height, 0.0);
    if (values != nullptr) std::copy(values, values + g.size(), g.values().begin());
    *out = new hl_grid{std::move(g)};
  });
}

void hl_grid_destroy(hl_grid* grid) { delete grid; }
int hl_grid_width(const hl_grid* grid) { return grid ? grid->grid.width() : 0; }
int hl_grid_height(const hl_grid* grid) { return grid ? grid->grid.height() : 0; }
const double* hl_grid_data(const hl_grid* grid) {
  return grid ? grid->grid.values().data() : nullptr;
}

hl_status hl_grid_load(const char* path, hl_grid** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new hl_grid{heatloss::io::read_grid(path)};
  });
}

hl_status hl_grid_save(const hl_grid* grid, const char* path) {
  return guarded([&] {
    need(grid, "grid");
    need(path, "path");
    heatloss::io::write_grid(grid->grid, path);
  });
}

hl_status hl_grid_save_csv(const hl_grid* grid, const char* path) {
  return guarded([&] {
    need(grid, "grid");
    need(path, "path");
    heatloss::io::write_grid_csv(grid->grid, path);
  });
}

hl_status hl_scene_create(int width, int height, hl_scene** out) {
  return guarded([&] {
    need(out, "out");
    heatloss::SceneAnnotation s{width, height, {}};
    s.validate();
    *out = new hl_scene{std::move(s)};
  });
}

hl_status hl_scene_add_box(hl_scene* scene, const hl_box* box) {
  return guarded([&] {
    need(scene, "scene");
    need(box, "box");
    heatloss::SceneAnnotation candidate = scene->scene;
    candidate.boxes.push_back(to_cpp(*box));
    candidate.validate();
    scene->scene = std::move(candidate);
  });
}

void hl_scene_destroy(hl_scene* scene) { delete scene; }
int hl_scene_width(const hl_scene* scene) { return scene ? scene->scene.width : 0; }
int hl_scene_height(const hl_scene* scene) { return scene ? scene->scene.height : 0; }
size_t hl_scene_box_count(const hl_scene* scene) { return scene ? scene->scene.boxes.size() : 0; }

hl_status hl_scene_get_box(const hl_scene* scene, size_t index, hl_box* out) {
  return guarded([&] {
    need(scene, "scene");
    need(out, "out");
    if (index >= scene->scene.boxes.size())
      heatloss::fail(ErrorCode::kInvalidArgument, "box index out of range");
    const auto& b = scene->scene.boxes[index];
    *out = {b.cx, b.cy, b.w, b.h};
  });
}

hl_status hl_scene_load(const char* path, hl_scene** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new hl_scene{heatloss::io::scene_from_json(heatloss::io::read_json(path))};
  });
}

hl_status hl_scene_save(const hl_scene* scene, const char* path) {
  return guarded([&] {
    need(scene, "scene");
    need(path, "path");
    heatloss::io::write_text(path, heatloss::io::dump_json(heatloss::io::scene_to_json(scene->scene)));
  });
}

hl_status hl_scene_to_json(const hl_scene* scene, char** out) {
  return guarded([&] {
    need(scene, "scene");
    need(out, "out");
    *out = dup_string(heatloss::io::dump_json(heatloss::io::scene_to_json(scene->scene)));
  });
}

hl_status hl_compute_sigma(const hl_box* box, const hl_sigma_params* params, double* out) {
  return guarded([&] {
    need(box, "box");
    need(params, "params");
    need(out, "out");
    *out = heatloss::compute_sigma(to_cpp(*box), to_cpp(*params));
  });
}

hl_status hl_render_heatmap(const hl_scene* scene, const hl_sigma_params* params, int stride,
                            hl_grid** out) {
  return guarded([&] {
    need(scene, "scene");
    need(params, "params");
    need(out, "out");
    *out = new hl_grid{heatloss::render_heatmap(scene->scene, to_cpp(*params), stride)};
  });
}

hl_status hl_render_mask(const hl_scene* scene, int stride, hl_grid** out) {
  return guarded([&] {
    need(scene, "scene");
    need(out, "out");
    *out = new hl_grid{heatloss::render_mask(scene->scene, stride)};
  });
}

hl_status hl_render_binary_map(const hl_scene* scene, int stride, hl_grid** out) {
  return guarded([&] {
    need(scene, "scene");
    need(out, "out");
    *out = new hl_grid{heatloss::render_binary_map(scene->scene, stride)};
  });
}

hl_status hl_anchor_set_load(const char* path, hl_anchor_set** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new hl_anchor_set{heatloss::io::anchors_from_json(heatloss::io::read_json(path))};
  });
}

void hl_anchor_set_destroy(hl_anchor_set* anchors) { delete anchors; }

hl_status hl_point_list_load(const char* path, hl_point_list** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new hl_point_list{heatloss::io::points_from_json(heatloss::io::read_json(path))};
  });
}

void hl_point_list_destroy(hl_point_list* points) { delete points; }

hl_status hl_interpolate_boxes(const hl_anchor_set* anchors, const hl_point_list* points,
                               int width, int height, hl_scene** out) {
  return guarded([&] {
    need(anchors, "anchors");
    need(points, "points");
    need(out, "out");
    heatloss::SceneAnnotation s{width, height,
                                heatloss::interpolate_boxes(anchors->anchors, points->points)};
    s.validate();
    *out = new hl_scene{std::move(s)};
  });
}

hl_status hl_loss_config_load(const char* path, hl_loss_config* out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = to_c(heatloss::io::loss_config_from_json(heatloss::io::read_json(path)));
  });
}

hl_status hl_loss_config_to_json(const hl_loss_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = dup_string(heatloss::io::dump_json(heatloss::io::loss_config_to_json(to_cpp(*cfg))));
  });
}

hl_status hl_focal_scalar(double p, int c, double gamma, double clamp, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = heatloss::focal_scalar({p, c}, gamma, clamp);
  });
}

hl_status hl_gt_create(const hl_grid* heatmap, const hl_grid* mask, int n_objects, hl_gt** out) {
  return guarded([&] {
    need(heatmap, "heatmap");
    need(out, "out");
    heatloss::GroundTruthBundle gt{heatmap->grid, mask ? mask->grid : heatloss::Grid{}, n_objects};
    if (!gt.mask.empty() && !gt.mask.same_shape(gt.heatmap))
      heatloss::fail(ErrorCode::kDimMismatch, "ground truth mask and heatmap dimensions differ");
    if (n_objects < 0) heatloss::fail(ErrorCode::kInvalidGroundTruth, "n_objects must be >= 0");
    *out = new hl_gt{gt, {gt.heatmap}, {gt.mask}};
  });
}

hl_status hl_gt_from_scene(const hl_scene* scene, const hl_sigma_params* sigma, int variant,
                           int stride, hl_gt** out) {
  return guarded([&] {
    need(scene, "scene");
    need(sigma, "sigma");
    need(out, "out");
    auto gt = heatloss::make_ground_truth(scene->scene, to_cpp(*sigma), to_variant(variant), stride);
    *out = new hl_gt{gt, {gt.heatmap}, {gt.mask}};
  });
}

void hl_gt_destroy(hl_gt* gt) { delete gt; }
const hl_grid* hl_gt_heatmap(const hl_gt* gt) { return gt ? &gt->heatmap : nullptr; }
const hl_grid* hl_gt_mask(const hl_gt* gt) {
  return gt && !gt->mask.grid.empty() ? &gt->mask : nullptr;
}
int hl_gt_n_objects(const hl_gt* gt) { return gt ? gt->gt.n_objects : 0; }

hl_status hl_loss_eval(const hl_grid* pred, const hl_gt* gt, const hl_loss_config* cfg,
                       double* value, hl_grid** grad_out, int* degenerate_n) {
  return guarded([&] {
    need(pred, "pred");
    need(gt, "gt");
    need(cfg, "cfg");
    need(value, "value");
    auto r = heatloss::loss_with_grad(pred->grid, gt->gt, to_cpp(*cfg));
    *value = r.value;
    if (degenerate_n) *degenerate_n = r.degenerate_n ? 1 : 0;
    if (grad_out) *grad_out = new hl_grid{std::move(r.grad)};
  });
}

hl_status hl_grad_check(int variant, int instances, int size, uint64_t seed,
                        double* max_deviation) {
  return guarded([&] {
    need(max_deviation, "max_deviation");
    *max_deviation = heatloss::grad_check(to_variant(variant), instances, size, seed).max_deviation;
  });
}

double hl_grad_check_tolerance(void) { return heatloss::kGradCheckTolerance; }

hl_status hl_extract_peaks(const hl_grid* heatmap, int window, double threshold,
                           hl_peak_set** out) {
  return guarded([&] {
    need(heatmap, "heatmap");
    need(out, "out");
    *out = new hl_peak_set{heatloss::extract_peaks(heatmap->grid, window, threshold)};
  });
}

void hl_peak_set_destroy(hl_peak_set* peaks) { delete peaks; }
size_t hl_peak_set_size(const hl_peak_set* peaks) { return peaks ? peaks->peaks.peaks.size() : 0; }

hl_status hl_peak_set_get(const hl_peak_set* peaks, size_t index, int* x, int* y, double* score) {
  return guarded([&] {
    need(peaks, "peaks");
    if (index >= peaks->peaks.peaks.size())
      heatloss::fail(ErrorCode::kInvalidArgument, "peak index out of range");
    const auto& p = peaks->peaks.peaks[index];
    if (x) *x = p.x;
    if (y) *y = p.y;
    if (score) *score = p.score;
  });
}

hl_status hl_peak_set_to_json(const hl_peak_set* peaks, char** out) {
  return guarded([&] {
    need(peaks, "peaks");
    need(out, "out");
    *out = dup_string(heatloss::io::dump_json(heatloss::io::peaks_to_json(peaks->peaks)));
  });
}

hl_status hl_count_image(const hl_grid* heatmap, int window, double threshold, int* out) {
  return guarded([&] {
    need(heatmap, "heatmap");
    need(out, "out");
    *out = heatloss::count_image(heatmap->grid, window, threshold);
  });
}

hl_status hl_match_localizations(const hl_peak_set* peaks, const hl_scene* scene,
                                 double radius_factor, int stride, int* matched, int* missed,
                                 int* spurious) {
  return guarded([&] {
    need(peaks, "peaks");
    need(scene, "scene");
    const auto m = heatloss::match_localizations(peaks->peaks, scene->scene, radius_factor, stride);
    if (matched) *matched = m.matched;
    if (missed) *missed = m.missed;
    if (spurious) *spurious = m.spurious;
  });
}

hl_status hl_compute_metrics(const int* predicted, const int* truth, size_t m,
                             hl_count_report** out) {
  return guarded([&] {
    need(out, "out");
    if (m > 0) {
      need(predicted, "predicted");
      need(truth, "truth");
    }
    std::vector<heatloss::CountPair> pairs(m);
    for (size_t i = 0; i < m; ++i) pairs[i] = {predicted[i], truth[i]};
    *out = new hl_count_report{heatloss::compute_metrics(pairs)};
  });
}

hl_status hl_count_report_from_file(const char* path, hl_count_report** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    const auto pairs = heatloss::io::count_pairs_from_json(heatloss::io::read_json(path));
    *out = new hl_count_report{heatloss::compute_metrics(pairs)};
  });
}

void hl_count_report_destroy(hl_count_report* report) { delete report; }
double hl_count_report_mae(const hl_count_report* report) { return report ? report->report.mae : 0.0; }
double hl_count_report_rmse(const hl_count_report* report) { return report ? report->report.rmse : 0.0; }
int hl_count_report_m(const hl_count_report* report) { return report ? report->report.m : 0; }

hl_status hl_count_report_to_json(const hl_count_report* report, char** out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    *out = dup_string(heatloss::io::dump_json(heatloss::io::count_report_to_json(report->report)));
  });
}

hl_status hl_generate_scene(const hl_synth_params* params, hl_scene** out) {
  return guarded([&] {
    need(params, "params");
    need(out, "out");
    heatloss::SynthParams p;
    p.seed = params->seed;
    p.width = params->width;
    p.height = params->height;
    p.n_heads = params->n_heads;
    p.min_side = params->min_side;
    p.max_side = params->max_side;
    p.min_center_gap = params->min_center_gap;
    *out = new hl_scene{heatloss::generate_scene(p)};
  });
}

hl_status hl_fit_direct(const hl_scene* scene, const hl_sigma_params* sigma,
                        const hl_fit_config* cfg, hl_fit_trace** out) {
  return guarded([&] {
    need(scene, "scene");
    need(sigma, "sigma");
    need(cfg, "cfg");
    need(out, "out");
    auto trace = heatloss::fit_direct(scene->scene, to_cpp(*sigma), to_cpp(*cfg));
    hl_grid pred{trace.final_pred};
    *out = new hl_fit_trace{std::move(trace), std::move(pred)};
  });
}

void hl_fit_trace_destroy(hl_fit_trace* trace) { delete trace; }
size_t hl_fit_trace_length(const hl_fit_trace* trace) { return trace ? trace->trace.losses.size() : 0; }

hl_status hl_fit_trace_get(const hl_fit_trace* trace, size_t index, int* step, double* loss) {
  return guarded([&] {
    need(trace, "trace");
    if (index >= trace->trace.losses.size())
      heatloss::fail(ErrorCode::kInvalidArgument, "trace index out of range");
    if (step) *step = trace->trace.losses[index].first;
    if (loss) *loss = trace->trace.losses[index].second;
  });
}

double hl_fit_trace_final_loss(const hl_fit_trace* trace) { return trace ? trace->trace.final_loss : 0.0; }
int hl_fit_trace_final_count(const hl_fit_trace* trace) { return trace ? trace->trace.final_count : 0; }
int hl_fit_trace_gt_count(const hl_fit_trace* trace) { return trace ? trace->trace.gt_count : 0; }
const hl_grid* hl_fit_trace_final_pred(const hl_fit_trace* trace) {
  return trace ? &trace->final_pred : nullptr;
}

hl_status hl_fit_trace_save_csv(const hl_fit_trace* trace, const char* path) {
  return guarded([&] {
    need(trace, "trace");
    need(path, "path");
    heatloss::io::write_text(path, heatloss::io::fit_trace_csv(trace->trace));
  });
}

hl_status hl_experiment_run(const char* config_path, uint64_t seed, int threads, char** out) {
  return guarded([&] {
    need(config_path, "config_path");
    need(out, "out");
    const std::filesystem::path path(config_path);
    const auto cfg = heatloss::io::experiment_from_json(heatloss::io::read_json(path),
                                                        path.parent_path(), seed);
    const auto results =
        heatloss::run_desk_experiment(cfg.scenes, cfg.variants, cfg.sigma, cfg.fit, threads);
    *out = dup_string(heatloss::io::dump_json(heatloss::io::experiment_results_to_json(results)));
  });
}

}  // extern "C"
