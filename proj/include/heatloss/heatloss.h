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

/* C interface to the heatloss library.
 *
 * Every fallible call returns an hl_status; on failure a description is
 * available from hl_last_error() on the calling thread until its next call.
 * Objects behind opaque pointers are owned by the caller and released with
 * their matching *_destroy function. Strings returned through char** are
 * released with hl_string_free.
 */
#ifndef HEATLOSS_HEATLOSS_H_
#define HEATLOSS_HEATLOSS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HEATLOSS_BUILDING)
#    define HL_API __declspec(dllexport)
#  else
#    define HL_API __declspec(dllimport)
#  endif
#else
#  define HL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hl_status {
  HL_OK = 0,
  HL_ERR_INVALID_ARGUMENT = 1,
  HL_ERR_DIM_MISMATCH = 2,
  HL_ERR_SCHEMA = 3,
  HL_ERR_IO = 4,
  HL_ERR_INVALID_GT = 5,
  HL_ERR_INFEASIBLE = 6,
  HL_ERR_NON_FINITE = 7,
  HL_ERR_INTERNAL = 8
} hl_status;

typedef enum hl_variant {
  HL_FOCAL_SCALAR = 0,
  HL_ALPHA_FOCAL = 1,
  HL_HEATMAP_FOCAL = 2,
  HL_MASK_FOCAL = 3,
  HL_POLY1_PIXELWISE = 4,
  HL_MASK_FOCAL_POLY1 = 5
} hl_variant;

typedef enum hl_fit_init {
  HL_INIT_UNIFORM_HALF = 0,
  HL_INIT_ZEROS_LOGIT = 1,
  HL_INIT_SEEDED_NOISE = 2
} hl_fit_init;

typedef struct hl_box {
  double cx, cy, w, h;
} hl_box;

typedef struct hl_sigma_params {
  double eta;
  double eps_sigma;
} hl_sigma_params;

typedef struct hl_loss_config {
  int variant; /* hl_variant */
  double alpha, beta, gamma, eps1, clamp;
} hl_loss_config;

typedef struct hl_synth_params {
  uint64_t seed;
  int width, height, n_heads;
  double min_side, max_side, min_center_gap;
} hl_synth_params;

typedef struct hl_fit_config {
  hl_loss_config loss;
  int steps;
  double learning_rate;
  int init; /* hl_fit_init */
  int record_every;
  uint64_t seed;
  int peak_window;
  double peak_threshold;
} hl_fit_config;

typedef struct hl_grid hl_grid;
typedef struct hl_scene hl_scene;
typedef struct hl_anchor_set hl_anchor_set;
typedef struct hl_point_list hl_point_list;
typedef struct hl_gt hl_gt;
typedef struct hl_peak_set hl_peak_set;
typedef struct hl_count_report hl_count_report;
typedef struct hl_fit_trace hl_fit_trace;

/* errors and strings */
HL_API const char* hl_last_error(void);
HL_API const char* hl_status_name(hl_status status);
HL_API void hl_string_free(char* s);
HL_API const char* hl_version(void);

/* defaults */
HL_API hl_sigma_params hl_sigma_params_default(void);
HL_API hl_loss_config hl_loss_config_default(hl_variant variant);
HL_API hl_synth_params hl_synth_params_default(void);
HL_API hl_fit_config hl_fit_config_default(void);
HL_API const char* hl_variant_name(int variant);
HL_API hl_status hl_variant_parse(const char* name, int* out);
HL_API hl_status hl_fit_init_parse(const char* name, int* out);

/* grids */
HL_API hl_status hl_grid_create(int width, int height, const double* values, hl_grid** out);
HL_API void hl_grid_destroy(hl_grid* grid);
HL_API int hl_grid_width(const hl_grid* grid);
HL_API int hl_grid_height(const hl_grid* grid);
/* row-major, width*height values, valid until the grid is destroyed */
HL_API const double* hl_grid_data(const hl_grid* grid);
HL_API hl_status hl_grid_load(const char* path, hl_grid** out);
HL_API hl_status hl_grid_save(const hl_grid* grid, const char* path);
HL_API hl_status hl_grid_save_csv(const hl_grid* grid, const char* path);

/* annotations and ground truth */
HL_API hl_status hl_scene_create(int width, int height, hl_scene** out);
HL_API hl_status hl_scene_add_box(hl_scene* scene, const hl_box* box);
HL_API void hl_scene_destroy(hl_scene* scene);
HL_API int hl_scene_width(const hl_scene* scene);
HL_API int hl_scene_height(const hl_scene* scene);
HL_API size_t hl_scene_box_count(const hl_scene* scene);
HL_API hl_status hl_scene_get_box(const hl_scene* scene, size_t index, hl_box* out);
HL_API hl_status hl_scene_load(const char* path, hl_scene** out);
HL_API hl_status hl_scene_save(const hl_scene* scene, const char* path);
HL_API hl_status hl_scene_to_json(const hl_scene* scene, char** out);

HL_API hl_status hl_compute_sigma(const hl_box* box, const hl_sigma_params* params, double* out);
HL_API hl_status hl_render_heatmap(const hl_scene* scene, const hl_sigma_params* params,
                                   int stride, hl_grid** out);
HL_API hl_status hl_render_mask(const hl_scene* scene, int stride, hl_grid** out);
HL_API hl_status hl_render_binary_map(const hl_scene* scene, int stride, hl_grid** out);

HL_API hl_status hl_anchor_set_load(const char* path, hl_anchor_set** out);
HL_API void hl_anchor_set_destroy(hl_anchor_set* anchors);
HL_API hl_status hl_point_list_load(const char* path, hl_point_list** out);
HL_API void hl_point_list_destroy(hl_point_list* points);
/* boxes sized from the anchors, placed in a width x height scene */
HL_API hl_status hl_interpolate_boxes(const hl_anchor_set* anchors, const hl_point_list* points,
                                      int width, int height, hl_scene** out);

/* losses */
HL_API hl_status hl_loss_config_load(const char* path, hl_loss_config* out);
HL_API hl_status hl_loss_config_to_json(const hl_loss_config* cfg, char** out);
HL_API hl_status hl_focal_scalar(double p, int c, double gamma, double clamp, double* out);

/* takes copies of both grids; mask may be NULL for non-mask variants */
HL_API hl_status hl_gt_create(const hl_grid* heatmap, const hl_grid* mask, int n_objects,
                              hl_gt** out);
HL_API hl_status hl_gt_from_scene(const hl_scene* scene, const hl_sigma_params* sigma,
                                  int variant, int stride, hl_gt** out);
HL_API void hl_gt_destroy(hl_gt* gt);
HL_API const hl_grid* hl_gt_heatmap(const hl_gt* gt);
HL_API const hl_grid* hl_gt_mask(const hl_gt* gt);
HL_API int hl_gt_n_objects(const hl_gt* gt);

/* grad_out and degenerate_n are optional */
HL_API hl_status hl_loss_eval(const hl_grid* pred, const hl_gt* gt, const hl_loss_config* cfg,
                              double* value, hl_grid** grad_out, int* degenerate_n);
HL_API hl_status hl_grad_check(int variant, int instances, int size, uint64_t seed,
                               double* max_deviation);
HL_API double hl_grad_check_tolerance(void);

/* counting */
HL_API hl_status hl_extract_peaks(const hl_grid* heatmap, int window, double threshold,
                                  hl_peak_set** out);
HL_API void hl_peak_set_destroy(hl_peak_set* peaks);
HL_API size_t hl_peak_set_size(const hl_peak_set* peaks);
HL_API hl_status hl_peak_set_get(const hl_peak_set* peaks, size_t index, int* x, int* y,
                                 double* score);
HL_API hl_status hl_peak_set_to_json(const hl_peak_set* peaks, char** out);
HL_API hl_status hl_count_image(const hl_grid* heatmap, int window, double threshold, int* out);
HL_API hl_status hl_match_localizations(const hl_peak_set* peaks, const hl_scene* scene,
                                        double radius_factor, int stride, int* matched,
                                        int* missed, int* spurious);

HL_API hl_status hl_compute_metrics(const int* predicted, const int* truth, size_t m,
                                    hl_count_report** out);
/* reads {"per_image": [{"pred": n, "truth": n}, ...]} */
HL_API hl_status hl_count_report_from_file(const char* path, hl_count_report** out);
HL_API void hl_count_report_destroy(hl_count_report* report);
HL_API double hl_count_report_mae(const hl_count_report* report);
HL_API double hl_count_report_rmse(const hl_count_report* report);
HL_API int hl_count_report_m(const hl_count_report* report);
HL_API hl_status hl_count_report_to_json(const hl_count_report* report, char** out);

/* synthetic scenes and fitting */
HL_API hl_status hl_generate_scene(const hl_synth_params* params, hl_scene** out);
HL_API hl_status hl_fit_direct(const hl_scene* scene, const hl_sigma_params* sigma,
                               const hl_fit_config* cfg, hl_fit_trace** out);
HL_API void hl_fit_trace_destroy(hl_fit_trace* trace);
HL_API size_t hl_fit_trace_length(const hl_fit_trace* trace);
HL_API hl_status hl_fit_trace_get(const hl_fit_trace* trace, size_t index, int* step,
                                  double* loss);
HL_API double hl_fit_trace_final_loss(const hl_fit_trace* trace);
HL_API int hl_fit_trace_final_count(const hl_fit_trace* trace);
HL_API int hl_fit_trace_gt_count(const hl_fit_trace* trace);
/* borrowed, valid until the trace is destroyed */
HL_API const hl_grid* hl_fit_trace_final_pred(const hl_fit_trace* trace);
HL_API hl_status hl_fit_trace_save_csv(const hl_fit_trace* trace, const char* path);

/* runs an experiment config file; writes the results JSON to *out */
HL_API hl_status hl_experiment_run(const char* config_path, uint64_t seed, int threads,
                                   char** out);

#ifdef __cplusplus
}
#endif

#endif /* HEATLOSS_HEATLOSS_H_ */
