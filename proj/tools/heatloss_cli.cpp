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

// heatloss command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "heatloss/heatloss.h"

namespace {

using nlohmann::json;

// Thrown on any failing C call; carries the status so main can report it.
struct ApiFailure {
  std::string code;
  std::string message;
};

void check(hl_status s) {
  if (s != HL_OK) throw ApiFailure{hl_status_name(s), hl_last_error()};
}

[[noreturn]] void usage_failure(const std::string& message) {
  throw ApiFailure{"USAGE_ERROR", message};
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using GridPtr = std::unique_ptr<hl_grid, Deleter<hl_grid, hl_grid_destroy>>;
using ScenePtr = std::unique_ptr<hl_scene, Deleter<hl_scene, hl_scene_destroy>>;
using GtPtr = std::unique_ptr<hl_gt, Deleter<hl_gt, hl_gt_destroy>>;
using PeaksPtr = std::unique_ptr<hl_peak_set, Deleter<hl_peak_set, hl_peak_set_destroy>>;
using ReportPtr = std::unique_ptr<hl_count_report, Deleter<hl_count_report, hl_count_report_destroy>>;
using TracePtr = std::unique_ptr<hl_fit_trace, Deleter<hl_fit_trace, hl_fit_trace_destroy>>;
using AnchorsPtr = std::unique_ptr<hl_anchor_set, Deleter<hl_anchor_set, hl_anchor_set_destroy>>;
using PointsPtr = std::unique_ptr<hl_point_list, Deleter<hl_point_list, hl_point_list_destroy>>;

std::string take_string(char* s) {
  std::string out(s);
  hl_string_free(s);
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ApiFailure{"IO_ERROR", "cannot open " + path + " for writing"};
  out << text;
  if (!out) throw ApiFailure{"IO_ERROR", "failed writing " + path};
}

// Writes to `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty())
    std::cout << text;
  else
    write_file(path, text);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

ScenePtr load_scene(const std::string& path) {
  hl_scene* s = nullptr;
  check(hl_scene_load(path.c_str(), &s));
  return ScenePtr(s);
}

GridPtr load_grid(const std::string& path) {
  hl_grid* g = nullptr;
  check(hl_grid_load(path.c_str(), &g));
  return GridPtr(g);
}

struct SigmaFlags {
  double eta = hl_sigma_params_default().eta;
  double eps_sigma = hl_sigma_params_default().eps_sigma;

  void add(CLI::App* app) {
    app->add_option("--eta", eta, "small-object boost strength")->capture_default_str();
    app->add_option("--eps-sigma", eps_sigma, "sigma divisor")->capture_default_str();
  }
  hl_sigma_params params() const { return {eta, eps_sigma}; }
};

// Either --loss-config FILE or --variant NAME plus individual overrides.
struct LossFlags {
  std::string config_path;
  std::string variant;
  std::optional<double> alpha, beta, gamma, eps1, clamp;

  void add(CLI::App* app, bool variant_required_without_config = true) {
    auto* cfg = app->add_option("--loss-config", config_path, "loss config JSON");
    auto* var = app->add_option("--variant", variant,
                                "FOCAL_SCALAR, ALPHA_FOCAL, HEATMAP_FOCAL, MASK_FOCAL, "
                                "POLY1_PIXELWISE or MASK_FOCAL_POLY1");
    cfg->excludes(var);
    var->excludes(cfg);
    app->add_option("--alpha", alpha);
    app->add_option("--beta", beta);
    app->add_option("--gamma", gamma);
    app->add_option("--eps1", eps1, "poly-1 perturbation coefficient");
    app->add_option("--clamp", clamp, "prediction clamp");
    required_ = variant_required_without_config;
  }

  hl_loss_config resolve() const {
    hl_loss_config cfg{};
    if (!config_path.empty()) {
      check(hl_loss_config_load(config_path.c_str(), &cfg));
    } else if (!variant.empty()) {
      int v = 0;
      check(hl_variant_parse(variant.c_str(), &v));
      cfg = hl_loss_config_default(static_cast<hl_variant>(v));
    } else if (required_) {
      usage_failure("one of --loss-config or --variant is required");
    } else {
      cfg = hl_loss_config_default(HL_MASK_FOCAL);
    }
    if (alpha) cfg.alpha = *alpha;
    if (beta) cfg.beta = *beta;
    if (gamma) cfg.gamma = *gamma;
    if (eps1) cfg.eps1 = *eps1;
    if (clamp) cfg.clamp = *clamp;
    return cfg;
  }

 private:
  bool required_ = true;
};

struct SynthFlags {
  hl_synth_params p = hl_synth_params_default();

  void add(CLI::App* app) {
    app->add_option("--width", p.width)->capture_default_str();
    app->add_option("--height", p.height)->capture_default_str();
    app->add_option("--n-heads", p.n_heads)->capture_default_str();
    app->add_option("--min-side", p.min_side)->capture_default_str();
    app->add_option("--max-side", p.max_side)->capture_default_str();
    app->add_option("--min-gap", p.min_center_gap, "minimum center distance")->capture_default_str();
  }
};

int hardware_threads() {
  if (const char* env = std::getenv("HEATLOSS_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    usage_failure(std::string("HEATLOSS_THREADS must be a positive integer, got \"") + env + "\"");
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

json config_json(const hl_loss_config& cfg) {
  char* s = nullptr;
  check(hl_loss_config_to_json(&cfg, &s));
  return json::parse(take_string(s));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heatloss: mask focal loss toolkit"};
  app.require_subcommand(1);

  // render-gt
  auto* render = app.add_subcommand("render-gt", "annotation JSON -> heatmap, mask and binary grids");
  std::string render_annotation, render_prefix;
  SigmaFlags render_sigma;
  int render_stride = 1;
  bool render_csv = false;
  render->add_option("--annotation", render_annotation)->required();
  render->add_option("--out-prefix", render_prefix, "writes <prefix>.{heatmap,mask,binary}.grid")
      ->required();
  render->add_option("--stride", render_stride)->capture_default_str();
  render->add_flag("--csv", render_csv, "also write CSV exports");
  render_sigma.add(render);

  // interpolate
  auto* interp = app.add_subcommand("interpolate", "anchors + center points -> annotation JSON");
  std::string interp_anchors, interp_points, interp_out;
  int interp_width = 0, interp_height = 0;
  interp->add_option("--anchors", interp_anchors)->required();
  interp->add_option("--points", interp_points)->required();
  interp->add_option("--width", interp_width)->required();
  interp->add_option("--height", interp_height)->required();
  interp->add_option("--out", interp_out, "annotation JSON (stdout if omitted)");

  // eval-loss
  auto* eval = app.add_subcommand("eval-loss", "prediction grid + ground truth -> loss report");
  std::string eval_pred, eval_annotation, eval_gt_heatmap, eval_gt_mask, eval_out, eval_grad;
  int eval_n = -1, eval_stride = 1;
  LossFlags eval_loss;
  SigmaFlags eval_sigma;
  eval->add_option("--pred", eval_pred)->required();
  auto* eval_ann_opt = eval->add_option("--annotation", eval_annotation, "build ground truth from an annotation");
  auto* eval_hm_opt = eval->add_option("--gt-heatmap", eval_gt_heatmap);
  eval->add_option("--gt-mask", eval_gt_mask)->needs(eval_hm_opt);
  eval->add_option("--n-objects", eval_n)->needs(eval_hm_opt);
  eval->add_option("--stride", eval_stride)->capture_default_str()->needs(eval_ann_opt);
  eval_ann_opt->excludes(eval_hm_opt);
  eval->add_option("--out", eval_out, "report JSON (stdout if omitted)");
  eval->add_option("--grad-out", eval_grad, "gradient grid dump");
  eval_loss.add(eval);
  eval_sigma.add(eval);

  // grad-check
  auto* gcheck = app.add_subcommand("grad-check", "finite-difference check of analytic gradients");
  std::string gc_variant, gc_out;
  int gc_instances = 50, gc_size = 8;
  std::uint64_t gc_seed = 0;
  gcheck->add_option("--variant", gc_variant)->required();
  gcheck->add_option("--instances", gc_instances)->capture_default_str();
  gcheck->add_option("--size", gc_size)->capture_default_str();
  gcheck->add_option("--seed", gc_seed)->required();
  gcheck->add_option("--out", gc_out);

  // peaks
  auto* peaks = app.add_subcommand("peaks", "heatmap grid -> peak set JSON");
  std::string peaks_heatmap, peaks_out, peaks_annotation;
  int peaks_window = 3, peaks_stride = 1;
  double peaks_threshold = 0.3, peaks_radius = 0.5;
  peaks->add_option("--heatmap", peaks_heatmap)->required();
  peaks->add_option("--window", peaks_window)->capture_default_str();
  peaks->add_option("--threshold", peaks_threshold)->capture_default_str();
  auto* peaks_ann_opt = peaks->add_option("--annotation", peaks_annotation,
                                          "also match peaks against these boxes");
  peaks->add_option("--radius-factor", peaks_radius)->capture_default_str()->needs(peaks_ann_opt);
  peaks->add_option("--stride", peaks_stride)->capture_default_str()->needs(peaks_ann_opt);
  peaks->add_option("--out", peaks_out);

  // eval-count
  auto* ecount = app.add_subcommand("eval-count", "per-image counts -> MAE/RMSE report");
  std::string ec_in, ec_out;
  ecount->add_option("--counts", ec_in, "{\"per_image\": [{\"pred\": n, \"truth\": n}, ...]}")
      ->required();
  ecount->add_option("--out", ec_out);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene annotation");
  SynthFlags synth_flags;
  std::string synth_out;
  synth->add_option("--seed", synth_flags.p.seed)->required();
  synth_flags.add(synth);
  synth->add_option("--out", synth_out);

  // fit
  auto* fit = app.add_subcommand("fit", "gradient-descent fit of a free prediction grid");
  SynthFlags fit_synth;
  LossFlags fit_loss;
  SigmaFlags fit_sigma;
  hl_fit_config fit_cfg = hl_fit_config_default();
  std::string fit_annotation, fit_prefix, fit_init = "UNIFORM_HALF";
  fit->add_option("--seed", fit_cfg.seed)->required();
  fit->add_option("--annotation", fit_annotation, "scene to fit; synthesised from --seed if omitted");
  fit->add_option("--steps", fit_cfg.steps)->capture_default_str();
  fit->add_option("--lr", fit_cfg.learning_rate)->capture_default_str();
  fit->add_option("--init", fit_init, "UNIFORM_HALF, ZEROS_LOGIT or SEEDED_NOISE")->capture_default_str();
  fit->add_option("--record-every", fit_cfg.record_every)->capture_default_str();
  fit->add_option("--window", fit_cfg.peak_window)->capture_default_str();
  fit->add_option("--threshold", fit_cfg.peak_threshold)->capture_default_str();
  fit->add_option("--out-prefix", fit_prefix, "writes <prefix>.trace.csv and <prefix>.pred.grid")
      ->required();
  fit_loss.add(fit);
  fit_sigma.add(fit);
  fit_synth.add(fit);

  // experiment
  auto* exper = app.add_subcommand("experiment", "fit scenes under several loss variants");
  std::string exp_config, exp_out;
  std::uint64_t exp_seed = 0;
  int exp_threads = 0;
  exper->add_option("--config", exp_config)->required();
  exper->add_option("--seed", exp_seed)->required();
  exper->add_option("--threads", exp_threads, "worker threads (default HEATLOSS_THREADS or all cores)");
  exper->add_option("--out", exp_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "USAGE_ERROR"}, {"message", e.what()}}.dump() << "\n";
    return 64;
  }

  try {
    if (*render) {
      auto scene = load_scene(render_annotation);
      const auto sigma = render_sigma.params();
      hl_grid *heat = nullptr, *mask = nullptr, *binary = nullptr;
      check(hl_render_heatmap(scene.get(), &sigma, render_stride, &heat));
      GridPtr heat_p(heat);
      check(hl_render_mask(scene.get(), render_stride, &mask));
      GridPtr mask_p(mask);
      check(hl_render_binary_map(scene.get(), render_stride, &binary));
      GridPtr binary_p(binary);
      json files = json::object();
      for (const auto& [name, grid] :
           {std::pair{"heatmap", heat}, std::pair{"mask", mask}, std::pair{"binary", binary}}) {
        const std::string path = render_prefix + "." + name + ".grid";
        check(hl_grid_save(grid, path.c_str()));
        files[name] = path;
        if (render_csv) {
          const std::string csv = render_prefix + "." + name + ".csv";
          check(hl_grid_save_csv(grid, csv.c_str()));
          files[std::string(name) + "_csv"] = csv;
        }
      }
      std::cout << dump({{"width", hl_grid_width(heat)}, {"height", hl_grid_height(heat)}, {"files", files}});
    } else if (*interp) {
      hl_anchor_set* a = nullptr;
      check(hl_anchor_set_load(interp_anchors.c_str(), &a));
      AnchorsPtr anchors(a);
      hl_point_list* p = nullptr;
      check(hl_point_list_load(interp_points.c_str(), &p));
      PointsPtr points(p);
      hl_scene* s = nullptr;
      check(hl_interpolate_boxes(anchors.get(), points.get(), interp_width, interp_height, &s));
      ScenePtr scene(s);
      char* text = nullptr;
      check(hl_scene_to_json(scene.get(), &text));
      emit(interp_out, take_string(text));
    } else if (*eval) {
      const hl_loss_config cfg = eval_loss.resolve();
      auto pred = load_grid(eval_pred);
      GtPtr gt;
      hl_gt* g = nullptr;
      if (!eval_annotation.empty()) {
        auto scene = load_scene(eval_annotation);
        const auto sigma = eval_sigma.params();
        check(hl_gt_from_scene(scene.get(), &sigma, cfg.variant, eval_stride, &g));
      } else if (!eval_gt_heatmap.empty()) {
        if (eval_n < 0) usage_failure("--n-objects is required with --gt-heatmap");
        auto heat = load_grid(eval_gt_heatmap);
        GridPtr mask;
        if (!eval_gt_mask.empty()) mask = load_grid(eval_gt_mask);
        check(hl_gt_create(heat.get(), mask.get(), eval_n, &g));
      } else {
        usage_failure("one of --annotation or --gt-heatmap is required");
      }
      gt.reset(g);
      double value = 0.0;
      int degenerate = 0;
      hl_grid* grad = nullptr;
      check(hl_loss_eval(pred.get(), gt.get(), &cfg, &value, &grad, &degenerate));
      GridPtr grad_p(grad);
      if (degenerate)
        std::cerr << json{{"warning", "ZERO_OBJECTS"},
                          {"message", "ground truth has no objects; normalised by 1"}}.dump()
                  << "\n";
      json report = {{"value", value}, {"grad_file", nullptr}};
      if (!eval_grad.empty()) {
        check(hl_grid_save(grad, eval_grad.c_str()));
        report["grad_file"] = eval_grad;
      }
      emit(eval_out, dump(report));
    } else if (*gcheck) {
      int v = 0;
      check(hl_variant_parse(gc_variant.c_str(), &v));
      double dev = 0.0;
      check(hl_grad_check(v, gc_instances, gc_size, gc_seed, &dev));
      const double tol = hl_grad_check_tolerance();
      const bool pass = dev <= tol;
      emit(gc_out, dump({{"variant", hl_variant_name(v)},
                         {"instances", gc_instances},
                         {"size", gc_size},
                         {"seed", gc_seed},
                         {"max_rel_deviation", dev},
                         {"tolerance", tol},
                         {"pass", pass}}));
      if (!pass) {
        std::cerr << json{{"error", "GRAD_CHECK_FAILED"},
                          {"message", "max relative deviation exceeds tolerance"}}.dump()
                  << "\n";
        return 1;
      }
    } else if (*peaks) {
      auto heat = load_grid(peaks_heatmap);
      hl_peak_set* ps = nullptr;
      check(hl_extract_peaks(heat.get(), peaks_window, peaks_threshold, &ps));
      PeaksPtr set(ps);
      char* text = nullptr;
      check(hl_peak_set_to_json(set.get(), &text));
      json out = json::parse(take_string(text));
      if (!peaks_annotation.empty()) {
        auto scene = load_scene(peaks_annotation);
        int matched = 0, missed = 0, spurious = 0;
        check(hl_match_localizations(set.get(), scene.get(), peaks_radius, peaks_stride, &matched,
                                     &missed, &spurious));
        out["match"] = {{"matched", matched}, {"missed", missed}, {"spurious", spurious}};
      }
      emit(peaks_out, dump(out));
    } else if (*ecount) {
      hl_count_report* r = nullptr;
      check(hl_count_report_from_file(ec_in.c_str(), &r));
      ReportPtr report(r);
      char* text = nullptr;
      check(hl_count_report_to_json(report.get(), &text));
      emit(ec_out, take_string(text));
    } else if (*synth) {
      hl_scene* s = nullptr;
      check(hl_generate_scene(&synth_flags.p, &s));
      ScenePtr scene(s);
      char* text = nullptr;
      check(hl_scene_to_json(scene.get(), &text));
      emit(synth_out, take_string(text));
    } else if (*fit) {
      fit_cfg.loss = fit_loss.resolve();
      check(hl_fit_init_parse(fit_init.c_str(), &fit_cfg.init));
      ScenePtr scene;
      if (!fit_annotation.empty()) {
        scene = load_scene(fit_annotation);
      } else {
        fit_synth.p.seed = fit_cfg.seed;
        hl_scene* s = nullptr;
        check(hl_generate_scene(&fit_synth.p, &s));
        scene.reset(s);
      }
      const auto sigma = fit_sigma.params();
      hl_fit_trace* t = nullptr;
      check(hl_fit_direct(scene.get(), &sigma, &fit_cfg, &t));
      TracePtr trace(t);
      const std::string csv = fit_prefix + ".trace.csv";
      const std::string grid = fit_prefix + ".pred.grid";
      check(hl_fit_trace_save_csv(trace.get(), csv.c_str()));
      check(hl_grid_save(hl_fit_trace_final_pred(trace.get()), grid.c_str()));
      double initial = 0.0;
      check(hl_fit_trace_get(trace.get(), 0, nullptr, &initial));
      std::cout << dump({{"loss", config_json(fit_cfg.loss)},
                         {"steps", fit_cfg.steps},
                         {"initial_loss", initial},
                         {"final_loss", hl_fit_trace_final_loss(trace.get())},
                         {"final_count", hl_fit_trace_final_count(trace.get())},
                         {"gt_count", hl_fit_trace_gt_count(trace.get())},
                         {"trace_file", csv},
                         {"pred_file", grid}});
    } else if (*exper) {
      const int threads = exp_threads > 0 ? exp_threads : hardware_threads();
      char* text = nullptr;
      check(hl_experiment_run(exp_config.c_str(), exp_seed, threads, &text));
      emit(exp_out, take_string(text));
    }
  } catch (const ApiFailure& f) {
    std::cerr << json{{"error", f.code}, {"message", f.message}}.dump() << "\n";
    return f.code == "USAGE_ERROR" ? 64 : 2;
  }
  return 0;
}
