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

#include "heatloss/io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace heatloss::io {

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  fail(ErrorCode::kSchemaViolation, what);
}

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema_error(where + " must be a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) schema_error(where + " is missing \"" + key + "\"");
  return *it;
}

double number(const json& j, const char* key, const std::string& where) {
  const json& v = member(j, key, where);
  if (!v.is_number()) schema_error(where + "." + key + " must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

long long integer(const json& j, const char* key, const std::string& where) {
  const json& v = member(j, key, where);
  if (!v.is_number_integer()) schema_error(where + "." + key + " must be an integer");
  return v.get<long long>();
}

int int32(const json& j, const char* key, const std::string& where) {
  const long long v = integer(j, key, where);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    schema_error(where + "." + key + " is out of range");
  return static_cast<int>(v);
}

int int32_or(const json& j, const char* key, int fallback, const std::string& where) {
  return j.contains(key) ? int32(j, key, where) : fallback;
}

const json& array(const json& j, const char* key, const std::string& where) {
  const json& v = member(j, key, where);
  if (!v.is_array()) schema_error(where + "." + key + " must be an array");
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string encode_grid(const Grid& grid) {
  std::string out = "GRID " + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n";
  const std::size_t header = out.size();
  out.resize(header + 4 * grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(grid[i]));
    for (int b = 0; b < 4; ++b)
      out[header + 4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  }
  return out;
}

Grid decode_grid(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos || nl > 64) schema_error("grid file has no \"GRID w h\" header line");
  std::istringstream header(bytes.substr(0, nl));
  std::string magic;
  long long w = 0, h = 0;
  header >> magic >> w >> h;
  std::string trailing;
  if (!header || magic != "GRID" || (header >> trailing) || w < 1 || h < 1 ||
      w > std::numeric_limits<int>::max() || h > std::numeric_limits<int>::max())
    schema_error("malformed grid header \"" + bytes.substr(0, nl) + "\"");
  const auto count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - nl - 1 != 4 * count)
    schema_error("grid payload has " + std::to_string(bytes.size() - nl - 1) + " bytes, expected " +
                 std::to_string(4 * count));
  std::vector<double> values(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + nl + 1);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(p[4 * i + b]) << (8 * b);
    values[i] = std::bit_cast<float>(bits);
  }
  return Grid(static_cast<int>(w), static_cast<int>(h), std::move(values));
}

void write_grid(const Grid& grid, const std::filesystem::path& path) {
  write_text(path, encode_grid(grid));
}

Grid read_grid(const std::filesystem::path& path) { return decode_grid(read_text(path)); }

std::string grid_to_csv(const Grid& grid) {
  std::string out;
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      if (x) out += ',';
      out += format_double(grid(x, y));
    }
    out += '\n';
  }
  return out;
}

void write_grid_csv(const Grid& grid, const std::filesystem::path& path) {
  write_text(path, grid_to_csv(grid));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::kIoError, "failed reading " + path.string());
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::kIoError, "failed writing " + path.string());
}

json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error(path.string() + " is not valid JSON: " + e.what());
  }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json box_to_json(const BoxAnnotation& b) {
  return {{"cx", b.cx}, {"cy", b.cy}, {"w", b.w}, {"h", b.h}};
}

BoxAnnotation box_from_json(const json& j) {
  const std::string where = "box";
  return {number(j, "cx", where), number(j, "cy", where), number(j, "w", where),
          number(j, "h", where)};
}

json scene_to_json(const SceneAnnotation& scene) {
  json boxes = json::array();
  for (const auto& b : scene.boxes) boxes.push_back(box_to_json(b));
  return {{"width", scene.width}, {"height", scene.height}, {"boxes", boxes}};
}

SceneAnnotation scene_from_json(const json& j) {
  const std::string where = "annotation";
  SceneAnnotation scene;
  scene.width = int32(j, "width", where);
  scene.height = int32(j, "height", where);
  for (const auto& b : array(j, "boxes", where)) scene.boxes.push_back(box_from_json(b));
  try {
    scene.validate();
  } catch (const Error& e) {
    schema_error(std::string("annotation: ") + e.what());
  }
  return scene;
}

AnchorSet anchors_from_json(const json& j) {
  AnchorSet set;
  for (const auto& b : array(j, "anchors", "anchor file")) set.anchors.push_back(box_from_json(b));
  try {
    set.validate();
  } catch (const Error& e) {
    schema_error(std::string("anchor file: ") + e.what());
  }
  return set;
}

std::vector<Point> points_from_json(const json& j) {
  std::vector<Point> out;
  for (const auto& p : array(j, "points", "point file")) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      schema_error("point file: every point must be [x, y]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

json loss_config_to_json(const LossConfig& cfg) {
  return {{"variant", std::string(variant_name(cfg.variant))},
          {"alpha", cfg.alpha},
          {"beta", cfg.beta},
          {"gamma", cfg.gamma},
          {"eps1", cfg.eps1},
          {"clamp", cfg.clamp}};
}

LossConfig loss_config_from_json(const json& j) {
  const std::string where = "loss config";
  const json& v = member(j, "variant", where);
  if (!v.is_string()) schema_error("loss config.variant must be a string");
  const auto variant = parse_variant(v.get<std::string>());
  if (!variant) schema_error("unknown loss variant \"" + v.get<std::string>() + "\"");
  LossConfig cfg;
  cfg.variant = *variant;
  cfg.alpha = number_or(j, "alpha", cfg.alpha, where);
  cfg.beta = number_or(j, "beta", cfg.beta, where);
  cfg.gamma = number_or(j, "gamma", cfg.gamma, where);
  cfg.eps1 = number_or(j, "eps1", cfg.eps1, where);
  cfg.clamp = number_or(j, "clamp", cfg.clamp, where);
  try {
    cfg.validate();
  } catch (const Error& e) {
    schema_error(std::string("loss config: ") + e.what());
  }
  return cfg;
}

json sigma_to_json(const SigmaParams& s) { return {{"eta", s.eta}, {"eps_sigma", s.eps_sigma}}; }

SigmaParams sigma_from_json(const json& j) {
  const std::string where = "sigma";
  SigmaParams s;
  s.eta = number_or(j, "eta", s.eta, where);
  s.eps_sigma = number_or(j, "eps_sigma", s.eps_sigma, where);
  try {
    s.validate();
  } catch (const Error& e) {
    schema_error(std::string("sigma: ") + e.what());
  }
  return s;
}

json peaks_to_json(const PeakSet& peaks) {
  json arr = json::array();
  for (const auto& p : peaks.peaks) arr.push_back({{"x", p.x}, {"y", p.y}, {"score", p.score}});
  return {{"count", peaks.peaks.size()}, {"peaks", arr}};
}

json count_report_to_json(const CountReport& report) {
  json per = json::array();
  for (const auto& c : report.per_image) per.push_back({{"pred", c.predicted}, {"truth", c.truth}});
  return {{"m", report.m}, {"mae", report.mae}, {"rmse", report.rmse}, {"per_image", per}};
}

std::vector<CountPair> count_pairs_from_json(const json& j) {
  std::vector<CountPair> out;
  for (const auto& e : array(j, "per_image", "count file"))
    out.push_back({int32(e, "pred", "per_image entry"), int32(e, "truth", "per_image entry")});
  return out;
}

std::string fit_trace_csv(const FitTrace& trace) {
  std::string out = "step,loss\n";
  for (const auto& [step, loss] : trace.losses)
    out += std::to_string(step) + "," + format_double(loss) + "\n";
  return out;
}

json synth_params_to_json(const SynthParams& p) {
  return {{"seed", p.seed},
          {"width", p.width},
          {"height", p.height},
          {"n_heads", p.n_heads},
          {"min_side", p.min_side},
          {"max_side", p.max_side},
          {"min_center_gap", p.min_center_gap}};
}

SynthParams synth_params_from_json(const json& j, std::uint64_t default_seed) {
  const std::string where = "synth";
  SynthParams p;
  p.seed = default_seed;
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      schema_error("synth.seed must be a non-negative integer");
    p.seed = s.get<std::uint64_t>();
  }
  p.width = int32_or(j, "width", p.width, where);
  p.height = int32_or(j, "height", p.height, where);
  p.n_heads = int32_or(j, "n_heads", p.n_heads, where);
  p.min_side = number_or(j, "min_side", p.min_side, where);
  p.max_side = number_or(j, "max_side", p.max_side, where);
  p.min_center_gap = number_or(j, "min_center_gap", p.min_center_gap, where);
  try {
    p.validate();
  } catch (const Error& e) {
    schema_error(std::string("synth: ") + e.what());
  }
  return p;
}

ExperimentConfig experiment_from_json(const json& j, const std::filesystem::path& base_dir,
                                      std::uint64_t base_seed) {
  const std::string where = "experiment config";
  ExperimentConfig cfg;
  const json& scenes = array(j, "scenes", where);
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const json& s = scenes[i];
    if (s.is_string()) {
      cfg.scenes.push_back(scene_from_json(read_json(base_dir / s.get<std::string>())));
    } else if (s.is_object() && s.contains("synth")) {
      cfg.scenes.push_back(generate_scene(synth_params_from_json(s["synth"], base_seed + i)));
    } else {
      cfg.scenes.push_back(scene_from_json(s));
    }
  }
  for (const auto& v : array(j, "variants", where)) cfg.variants.push_back(loss_config_from_json(v));
  if (cfg.scenes.empty()) schema_error("experiment config lists no scenes");
  if (cfg.variants.empty()) schema_error("experiment config lists no variants");
  if (j.contains("sigma")) cfg.sigma = sigma_from_json(j["sigma"]);

  if (j.contains("fit")) {
    const json& f = j["fit"];
    const std::string fw = "fit";
    cfg.fit.steps = int32_or(f, "steps", cfg.fit.steps, fw);
    cfg.fit.learning_rate = number_or(f, "learning_rate", cfg.fit.learning_rate, fw);
    cfg.fit.record_every = int32_or(f, "record_every", cfg.fit.record_every, fw);
    cfg.fit.peak_window = int32_or(f, "peak_window", cfg.fit.peak_window, fw);
    cfg.fit.peak_threshold = number_or(f, "peak_threshold", cfg.fit.peak_threshold, fw);
    if (f.contains("init")) {
      const json& init = f["init"];
      const auto parsed = init.is_string() ? parse_fit_init(init.get<std::string>()) : std::nullopt;
      if (!parsed) schema_error("fit.init must be UNIFORM_HALF, ZEROS_LOGIT or SEEDED_NOISE");
      cfg.fit.init = *parsed;
    }
  }
  cfg.fit.seed = base_seed;
  cfg.fit.loss = cfg.variants.front();
  try {
    cfg.fit.validate();
  } catch (const Error& e) {
    schema_error(std::string("fit: ") + e.what());
  }
  return cfg;
}

json experiment_results_to_json(const std::vector<VariantReport>& results) {
  json arr = json::array();
  for (const auto& r : results)
    arr.push_back({{"variant", loss_config_to_json(r.variant)},
                   {"report", count_report_to_json(r.report)}});
  return {{"results", arr}};
}

}  // namespace heatloss::io
