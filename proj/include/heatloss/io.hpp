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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "heatloss/annotations.hpp"
#include "heatloss/counting.hpp"
#include "heatloss/loss.hpp"
#include "heatloss/synth.hpp"

namespace heatloss::io {

using nlohmann::json;

// Grid dump: ASCII line "GRID <width> <height>\n" followed by width*height
// little-endian IEEE-754 float32 values, row-major. Values are narrowed to
// float on write.
std::string encode_grid(const Grid& grid);
Grid decode_grid(const std::string& bytes);
void write_grid(const Grid& grid, const std::filesystem::path& path);
Grid read_grid(const std::filesystem::path& path);

/// One line per grid row, comma separated, 17 significant digits.
std::string grid_to_csv(const Grid& grid);
void write_grid_csv(const Grid& grid, const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
json read_json(const std::filesystem::path& path);
/// Pretty-printed, newline terminated.
std::string dump_json(const json& j);

json box_to_json(const BoxAnnotation& b);
BoxAnnotation box_from_json(const json& j);

json scene_to_json(const SceneAnnotation& scene);
SceneAnnotation scene_from_json(const json& j);

/// {"anchors": [box, ...]}
AnchorSet anchors_from_json(const json& j);
/// {"points": [[x, y], ...]}
std::vector<Point> points_from_json(const json& j);

json loss_config_to_json(const LossConfig& cfg);
/// "variant" is required; the remaining fields fall back to LossConfig defaults.
LossConfig loss_config_from_json(const json& j);

json sigma_to_json(const SigmaParams& s);
SigmaParams sigma_from_json(const json& j);

json peaks_to_json(const PeakSet& peaks);

json count_report_to_json(const CountReport& report);
/// Reads {"per_image": [{"pred": int, "truth": int}, ...]}; other keys are ignored.
std::vector<CountPair> count_pairs_from_json(const json& j);

/// "step,loss" header then one row per recorded step.
std::string fit_trace_csv(const FitTrace& trace);

json synth_params_to_json(const SynthParams& p);
SynthParams synth_params_from_json(const json& j, std::uint64_t default_seed);

struct ExperimentConfig {
  std::vector<SceneAnnotation> scenes;
  std::vector<LossConfig> variants;
  SigmaParams sigma;
  FitConfig fit;
};

/// Scenes may be inline annotations, paths to annotation files (relative to
/// base_dir) or {"synth": {...}} blocks; a synth block without its own seed
/// uses base_seed + its index in the scene list.
ExperimentConfig experiment_from_json(const json& j, const std::filesystem::path& base_dir,
                                      std::uint64_t base_seed);

json experiment_results_to_json(const std::vector<VariantReport>& results);

}  // namespace heatloss::io
