#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glyphlab/concept_world.hpp"
#include "glyphlab/erasure.hpp"
#include "glyphlab/pipeline.hpp"

namespace glyphlab {

struct ScheduleParams {
  int T = 100;
  double beta_start = 1e-4;
  double beta_end = 0.02;
};

/// Full experiment configuration. Defaults carry the method's constants:
/// T = 100, t_f = 70, t_can = 35, K = 100, J = 3, N = 1.
struct ExperimentConfig {
  std::string world_path;  // empty selects the built-in preset
  ScheduleParams schedule;
  ErasureSpec erasure{.method = "redirect", .target = "ruby_disk"};
  PipelineParams pipeline;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::string knowledge_source = "table";  // table | http
  std::string knowledge_url;
  int bench_samples = 200;
  bool bench_count_failures_as_misses = true;

  void validate() const;  // range checks with field paths
};

/// Parses and validates a JSON config file. Unknown keys are rejected with
/// their full path; an empty file yields the defaults. Parse errors carry
/// line information from the JSON parser.
ExperimentConfig load_config(const std::string& path);

ExperimentConfig config_from_json_text(const std::string& text);

/// Canonical JSON snapshot of a config (defaults made explicit).
std::string config_to_json_text(const ExperimentConfig& config);

/// World description files: grid, background and the concept list.
ConceptWorld load_world(const std::string& path);
GlyphWorldSpec load_world_spec(const std::string& path);
void save_world_spec(const GlyphWorldSpec& spec, const std::string& path);

}  // namespace glyphlab
