#include "glyphlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace glyphlab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

void require_keys(const json& j, const std::string& path,
                  const std::set<std::string>& known) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool blank(const std::string& s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto bad = [](const std::string& field, const std::string& what) {
    throw std::invalid_argument("config: " + field + ": " + what);
  };
  if (schedule.T < 2) bad("schedule.T", "must be >= 2");
  if (!(schedule.beta_start > 0.0 && schedule.beta_start <= schedule.beta_end &&
        schedule.beta_end < 1.0)) {
    bad("schedule.beta_start/beta_end", "require 0 < beta_start <= beta_end < 1");
  }
  if (pipeline.K < 1) bad("pipeline.K", "must be >= 1");
  if (pipeline.J < 1) bad("pipeline.J", "must be >= 1");
  if (pipeline.N < 1) bad("pipeline.N", "must be >= 1");
  if (pipeline.t_f < 1 || pipeline.t_f > schedule.T) bad("pipeline.t_f", "must be in [1, T]");
  if (pipeline.t_can < 0 || pipeline.t_can > schedule.T) bad("pipeline.t_can", "must be in [0, T]");
  if (!(pipeline.w >= 1.0)) bad("w", "guidance scale must be >= 1");
  if (!(pipeline.lambda >= 0.0 && pipeline.lambda <= 1.0)) bad("lambda", "must be in [0, 1]");
  if (!(pipeline.zeta_min > 0.0 && pipeline.zeta_min <= pipeline.zeta_max)) {
    bad("pipeline.zeta_min/zeta_max", "require 0 < zeta_min <= zeta_max");
  }
  if (pipeline.workers < 1) bad("workers", "must be >= 1");
  if (erasure.method != "redirect" && erasure.method != "negguide" &&
      erasure.method != "redirect-syn") {
    bad("erasure.method", "must be redirect, negguide or redirect-syn");
  }
  if (erasure.target.empty()) bad("erasure.target", "must name a concept");
  if (!(erasure.eta >= 0.0)) bad("erasure.eta", "must be >= 0");
  if (erasure.t_low < 0 || erasure.t_low > schedule.T + 1) {
    bad("erasure.t_low", "must be in [0, T+1]");
  }
  if (knowledge_source != "table" && knowledge_source != "http") {
    bad("knowledge.source", "must be table or http");
  }
  if (knowledge_source == "http" && knowledge_url.empty()) {
    bad("knowledge.url", "required for the http source");
  }
  if (bench_samples < 1) bad("bench.samples_per_concept", "must be >= 1");
}

ExperimentConfig config_from_json_text(const std::string& text) {
  ExperimentConfig cfg;
  if (blank(text)) {
    cfg.pipeline.master_seed = cfg.seed;
    cfg.validate();
    return cfg;  // empty file: all defaults
  }
  const json j = json::parse(text);

  require_keys(j, "", {"world", "seed", "w", "output_dir", "workers", "schedule",
                       "erasure", "pipeline", "knowledge", "bench"});

  cfg.world_path = get_or<std::string>(j, "world", cfg.world_path);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  cfg.pipeline.w = get_or<double>(j, "w", cfg.pipeline.w);
  cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir);
  cfg.pipeline.workers = get_or<int>(j, "workers", cfg.pipeline.workers);

  if (j.contains("schedule")) {
    const auto& s = j["schedule"];
    require_keys(s, "schedule", {"T", "beta_start", "beta_end"});
    cfg.schedule.T = get_or<int>(s, "T", cfg.schedule.T);
    cfg.schedule.beta_start = get_or<double>(s, "beta_start", cfg.schedule.beta_start);
    cfg.schedule.beta_end = get_or<double>(s, "beta_end", cfg.schedule.beta_end);
  }
  if (j.contains("erasure")) {
    const auto& e = j["erasure"];
    require_keys(e, "erasure", {"method", "target", "anchor", "eta", "synonyms", "t_low"});
    cfg.erasure.method = get_or<std::string>(e, "method", cfg.erasure.method);
    cfg.erasure.target = get_or<std::string>(e, "target", cfg.erasure.target);
    if (e.contains("anchor") && !e["anchor"].is_null()) {
      cfg.erasure.anchor = ConditionRef::of(e["anchor"].get<std::string>());
    }
    cfg.erasure.eta = get_or<double>(e, "eta", cfg.erasure.eta);
    if (e.contains("synonyms")) {
      cfg.erasure.synonyms = e["synonyms"].get<std::vector<std::string>>();
    }
    cfg.erasure.t_low = get_or<int>(e, "t_low", cfg.erasure.t_low);
  }
  if (j.contains("pipeline")) {
    const auto& p = j["pipeline"];
    require_keys(p, "pipeline",
                 {"K", "J", "N", "t_f", "t_can", "lambda", "zeta_min", "zeta_max"});
    cfg.pipeline.K = get_or<int>(p, "K", cfg.pipeline.K);
    cfg.pipeline.J = get_or<int>(p, "J", cfg.pipeline.J);
    cfg.pipeline.N = get_or<int>(p, "N", cfg.pipeline.N);
    cfg.pipeline.t_f = get_or<int>(p, "t_f", cfg.pipeline.t_f);
    cfg.pipeline.t_can = get_or<int>(p, "t_can", cfg.pipeline.t_can);
    cfg.pipeline.lambda = get_or<double>(p, "lambda", cfg.pipeline.lambda);
    cfg.pipeline.zeta_min = get_or<double>(p, "zeta_min", cfg.pipeline.zeta_min);
    cfg.pipeline.zeta_max = get_or<double>(p, "zeta_max", cfg.pipeline.zeta_max);
  }
  if (j.contains("knowledge")) {
    const auto& k = j["knowledge"];
    require_keys(k, "knowledge", {"source", "url"});
    cfg.knowledge_source = get_or<std::string>(k, "source", cfg.knowledge_source);
    cfg.knowledge_url = get_or<std::string>(k, "url", cfg.knowledge_url);
  }
  if (j.contains("bench")) {
    const auto& b = j["bench"];
    require_keys(b, "bench", {"samples_per_concept", "count_failures_as_misses"});
    cfg.bench_samples = get_or<int>(b, "samples_per_concept", cfg.bench_samples);
    cfg.bench_count_failures_as_misses =
        get_or<bool>(b, "count_failures_as_misses", cfg.bench_count_failures_as_misses);
  }

  cfg.pipeline.master_seed = cfg.seed;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_json_text(read_file(path));
}

std::string config_to_json_text(const ExperimentConfig& c) {
  json j;
  j["world"] = c.world_path;
  j["seed"] = c.seed;
  j["w"] = c.pipeline.w;
  j["output_dir"] = c.output_dir;
  j["workers"] = c.pipeline.workers;
  j["schedule"] = {{"T", c.schedule.T},
                   {"beta_start", c.schedule.beta_start},
                   {"beta_end", c.schedule.beta_end}};
  j["erasure"] = {{"method", c.erasure.method},
                  {"target", c.erasure.target},
                  {"anchor", c.erasure.anchor.is_null() ? json(nullptr) : json(c.erasure.anchor.id())},
                  {"eta", c.erasure.eta},
                  {"synonyms", c.erasure.synonyms},
                  {"t_low", c.erasure.t_low}};
  j["pipeline"] = {{"K", c.pipeline.K},       {"J", c.pipeline.J},
                   {"N", c.pipeline.N},       {"t_f", c.pipeline.t_f},
                   {"t_can", c.pipeline.t_can}, {"lambda", c.pipeline.lambda},
                   {"zeta_min", c.pipeline.zeta_min},
                   {"zeta_max", c.pipeline.zeta_max}};
  j["knowledge"] = {{"source", c.knowledge_source}, {"url", c.knowledge_url}};
  j["bench"] = {{"samples_per_concept", c.bench_samples},
                {"count_failures_as_misses", c.bench_count_failures_as_misses}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// world files

GlyphWorldSpec load_world_spec(const std::string& path) {
  const json j = json::parse(read_file(path));
  require_keys(j, "", {"grid", "background", "concepts"});

  GlyphWorldSpec spec;
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    require_keys(g, "grid", {"height", "width", "channels"});
    spec.grid.height = get_or<int>(g, "height", spec.grid.height);
    spec.grid.width = get_or<int>(g, "width", spec.grid.width);
    spec.grid.channels = get_or<int>(g, "channels", spec.grid.channels);
  }
  spec.background = get_or<double>(j, "background", spec.background);

  if (!j.contains("concepts") || !j["concepts"].is_array()) {
    fail("concepts", "required array");
  }
  for (const auto& cj : j["concepts"]) {
    require_keys(cj, "concepts[]",
                 {"id", "shape", "color", "spread", "weight", "adjectives",
                  "contexts", "center", "radius", "inner_radius", "half_height",
                  "half_width", "thickness", "vertices"});
    GlyphConceptSpec c;
    c.id = cj.at("id").get<std::string>();
    c.shape = cj.at("shape").get<std::string>();
    if (cj.contains("color")) {
      for (int i = 0; i < 3; ++i) {
        c.color[static_cast<std::size_t>(i)] = cj["color"].at(i).get<double>();
      }
    }
    c.spread = get_or<double>(cj, "spread", c.spread);
    c.weight = get_or<double>(cj, "weight", c.weight);
    if (cj.contains("adjectives")) {
      c.adjectives = cj["adjectives"].get<std::vector<std::string>>();
    }
    if (cj.contains("contexts")) {
      c.contexts = cj["contexts"].get<std::vector<std::string>>();
    }
    if (cj.contains("center")) {
      c.center_row = cj["center"].at(0).get<double>();
      c.center_col = cj["center"].at(1).get<double>();
    }
    c.radius = get_or<double>(cj, "radius", c.radius);
    c.inner_radius = get_or<double>(cj, "inner_radius", c.inner_radius);
    c.half_height = get_or<double>(cj, "half_height", c.half_height);
    c.half_width = get_or<double>(cj, "half_width", c.half_width);
    c.thickness = get_or<double>(cj, "thickness", c.thickness);
    if (cj.contains("vertices")) {
      for (int v = 0; v < 3; ++v) {
        for (int d = 0; d < 2; ++d) {
          c.vertices[static_cast<std::size_t>(v)][static_cast<std::size_t>(d)] =
              cj["vertices"].at(v).at(d).get<double>();
        }
      }
    }
    spec.concepts.push_back(std::move(c));
  }
  return spec;
}

ConceptWorld load_world(const std::string& path) {
  return make_glyph_world(load_world_spec(path));
}

void save_world_spec(const GlyphWorldSpec& spec, const std::string& path) {
  json j;
  j["grid"] = {{"height", spec.grid.height},
               {"width", spec.grid.width},
               {"channels", spec.grid.channels}};
  j["background"] = spec.background;
  j["concepts"] = json::array();
  for (const auto& c : spec.concepts) {
    json cj;
    cj["id"] = c.id;
    cj["shape"] = c.shape;
    cj["color"] = c.color;
    cj["spread"] = c.spread;
    cj["weight"] = c.weight;
    cj["adjectives"] = c.adjectives;
    cj["contexts"] = c.contexts;
    if (c.center_row >= 0 || c.center_col >= 0) {
      cj["center"] = {c.center_row, c.center_col};
    }
    if (c.shape == "disk" || c.shape == "ring" || c.shape == "cross") {
      cj["radius"] = c.radius;
    }
    if (c.shape == "ring") cj["inner_radius"] = c.inner_radius;
    if (c.shape == "bar") {
      cj["half_height"] = c.half_height;
      cj["half_width"] = c.half_width;
    }
    if (c.shape == "cross") cj["thickness"] = c.thickness;
    if (c.shape == "triangle") cj["vertices"] = c.vertices;
    j["concepts"].push_back(cj);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_world_spec: cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace glyphlab
