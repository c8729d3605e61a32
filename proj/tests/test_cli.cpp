// Drives the installed CLI binary end to end.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "glyphlab/manifest.hpp"
#include "glyphlab/rng.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("glyphlab_cli_" + std::to_string(glyphlab::Rng(std::random_device{}()).raw()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args, std::string* output = nullptr,
            const std::string& env_prefix = "") {
  TempDir capture;
  const std::string out_file = capture.sub("stdout.txt");
  const std::string cmd = (env_prefix.empty() ? "" : env_prefix + " ") +
                          std::string(GLYPHLAB_CLI_PATH) + " " + args + " >" +
                          out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) {
    std::ifstream in(out_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    *output = ss.str();
  }
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("help documents every subcommand") {
  std::string out;
  CHECK(run_cli("--help", &out) == 0);
  for (const char* sub : {"world", "sample", "erase-check", "awaken", "trajectory",
                          "dominance", "switch", "intersect", "bench"}) {
    CAPTURE(sub);
    CHECK(out.find(sub) != std::string::npos);
  }
}

TEST_CASE("unknown subcommands and flags fail") {
  CHECK(run_cli("frobnicate") != 0);
  CHECK(run_cli("bench --no-such-flag") != 0);
}

TEST_CASE("missing world file names the path") {
  std::string out;
  const int status = run_cli("sample --world /nonexistent/world.json --count 1", &out);
  CHECK(status != 0);
  CHECK(out.find("/nonexistent/world.json") != std::string::npos);
}

TEST_CASE("invalid config reports the field path") {
  TempDir tmp;
  std::ofstream(tmp.sub("bad.json")) << R"({"pipeline": {"t_f": 0}})";
  std::string out;
  CHECK(run_cli("bench --config " + tmp.sub("bad.json"), &out) != 0);
  CHECK(out.find("pipeline.t_f") != std::string::npos);
}

TEST_CASE("world subcommand builds and reloads the preset") {
  TempDir tmp;
  std::string out;
  CHECK(run_cli("world --preset well-separated --out-file " + tmp.sub("w.json"),
                &out) == 0);
  CHECK(out.find("6 concepts") != std::string::npos);
  CHECK(fs::exists(tmp.sub("w.json")));
  // reload through --world
  CHECK(run_cli("world --world " + tmp.sub("w.json"), &out) == 0);
  CHECK(out.find("ruby_disk") != std::string::npos);
}

TEST_CASE("bench reruns with the same seed are byte-identical") {
  TempDir tmp;
  std::ofstream(tmp.sub("cfg.json"))
      << R"({"pipeline": {"K": 2, "J": 1}, "bench": {"samples_per_concept": 2}})";
  const std::string args = "bench --config " + tmp.sub("cfg.json") + " --seed 7";
  CHECK(run_cli(args + " --out " + tmp.sub("run1")) == 0);
  CHECK(run_cli(args + " --out " + tmp.sub("run2")) == 0);

  CHECK(slurp(tmp.sub("run1") + "/benchmark.csv") ==
        slurp(tmp.sub("run2") + "/benchmark.csv"));

  // manifests agree on every artifact checksum (timestamps may differ)
  const auto m1 = glyphlab::read_manifest(tmp.sub("run1") + "/manifest.json");
  const auto m2 = glyphlab::read_manifest(tmp.sub("run2") + "/manifest.json");
  REQUIRE(m1.artifacts.size() == m2.artifacts.size());
  for (size_t i = 0; i < m1.artifacts.size(); ++i) {
    CHECK(m1.artifacts[i].path == m2.artifacts[i].path);
    CHECK(m1.artifacts[i].checksum == m2.artifacts[i].checksum);
  }
}

TEST_CASE("artifacts regenerate bit-exactly from a manifest's config snapshot") {
  TempDir tmp;
  std::ofstream(tmp.sub("cfg.json"))
      << R"({"seed": 11, "pipeline": {"K": 2, "J": 1}, "bench": {"samples_per_concept": 2}})";
  CHECK(run_cli("bench --config " + tmp.sub("cfg.json") + " --out " + tmp.sub("orig")) == 0);

  // extract the config snapshot embedded in the manifest and rerun from it
  const std::string manifest_text = slurp(tmp.sub("orig") + "/manifest.json");
  const auto config_pos = manifest_text.find("\"config\"");
  REQUIRE(config_pos != std::string::npos);
  {
    const auto open = manifest_text.find('{', config_pos);
    int depth = 0;
    size_t close = open;
    for (size_t i = open; i < manifest_text.size(); ++i) {
      if (manifest_text[i] == '{') ++depth;
      if (manifest_text[i] == '}' && --depth == 0) {
        close = i;
        break;
      }
    }
    std::ofstream(tmp.sub("replay.json"))
        << manifest_text.substr(open, close - open + 1);
  }
  CHECK(run_cli("bench --config " + tmp.sub("replay.json") + " --out " + tmp.sub("replay")) == 0);

  const auto m1 = glyphlab::read_manifest(tmp.sub("orig") + "/manifest.json");
  const auto m2 = glyphlab::read_manifest(tmp.sub("replay") + "/manifest.json");
  REQUIRE(m1.artifacts.size() == m2.artifacts.size());
  for (size_t i = 0; i < m1.artifacts.size(); ++i) {
    CHECK(m1.artifacts[i].checksum == m2.artifacts[i].checksum);
  }
}

TEST_CASE("awaken smoke profile completes and writes a report") {
  TempDir tmp;
  std::string out;
  const int status = run_cli("awaken --K 2 --J 1 --seed 3 --out " + tmp.sub("rep"), &out);
  CHECK(status == 0);
  CHECK(fs::exists(tmp.sub("rep") + "/summary.csv"));
  CHECK(fs::exists(tmp.sub("rep") + "/candidates.csv"));
  CHECK(fs::exists(tmp.sub("rep") + "/manifest.json"));
  // an artifact regenerates bit-exactly from its manifest's config + seed
  const auto manifest = glyphlab::read_manifest(tmp.sub("rep") + "/manifest.json");
  for (const auto& a : manifest.artifacts) {
    CHECK(a.checksum == glyphlab::checksum_file(tmp.sub("rep") + "/" + a.path));
  }
}

TEST_CASE("knowledge endpoint env override degrades to the table source") {
  TempDir tmp;
  std::string out;
  const int status = run_cli("awaken --K 2 --J 1 --seed 9 --out " + tmp.sub("rep"),
                             &out, "GLYPHLAB_KNOWLEDGE_URL=http://127.0.0.1:1/plans");
  CHECK(status == 0);
  CHECK(out.find("falling back to table source") != std::string::npos);
  CHECK(fs::exists(tmp.sub("rep") + "/summary.csv"));
}

TEST_CASE("erase-check confirms pass-through") {
  TempDir tmp;
  std::string out;
  CHECK(run_cli("erase-check --runs 5 --seed 2 --out " + tmp.sub("ec"), &out) == 0);
  CHECK(out.find("pass-through") != std::string::npos);
  CHECK(fs::exists(tmp.sub("ec") + "/erase_check.csv"));
}

TEST_CASE("trajectory and dominance emit the documented CSV schemas") {
  TempDir tmp;
  CHECK(run_cli("trajectory --seed 4 --out " + tmp.sub("tr")) == 0);
  const std::string csv = slurp(tmp.sub("tr") + "/trajectory.csv");
  CHECK(csv.rfind("t,norm_text,norm_noise,ratio,top1,p_top1\n", 0) == 0);

  CHECK(run_cli("dominance --runs 5 --seed 4 --out " + tmp.sub("dom")) == 0);
  const std::string dcsv = slurp(tmp.sub("dom") + "/dominance.csv");
  CHECK(dcsv.rfind("seed,t_star,found\n", 0) == 0);
}

TEST_CASE("sample writes rasters with classifications") {
  TempDir tmp;
  CHECK(run_cli("sample --concept ruby_disk --count 2 --seed 6 --out " +
                tmp.sub("s")) == 0);
  const std::string csv = slurp(tmp.sub("s") + "/samples.csv");
  CHECK(csv.rfind("index,condition,predicted,posterior\n", 0) == 0);
  CHECK(csv.find("ruby_disk") != std::string::npos);
  CHECK(fs::exists(tmp.sub("s") + "/sample_0.glyr"));
  CHECK(fs::exists(tmp.sub("s") + "/sample_1.ppm"));
}

TEST_CASE("intersect writes summary and curve tables") {
  TempDir tmp;
  std::string out;
  CHECK(run_cli("intersect --runs 2 --seed 6 --out " + tmp.sub("ix"), &out) == 0);
  CHECK(out.find("basin agreement") != std::string::npos);
  const std::string summary = slurp(tmp.sub("ix") + "/intersect_summary.csv");
  CHECK(summary.rfind("run,t_f_hat,min_distance,basin_a,basin_b,agreement\n", 0) == 0);
  const std::string curves = slurp(tmp.sub("ix") + "/intersect_curves.csv");
  CHECK(curves.rfind("run,t,distance,normalized\n", 0) == 0);
}

TEST_CASE("switch emits the documented CSV schema") {
  TempDir tmp;
  std::string out;
  CHECK(run_cli("switch --tag a --T1 80 --runs 3 --seed 5 --out " + tmp.sub("sw"),
                &out) == 0);
  const std::string csv = slurp(tmp.sub("sw") + "/switch.csv");
  CHECK(csv.rfind("tag,T1,seed,success\n", 0) == 0);
  CHECK(run_cli("switch --tag x --out " + tmp.sub("bad")) != 0);
}
