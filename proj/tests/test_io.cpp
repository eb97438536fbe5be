#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "tssynth/io.hpp"

using namespace tssynth;
namespace fs = std::filesystem;
namespace tt = tssynth::testing;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("tssynth_io_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path file(const std::string& name, const std::string& contents) const {
    std::ofstream(path / name) << contents;
    return path / name;
  }
};

}  // namespace

TEST_CASE("read_series accepts plain and single-column CSV input") {
  TempDir dir;
  CHECK(io::read_series(dir.file("a.txt", "1\n2.5\n-3e2\n")) == TimeSeries({1, 2.5, -300}));
  CHECK(io::read_series(dir.file("b.csv", "value\n1\n\n  2 \r\n+3\n\n")) == TimeSeries({1, 2, 3}));
  CHECK_THROWS_AS(io::read_series(dir.file("c.csv", "1,2\n3,4\n")), InvalidInput);
  CHECK_THROWS_AS(io::read_series(dir.file("d.csv", "1\nabc\n3\n")), InvalidInput);
  CHECK_THROWS_AS(io::read_series(dir.file("e.csv", "1\nnan\n3\n")), InvalidInput);
  CHECK_THROWS_AS(io::read_series(dir.file("f.csv", "1\ninf\n")), InvalidInput);
  CHECK_THROWS_AS(io::read_series(dir.file("g.csv", "header\n4\n")), InvalidInput);
  CHECK_THROWS_AS(io::read_series(dir.file("h.csv", "")), InvalidInput);
  CHECK_THROWS_AS(io::read_series(dir.path / "missing.csv"), InvalidInput);
}

TEST_CASE("labels") {
  TempDir dir;
  CHECK(io::read_labels(dir.file("l.csv", "label\n0\n1\ntrue\nfalse\n")) ==
        std::vector<bool>{false, true, true, false});
  CHECK_THROWS_AS(io::read_labels(dir.file("m.csv", "0\n2\n")), InvalidInput);
  const std::vector<bool> y{true, false, false, true};
  io::write_labels(dir.path / "y.csv", y);
  CHECK(io::read_labels(dir.path / "y.csv") == y);
}

TEST_CASE("format_double round-trips exactly") {
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int rep = 0; rep < 2000; ++rep) {
    const double x = u(rng) * std::pow(10.0, static_cast<double>(rep % 40 - 20));
    CHECK(std::stod(io::format_double(x)) == x);
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(std::numeric_limits<double>::denorm_min()) == "5e-324");
}

TEST_CASE("series and profile files round-trip") {
  TempDir dir;
  std::mt19937_64 rng(51);
  const auto s = tt::random_walk(rng, 300);
  io::write_series(dir.path / "s.csv", s);
  CHECK(io::read_series(dir.path / "s.csv") == s);

  const auto cfg = WindowConfig::with_default_exclusion(20);
  const auto mp = mp_fast(s, cfg);
  io::write_profile(dir.path / "p.csv", mp);
  {
    std::ifstream in(dir.path / "p.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "distance,index");
  }
  const auto back = io::read_profile(dir.path / "p.csv", 20, cfg.exclusion_radius);
  CHECK(back.distances == mp.distances);
  CHECK(back.indices == mp.indices);
  CHECK(back.m == 20);
  CHECK_THROWS_AS(io::read_profile(dir.file("bad.csv", "distance,index\n1.0\n"), 20, 5),
                  InvalidInput);
}

TEST_CASE("trace round-trip") {
  TempDir dir;
  TrainingTrace t;
  t.records.push_back({100, 3.25, {0.1, 2.0, 0.05}, 0.12, 1.5});
  t.records.push_back({200, 1.0 / 3.0, {1e-17, 0.3, 0.0}, 0.09, 0.7});
  io::write_trace(dir.path / "t.csv", t);
  {
    std::ifstream in(dir.path / "t.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "iteration,total,local,distance,identity,median_abs_corr,mp_rmse");
  }
  const auto back = io::read_trace(dir.path / "t.csv");
  REQUIRE(back.records.size() == 2);
  for (std::size_t q = 0; q < 2; ++q) {
    const auto &a = t.records[q], &b = back.records[q];
    CHECK(a.iteration == b.iteration);
    CHECK(a.total == b.total);
    CHECK(a.components.local == b.components.local);
    CHECK(a.components.distance == b.components.distance);
    CHECK(a.components.identity == b.components.identity);
    CHECK(a.median_abs_corr == b.median_abs_corr);
    CHECK(a.mp_rmse == b.mp_rmse);
  }
}

TEST_CASE("configuration JSON") {
  SynthesisConfig cfg;
  cfg.m = 32;
  cfg.iterations = 77;
  cfg.seed = 0xFFFFFFFFFFFFull;
  cfg.weights.identity_margin = 0.25;
  cfg.init = InitMode::kNoise;
  const auto j = io::to_json(cfg);
  CHECK(j.at("window") == 32);
  CHECK(j.at("exclusion_radius") == 8);
  CHECK(j.at("init") == "noise");
  CHECK(j.at("seed") == 0xFFFFFFFFFFFFull);

  const auto back = io::apply_json(SynthesisConfig{}, j);
  CHECK(io::to_json(back) == j);

  const auto partial = io::apply_json(cfg, nlohmann::json{{"iterations", 5}});
  CHECK(partial.iterations == 5);
  CHECK(partial.m == 32);

  CHECK_THROWS_AS(io::apply_json(cfg, nlohmann::json{{"windw", 5}}), InvalidInput);
  CHECK_THROWS_AS(io::apply_json(cfg, nlohmann::json{{"window", "big"}}), InvalidInput);
  CHECK_THROWS_AS(io::apply_json(cfg, nlohmann::json{{"init", "zeros"}}), InvalidInput);
  CHECK_THROWS_AS(io::apply_json(cfg, nlohmann::json::array()), InvalidInput);
}

TEST_CASE("report JSON omits AUC without labels") {
  EvalReport r;
  r.global_corr = 0.5;
  r.subseq_corr = {0.1, 0.2, 0.9};
  auto j = io::to_json(r);
  CHECK(j.at("global_corr") == 0.5);
  CHECK(j.at("subseq_corr").at("max") == 0.9);
  CHECK(j.contains("mp_rmse"));
  CHECK(j.contains("mpi_agreement"));
  CHECK(j.contains("discord_overlap"));
  CHECK_FALSE(j.contains("auc_original"));
  CHECK_FALSE(j.contains("auc_synth"));
  r.auc_original = 0.9;
  r.auc_synth = 0.8;
  j = io::to_json(r);
  CHECK(j.at("auc_original") == 0.9);
  CHECK(j.at("auc_synth") == 0.8);
}

TEST_CASE("manifest round-trip") {
  io::RunManifest m;
  m.config.seed = 42;
  m.config.iterations = 10;
  m.input_path = "/data/x.csv";
  m.input_sha256 = std::string(64, 'a');
  m.input_length = 1234;
  m.started_at = io::utc_timestamp();
  m.finished_at = m.started_at;
  m.status = "completed";
  const auto j = io::to_json(m);
  CHECK(j.at("tool") == "tssynth");
  CHECK(j.at("version") == io::kToolVersion);
  CHECK(j.at("seed") == 42);
  CHECK(j.at("input").at("length") == 1234);

  const auto back = io::manifest_from_json(j);
  CHECK(io::to_json(back.config) == io::to_json(m.config));
  CHECK(back.input_path == m.input_path);
  CHECK(back.input_sha256 == m.input_sha256);
  CHECK(back.input_length == m.input_length);
  CHECK(back.status == "completed");
  CHECK_THROWS_AS(io::manifest_from_json(nlohmann::json{{"tool", "tssynth"}}), InvalidInput);

  TempDir dir;
  io::write_json(dir.path / "m.json", j);
  CHECK(io::read_json(dir.path / "m.json") == j);
  CHECK_THROWS_AS(io::read_json(dir.file("broken.json", "{not json")), InvalidInput);
}

TEST_CASE("sha256") {
  TempDir dir;
  CHECK(io::sha256_file(dir.file("abc", "abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(io::sha256_file(dir.file("empty", "")) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK_THROWS_AS(io::sha256_file(dir.path / "nope"), InvalidInput);
}

TEST_CASE("timestamps are ISO-8601 UTC") {
  const auto ts = io::utc_timestamp();
  REQUIRE(ts.size() == 20);
  CHECK(ts[4] == '-');
  CHECK(ts[10] == 'T');
  CHECK(ts.back() == 'Z');
}
