#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lab/config.hpp"
#include "lab/io.hpp"
#include "lab/runner.hpp"
#include "schwinger/basis.hpp"
#include "schwinger/model.hpp"
#include "schwinger/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("schwinger_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

lab::ExperimentConfig small(const std::string& task, const fs::path& out, int sectors = 12) {
  lab::Overrides ov;
  ov.task = task;
  ov.N = "8";
  ov.J = "5";
  ov.sectors = sectors;
  ov.seed = 7;
  ov.out = out.string();
  ov.workers = 1;
  return lab::load_config("", ov);
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(SCHWINGER_LAB_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("rstat run writes one row per sector and the grand mean") {
  TempDir tmp("rstat");
  auto c = small("rstat", tmp.path / "out", 20);
  std::ostringstream log;
  REQUIRE(lab::run_experiment(c, log) == lab::kOk);
  const auto rows = lines(lab::read_file(tmp.path / "out" / "rstat.csv"));
  REQUIRE(rows.size() == 21);
  CHECK(rows[0] == "N,J,sector_seed,mean_r");

  // independent recomputation of every sector
  const auto sectors = schwinger::sample_charge_sectors(8, 20, 7);
  const schwinger::HalfFillingBasis basis(8);
  double sum = 0.0;
  for (std::size_t k = 0; k < sectors.size(); ++k) {
    schwinger::ModelParams p{8, 5.0, 1.0, 0.0, 3.141592653589793};
    const auto e = schwinger::eigenvalues(schwinger::build_hamiltonian(p, sectors[k], basis));
    const double r = schwinger::sector_mean_r(e, schwinger::default_r_window(e.size()));
    std::istringstream row(rows[k + 1]);
    std::string n, j, seed, v;
    std::getline(row, n, ',');
    std::getline(row, j, ',');
    std::getline(row, seed, ',');
    std::getline(row, v, ',');
    CHECK(std::stoull(seed) == sectors[k].seed);
    CHECK(std::stod(v) == r);
    sum += r;
  }
  const auto manifest = json::parse(lab::read_file(tmp.path / "out" / "manifest.json"));
  CHECK(manifest["summary"]["grand_mean"]["8"]["5"].get<double>() == doctest::Approx(sum / 20).epsilon(1e-14));
  CHECK(manifest["status"] == "complete");
  CHECK(manifest["units"].size() == 20);
  CHECK(manifest["units"][3]["sector_seed"].get<std::uint64_t>() == sectors[3].seed);
  CHECK(manifest.contains("wall_time_s"));
  CHECK(manifest["code_version"] == lab::code_version());
}

TEST_CASE("outputs are byte-identical across worker counts and manifest reruns") {
  TempDir tmp("det");
  for (const char* task : {"quench", "eigentropy", "dos"}) {
    auto c = small(task, tmp.path / (std::string(task) + "_1"), 6);
    if (std::string(task) == "quench") c.options["tmax"] = 1e6;
    std::ostringstream log;
    REQUIRE(lab::run_experiment(c, log) == lab::kOk);

    auto again = lab::config_from_manifest(fs::path(c.out) / "manifest.json");
    again.workers = 3;
    again.out = (tmp.path / (std::string(task) + "_3")).string();
    REQUIRE(lab::run_experiment(again, log) == lab::kOk);

    const auto m = json::parse(lab::read_file(fs::path(c.out) / "manifest.json"));
    for (const auto& f : m["files"]) {
      const auto name = f.get<std::string>();
      CHECK_MESSAGE(lab::read_file(fs::path(c.out) / name) == lab::read_file(fs::path(again.out) / name), name);
    }
  }
}

TEST_CASE("resume computes only the missing units and reproduces the single-shot outputs") {
  TempDir tmp("resume");
  auto c = small("quench", tmp.path / "full", 10);
  c.options["tmax"] = 1e4;
  std::ostringstream log;
  REQUIRE(lab::run_experiment(c, log) == lab::kOk);

  // complete manifest: no-op
  std::ostringstream noop;
  CHECK(lab::resume_experiment(c.out, std::nullopt, noop) == lab::kOk);
  CHECK(noop.str().find("nothing to do") != std::string::npos);

  // simulate an interrupted run: half of the partial results, manifest still running
  const fs::path half = tmp.path / "half";
  fs::copy(c.out, half, fs::copy_options::recursive);
  for (int i = 0; i < 10; i += 2) {
    char name[32];
    std::snprintf(name, sizeof name, "unit_%06d.json", i);
    fs::remove(half / "partial" / name);
  }
  auto m = json::parse(lab::read_file(half / "manifest.json"));
  m["status"] = "running";
  m["config"]["out"] = half.string();
  lab::write_atomic(half / "manifest.json", m.dump(2));
  for (const auto& f : m["files"]) fs::remove(half / f.get<std::string>());

  std::ostringstream rlog;
  REQUIRE(lab::resume_experiment(half, 2u, rlog) == lab::kOk);
  CHECK(rlog.str().find("5 of 10 units to compute") != std::string::npos);
  for (const auto& f : m["files"]) {
    const auto name = f.get<std::string>();
    CHECK_MESSAGE(lab::read_file(half / name) == lab::read_file(fs::path(c.out) / name), name);
  }
}

TEST_CASE("resume refuses partial results from a different config") {
  TempDir tmp("mismatch");
  auto c = small("rstat", tmp.path / "a", 4);
  std::ostringstream log;
  REQUIRE(lab::run_experiment(c, log) == lab::kOk);
  auto m = json::parse(lab::read_file(tmp.path / "a" / "manifest.json"));
  m["status"] = "running";
  m["config"]["model"]["w"] = 2.0;
  m.erase("config_hash");
  lab::write_atomic(tmp.path / "a" / "manifest.json", m.dump(2));
  CHECK_THROWS_AS(lab::resume_experiment(tmp.path / "a", std::nullopt, log), lab::ConfigError);

  m["config_hash"] = "0000000000000000";
  lab::write_atomic(tmp.path / "a" / "manifest.json", m.dump(2));
  CHECK_THROWS_AS(lab::config_from_manifest(tmp.path / "a" / "manifest.json"), lab::ConfigError);
}

TEST_CASE("config errors carry the offending line") {
  TempDir tmp("config");
  const auto path = tmp.path / "bad.toml";
  auto message = [&](const std::string& body) -> std::string {
    write(path, body);
    try {
      lab::load_config(path.string(), {});
    } catch (const lab::ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message("task = \"rstat\"\n\n[model]\nN = [8]\nJ = [1.0]\nbogus = 3\n").find("bad.toml:6") !=
        std::string::npos);
  CHECK(message("task = \"quench\"\n[model]\nN = [8, 10]\n").find("bad.toml") != std::string::npos);
  CHECK(message("task = \"rstat\"\n[options]\nwindow_k = \"many\"\n").find("bad.toml:3") != std::string::npos);
  CHECK(message("task = \"nope\"\n").find("bad.toml:1") != std::string::npos);
  CHECK(message("task = \"rstat\"\nsectors = [\n").find("bad.toml") != std::string::npos);

  write(path, "task = \"rstat\"\n[model]\nN = [8]\nJ = [2.0]\n[sectors]\ncount = 3\nmaster_seed = 9\n");
  lab::Overrides ov;
  ov.J = "0.5,1";
  const auto c = lab::load_config(path.string(), ov);
  CHECK(c.model.J == std::vector<double>{0.5, 1.0});
  CHECK(c.sectors == 3);
  CHECK(c.master_seed == 9);
}

TEST_CASE("config hash ignores output settings") {
  TempDir tmp("hash");
  auto a = small("rstat", tmp.path / "x");
  auto b = small("rstat", tmp.path / "y");
  b.workers = 4;
  b.plot = true;
  CHECK(lab::config_hash(a) == lab::config_hash(b));
  b.master_seed = 8;
  CHECK(lab::config_hash(a) != lab::config_hash(b));
  const auto h = lab::config_hash(a);
  CHECK(h.size() == 16);
  CHECK(lab::config_hash(lab::from_json(lab::to_json(a))) == h);
}

TEST_CASE("sector failures are recorded and flag a partial run") {
  TempDir tmp("fail");
  auto c = small("quench", tmp.path / "out", 3);
  c.options["tmax"] = 1e30;  // accumulated phase exceeds double precision
  std::ostringstream log;
  CHECK(lab::run_experiment(c, log) == lab::kPartialFailure);
  const auto m = json::parse(lab::read_file(tmp.path / "out" / "manifest.json"));
  CHECK(m["status"] == "partial");
  CHECK(m["failed_units"] == 3);
  for (const auto& u : m["units"]) {
    CHECK(u["status"] == "numerical_error");
    CHECK(!u["error"].get<std::string>().empty());
  }
}

TEST_CASE("command line exit codes") {
  TempDir tmp("exit");
  const auto out = (tmp.path / "ok").string();
  CHECK(run_binary("run --task rstat --N 8 --J 5 --sectors 3 --plot --out " + out) == 0);
  CHECK(fs::exists(fs::path(out) / "r_vs_J.svg"));
  CHECK(run_binary("resume " + out) == 0);
  CHECK(run_binary("run --from-manifest " + out + "/manifest.json --workers 2 --out " + out + "_2") == 0);
  CHECK(lab::read_file(fs::path(out) / "rstat.csv") == lab::read_file(fs::path(out + "_2") / "rstat.csv"));
  CHECK(run_binary("run --from-manifest " + out + "/manifest.json --N 10") == 1);
  CHECK(run_binary("run --task nope --out " + out) == 1);
  CHECK(run_binary("run --task rstat --N 40 --out " + out) == 1);
  CHECK(run_binary("run --config /nonexistent.toml") == 1);
  CHECK(run_binary("run --task quench --N 8 --J 5 --sectors 2 --tmax 1e30 --out " + (tmp.path / "f").string()) == 2);
  CHECK(run_binary("resume " + (tmp.path / "missing").string()) == 1);
  CHECK(run_binary("frobnicate") == 1);
}
