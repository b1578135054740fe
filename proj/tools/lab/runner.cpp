#include "runner.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <ostream>

#include "io.hpp"
#include "schwinger/parallel.hpp"
#include "tasks.hpp"

#ifndef SCHWINGER_VERSION
#define SCHWINGER_VERSION "unknown"
#endif

namespace lab {

using nlohmann::json;
namespace fs = std::filesystem;

const char* code_version() { return SCHWINGER_VERSION; }

namespace {

fs::path partial_path(const fs::path& out, std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "unit_%06zu.json", index);
  return out / "partial" / name;
}

json unit_json(const Unit& u) {
  return {{"index", u.index}, {"N", u.N}, {"J", u.J}, {"sector_index", u.sector_index}, {"sector_seed", u.seed},
          {"sector", u.sector}};
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Valid partial payload for `u`, if one exists on disk.
std::optional<json> load_partial(const fs::path& out, const Unit& u, const std::string& hash) {
  const auto p = partial_path(out, u.index);
  if (!fs::exists(p)) return std::nullopt;
  json j;
  try {
    j = json::parse(read_file(p));
  } catch (const std::exception&) {
    return std::nullopt;  // truncated or corrupt: recompute
  }
  if (j.value("config_hash", std::string()) != hash) {
    throw ConfigError(p.string(), "config hash " + j.value("config_hash", std::string("?")) +
                                      " does not match the experiment (" + hash + ")");
  }
  if (!j.contains("payload") || j["unit"].value("sector_seed", std::uint64_t{0}) != u.seed) return std::nullopt;
  return j["payload"];
}

int execute(const ExperimentConfig& c, const fs::path& out, bool reuse, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto hash = config_hash(c);
  const auto units = plan_units(c);
  const unsigned workers = c.workers > 0 ? c.workers : schwinger::default_workers();
  fs::create_directories(out / "partial");

  std::vector<std::optional<json>> payloads(units.size());
  std::vector<std::size_t> todo;
  for (const auto& u : units) {
    if (reuse) payloads[u.index] = load_partial(out, u, hash);
    if (!payloads[u.index]) todo.push_back(u.index);
  }

  json manifest{{"config", to_json(c)},
                {"config_hash", hash},
                {"code_version", code_version()},
                {"workers", workers},
                {"started_at", utc_now()},
                {"status", "running"}};
  auto unit_list = [&](const std::vector<std::string>& status, const std::vector<std::string>& errors) {
    json a = json::array();
    for (const auto& u : units) {
      json e = unit_json(u);
      e["status"] = status[u.index];
      if (!errors[u.index].empty()) e["error"] = errors[u.index];
      a.push_back(std::move(e));
    }
    return a;
  };
  std::vector<std::string> status(units.size(), "pending");
  std::vector<std::string> errors(units.size());
  for (const auto& u : units) {
    if (payloads[u.index]) status[u.index] = "ok";
  }
  manifest["units"] = unit_list(status, errors);
  write_atomic(out / "manifest.json", manifest.dump(2) + "\n");

  log << c.task << ": " << todo.size() << " of " << units.size() << " units to compute on " << workers
      << " workers\n";

  schwinger::single_threaded_blas();
  const auto results = schwinger::parallel_map<json>(todo.size(), workers, [&](std::size_t k) {
    const Unit& u = units[todo[k]];
    json payload = run_unit(c, u);
    const json record{{"config_hash", hash}, {"unit", unit_json(u)}, {"payload", payload}};
    write_atomic(partial_path(out, u.index), record.dump() + "\n");
    // round trip so fresh and resumed payloads are identical
    return json::parse(record.dump())["payload"];
  });

  std::size_t failed = 0;
  for (std::size_t k = 0; k < todo.size(); ++k) {
    const auto i = todo[k];
    if (results[k].value) {
      payloads[i] = *results[k].value;
      status[i] = "ok";
    } else {
      ++failed;
      status[i] = results[k].numerical ? "numerical_error" : "failed";
      errors[i] = results[k].error;
      log << "unit " << i << " (sector seed " << units[i].seed << ") failed: " << results[k].error << "\n";
    }
  }

  Artifacts art;
  if (failed < units.size()) {
    try {
      art = finalize(c, units, payloads);
    } catch (const std::exception& e) {
      art.errors.push_back(std::string("aggregation: ") + e.what());
    }
  } else {
    art.errors.push_back("every unit failed; no aggregates written");
  }
  json files = json::array();
  for (const auto& [name, content] : art.files) {
    write_atomic(out / name, content);
    files.push_back(name);
  }
  for (const auto& e : art.errors) log << "warning: " << e << "\n";

  const bool ok = failed == 0 && art.errors.empty();
  manifest["units"] = unit_list(status, errors);
  manifest["files"] = files;
  manifest["summary"] = art.summary;
  manifest["errors"] = art.errors;
  manifest["failed_units"] = failed;
  manifest["status"] = ok ? "complete" : "partial";
  manifest["finished_at"] = utc_now();
  manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_atomic(out / "manifest.json", manifest.dump(2) + "\n");
  log << "wrote " << files.size() << " files to " << out.string() << (ok ? "" : " (partial failure)") << "\n";
  return ok ? kOk : kPartialFailure;
}

}  // namespace

ExperimentConfig config_from_manifest(const fs::path& manifest) {
  json j;
  try {
    j = json::parse(read_file(manifest));
  } catch (const std::exception& e) {
    throw ConfigError(manifest.string(), std::string("unreadable manifest: ") + e.what());
  }
  if (!j.contains("config")) throw ConfigError(manifest.string(), "manifest has no config");
  auto c = from_json(j["config"]);
  validate(c, manifest.string());
  if (j.contains("config_hash") && j["config_hash"].get<std::string>() != config_hash(c)) {
    throw ConfigError(manifest.string(), "recorded config hash " + j["config_hash"].get<std::string>() +
                                             " does not match its config (" + config_hash(c) + ")");
  }
  return c;
}

int run_experiment(const ExperimentConfig& config, std::ostream& log) {
  return execute(config, config.out, false, log);
}

int resume_experiment(const fs::path& out_dir, std::optional<unsigned> workers, std::ostream& log) {
  const auto path = out_dir / "manifest.json";
  auto c = config_from_manifest(path);
  if (workers) c.workers = *workers;
  c.out = out_dir.string();
  const auto m = json::parse(read_file(path));
  if (m.value("status", std::string()) == "complete") {
    log << "manifest is complete; nothing to do\n";
    return kOk;
  }
  return execute(c, out_dir, true, log);
}

}  // namespace lab
