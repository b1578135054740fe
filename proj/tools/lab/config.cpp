#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace lab {

namespace {

using Schema = std::map<std::string, OptionValue>;

Schema time_options(double tmax) {
  return {{"tmin", 0.1},     {"tmax", tmax},    {"per_decade", std::int64_t{20}},
          {"cut", std::int64_t{0}}, {"initial", std::string("vac")}, {"sigma", 0.1}};
}

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> s = [] {
    std::map<std::string, Schema> m;
    m["rstat"] = {{"window_k", std::int64_t{0}}};
    m["dos"] = {{"bin_width", 0.05}, {"max_lag", std::int64_t{0}}};
    m["eigentropy"] = {{"cut", std::int64_t{0}}, {"fraction", 1.0 / 3.0}};
    m["sff"] = {{"tau_min", 1e-4}, {"tau_max", 10.0}, {"tau_per_decade", std::int64_t{20}}, {"degree", std::int64_t{6}}};
    m["thouless"] = {{"site", std::int64_t{1}}, {"strength", 0.0}};
    m["quench"] = time_options(1e12);
    Schema j = time_options(1e12);
    j.insert({{"dlog", 0.25},
              {"min_step", 0.05},
              {"anchor_shift", 0.0},
              {"bins_per_decade", std::int64_t{4}},
              {"fit_t_lo", 1e2},
              {"min_events", std::int64_t{100}},
              {"mle", false}});
    m["jumps"] = j;
    Schema d = time_options(1e8);
    d.insert({{"coefficients", std::string("schrieffer_wolff")}, {"normalize", false}});
    m["dpt_compare"] = d;
    m["fragmentation"] = {};
    return m;
  }();
  return s;
}

std::string where_of(const std::string& path, const toml::node& node) {
  const auto& src = node.source();
  if (!src.begin) return path;
  return path + ":" + std::to_string(src.begin.line);
}

double as_double(const toml::node& n, const std::string& where, const std::string& key) {
  if (auto v = n.value<double>()) return *v;
  throw ConfigError(where, "'" + key + "' must be a number");
}

std::int64_t as_int(const toml::node& n, const std::string& where, const std::string& key) {
  if (n.is_integer()) return *n.value<std::int64_t>();
  throw ConfigError(where, "'" + key + "' must be an integer");
}

template <class T, class F>
std::vector<T> scalar_or_list(const toml::node& n, const std::string& where, const std::string& key, F conv) {
  std::vector<T> out;
  if (const auto* arr = n.as_array()) {
    for (const auto& e : *arr) out.push_back(conv(e, where, key));
    if (out.empty()) throw ConfigError(where, "'" + key + "' list is empty");
  } else {
    out.push_back(conv(n, where, key));
  }
  return out;
}

void check_keys(const toml::table& t, const std::set<std::string>& allowed, const std::string& path,
                const std::string& section) {
  for (const auto& [k, v] : t) {
    if (!allowed.count(std::string(k.str()))) {
      throw ConfigError(where_of(path, v), "unknown key '" + std::string(k.str()) + "'" +
                                               (section.empty() ? "" : " in [" + section + "]"));
    }
  }
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, int>) {
        out.push_back(std::stoi(item, &used));
      } else {
        out.push_back(std::stod(item, &used));
      }
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("command line", flag + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("command line", flag + ": empty value");
  return out;
}

ModelKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "schwinger") return ModelKind::schwinger;
  if (s == "scaled") return ModelKind::scaled;
  if (s == "xxz") return ModelKind::xxz;
  throw ConfigError(where, "model kind must be schwinger, scaled or xxz, got '" + s + "'");
}

OptionValue convert_option(const toml::node& n, const OptionValue& like, const std::string& where,
                           const std::string& key) {
  if (std::holds_alternative<bool>(like)) {
    if (auto v = n.value<bool>(); v && n.is_boolean()) return *v;
    throw ConfigError(where, "option '" + key + "' must be true or false");
  }
  if (std::holds_alternative<std::int64_t>(like)) return as_int(n, where, key);
  if (std::holds_alternative<double>(like)) return as_double(n, where, key);
  if (auto v = n.value<std::string>()) return *v;
  throw ConfigError(where, "option '" + key + "' must be a string");
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"rstat",  "dos",   "eigentropy",  "sff",          "thouless",
                                              "quench", "jumps", "dpt_compare", "fragmentation"};
  return names;
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::schwinger: return "schwinger";
    case ModelKind::scaled: return "scaled";
    case ModelKind::xxz: return "xxz";
  }
  return "schwinger";
}

double ExperimentConfig::option_double(const std::string& key) const {
  const auto& v = options.at(key);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return static_cast<double>(std::get<std::int64_t>(v));
}
std::int64_t ExperimentConfig::option_int(const std::string& key) const { return std::get<std::int64_t>(options.at(key)); }
bool ExperimentConfig::option_bool(const std::string& key) const { return std::get<bool>(options.at(key)); }
std::string ExperimentConfig::option_string(const std::string& key) const {
  return std::get<std::string>(options.at(key));
}

ExperimentConfig load_config(const std::string& path, const Overrides& ov) {
  ExperimentConfig c;
  std::map<std::string, std::pair<const toml::node*, std::string>> raw_options;
  toml::table root;
  std::string task_where;
  if (!path.empty()) {
    try {
      root = toml::parse_file(path);
    } catch (const toml::parse_error& e) {
      throw ConfigError(path + ":" + std::to_string(e.source().begin.line), std::string(e.description()));
    }
    check_keys(root, {"task", "out", "workers", "plot", "model", "sectors", "options"}, path, "");
    if (auto n = root.get("task")) {
      auto v = n->value<std::string>();
      task_where = where_of(path, *n);
      if (!v) throw ConfigError(task_where, "'task' must be a string");
      c.task = *v;
    }
    if (auto n = root.get("out")) {
      auto v = n->value<std::string>();
      if (!v) throw ConfigError(where_of(path, *n), "'out' must be a string");
      c.out = *v;
    }
    if (auto n = root.get("workers")) {
      const auto v = as_int(*n, where_of(path, *n), "workers");
      if (v < 0) throw ConfigError(where_of(path, *n), "'workers' must be >= 0");
      c.workers = static_cast<unsigned>(v);
    }
    if (auto n = root.get("plot")) {
      if (!n->is_boolean()) throw ConfigError(where_of(path, *n), "'plot' must be true or false");
      c.plot = *n->value<bool>();
    }
    if (auto n = root.get("model")) {
      const auto* t = n->as_table();
      if (!t) throw ConfigError(where_of(path, *n), "[model] must be a table");
      check_keys(*t,
                 {"kind", "N", "J", "w", "m", "theta", "theta_over_pi", "J_zz", "J_q", "J_xy", "J_z", "W", "disorder"},
                 path, "model");
      auto& M = c.model;
      for (const auto& [k, v] : *t) {
        const std::string key(k.str());
        const std::string w = where_of(path, v);
        if (key == "kind") {
          auto s = v.value<std::string>();
          if (!s) throw ConfigError(w, "'kind' must be a string");
          M.kind = parse_kind(*s, w);
        } else if (key == "N") {
          M.N = scalar_or_list<int>(v, w, key, [](const toml::node& e, const std::string& ww, const std::string& kk) {
            return static_cast<int>(as_int(e, ww, kk));
          });
        } else if (key == "J") {
          M.J = scalar_or_list<double>(v, w, key, as_double);
        } else if (key == "w") {
          M.w = as_double(v, w, key);
        } else if (key == "m") {
          M.m = as_double(v, w, key);
        } else if (key == "theta") {
          M.theta = as_double(v, w, key);
        } else if (key == "theta_over_pi") {
          M.theta = as_double(v, w, key) * std::numbers::pi;
        } else if (key == "J_zz") {
          M.J_zz = as_double(v, w, key);
        } else if (key == "J_q") {
          M.J_q = as_double(v, w, key);
        } else if (key == "J_xy") {
          M.J_xy = as_double(v, w, key);
        } else if (key == "J_z") {
          M.J_z = as_double(v, w, key);
        } else if (key == "W") {
          M.W = as_double(v, w, key);
        } else if (key == "disorder") {
          auto s = v.value<std::string>();
          if (!s || (*s != "uniform" && *s != "discrete")) throw ConfigError(w, "'disorder' must be uniform or discrete");
          M.disorder = *s;
        }
      }
    }
    if (auto n = root.get("sectors")) {
      const auto* t = n->as_table();
      if (!t) throw ConfigError(where_of(path, *n), "[sectors] must be a table");
      check_keys(*t, {"count", "master_seed"}, path, "sectors");
      if (auto v = t->get("count")) c.sectors = static_cast<int>(as_int(*v, where_of(path, *v), "count"));
      if (auto v = t->get("master_seed")) {
        const auto s = as_int(*v, where_of(path, *v), "master_seed");
        if (s < 0) throw ConfigError(where_of(path, *v), "'master_seed' must be >= 0");
        c.master_seed = static_cast<std::uint64_t>(s);
      }
    }
    if (auto n = root.get("options")) {
      const auto* t = n->as_table();
      if (!t) throw ConfigError(where_of(path, *n), "[options] must be a table");
      for (const auto& [k, v] : *t) raw_options[std::string(k.str())] = {&v, where_of(path, v)};
    }
  }

  const std::string cl = "command line";
  if (ov.task) c.task = *ov.task;
  if (ov.N) c.model.N = parse_list<int>(*ov.N, "--N");
  if (ov.J) c.model.J = parse_list<double>(*ov.J, "--J");
  if (ov.w) c.model.w = *ov.w;
  if (ov.theta) c.model.theta = *ov.theta;
  if (ov.m) c.model.m = *ov.m;
  if (ov.sectors) c.sectors = *ov.sectors;
  if (ov.seed) c.master_seed = *ov.seed;
  if (ov.plot) c.plot = *ov.plot;
  if (ov.workers) c.workers = *ov.workers;
  if (ov.out) c.out = *ov.out;

  if (c.task.empty()) throw ConfigError(path.empty() ? cl : path, "no task given");
  const auto it = schemas().find(c.task);
  if (it == schemas().end()) {
    throw ConfigError(ov.task || task_where.empty() ? cl : task_where, "unknown task '" + c.task + "'");
  }
  c.options = it->second;
  for (const auto& [key, src] : raw_options) {
    const auto d = it->second.find(key);
    if (d == it->second.end()) {
      throw ConfigError(src.second, "option '" + key + "' is not valid for task " + c.task);
    }
    c.options[key] = convert_option(*src.first, d->second, src.second, key);
  }
  if (ov.tmax) {
    if (!c.options.count("tmax")) throw ConfigError(cl, "--tmax is not valid for task " + c.task);
    c.options["tmax"] = *ov.tmax;
  }
  validate(c, path.empty() ? cl : path);
  return c;
}

void validate(ExperimentConfig& c, const std::string& where) {
  const auto& M = c.model;
  auto fail = [&](const std::string& msg) { throw ConfigError(where, msg); };
  if (!schemas().count(c.task)) fail("unknown task '" + c.task + "'");
  for (int n : M.N) {
    if (n < 2 || n > 16 || n % 2) fail("N must be even and between 2 and 16, got " + std::to_string(n));
  }
  for (double j : M.J) {
    if (!(j >= 0.0) || !std::isfinite(j)) fail("J must be >= 0");
  }
  if (!(M.w > 0.0)) fail("w must be > 0");
  if (!(M.theta >= 0.0 && M.theta < 2 * std::numbers::pi)) fail("theta must lie in [0, 2 pi)");
  if (!std::isfinite(M.m)) fail("m must be finite");
  if (c.sectors < 1) fail("sector count must be >= 1");
  const bool sweep = M.N.size() > 1 || M.J.size() > 1;
  const std::set<std::string> sweepable{"rstat", "eigentropy", "thouless"};
  if (sweep && !sweepable.count(c.task)) fail("task " + c.task + " takes a single N and J");
  if (M.kind == ModelKind::xxz && (c.task == "dpt_compare" || c.task == "fragmentation" || c.task == "dos")) {
    fail("task " + c.task + " needs the Schwinger model");
  }
  if ((c.task == "dpt_compare" || c.task == "fragmentation") && M.kind == ModelKind::schwinger) {
    const double r = M.theta / std::numbers::pi;
    if (M.m != 0.0 || std::abs(r - std::round(r)) > 1e-12) fail("task " + c.task + " needs m = 0 and integer theta/pi");
  }
  if (c.task == "dpt_compare" && !(M.J.front() > 0.0)) fail("dpt_compare needs J > 0");
  if (c.task == "dos" && !(M.J.front() > 0.0)) fail("dos histograms are in E/J and need J > 0");

  auto positive = [&](const char* key) {
    if (c.options.count(key) && !(c.option_double(key) > 0.0)) fail(std::string("option '") + key + "' must be > 0");
  };
  for (const char* key : {"bin_width", "tau_min", "tau_max", "tmin", "tmax", "dlog", "min_step", "fit_t_lo"}) positive(key);
  for (const char* key : {"per_decade", "tau_per_decade", "bins_per_decade", "degree"}) {
    if (c.options.count(key) && c.option_int(key) < 1) fail(std::string("option '") + key + "' must be >= 1");
  }
  if (c.options.count("tmax") && !(c.option_double("tmax") > c.option_double("tmin"))) fail("tmax must exceed tmin");
  if (c.options.count("tau_max") && !(c.option_double("tau_max") > c.option_double("tau_min"))) {
    fail("tau_max must exceed tau_min");
  }
  if (c.options.count("fraction")) {
    const double f = c.option_double("fraction");
    if (!(f > 0.0 && f <= 1.0)) fail("option 'fraction' must lie in (0, 1]");
  }
  if (c.options.count("cut")) {
    const auto cut = c.option_int("cut");
    for (int n : M.N) {
      if (cut < 0 || cut >= n) fail("option 'cut' must lie in [1, N-1] (0 for N/2)");
    }
  }
  if (c.options.count("site")) {
    const auto site = c.option_int("site");
    for (int n : M.N) {
      if (site < 1 || site > n) fail("option 'site' must lie in [1, N]");
    }
  }
  if (c.options.count("sigma") && !(c.option_double("sigma") >= 0.0)) fail("option 'sigma' must be >= 0");
  if (c.options.count("window_k") && c.option_int("window_k") != 0 && c.option_int("window_k") < 3) {
    fail("option 'window_k' must be 0 (default) or >= 3");
  }
  if (c.options.count("anchor_shift")) {
    const double a = c.option_double("anchor_shift");
    if (!(a >= 0.0 && a < c.option_double("dlog"))) fail("option 'anchor_shift' must lie in [0, dlog)");
  }
  if (c.options.count("initial")) {
    const auto s = c.option_string("initial");
    if (s != "vac") {
      if (static_cast<int>(s.size()) != M.N.front() || s.find_first_not_of("01") != std::string::npos ||
          std::count(s.begin(), s.end(), '1') * 2 != static_cast<long>(s.size())) {
        fail("option 'initial' must be 'vac' or a half-filled bit string of length N");
      }
    }
  }
  if (c.options.count("coefficients")) {
    const auto s = c.option_string("coefficients");
    if (s != "schrieffer_wolff" && s != "as_printed") fail("option 'coefficients' must be schrieffer_wolff or as_printed");
  }
}

nlohmann::json numeric_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["task"] = c.task;
  auto& m = j["model"];
  m["kind"] = to_string(c.model.kind);
  m["N"] = c.model.N;
  m["J"] = c.model.J;
  m["w"] = c.model.w;
  m["m"] = c.model.m;
  m["theta"] = c.model.theta;
  if (c.model.kind == ModelKind::scaled) {
    m["J_zz"] = c.model.J_zz;
    m["J_q"] = c.model.J_q;
  }
  if (c.model.kind == ModelKind::xxz) {
    m["J_xy"] = c.model.J_xy;
    m["J_z"] = c.model.J_z;
    m["W"] = c.model.W;
    m["disorder"] = c.model.disorder;
  }
  j["sectors"] = {{"count", c.sectors}, {"master_seed", c.master_seed}};
  auto& o = j["options"];
  o = nlohmann::json::object();
  for (const auto& [k, v] : c.options) std::visit([&](const auto& x) { o[k] = x; }, v);
  return j;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  auto j = numeric_json(c);
  j["out"] = c.out;
  j["workers"] = c.workers;
  j["plot"] = c.plot;
  return j;
}

ExperimentConfig from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.task = j.at("task").get<std::string>();
    const auto& m = j.at("model");
    c.model.kind = parse_kind(m.at("kind").get<std::string>(), "manifest");
    c.model.N = m.at("N").get<std::vector<int>>();
    c.model.J = m.at("J").get<std::vector<double>>();
    c.model.w = m.at("w").get<double>();
    c.model.m = m.at("m").get<double>();
    c.model.theta = m.at("theta").get<double>();
    c.model.J_zz = m.value("J_zz", 1.0);
    c.model.J_q = m.value("J_q", 1.0);
    c.model.J_xy = m.value("J_xy", 1.0);
    c.model.J_z = m.value("J_z", 1.0);
    c.model.W = m.value("W", 0.0);
    c.model.disorder = m.value("disorder", std::string("uniform"));
    c.sectors = j.at("sectors").at("count").get<int>();
    c.master_seed = j.at("sectors").at("master_seed").get<std::uint64_t>();
    const auto it = schemas().find(c.task);
    if (it == schemas().end()) throw ConfigError("manifest", "unknown task '" + c.task + "'");
    c.options = it->second;
    for (const auto& [k, v] : j.at("options").items()) {
      const auto d = it->second.find(k);
      if (d == it->second.end()) throw ConfigError("manifest", "option '" + k + "' is not valid for task " + c.task);
      if (std::holds_alternative<bool>(d->second)) {
        c.options[k] = v.get<bool>();
      } else if (std::holds_alternative<std::int64_t>(d->second)) {
        c.options[k] = v.get<std::int64_t>();
      } else if (std::holds_alternative<double>(d->second)) {
        c.options[k] = v.get<double>();
      } else {
        c.options[k] = v.get<std::string>();
      }
    }
    c.out = j.value("out", std::string("results"));
    c.workers = j.value("workers", 0u);
    c.plot = j.value("plot", false);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest", std::string("malformed config: ") + e.what());
  }
  validate(c, "manifest");
  return c;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(numeric_json(c).dump())));
  return buf;
}

}  // namespace lab
