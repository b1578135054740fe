#include "tasks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "io.hpp"
#include "schwinger/basis.hpp"
#include "schwinger/dpt.hpp"
#include "schwinger/dynamics.hpp"
#include "schwinger/entropy.hpp"
#include "schwinger/fragmentation.hpp"
#include "schwinger/jumps.hpp"
#include "schwinger/model.hpp"
#include "schwinger/numerics.hpp"
#include "schwinger/spectral.hpp"
#include "svg.hpp"

namespace lab {

using nlohmann::json;
namespace sw = schwinger;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double num(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

template <class V>
json jvec(const V& v) {
  json a = json::array();
  for (auto x : v) a.push_back(jnum(static_cast<double>(x)));
  return a;
}
std::vector<double> vec(const json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(num(x));
  return out;
}

double finite_mean(const std::vector<double>& v) {
  std::vector<double> ok;
  for (double x : v) {
    if (std::isfinite(x)) ok.push_back(x);
  }
  return ok.empty() ? kNaN : sw::mean(ok);
}

double finite_sem(const std::vector<double>& v) {
  std::vector<double> ok;
  for (double x : v) {
    if (std::isfinite(x)) ok.push_back(x);
  }
  return ok.size() > 1 ? sw::stddev(ok) / std::sqrt(static_cast<double>(ok.size() - 1)) : kNaN;
}

struct Instance {
  sw::HalfFillingBasis basis;
  sw::ChargeSector sector;
  sw::SectorHamiltonian h;
};

Instance build(const ExperimentConfig& c, const Unit& u) {
  sw::HalfFillingBasis basis(u.N);
  auto sector = sw::parse_sector(u.sector);
  const auto& M = c.model;
  sw::ModelParams p{u.N, u.J, M.w, M.m, M.theta};
  switch (M.kind) {
    case ModelKind::schwinger: {
      auto h = sw::build_hamiltonian(p, sector, basis);
      return {std::move(basis), std::move(sector), std::move(h)};
    }
    case ModelKind::scaled: {
      auto h = sw::build_scaled_hamiltonian(p, sector, basis, M.J_zz, M.J_q);
      return {std::move(basis), std::move(sector), std::move(h)};
    }
    case ModelKind::xxz: {
      sw::XXZParams x{u.N, M.J_xy, M.J_z, M.W,
                      M.disorder == "discrete" ? sw::DisorderKind::discrete : sw::DisorderKind::uniform};
      auto h = sw::build_xxz(x, u.seed, basis);
      return {std::move(basis), std::move(sector), std::move(h)};
    }
  }
  throw std::logic_error("unreachable");
}

int cut_of(const ExperimentConfig& c, int n) {
  const auto cut = c.option_int("cut");
  return cut == 0 ? n / 2 : static_cast<int>(cut);
}

sw::SpinConfig initial_config(const ExperimentConfig& c, int n) {
  const auto s = c.option_string("initial");
  return s == "vac" ? sw::vacuum_config(n) : sw::SpinConfig::from_string(s);
}

sw::TimeGrid time_grid(const ExperimentConfig& c) {
  return sw::TimeGrid::log(c.option_double("tmin"), c.option_double("tmax"), static_cast<int>(c.option_int("per_decade")));
}

json quench_payload(const ExperimentConfig& c, const Unit& u, const Instance& in) {
  const auto spec = sw::diagonalize(in.h);
  const auto psi0 = sw::basis_vector(in.basis, initial_config(c, u.N));
  const auto q = sw::run_quench(in.h, spec, in.basis, psi0, time_grid(c), cut_of(c, u.N));
  double norm_dev = 0.0;
  double energy_dev = 0.0;
  for (std::size_t k = 0; k < q.norm.size(); ++k) {
    norm_dev = std::max(norm_dev, std::abs(q.norm[k] - 1.0));
    energy_dev = std::max(energy_dev, std::abs(q.energy[k] - q.energy.front()));
  }
  return {{"S_E", jvec(q.entropy.S_E)}, {"S_N", jvec(q.entropy.S_N)}, {"S_C", jvec(q.entropy.S_C)},
          {"mu", jvec(q.mu)},           {"norm_dev", norm_dev},     {"energy_dev", energy_dev}};
}

json dpt_payload(const ExperimentConfig& c, const Unit& u, const Instance& in) {
  const auto& h = in.h;
  const auto spec = sw::diagonalize(h);
  const auto towers = sw::build_towers(h);
  const auto blocks = sw::build_T_blocks(h, towers);
  const auto start = initial_config(c, u.N);
  const auto start_index = in.basis.index_of(start);
  const auto label = (*h.diag_units)[start_index];
  const auto& states = towers.at(label);
  Eigen::VectorXcd psi_t = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == start_index) psi_t[static_cast<Eigen::Index>(i)] = 1.0;
  }
  const auto grid = time_grid(c);
  const auto& times = grid.points;
  const sw::Bipartition bp(in.basis, cut_of(c, u.N));
  const Eigen::VectorXd mu_diag = sw::staggered_magnetization_diagonal(in.basis);
  const auto coeffs =
      c.option_string("coefficients") == "as_printed" ? sw::Coefficients::as_printed : sw::Coefficients::schrieffer_wolff;
  const bool normalize = c.option_bool("normalize");

  json out = json::object();
  auto observe = [&](const std::string& key, const Eigen::MatrixXcd& tower_states) {
    std::vector<double> mu, se, nrm;
    for (Eigen::Index k = 0; k < tower_states.cols(); ++k) {
      Eigen::VectorXcd full = sw::embed(states, in.basis.size(), tower_states.col(k));
      const double n = full.norm();
      nrm.push_back(n);
      if (normalize && n > 0) full /= n;
      mu.push_back(mu_diag.dot(full.cwiseAbs2()));
      se.push_back(sw::entropy_decomposition(full, bp).S_E);
    }
    out[key] = {{"mu", jvec(mu)}, {"S_E", jvec(se)}, {"norm", jvec(nrm)}};
  };
  for (int order = 1; order <= 3; ++order) {
    const auto heff = sw::build_effective(h, blocks, label, order, coeffs);
    observe(std::to_string(order), sw::evolve_dpt(heff, psi_t, times));
    if (order == 3) out["hermiticity_residual"] = heff.hermiticity_residual;
  }
  observe("inf", sw::evolve_dpt_infinite(spec, states, sw::embed(states, in.basis.size(), psi_t), times));

  std::vector<double> mu(times.size()), se(times.size());
  sw::evolve_exact(spec, sw::basis_vector(in.basis, start), times,
                   [&](std::size_t k, double, const Eigen::VectorXcd& psi) {
                     mu[k] = mu_diag.dot(psi.cwiseAbs2());
                     se[k] = sw::entropy_decomposition(psi, bp).S_E;
                   });
  out["full"] = {{"mu", jvec(mu)}, {"S_E", jvec(se)}};
  out["tower_dimension"] = states.size();
  return out;
}

}  // namespace

std::vector<Unit> plan_units(const ExperimentConfig& c) {
  std::vector<Unit> out;
  for (int n : c.model.N) {
    const auto sectors = sw::sample_charge_sectors(n, c.sectors, c.master_seed);
    for (double J : c.model.J) {
      for (std::size_t k = 0; k < sectors.size(); ++k) {
        Unit u;
        u.index = out.size();
        u.N = n;
        u.J = J;
        u.sector_index = k;
        u.seed = sectors[k].seed;
        u.sector = sw::format_sector(sectors[k]);
        out.push_back(std::move(u));
      }
    }
  }
  return out;
}

json run_unit(const ExperimentConfig& c, const Unit& u) {
  const Instance in = build(c, u);
  const std::string& t = c.task;
  if (t == "rstat") {
    const Eigen::VectorXd e = sw::eigenvalues(in.h);
    const auto k_opt = c.option_int("window_k");
    const Eigen::Index k = k_opt > 0 ? std::min<Eigen::Index>(k_opt, e.size()) : sw::default_r_window(e.size());
    return {{"mean_r", jnum(sw::sector_mean_r(e, k))}, {"k", k}, {"centre", sw::dos_peak(e)}};
  }
  if (t == "dos") {
    const Eigen::VectorXd e = sw::eigenvalues(in.h);
    const auto hist = sw::dos_histogram(e, u.J, c.option_double("bin_width"));
    return {{"centres", jvec(hist.centres)}, {"counts", jvec(hist.counts)}, {"bin_width", hist.bin_width}};
  }
  if (t == "eigentropy") {
    const auto spec = sw::diagonalize(in.h);
    const auto s = sw::eigenstate_entropy_stats(spec, in.basis, cut_of(c, u.N), c.option_double("fraction"));
    return {{"mean", jnum(s.mean)}, {"std", jnum(s.std)}};
  }
  if (t == "sff") {
    const Eigen::VectorXd e = sw::eigenvalues(in.h);
    return {{"unfolded", jvec(sw::unfold(e, static_cast<int>(c.option_int("degree"))))}};
  }
  if (t == "thouless") {
    const double strength = c.option_double("strength");
    return {{"G", jnum(sw::thouless_parameter(in.h, in.basis, static_cast<int>(c.option_int("site")),
                                             strength > 0 ? strength : -1.0))}};
  }
  if (t == "quench") return quench_payload(c, u, in);
  if (t == "jumps") {
    json p = quench_payload(c, u, in);
    const auto grid = time_grid(c);
    const auto smoothed = sw::smooth_log_time(vec(p["S_C"]), grid.points, c.option_double("sigma"));
    sw::JumpOptions jo;
    jo.dlog = c.option_double("dlog");
    jo.min_step = c.option_double("min_step");
    jo.anchor_shift = c.option_double("anchor_shift");
    json ev = json::array();
    for (const auto& e : sw::detect_jumps(smoothed, grid.points, jo, u.seed)) {
      ev.push_back({e.tau_J, e.height, e.t_start, e.t_end});
    }
    p["events"] = ev;
    return p;
  }
  if (t == "dpt_compare") return dpt_payload(c, u, in);
  if (t == "fragmentation") {
    json rows = json::array();
    for (const auto& r : sw::fragmentation_rows(sw::decompose_sector(in.h, in.basis))) {
      rows.push_back({r.tower_label, r.subspace_id, r.dimension, r.n_active_regions, r.crosses_center ? 1 : 0});
    }
    return {{"rows", rows}};
  }
  throw ConfigError("config", "unknown task '" + t + "'");
}

namespace {

using Payloads = std::vector<std::optional<json>>;

// (N, J) combinations in plan order
std::vector<std::pair<int, double>> combos(const ExperimentConfig& c) {
  std::vector<std::pair<int, double>> out;
  for (int n : c.model.N) {
    for (double J : c.model.J) out.emplace_back(n, J);
  }
  return out;
}

void finalize_rstat(const ExperimentConfig& c, const std::vector<Unit>& units, const Payloads& p, Artifacts& a) {
  CsvTable rows({"N", "J", "sector_seed", "mean_r"});
  CsvTable summary({"N", "J", "sectors", "k", "grand_mean", "grand_sem"});
  Plot plot{"mean gap ratio", "J/w", "<r>", false, false, {}, {{0.386, "Poisson 0.386"}, {0.536, "GOE 0.536"}}};
  std::map<int, Series> by_n;
  for (const auto& [n, J] : combos(c)) {
    std::vector<double> r;
    std::int64_t k = 0;
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (units[i].N != n || units[i].J != J || !p[i]) continue;
      const double v = num((*p[i])["mean_r"]);
      k = (*p[i])["k"].get<std::int64_t>();
      rows.row(n, J, units[i].seed, v);
      r.push_back(v);
    }
    const double gm = finite_mean(r);
    const double se = finite_sem(r);
    summary.row(n, J, r.size(), k, gm, se);
    a.summary["grand_mean"][std::to_string(n)][fmt(J)] = jnum(gm);
    auto& s = by_n[n];
    s.label = "N=" + std::to_string(n);
    s.style = Series::Style::points;
    s.colour = kPalette[by_n.size() % 8];
    s.x.push_back(J);
    s.y.push_back(gm);
    s.err.push_back(std::isfinite(se) ? se : 0.0);
  }
  a.files["rstat.csv"] = rows.str();
  a.files["rstat_summary.csv"] = summary.str();
  for (auto& [n, s] : by_n) plot.series.push_back(s);
  plot.logx = c.model.J.size() > 1 && *std::min_element(c.model.J.begin(), c.model.J.end()) > 0;
  if (c.plot) a.files["r_vs_J.svg"] = plot.svg();
}

void finalize_dos(const ExperimentConfig& c, const std::vector<Unit>& units, const Payloads& p, Artifacts& a) {
  std::vector<sw::Histogram> per_sector;
  sw::Histogram acc;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!p[i]) continue;
    sw::Histogram h;
    h.centres = vec((*p[i])["centres"]);
    h.counts = vec((*p[i])["counts"]);
    h.bin_width = (*p[i])["bin_width"].get<double>();
    if (per_sector.empty()) {
      acc = h;
    } else {
      sw::accumulate(acc, h);
    }
    per_sector.push_back(std::move(h));
  }
  CsvTable t({"bin_center_over_J", "count"});
  for (std::size_t b = 0; b < acc.centres.size(); ++b) t.row(acc.centres[b], acc.counts[b]);
  a.files["dos.csv"] = t.str();
  if (acc.counts.size() > 4) {
    // default: lags up to 3 J
    const auto max_lag = c.option_int("max_lag") > 0 ? static_cast<std::size_t>(c.option_int("max_lag"))
                                                     : static_cast<std::size_t>(std::ceil(3.0 / acc.bin_width));
    const auto sector_acf = sw::mean_autocorrelation(per_sector, max_lag);
    const auto pooled_acf = sw::autocorrelation(acc.counts, max_lag);
    a.summary["dominant_period_over_J"] = static_cast<double>(sw::dominant_lag(sector_acf, 1)) * acc.bin_width;
    a.summary["pooled_dominant_period_over_J"] = static_cast<double>(sw::dominant_lag(pooled_acf, 1)) * acc.bin_width;
    CsvTable ac({"lag_over_J", "acf_sector_mean", "acf_pooled"});
    for (std::size_t k = 0; k < std::min(sector_acf.size(), pooled_acf.size()); ++k) {
      ac.row(static_cast<double>(k) * acc.bin_width, sector_acf[k], pooled_acf[k]);
    }
    a.files["dos_acf.csv"] = ac.str();
  }
  if (c.plot) {
    Plot plot{"density of states", "E/J", "count", false, false, {}, {}};
    Series s;
    s.style = Series::Style::bars;
    s.x = acc.centres;
    s.y = acc.counts;
    plot.series.push_back(s);
    a.files["dos.svg"] = plot.svg();
  }
}

void finalize_eigentropy(const ExperimentConfig& c, const std::vector<Unit>& units, const Payloads& p, Artifacts& a) {
  CsvTable rows({"N", "J", "sector_seed", "mean_S_E", "std_S_E"});
  CsvTable summary({"N", "J", "sectors", "mean_S_E", "std_S_E"});
  std::map<int, std::pair<Series, Series>> by_n;
  for (const auto& [n, J] : combos(c)) {
    std::vector<double> m, s;
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (units[i].N != n || units[i].J != J || !p[i]) continue;
      m.push_back(num((*p[i])["mean"]));
      s.push_back(num((*p[i])["std"]));
      rows.row(n, J, units[i].seed, m.back(), s.back());
    }
    summary.row(n, J, m.size(), finite_mean(m), finite_mean(s));
    auto& [sm, ss] = by_n[n];
    sm.label = ss.label = "N=" + std::to_string(n);
    sm.colour = ss.colour = kPalette[by_n.size() % 8];
    sm.x.push_back(J);
    sm.y.push_back(finite_mean(m));
    ss.x.push_back(J);
    ss.y.push_back(finite_mean(s));
  }
  a.files["eigentropy.csv"] = rows.str();
  a.files["eigentropy_summary.csv"] = summary.str();
  if (c.plot) {
    const bool logx = c.model.J.size() > 1 && *std::min_element(c.model.J.begin(), c.model.J.end()) > 0;
    Plot pm{"eigenstate entanglement, mean", "J/w", "mean S_E", logx, false, {}, {}};
    Plot ps{"eigenstate entanglement, std", "J/w", "std S_E", logx, false, {}, {}};
    for (auto& [n, pr] : by_n) {
      pm.series.push_back(pr.first);
      ps.series.push_back(pr.second);
    }
    a.files["eigentropy_mean.svg"] = pm.svg();
    a.files["eigentropy_std.svg"] = ps.svg();
  }
}

void finalize_sff(const ExperimentConfig& c, const std::vector<Unit>& units, const Payloads& p, Artifacts& a) {
  std::vector<Eigen::VectorXd> unfolded;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!p[i]) continue;
    const auto v = vec((*p[i])["unfolded"]);
    unfolded.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  if (unfolded.empty()) throw sw::NumericalError("no sector produced an unfolded spectrum", 0);
  const auto tau = sw::log_grid(c.option_double("tau_min"), c.option_double("tau_max"),
                                static_cast<int>(c.option_int("tau_per_decade")));
  const auto r = sw::connected_sff(unfolded, tau);
  CsvTable t({"tau", "K_c"});
  for (std::size_t k = 0; k < r.tau.size(); ++k) t.row(r.tau[k], r.K_c[k]);
  a.files["sff.csv"] = t.str();
  a.summary["tau_goe"] = jnum(r.tau_goe);
  a.summary["Z"] = jnum(r.Z);
  a.summary["A"] = jnum(r.A);
  if (c.plot) {
    Plot plot{"connected spectral form factor", "tau", "K_c", true, true, {}, {}};
    Series raw{"K_c", r.tau, r.K_c, {}, Series::Style::line, "#9ecae1", 1.0};
    Series sm{"smoothed", r.tau, r.K_c_smooth, {}, Series::Style::line, "#1f77b4", 2.0};
    Series goe{"GOE", r.tau, {}, {}, Series::Style::line, "#d62728", 1.5};
    goe.dashed = true;
    for (double x : r.tau) goe.y.push_back(sw::goe_sff(x));
    plot.series = {raw, sm, goe};
    a.files["sff.svg"] = plot.svg();
  }
}

void finalize_thouless(const ExperimentConfig& c, const std::vector<Unit>& units, const Payloads& p, Artifacts& a) {
  CsvTable t({"N", "J", "mean_G"});
  std::map<double, Series> by_j;
  for (const auto& [n, J] : combos(c)) {
    std::vector<double> g;
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (units[i].N == n && units[i].J == J && p[i]) g.push_back(num((*p[i])["G"]));
    }
    const double m = finite_mean(g);
    t.row(n, J, m);
    auto& s = by_j[J];
    s.label = "J=" + fmt(J);
    s.style = Series::Style::points;
    s.colour = kPalette[by_j.size() % 8];
    s.x.push_back(n);
    s.y.push_back(m);
  }
  a.files["thouless.csv"] = t.str();
  if (c.plot) {
    Plot plot{"Thouless parameter", "N", "mean G", false, false, {}, {}};
    for (auto& [J, s] : by_j) plot.series.push_back(s);
    a.files["thouless.svg"] = plot.svg();
  }
}

struct EntropyRows {
  std::vector<sw::EntropySeries> series;
  std::vector<std::vector<double>> mu;
  std::vector<std::uint64_t> seeds;
};

EntropyRows collect_entropy(const ExperimentConfig& c, const std::vector<Unit>& units, const Payloads& p) {
  EntropyRows r;
  const auto grid = time_grid(c);
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!p[i]) continue;
    sw::EntropySeries s;
    s.grid = grid;
    s.S_E = vec((*p[i])["S_E"]);
    s.S_N = vec((*p[i])["S_N"]);
    s.S_C = vec((*p[i])["S_C"]);
    s.cut = cut_of(c, units[i].N);
    r.series.push_back(std::move(s));
    r.mu.push_back(vec((*p[i])["mu"]));
    r.seeds.push_back(units[i].seed);
  }
  return r;
}

std::string entropy_agg_csv(const sw::EntropyAggregate& agg) {
  CsvTable t({"wt", "mean_S_E", "median_S_E", "std_S_E", "mean_S_N", "median_S_N", "std_S_N", "mean_S_C", "median_S_C",
              "std_S_C"});
  for (std::size_t k = 0; k < agg.grid.size(); ++k) {
    t.row(agg.grid.points[k], agg.S_E.mean[k], agg.S_E.median[k], agg.S_E.std[k], agg.S_N.mean[k], agg.S_N.median[k],
          agg.S_N.std[k], agg.S_C.mean[k], agg.S_C.median[k], agg.S_C.std[k]);
  }
  return t.str();
}

Plot entropy_fan(const ExperimentConfig& c, const EntropyRows& r, const sw::EntropyAggregate& agg,
                 const std::string& which) {
  Plot plot{which + "(t)", "wt", which, true, false, {}, {}};
  const double sigma = c.option_double("sigma");
  const std::size_t shown = std::min<std::size_t>(r.series.size(), 200);
  for (std::size_t s = 0; s < shown; ++s) {
    const auto sm = sw::smooth_log_time(r.series[s], sigma);
    const auto& y = which == "S_E" ? sm.S_E : which == "S_N" ? sm.S_N : sm.S_C;
    plot.series.push_back({"", agg.grid.points, y, {}, Series::Style::line, "#1f77b4", 0.6, 0.15});
  }
  const auto& a = which == "S_E" ? agg.S_E : which == "S_N" ? agg.S_N : agg.S_C;
  const auto& t = agg.grid.points;
  plot.series.push_back({"mean", t, sw::smooth_log_time(a.mean, t, sigma), {}, Series::Style::line, "black", 2.0});
  Series med{"median", t, sw::smooth_log_time(a.median, t, sigma), {}, Series::Style::line, "black", 2.0};
  med.dashed = true;
  plot.series.push_back(med);
  return plot;
}

void finalize_quench(const ExperimentConfig& c, const std::vector<Unit>&, const EntropyRows& r, Artifacts& a) {
  const auto grid = time_grid(c);
  CsvTable ent({"wt", "sector_seed", "S_E", "S_N", "S_C"});
  CsvTable mu({"wt", "sector_seed", "mu"});
  for (std::size_t s = 0; s < r.series.size(); ++s) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      ent.row(grid.points[k], r.seeds[s], r.series[s].S_E[k], r.series[s].S_N[k], r.series[s].S_C[k]);
      mu.row(grid.points[k], r.seeds[s], r.mu[s][k]);
    }
  }
  a.files["entropy.csv"] = ent.str();
  a.files["mu.csv"] = mu.str();
  if (r.series.empty()) return;
  const auto agg = sw::aggregate_sectors(r.series);
  a.files["entropy_agg.csv"] = entropy_agg_csv(agg);
  if (c.plot) {
    for (const char* w : {"S_E", "S_N", "S_C"}) a.files[std::string("entropy_") + w + ".svg"] = entropy_fan(c, r, agg, w).svg();
    const auto mu_agg = sw::aggregate(r.mu);
    Plot pm{"staggered magnetization", "wt", "mu", true, false, {}, {}};
    pm.series.push_back({"mean", grid.points, mu_agg.mean, {}, Series::Style::line, "black", 2.0});
    a.files["mu.svg"] = pm.svg();
  }
}

void finalize_jumps(const ExperimentConfig& c, const std::vector<Unit>& units, const Payloads& p, const EntropyRows& r,
                    Artifacts& a) {
  const auto grid = time_grid(c);
  CsvTable jt({"sector_seed", "tau_J", "height"});
  std::vector<sw::JumpEvent> events;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!p[i]) continue;
    for (const auto& e : (*p[i])["events"]) {
      sw::JumpEvent ev;
      ev.sector_seed = units[i].seed;
      ev.tau_J = e[0].get<double>();
      ev.height = e[1].get<double>();
      ev.t_start = e[2].get<double>();
      ev.t_end = e[3].get<double>();
      events.push_back(ev);
      jt.row(ev.sector_seed, ev.tau_J, ev.height);
    }
  }
  a.files["jumps.csv"] = jt.str();
  a.summary["events"] = events.size();
  const int n = units.front().N;
  const double J = units.front().J;
  CsvTable at({"N", "J", "method", "alpha", "alpha_err"});
  sw::HistogramFitOptions ho;
  ho.bins_per_decade = static_cast<int>(c.option_int("bins_per_decade"));
  ho.min_events = static_cast<std::size_t>(c.option_int("min_events"));
  std::optional<sw::PowerLawFit> hist;
  try {
    hist = sw::fit_jump_histogram(events, grid.t_max, ho);
    at.row(n, J, sw::to_string(hist->method), hist->alpha, hist->alpha_err);
    a.summary["histogram"] = {{"alpha", hist->alpha}, {"alpha_err", hist->alpha_err}, {"t_lo", hist->t_lo},
                              {"t_hi", hist->t_hi}, {"bins", hist->points}};
    if (c.option_bool("mle")) {
      ho.mle = true;
      const auto m = sw::fit_jump_histogram(events, grid.t_max, ho);
      at.row(n, J, sw::to_string(m.method), m.alpha, m.alpha_err);
    }
  } catch (const std::exception& e) {
    a.errors.push_back(std::string("histogram fit: ") + e.what());
  }
  std::optional<sw::EntropyAggregate> agg;
  if (!r.series.empty()) {
    agg = sw::aggregate_sectors(r.series);
    a.files["entropy_agg.csv"] = entropy_agg_csv(*agg);
    try {
      const auto f = sw::fit_entropy_powerlaw(grid.points, agg->S_C.mean, c.option_double("fit_t_lo"));
      at.row(n, J, sw::to_string(f.method), f.alpha, f.alpha_err);
      a.summary["entropy_fit"] = {{"alpha", f.alpha}, {"alpha_err", f.alpha_err}, {"S_inf", f.S_inf},
                                  {"S_0", f.S_0},     {"rms_residual", f.rms_residual}};
    } catch (const std::exception& e) {
      a.errors.push_back(std::string("entropy fit: ") + e.what());
    }
  }
  a.files["alpha.csv"] = at.str();
  if (c.plot && hist) {
    const auto h = sw::jump_histogram(events, hist->t_lo, hist->t_hi, ho.bins_per_decade);
    Plot plot{"height-weighted jump times", "tau_J", "jump density", true, true, {}, {}};
    Series pts{"jumps", {}, {}, {}, Series::Style::points, "#1f77b4"};
    for (std::size_t b = 0; b < h.centres.size(); ++b) {
      if (h.counts[b] == 0) continue;
      pts.x.push_back(h.centres[b]);
      pts.y.push_back(h.density[b]);
    }
    // fit line through the weighted centroid
    double sw_ = 0, sx = 0, sy = 0;
    for (std::size_t b = 0; b < h.centres.size(); ++b) {
      if (h.counts[b] == 0) continue;
      sw_ += h.weights[b];
      sx += h.weights[b] * std::log10(h.centres[b]);
      sy += h.weights[b] * std::log10(h.density[b]);
    }
    Series line{"alpha=" + fmt(std::round(hist->alpha * 1e4) / 1e4), {}, {}, {}, Series::Style::line, "#d62728"};
    for (double t : {hist->t_lo, hist->t_hi}) {
      line.x.push_back(t);
      line.y.push_back(std::pow(10.0, sy / sw_ - (hist->alpha + 1) * (std::log10(t) - sx / sw_)));
    }
    plot.series = {pts, line};
    a.files["jump_histogram.svg"] = plot.svg();
  }
  if (c.plot && agg) a.files["entropy_S_C.svg"] = entropy_fan(c, r, *agg, "S_C").svg();
}

void finalize_dpt(const ExperimentConfig& c, const std::vector<Unit>& units, const Payloads& p, Artifacts& a) {
  const auto grid = time_grid(c);
  CsvTable t({"wt", "order", "observable", "value"});
  std::map<std::string, std::map<std::string, std::vector<double>>> avg;
  const std::vector<std::pair<std::string, std::vector<std::string>>> layout{
      {"1", {"mu", "S_E"}}, {"2", {"mu", "S_E"}}, {"3", {"mu", "S_E"}}, {"inf", {"mu", "S_E", "norm"}}, {"full", {"mu", "S_E"}}};
  double herm = 0.0;
  for (const auto& [order, obs] : layout) {
    for (const auto& o : obs) {
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < units.size(); ++i) {
        if (p[i]) rows.push_back(vec((*p[i])[order][o]));
      }
      if (rows.empty()) continue;
      const auto agg = sw::aggregate(rows);
      avg[order][o] = agg.mean;
      for (std::size_t k = 0; k < grid.size(); ++k) t.row(grid.points[k], order, o, agg.mean[k]);
    }
  }
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (p[i]) herm = std::max(herm, (*p[i])["hermiticity_residual"].get<double>());
  }
  a.files["dpt_compare.csv"] = t.str();
  a.summary["normalized_dpt_inf"] = c.option_bool("normalize");
  a.summary["max_hermiticity_residual"] = herm;
  if (c.plot) {
    for (const char* o : {"mu", "S_E"}) {
      Plot plot{std::string("DPT comparison: ") + o, "wt", o, true, false, {}, {}};
      int ci = 0;
      for (const auto& [order, obs] : layout) {
        if (!avg[order].count(o)) continue;
        Series s{order == "inf" || order == "full" ? order : "DPT(" + order + ")", grid.points, avg[order][o], {},
                 Series::Style::line, kPalette[ci++ % 8], 1.5};
        s.dashed = order == "inf";
        plot.series.push_back(s);
      }
      a.files[std::string("dpt_") + o + ".svg"] = plot.svg();
    }
  }
}

void finalize_fragmentation(const ExperimentConfig&, const std::vector<Unit>& units, const Payloads& p, Artifacts& a) {
  CsvTable t({"sector_seed", "tower_label", "subspace_id", "dimension", "n_active_regions", "crosses_center"});
  std::size_t subspaces = 0;
  std::size_t largest = 0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!p[i]) continue;
    for (const auto& r : (*p[i])["rows"]) {
      t.row(units[i].seed, r[0].get<std::int64_t>(), r[1].get<std::uint64_t>(), r[2].get<std::uint64_t>(),
            r[3].get<std::uint64_t>(), r[4].get<std::int64_t>());
      ++subspaces;
      largest = std::max<std::size_t>(largest, r[2].get<std::size_t>());
    }
  }
  a.files["fragmentation.csv"] = t.str();
  a.summary["subspaces"] = subspaces;
  a.summary["largest_subspace"] = largest;
}

}  // namespace

Artifacts finalize(const ExperimentConfig& c, const std::vector<Unit>& units, const Payloads& p) {
  Artifacts a;
  const std::string& t = c.task;
  if (t == "rstat") {
    finalize_rstat(c, units, p, a);
  } else if (t == "dos") {
    finalize_dos(c, units, p, a);
  } else if (t == "eigentropy") {
    finalize_eigentropy(c, units, p, a);
  } else if (t == "sff") {
    finalize_sff(c, units, p, a);
  } else if (t == "thouless") {
    finalize_thouless(c, units, p, a);
  } else if (t == "quench") {
    finalize_quench(c, units, collect_entropy(c, units, p), a);
  } else if (t == "jumps") {
    finalize_jumps(c, units, p, collect_entropy(c, units, p), a);
  } else if (t == "dpt_compare") {
    finalize_dpt(c, units, p, a);
  } else if (t == "fragmentation") {
    finalize_fragmentation(c, units, p, a);
  }
  return a;
}

}  // namespace lab
