#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace schwinger {

struct JumpEvent {
  std::uint64_t sector_seed = 0;
  double tau_J = 0.0;  // sqrt(t_start * t_end)
  double height = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
};

struct JumpOptions {
  double dlog = 0.25;      // interval width in decades
  double min_step = 0.05;  // minimum cumulative-max increase per interval
  double anchor_shift = 0.0;  // boundary phase in decades, in [0, dlog)
};

/// Jumps in the cumulative maximum of a series on increasing times. Interval
/// boundaries are t_min * 10^(anchor_shift + k dlog); the cumulative maximum
/// at a boundary is its value at the last grid time not after it.
std::vector<JumpEvent> detect_jumps(const std::vector<double>& series, const std::vector<double>& times,
                                    const JumpOptions& options = {}, std::uint64_t sector_seed = 0);

enum class FitMethod { histogram, histogram_mle, entropy_fit };
std::string to_string(FitMethod method);

struct PowerLawFit {
  FitMethod method = FitMethod::histogram;
  double alpha = 0.0;
  double alpha_err = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  // entropy_fit only
  double S_inf = 0.0;
  double S_0 = 0.0;
  double S_inf_err = 0.0;
  double S_0_err = 0.0;
  double rms_residual = 0.0;
  int points = 0;  // populated bins or fitted samples
};

struct HistogramFitOptions {
  int bins_per_decade = 4;
  double t_lo = 0.0;  // 0: smallest tau_J
  double t_hi = 0.0;  // 0: series end / 10^0.5
  bool mle = false;
  std::size_t min_events = 100;
};

struct JumpHistogram {
  std::vector<double> edges;
  std::vector<double> centres;  // geometric
  std::vector<double> density;  // summed height per unit time
  std::vector<double> weights;  // inverse variance of log10(density)
  std::vector<std::size_t> counts;
};

JumpHistogram jump_histogram(const std::vector<JumpEvent>& events, double t_lo, double t_hi, int bins_per_decade);

/// Power law P(tau) ~ tau^-(alpha+1) for the height-weighted jump times.
/// `t_end` is the last time of the analysed series (sets the default t_hi).
PowerLawFit fit_jump_histogram(const std::vector<JumpEvent>& events, double t_end,
                               const HistogramFitOptions& options = {});

/// S(t) = S_inf - S_0 t^-alpha on t >= t_lo, by variable projection in alpha.
PowerLawFit fit_entropy_powerlaw(const std::vector<double>& times, const std::vector<double>& values,
                                 double t_lo = 1e2, double t_hi = 0.0);

}  // namespace schwinger
