#pragma once

#include <filesystem>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "matchbook/core/properties.hpp"

namespace matchbook::hawkes {

class HawkesError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Multivariate Hawkes process with exponential kernels:
//   lambda_i(t) = mu_i + sum_j sum_{t_k^j < t} alpha_ij exp(-beta_ij (t - t_k^j))
struct HawkesParams {
  Eigen::VectorXd mu;
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd beta;

  int dimension() const { return static_cast<int>(mu.size()); }

  // mu everywhere, a_self on the diagonal, a_cross elsewhere, one beta.
  static HawkesParams symmetric(int d, double mu, double a_self, double a_cross, double beta);
  static HawkesParams poisson(Eigen::VectorXd mu);

  // Spectral radius of the branching matrix alpha_ij / beta_ij.
  double spectral_radius() const;
  // Expected long-run rate per component, (I - A/B)^-1 mu.
  Eigen::VectorXd stationary_rates() const;
  // Throws HawkesError on shape mismatch, negative entries, beta <= 0 where
  // alpha > 0, or a spectral radius >= 1.
  void validate() const;
};

struct Event {
  double time{0};
  int type{0};  // 0-based component
  friend bool operator==(const Event&, const Event&) = default;
};

// Intensity just before t: only events strictly earlier than t count.
Eigen::VectorXd intensity(const HawkesParams& p, double t, std::span<const Event> history);
// Intensity just after t: events at t count too.
Eigen::VectorXd intensity_after(const HawkesParams& p, double t, std::span<const Event> history);

// Running excitation state, so the simulation costs O(d^2) per step
// instead of rescanning history.
class IntensityState {
 public:
  explicit IntensityState(const HawkesParams& p);

  void advance_to(double t);  // decay excitation; t must not go backwards
  void add_event(int type);   // jump by column `type` of alpha at the current time
  Eigen::VectorXd rates() const;
  double total() const;
  double now() const { return now_; }

 private:
  const HawkesParams* p_;
  Eigen::MatrixXd excite_;  // excite_(i, j): what component j's events add to lambda_i
  double now_{0};
};

struct ThinningStats {
  std::uint64_t candidates{0};
  std::uint64_t accepted{0};
  double min_ratio{1.0};  // smallest accepted-or-rejected lambda(t)/lambda_bar seen
  double max_ratio{0.0};
};

// Ogata's thinning on [0, horizon). Throws HawkesError for invalid params.
std::vector<Event> simulate(const HawkesParams& p, double horizon, std::mt19937_64& rng,
                            ThinningStats* stats = nullptr);

// hawkesData.properties keys: mu, alpha, beta as comma lists. mu may be one
// value (broadcast) or d values; alpha and beta may be one value, d values
// (a diagonal, zero off-diagonal for alpha), or d*d row-major values.
// `dimension` defaults to 8.
HawkesParams params_from_properties(const Properties& props);

// CSV of time then one column per component, sampled every `step` seconds
// plus at both sides of each event so the jumps show.
void write_intensity_trace(const std::filesystem::path& path, const HawkesParams& p, std::span<const Event> events,
                           double until, double step);

}  // namespace matchbook::hawkes
