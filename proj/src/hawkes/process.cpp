#include "matchbook/hawkes/process.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace matchbook::hawkes {
namespace {

Eigen::MatrixXd branching(const HawkesParams& p) {
  const int d = p.dimension();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (p.alpha(i, j) > 0) b(i, j) = p.alpha(i, j) / p.beta(i, j);
    }
  }
  return b;
}

Eigen::VectorXd intensity_impl(const HawkesParams& p, double t, std::span<const Event> history, bool inclusive) {
  Eigen::VectorXd lambda = p.mu;
  for (const auto& e : history) {
    if (e.time > t || (!inclusive && e.time == t)) continue;
    const double dt = t - e.time;
    for (int i = 0; i < p.dimension(); ++i) {
      const double a = p.alpha(i, e.type);
      if (a > 0) lambda(i) += a * std::exp(-p.beta(i, e.type) * dt);
    }
  }
  return lambda;
}

Eigen::MatrixXd matrix_from(const std::vector<double>& v, int d, const char* key, bool diagonal_fill) {
  Eigen::MatrixXd m(d, d);
  if (v.size() == 1) {
    m.setConstant(v[0]);
  } else if (v.size() == static_cast<std::size_t>(d)) {
    if (diagonal_fill) {
      m.setZero();
      for (int i = 0; i < d; ++i) m(i, i) = v[i];
    } else {
      for (int i = 0; i < d; ++i) m.row(i).setConstant(v[i]);
    }
  } else if (v.size() == static_cast<std::size_t>(d) * d) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = v[static_cast<std::size_t>(i) * d + j];
    }
  } else {
    throw HawkesError(fmt::format("{} needs 1, {} or {} values, got {}", key, d, d * d, v.size()));
  }
  return m;
}

}  // namespace

HawkesParams HawkesParams::symmetric(int d, double mu, double a_self, double a_cross, double beta) {
  HawkesParams p;
  p.mu = Eigen::VectorXd::Constant(d, mu);
  p.alpha = Eigen::MatrixXd::Constant(d, d, a_cross);
  p.alpha.diagonal().setConstant(a_self);
  p.beta = Eigen::MatrixXd::Constant(d, d, beta);
  return p;
}

HawkesParams HawkesParams::poisson(Eigen::VectorXd mu) {
  const auto d = mu.size();
  return HawkesParams{std::move(mu), Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Ones(d, d)};
}

double HawkesParams::spectral_radius() const {
  if (dimension() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(branching(*this), false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::VectorXd HawkesParams::stationary_rates() const {
  const int d = dimension();
  return (Eigen::MatrixXd::Identity(d, d) - branching(*this)).partialPivLu().solve(mu);
}

void HawkesParams::validate() const {
  const int d = dimension();
  if (d < 1) throw HawkesError("dimension must be at least 1");
  if (alpha.rows() != d || alpha.cols() != d || beta.rows() != d || beta.cols() != d) {
    throw HawkesError(fmt::format("alpha and beta must be {0}x{0}", d));
  }
  if ((mu.array() < 0).any() || !mu.allFinite()) throw HawkesError("mu must be finite and non-negative");
  if ((alpha.array() < 0).any() || !alpha.allFinite() || !beta.allFinite()) {
    throw HawkesError("alpha must be finite and non-negative");
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (alpha(i, j) > 0 && !(beta(i, j) > 0)) {
        throw HawkesError(fmt::format("beta({},{}) must be positive where alpha is", i, j));
      }
    }
  }
  const double rho = spectral_radius();
  if (!(rho < 1.0)) throw HawkesError(fmt::format("not stationary: spectral radius {:.6f} >= 1", rho));
}

Eigen::VectorXd intensity(const HawkesParams& p, double t, std::span<const Event> history) {
  return intensity_impl(p, t, history, false);
}

Eigen::VectorXd intensity_after(const HawkesParams& p, double t, std::span<const Event> history) {
  return intensity_impl(p, t, history, true);
}

IntensityState::IntensityState(const HawkesParams& p)
    : p_(&p), excite_(Eigen::MatrixXd::Zero(p.dimension(), p.dimension())) {}

void IntensityState::advance_to(double t) {
  const double dt = t - now_;
  if (dt > 0) excite_.array() *= (-p_->beta.array() * dt).exp();
  now_ = std::max(now_, t);
}

void IntensityState::add_event(int type) { excite_.col(type) += p_->alpha.col(type); }

Eigen::VectorXd IntensityState::rates() const { return p_->mu + excite_.rowwise().sum(); }

double IntensityState::total() const { return p_->mu.sum() + excite_.sum(); }

std::vector<Event> simulate(const HawkesParams& p, double horizon, std::mt19937_64& rng, ThinningStats* stats) {
  p.validate();
  std::vector<Event> events;
  std::exponential_distribution<double> unit_exp(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  IntensityState state(p);
  double t = 0;
  while (true) {
    // Kernels only decay between events, so the total rate right now bounds
    // every rate until the next accepted event.
    const double bound = state.total();
    if (!(bound > 0)) break;
    t += unit_exp(rng) / bound;
    if (!(t < horizon)) break;
    state.advance_to(t);
    const Eigen::VectorXd rates = state.rates();
    const double total = rates.sum();
    const double ratio = total / bound;
    if (stats) {
      ++stats->candidates;
      stats->min_ratio = std::min(stats->min_ratio, ratio);
      stats->max_ratio = std::max(stats->max_ratio, ratio);
    }
    if (unit(rng) * bound > total) continue;
    // Pick the component in proportion to its share of the total.
    double pick = unit(rng) * total;
    int type = 0;
    for (; type < p.dimension() - 1; ++type) {
      pick -= rates(type);
      if (pick < 0) break;
    }
    if (!events.empty() && !(t > events.back().time)) continue;  // equal doubles; vanishingly rare
    events.push_back(Event{t, type});
    state.add_event(type);
    if (stats) ++stats->accepted;
  }
  return events;
}

HawkesParams params_from_properties(const Properties& props) {
  const int d = props.contains("dimension") ? static_cast<int>(props.require_double("dimension")) : 8;
  if (d < 1) throw HawkesError("dimension must be at least 1");
  HawkesParams p;
  const auto mu = props.require_doubles("mu");
  if (mu.size() == 1) {
    p.mu = Eigen::VectorXd::Constant(d, mu[0]);
  } else if (mu.size() == static_cast<std::size_t>(d)) {
    p.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), d);
  } else {
    throw HawkesError(fmt::format("mu needs 1 or {} values, got {}", d, mu.size()));
  }
  p.alpha = matrix_from(props.require_doubles("alpha"), d, "alpha", true);
  p.beta = matrix_from(props.require_doubles("beta"), d, "beta", false);
  p.validate();
  return p;
}

void write_intensity_trace(const std::filesystem::path& path, const HawkesParams& p, std::span<const Event> events,
                           double until, double step) {
  if (!(step > 0)) throw std::invalid_argument("trace step must be positive");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "time";
  for (int i = 0; i < p.dimension(); ++i) out << ",lambda" << (i + 1);
  out << '\n';
  const auto row = [&](double t, const Eigen::VectorXd& lambda) {
    out << fmt::format("{:.6f}", t);
    for (int i = 0; i < lambda.size(); ++i) out << fmt::format(",{:.9g}", lambda(i));
    out << '\n';
  };
  IntensityState state(p);
  std::size_t next = 0;
  for (double grid = 0; grid <= until;) {
    if (next < events.size() && events[next].time <= grid && events[next].time <= until) {
      state.advance_to(events[next].time);
      row(events[next].time, state.rates());
      state.add_event(events[next].type);
      row(events[next].time, state.rates());
      ++next;
      continue;
    }
    // A grid point on an event instant would repeat the after-jump row.
    if (next == 0 || events[next - 1].time != grid) {
      state.advance_to(grid);
      row(grid, state.rates());
    }
    grid += step;
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace matchbook::hawkes
