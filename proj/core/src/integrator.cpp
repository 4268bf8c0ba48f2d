#include "qomsim/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qomsim {

const char* to_string(IntegrationStatus s) {
  switch (s) {
    case IntegrationStatus::ok: return "ok";
    case IntegrationStatus::step_underflow: return "step_underflow";
    case IntegrationStatus::non_finite_state: return "non_finite_state";
    case IntegrationStatus::max_steps_exceeded: return "max_steps_exceeded";
  }
  return "unknown";
}

std::vector<std::string> validate(const StepperConfig& c) {
  std::vector<std::string> v;
  if (!(c.h_min > 0.0)) v.push_back("h_min > 0 violated");
  if (!(c.h_min <= c.h_init)) v.push_back("h_min <= h_init violated");
  if (!(c.h_init <= c.h_max)) v.push_back("h_init <= h_max violated");
  if (!(c.rel_tol > 0.0)) v.push_back("rel_tol > 0 violated");
  if (!(c.abs_tol > 0.0)) v.push_back("abs_tol > 0 violated");
  if (!(c.max_steps > 0)) v.push_back("max_steps > 0 violated");
  return v;
}

std::vector<double> make_time_grid(double t_end, int n_samples) {
  if (!(t_end > 0.0) || n_samples < 2)
    throw std::invalid_argument("make_time_grid: need t_end > 0 and n_samples >= 2");
  std::vector<double> t(static_cast<std::size_t>(n_samples));
  for (int k = 0; k < n_samples; ++k)
    t[static_cast<std::size_t>(k)] = t_end * (static_cast<double>(k) / (n_samples - 1));
  return t;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,     0.0,      500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
// b5 - b4: weights of the embedded error estimate.
constexpr double kE[7] = {71.0 / 57600,       0.0,         -71.0 / 16695, 71.0 / 1920,
                          -17253.0 / 339200, 22.0 / 525,  -1.0 / 40};

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

class AdaptiveStepper {
 public:
  AdaptiveStepper(const RhsFn& f, std::size_t n, const StepperConfig& cfg)
      : f_(f), cfg_(cfg), n_(n) {
    for (auto& k : k_) k.resize(n);
    y_stage_.resize(n);
    y_new_.resize(n);
  }

  // Attempts one step of size h from (t, y). On acceptance writes y_new_ and
  // returns the error measure; the caller commits.
  double attempt(double t, std::span<const double> y, double h,
                 IntegratorStats& stats) {
    for (int s = 0; s < 7; ++s) {
      for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += kA[s][j] * k_[j][i];
        y_stage_[i] = y[i] + h * acc;
      }
      f_(t + kC[s] * h, s == 0 ? y : std::span<const double>(y_stage_),
         std::span<double>(k_[s]));
      ++stats.rhs_evals;
    }
    double err = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double acc5 = 0.0, acce = 0.0;
      for (int s = 0; s < 7; ++s) {
        acc5 += kB5[s] * k_[s][i];
        acce += kE[s] * k_[s][i];
      }
      y_new_[i] = y[i] + h * acc5;
      const double scale =
          cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(y_new_[i]));
      const double e = std::abs(h * acce) / scale;
      if (!std::isfinite(y_new_[i]) || !std::isfinite(e))
        return std::numeric_limits<double>::infinity();
      err = std::max(err, e);
    }
    return err;
  }

  std::span<const double> accepted() const { return y_new_; }

 private:
  const RhsFn& f_;
  const StepperConfig& cfg_;
  std::size_t n_;
  std::array<std::vector<double>, 7> k_;
  std::vector<double> y_stage_;
  std::vector<double> y_new_;
};

void rk4_step(const RhsFn& f, double t, double h, std::vector<double>& y,
              std::array<std::vector<double>, 4>& k, std::vector<double>& tmp,
              IntegratorStats& stats) {
  const std::size_t n = y.size();
  f(t, y, std::span<double>(k[0]));
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k[0][i];
  f(t + 0.5 * h, tmp, std::span<double>(k[1]));
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k[1][i];
  f(t + 0.5 * h, tmp, std::span<double>(k[2]));
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k[2][i];
  f(t + h, tmp, std::span<double>(k[3]));
  for (std::size_t i = 0; i < n; ++i)
    y[i] += (h / 6.0) * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
  stats.accepted += 1;
  stats.rhs_evals += 4;
}

}  // namespace

IntegrationResult integrate(const RhsFn& f, std::span<const double> y0,
                            std::span<const double> t_grid, const StepperConfig& cfg) {
  if (const auto errs = validate(cfg); !errs.empty()) {
    std::ostringstream os;
    os << "integrate: invalid stepper config:";
    for (const auto& e : errs) os << " " << e << ";";
    throw std::invalid_argument(os.str());
  }
  if (t_grid.empty()) throw std::invalid_argument("integrate: empty time grid");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1]))
      throw std::invalid_argument("integrate: time grid must be strictly increasing");
  if (!all_finite(y0)) throw std::invalid_argument("integrate: y0 must be finite");

  IntegrationResult res;
  res.times.push_back(t_grid[0]);
  res.states.emplace_back(y0.begin(), y0.end());

  std::vector<double> y(y0.begin(), y0.end());
  double t = t_grid[0];

  if (cfg.mode == StepMode::fixed_rk4) {
    std::array<std::vector<double>, 4> k;
    for (auto& v : k) v.resize(y.size());
    std::vector<double> tmp(y.size());
    for (std::size_t g = 1; g < t_grid.size(); ++g) {
      const double span_len = t_grid[g] - t;
      const long m = std::max(1L, static_cast<long>(std::ceil(span_len / cfg.h_init)));
      const double h = span_len / static_cast<double>(m);
      for (long s = 0; s < m; ++s) {
        if (res.stats.accepted >= cfg.max_steps) {
          res.status = IntegrationStatus::max_steps_exceeded;
          return res;
        }
        rk4_step(f, t + h * static_cast<double>(s), h, y, k, tmp, res.stats);
        if (!all_finite(y)) {
          res.status = IntegrationStatus::non_finite_state;
          return res;
        }
      }
      t = t_grid[g];
      res.times.push_back(t);
      res.states.push_back(y);
    }
    return res;
  }

  AdaptiveStepper stepper(f, y.size(), cfg);
  double h = std::clamp(cfg.h_init, cfg.h_min, cfg.h_max);
  long attempts = 0;

  for (std::size_t g = 1; g < t_grid.size(); ++g) {
    const double target = t_grid[g];
    while (t < target) {
      if (++attempts > cfg.max_steps) {
        res.status = IntegrationStatus::max_steps_exceeded;
        return res;
      }
      double h_try = h;
      bool clipped = false;
      if (t + h_try >= target) {
        h_try = target - t;
        clipped = true;
      }

      const double err = stepper.attempt(t, y, h_try, res.stats);

      if (err <= 1.0) {
        ++res.stats.accepted;
        y.assign(stepper.accepted().begin(), stepper.accepted().end());
        if (clipped) {
          t = target;  // land exactly on the grid point; keep the full h
        } else {
          t += h_try;
          const double factor =
              err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
          h = std::clamp(h_try * factor, cfg.h_min, cfg.h_max);
        }
      } else {
        ++res.stats.rejected;
        if (h_try <= cfg.h_min * (1.0 + 1e-12)) {
          res.status = std::isfinite(err) ? IntegrationStatus::step_underflow
                                          : IntegrationStatus::non_finite_state;
          return res;
        }
        const double factor =
            std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0) : 0.2;
        h = std::max(h_try * factor, cfg.h_min);
      }
    }
    res.times.push_back(target);
    res.states.push_back(y);
  }
  return res;
}

}  // namespace qomsim
