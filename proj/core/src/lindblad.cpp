#include "qomsim/lindblad.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qomsim {

std::vector<std::string> validate(const FockSpace& s) {
  std::vector<std::string> v;
  if (s.n_cut_a < 2) v.push_back("n_cut_a >= 2 violated");
  if (s.n_cut_b < 2) v.push_back("n_cut_b >= 2 violated");
  return v;
}

namespace {

DenseMatrix single_mode_ladder(int n) {
  DenseMatrix a = DenseMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

DenseMatrix kron(const DenseMatrix& x, const DenseMatrix& y) {
  DenseMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

// Thermal jump operators with their rates; empty entries are dropped.
std::vector<std::pair<double, const DenseMatrix*>> jump_list(const OperatorSet& ops,
                                                             const SystemParams& p) {
  std::vector<std::pair<double, const DenseMatrix*>> jumps;
  if (p.gamma_a > 0.0) {
    jumps.emplace_back(p.gamma_a * (p.nbar_a + 1.0), &ops.a);
    if (p.nbar_a > 0.0) jumps.emplace_back(p.gamma_a * p.nbar_a, &ops.ad);
  }
  if (p.gamma_b > 0.0) {
    jumps.emplace_back(p.gamma_b * (p.nbar_b + 1.0), &ops.b);
    if (p.nbar_b > 0.0) jumps.emplace_back(p.gamma_b * p.nbar_b, &ops.bd);
  }
  return jumps;
}

}  // namespace

OperatorSet build_operators(const FockSpace& space, const SystemParams& p) {
  if (const auto errs = validate(space); !errs.empty())
    throw std::invalid_argument("build_operators: cutoffs must be >= 2");

  const int na = space.n_cut_a, nb = space.n_cut_b;
  const DenseMatrix ia = DenseMatrix::Identity(na, na);
  const DenseMatrix ib = DenseMatrix::Identity(nb, nb);

  OperatorSet ops;
  ops.space = space;
  ops.a = kron(single_mode_ladder(na), ib);
  ops.b = kron(ia, single_mode_ladder(nb));
  ops.ad = ops.a.adjoint();
  ops.bd = ops.b.adjoint();
  ops.num_a = ops.ad * ops.a;
  ops.num_b = ops.bd * ops.b;
  ops.x_sq = ops.bd * ops.bd + ops.b * ops.b + 2.0 * ops.num_b
             + DenseMatrix::Identity(space.dim(), space.dim());
  ops.h = p.delta_c * ops.num_a + p.omega_m * ops.num_b
          + p.g_opt * (ops.num_a * ops.x_sq) + p.rabi * (ops.a + ops.ad);
  return ops;
}

DenseMatrix vacuum_state(const FockSpace& space) {
  DenseMatrix rho = DenseMatrix::Zero(space.dim(), space.dim());
  rho(0, 0) = 1.0;
  return rho;
}

DenseMatrix thermal_state(const FockSpace& space, double nbar_a, double nbar_b) {
  const double qa = nbar_a > 0.0 ? nbar_a / (nbar_a + 1.0) : 0.0;
  const double qb = nbar_b > 0.0 ? nbar_b / (nbar_b + 1.0) : 0.0;
  DenseMatrix rho = DenseMatrix::Zero(space.dim(), space.dim());
  double norm = 0.0;
  for (int i = 0; i < space.n_cut_a; ++i)
    for (int j = 0; j < space.n_cut_b; ++j) {
      const double w = std::pow(qa, i) * std::pow(qb, j);
      rho(i * space.n_cut_b + j, i * space.n_cut_b + j) = w;
      norm += w;
    }
  rho /= norm;
  return rho;
}

DensityDiagnostics density_diagnostics(const DenseMatrix& rho) {
  DensityDiagnostics d;
  d.trace_dev = std::abs(rho.trace() - Complex(1.0));
  d.herm_dev = (rho - rho.adjoint().eval()).cwiseAbs().maxCoeff();
  d.min_diag = rho.diagonal().real().minCoeff();
  return d;
}

LindbladPropagator::LindbladPropagator(const OperatorSet& ops, const SystemParams& p)
    : dim_(ops.space.dim()) {
  DenseMatrix heff = Complex(0.0, -1.0) * ops.h;
  for (const auto& [gamma, l] : jump_list(ops, p)) {
    heff -= 0.5 * gamma * (l->adjoint() * (*l));
    jumps_.emplace_back(gamma, l->sparseView());
    jumps_adj_.emplace_back(DenseMatrix(l->adjoint()).sparseView());
  }
  heff_ = heff.sparseView();
  heff_adj_ = DenseMatrix(heff.adjoint()).sparseView();
  scratch_.resize(dim_, dim_);
}

void LindbladPropagator::apply(const Eigen::Ref<const DenseMatrix>& rho,
                               Eigen::Ref<DenseMatrix> drho) const {
  drho.noalias() = heff_ * rho;
  drho.noalias() += rho * heff_adj_;
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    scratch_.noalias() = jumps_[k].second * rho;
    drho.noalias() += jumps_[k].first * (scratch_ * jumps_adj_[k]);
  }
}

RhsFn LindbladPropagator::as_rhs() const {
  return [this](double, std::span<const double> y, std::span<double> dydt) {
    Eigen::Map<const DenseMatrix> rho(reinterpret_cast<const Complex*>(y.data()),
                                      dim_, dim_);
    Eigen::Map<DenseMatrix> out(reinterpret_cast<Complex*>(dydt.data()), dim_, dim_);
    apply(rho, out);
  };
}

DenseMatrix lindblad_rhs(const DenseMatrix& rho, const OperatorSet& ops,
                         const SystemParams& p) {
  if (rho.rows() != ops.space.dim() || rho.cols() != ops.space.dim())
    throw std::invalid_argument("lindblad_rhs: density matrix dimension mismatch");
  LindbladPropagator prop(ops, p);
  DenseMatrix drho(rho.rows(), rho.cols());
  prop.apply(rho, drho);
  return drho;
}

namespace {

std::vector<double> flatten_rho(const DenseMatrix& rho) {
  std::vector<double> y(2 * static_cast<std::size_t>(rho.size()));
  std::memcpy(y.data(), rho.data(), y.size() * sizeof(double));
  return y;
}

// Shared evolution driver: integrates, then walks the samples in order,
// updating diagnostics and stopping at the first trace violation.
template <typename Callback>
void evolve_scan(const DenseMatrix& rho0, const OperatorSet& ops,
                 const SystemParams& p, std::span<const double> t_grid,
                 const StepperConfig& cfg, DensityDiagnostics& worst,
                 IntegratorStats& stats, IntegrationStatus& status,
                 bool& trace_abort, Callback&& cb) {
  if (rho0.rows() != ops.space.dim() || rho0.cols() != ops.space.dim())
    throw std::invalid_argument("evolve: density matrix dimension mismatch");
  if (const auto errs = validate(p); !errs.empty())
    throw std::invalid_argument("evolve: invalid params");

  LindbladPropagator prop(ops, p);
  const RhsFn f = prop.as_rhs();
  const auto y0 = flatten_rho(rho0);
  const IntegrationResult raw = integrate(f, y0, t_grid, cfg);

  stats = raw.stats;
  status = raw.status;
  worst = DensityDiagnostics{0.0, 0.0, std::numeric_limits<double>::infinity()};

  const int dim = ops.space.dim();
  for (std::size_t k = 0; k < raw.states.size(); ++k) {
    Eigen::Map<const DenseMatrix> rho(
        reinterpret_cast<const Complex*>(raw.states[k].data()), dim, dim);
    const DensityDiagnostics d = density_diagnostics(rho);
    worst.trace_dev = std::max(worst.trace_dev, d.trace_dev);
    worst.herm_dev = std::max(worst.herm_dev, d.herm_dev);
    worst.min_diag = std::min(worst.min_diag, d.min_diag);
    if (d.trace_dev > kTraceAbortThreshold) {
      trace_abort = true;
      return;
    }
    cb(raw.times[k], rho);
  }
  if (raw.states.empty()) worst.min_diag = 0.0;
}

}  // namespace

EvolveResult evolve(const DenseMatrix& rho0, const OperatorSet& ops,
                    const SystemParams& p, std::span<const double> t_grid,
                    const StepperConfig& cfg) {
  EvolveResult res;
  evolve_scan(rho0, ops, p, t_grid, cfg, res.worst, res.stats, res.status,
              res.trace_abort, [&res](double t, const auto& rho) {
                res.times.push_back(t);
                res.samples.emplace_back(rho);
              });
  return res;
}

namespace {

// Tr(rho X) for a ladder monomial acting as X|na,nb> = c(na,nb)|na+da,nb+db>.
template <typename Coeff>
Complex ladder_trace(const DenseMatrix& rho, const FockSpace& sp, int da, int db,
                     Coeff&& c) {
  Complex acc = 0.0;
  for (int na = 0; na < sp.n_cut_a; ++na) {
    const int na2 = na + da;
    if (na2 < 0 || na2 >= sp.n_cut_a) continue;
    for (int nb = 0; nb < sp.n_cut_b; ++nb) {
      const int nb2 = nb + db;
      if (nb2 < 0 || nb2 >= sp.n_cut_b) continue;
      acc += c(na, nb) * rho(na * sp.n_cut_b + nb, na2 * sp.n_cut_b + nb2);
    }
  }
  return acc;
}

double fsqrt(int n) { return std::sqrt(static_cast<double>(n)); }

}  // namespace

MomentState exact_moments(const DenseMatrix& rho, const OperatorSet& ops) {
  const FockSpace& sp = ops.space;
  MomentState s;
  s.m_a = ladder_trace(rho, sp, -1, 0, [](int na, int) { return fsqrt(na); });
  s.m_ad = ladder_trace(rho, sp, +1, 0, [](int na, int) { return fsqrt(na + 1); });
  s.m_b = ladder_trace(rho, sp, 0, -1, [](int, int nb) { return fsqrt(nb); });
  s.m_bd = ladder_trace(rho, sp, 0, +1, [](int, int nb) { return fsqrt(nb + 1); });
  s.n_a = ladder_trace(rho, sp, 0, 0, [](int na, int) { return double(na); });
  s.n_b = ladder_trace(rho, sp, 0, 0, [](int, int nb) { return double(nb); });
  s.m_abd = ladder_trace(rho, sp, -1, +1,
                         [](int na, int nb) { return fsqrt(na) * fsqrt(nb + 1); });
  s.m_adb = ladder_trace(rho, sp, +1, -1,
                         [](int na, int nb) { return fsqrt(na + 1) * fsqrt(nb); });
  s.m_ab = ladder_trace(rho, sp, -1, -1,
                        [](int na, int nb) { return fsqrt(na) * fsqrt(nb); });
  s.m_adbd = ladder_trace(rho, sp, +1, +1,
                          [](int na, int nb) { return fsqrt(na + 1) * fsqrt(nb + 1); });
  s.m_aa = ladder_trace(rho, sp, -2, 0,
                        [](int na, int) { return fsqrt(na) * fsqrt(na - 1); });
  s.m_adad = ladder_trace(rho, sp, +2, 0,
                          [](int na, int) { return fsqrt(na + 1) * fsqrt(na + 2); });
  s.m_bb = ladder_trace(rho, sp, 0, -2,
                        [](int, int nb) { return fsqrt(nb) * fsqrt(nb - 1); });
  s.m_bdbd = ladder_trace(rho, sp, 0, +2,
                          [](int, int nb) { return fsqrt(nb + 1) * fsqrt(nb + 2); });
  return s;
}

ExactG2 exact_g2(const DenseMatrix& rho, const OperatorSet& ops, double eps) {
  const FockSpace& sp = ops.space;
  double n_a = 0.0, n_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
  for (int na = 0; na < sp.n_cut_a; ++na)
    for (int nb = 0; nb < sp.n_cut_b; ++nb) {
      const double pop = rho(na * sp.n_cut_b + nb, na * sp.n_cut_b + nb).real();
      n_a += na * pop;
      n_b += nb * pop;
      aa += static_cast<double>(na) * (na - 1) * pop;
      bb += static_cast<double>(nb) * (nb - 1) * pop;
      ab += static_cast<double>(na) * nb * pop;
    }
  ExactG2 g;
  if (n_a >= eps) g.g2_a = aa / (n_a * n_a);
  if (n_b >= eps) g.g2_b = bb / (n_b * n_b);
  if (n_a >= eps && n_b >= eps) g.g2_ab = ab / (n_a * n_b);
  return g;
}

StepperConfig oracle_stepper_defaults() {
  StepperConfig cfg;
  cfg.rel_tol = 1e-8;
  cfg.abs_tol = 1e-10;
  return cfg;
}

OracleTrajectory run_oracle(const SystemParams& p, const FockSpace& space,
                            std::span<const double> t_grid, const StepperConfig& cfg,
                            double eps) {
  const OperatorSet ops = build_operators(space, p);
  OracleTrajectory res;
  evolve_scan(vacuum_state(space), ops, p, t_grid, cfg, res.worst, res.stats,
              res.status, res.trace_abort, [&](double t, const auto& rho) {
                res.times.push_back(t);
                res.moments.push_back(exact_moments(rho, ops));
                res.g2.push_back(exact_g2(rho, ops, eps));
              });
  return res;
}

ConvergenceReport cutoff_convergence(const SystemParams& p, const FockSpace& base,
                                     std::span<const double> t_grid,
                                     const StepperConfig& cfg, int bump) {
  ConvergenceReport rep;
  rep.base = base;
  rep.bumped = FockSpace{base.n_cut_a + bump, base.n_cut_b + bump};

  const OracleTrajectory lo = run_oracle(p, rep.base, t_grid, cfg);
  const OracleTrajectory hi = run_oracle(p, rep.bumped, t_grid, cfg);
  if (lo.moments.empty() || hi.moments.empty()) {
    rep.under_resolved = true;
    return rep;
  }
  rep.n_a_end_base = lo.moments.back().n_a.real();
  rep.n_a_end_bumped = hi.moments.back().n_a.real();
  rep.delta = std::abs(rep.n_a_end_base - rep.n_a_end_bumped);
  rep.under_resolved = !(rep.delta < 1e-6);
  return rep;
}

}  // namespace qomsim
