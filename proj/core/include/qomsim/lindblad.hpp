#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qomsim/correlations.hpp"
#include "qomsim/integrator.hpp"
#include "qomsim/moments.hpp"
#include "qomsim/params.hpp"

namespace qomsim {

/// Two-mode Fock truncation; n_cut_* is the number of retained levels per
/// mode (occupations 0 .. n_cut-1). Basis ordering is |n_a> (x) |n_b>,
/// row-major in n_a then n_b: index = n_a * n_cut_b + n_b.
struct FockSpace {
  int n_cut_a = 10;
  int n_cut_b = 14;
  int dim() const { return n_cut_a * n_cut_b; }
};

std::vector<std::string> validate(const FockSpace& s);  // cutoffs >= 2

using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Ladder and composite operators on the truncated product space, plus the
/// rotating-frame Hamiltonian
///   H = delta_c a^dag a + omega_m b^dag b
///     + g_opt a^dag a (b^dag^2 + b^2 + 2 b^dag b + 1) + rabi (a^dag + a).
/// x_sq holds the membrane displacement square in the same expanded form
/// (the expansion uses the untruncated commutator, so it differs from the
/// literal matrix square only in the top mechanical level).
struct OperatorSet {
  FockSpace space;
  DenseMatrix a, ad, b, bd;
  DenseMatrix num_a, num_b;
  DenseMatrix x_sq;
  DenseMatrix h;
};

/// Throws std::invalid_argument when a cutoff is below 2.
OperatorSet build_operators(const FockSpace& space, const SystemParams& p);

DenseMatrix vacuum_state(const FockSpace& space);

/// Product of renormalized geometric distributions (diagonal).
DenseMatrix thermal_state(const FockSpace& space, double nbar_a, double nbar_b);

struct DensityDiagnostics {
  double trace_dev = 0.0;  ///< |Tr rho - 1|
  double herm_dev = 0.0;   ///< max |rho - rho^dag|
  double min_diag = 0.0;   ///< smallest real diagonal entry
};

DensityDiagnostics density_diagnostics(const DenseMatrix& rho);

/// Master-equation right-hand side
///   drho/dt = -i[H, rho] + Ga(na+1) D[a] + Ga na D[a^dag]
///           + Gb(nb+1) D[b] + Gb nb D[b^dag],   D[L]r = L r L^dag - {L^dag L, r}/2.
/// Throws std::invalid_argument on dimension mismatch.
DenseMatrix lindblad_rhs(const DenseMatrix& rho, const OperatorSet& ops,
                         const SystemParams& p);

/// Cached sparse form of the generator for repeated application inside the
/// integrator. apply() writes Heff rho + rho Heff^dag + sum_k g_k L_k rho L_k^dag.
class LindbladPropagator {
 public:
  LindbladPropagator(const OperatorSet& ops, const SystemParams& p);

  int dim() const { return dim_; }
  void apply(const Eigen::Ref<const DenseMatrix>& rho, Eigen::Ref<DenseMatrix> drho) const;

  /// RHS over the flat interleaved re/im vector of length 2*dim^2.
  RhsFn as_rhs() const;

 private:
  int dim_;
  SparseMatrix heff_;     // -iH - 1/2 sum_k g_k L_k^dag L_k
  SparseMatrix heff_adj_;
  std::vector<std::pair<double, SparseMatrix>> jumps_;
  std::vector<SparseMatrix> jumps_adj_;
  mutable DenseMatrix scratch_;
};

inline constexpr double kTraceAbortThreshold = 1e-6;

/// Full density-matrix samples over t_grid. Aborts with `trace_abort` when
/// the trace drifts beyond kTraceAbortThreshold (samples are truncated at
/// the first violation).
struct EvolveResult {
  std::vector<double> times;
  std::vector<DenseMatrix> samples;
  DensityDiagnostics worst;
  IntegratorStats stats;
  IntegrationStatus status = IntegrationStatus::ok;
  bool trace_abort = false;
};

EvolveResult evolve(const DenseMatrix& rho0, const OperatorSet& ops,
                    const SystemParams& p, std::span<const double> t_grid,
                    const StepperConfig& cfg);

/// Tr(rho X) for each of the 14 slots, evaluated through the ladder index
/// shifts (exact traces, no truncation beyond the space itself).
MomentState exact_moments(const DenseMatrix& rho, const OperatorSet& ops);

struct ExactG2 {
  std::optional<double> g2_a;
  std::optional<double> g2_b;
  std::optional<double> g2_ab;
};

/// Normally ordered exact correlations <a^dag^2 a^2>/<n_a>^2,
/// <b^dag^2 b^2>/<n_b>^2, <a^dag b^dag b a>/(<n_a><n_b>), with the same
/// population guards as the moment-closure versions.
ExactG2 exact_g2(const DenseMatrix& rho, const OperatorSet& ops,
                 double eps = kDefaultG2Eps);

/// Per spec of the external CSV surface: moments + exact correlations at the
/// sample times, with the density matrices discarded as the run streams.
struct OracleTrajectory {
  std::vector<double> times;
  std::vector<MomentState> moments;
  std::vector<ExactG2> g2;
  DensityDiagnostics worst;
  IntegratorStats stats;
  IntegrationStatus status = IntegrationStatus::ok;
  bool trace_abort = false;

  bool ok() const { return status == IntegrationStatus::ok && !trace_abort; }
};

/// Defaults per the shipped configuration: adaptive stepper at rel_tol 1e-8.
StepperConfig oracle_stepper_defaults();

OracleTrajectory run_oracle(const SystemParams& p, const FockSpace& space,
                            std::span<const double> t_grid,
                            const StepperConfig& cfg, double eps = kDefaultG2Eps);

/// Repeats the run with both cutoffs raised by `bump` and reports the change
/// in <a^dag a> at t_end. A delta of 1e-6 or more flags the base run as
/// under-resolved.
struct ConvergenceReport {
  FockSpace base, bumped;
  double n_a_end_base = 0.0;
  double n_a_end_bumped = 0.0;
  double delta = 0.0;
  bool under_resolved = false;
};

ConvergenceReport cutoff_convergence(const SystemParams& p, const FockSpace& base,
                                     std::span<const double> t_grid,
                                     const StepperConfig& cfg, int bump = 4);

}  // namespace qomsim
