#include "qomsim/correlations.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace qomsim {

namespace {

// Imaginary residue of the decorrelated numerator must stay negligible for
// conjugate-symmetric states.
void check_residue(Complex num) {
  assert(std::abs(num.imag()) <= 1e-10 * std::max(1.0, std::abs(num.real())));
  (void)num;
}

std::optional<double> g2_single(Complex n, Complex anom, Complex anom_conj, double eps) {
  const double pop = n.real();
  if (!(pop >= eps)) return std::nullopt;
  const Complex num = 2.0 * n * n + anom_conj * anom;
  check_residue(num);
  return num.real() / (pop * pop);
}

}  // namespace

std::optional<double> g2_a(const MomentState& s, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("g2_a: eps must be > 0");
  return g2_single(s.n_a, s.m_aa, s.m_adad, eps);
}

std::optional<double> g2_b(const MomentState& s, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("g2_b: eps must be > 0");
  return g2_single(s.n_b, s.m_bb, s.m_bdbd, eps);
}

std::optional<double> g2_ab(const MomentState& s, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("g2_ab: eps must be > 0");
  // either population below eps leaves the ratio undefined
  if (!(s.n_a.real() >= eps) || !(s.n_b.real() >= eps)) return std::nullopt;
  const double pop = s.n_a.real() * s.n_b.real();
  // <b^dag a> = <a b^dag> and <b a> = <a b> (cross-mode operators commute).
  const Complex num = s.m_adb * s.m_abd + s.n_b * s.n_a + s.m_adbd * s.m_ab;
  check_residue(num);
  return num.real() / pop;
}

const char* to_string(Statistics s) {
  switch (s) {
    case Statistics::sub_poissonian: return "sub_poissonian";
    case Statistics::poissonian: return "poissonian";
    case Statistics::super_poissonian: return "super_poissonian";
  }
  return "unknown";
}

Statistics classify(double g2, double tie_tolerance) {
  if (std::isnan(g2)) throw std::invalid_argument("classify: g2 is NaN");
  if (g2 < 1.0 - tie_tolerance) return Statistics::sub_poissonian;
  if (g2 > 1.0 + tie_tolerance) return Statistics::super_poissonian;
  return Statistics::poissonian;
}

std::vector<ObservablesRow> observables_series(const Trajectory& traj, double eps) {
  std::vector<ObservablesRow> rows;
  rows.reserve(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const MomentState& s = traj.states[k];
    ObservablesRow r;
    r.t = traj.times[k];
    r.n_a = s.n_a.real();
    r.n_b = s.n_b.real();
    r.g2_a = g2_a(s, eps);
    r.g2_b = g2_b(s, eps);
    r.g2_ab = g2_ab(s, eps);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace qomsim
