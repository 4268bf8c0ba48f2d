#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qomsim/lindblad.hpp"

using namespace qomsim;

namespace {

Complex trace_prod(const DenseMatrix& rho, const DenseMatrix& x) {
  return (rho * x).trace();
}

DenseMatrix random_density(const FockSpace& sp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix m(sp.dim(), sp.dim());
  for (int i = 0; i < sp.dim(); ++i)
    for (int j = 0; j < sp.dim(); ++j) m(i, j) = Complex(u(rng), u(rng));
  DenseMatrix rho = m * m.adjoint();
  rho /= rho.trace().real();
  return rho;
}

// Displacement of the vacuum by a Taylor series of exp(alpha ad - alpha* a).
DenseMatrix displaced_vacuum(const OperatorSet& ops, Complex alpha) {
  const int dim = ops.space.dim();
  const DenseMatrix gen = alpha * ops.ad - std::conj(alpha) * ops.a;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(0) = 1.0;
  Eigen::VectorXcd term = psi;
  for (int k = 1; k <= 80; ++k) {
    term = (gen * term) / static_cast<double>(k);
    psi += term;
  }
  psi.normalize();
  return psi * psi.adjoint();
}

// Truncated geometric thermal averages, summed directly.
struct GeomSums {
  double n = 0.0, n2f = 0.0;  // <n>, <n(n-1)>
};
GeomSums geometric_sums(double nbar, int levels) {
  const double q = nbar / (nbar + 1.0);
  double z = 0.0, s1 = 0.0, s2 = 0.0, w = 1.0;
  for (int n = 0; n < levels; ++n, w *= q) {
    z += w;
    s1 += n * w;
    s2 += static_cast<double>(n) * (n - 1) * w;
  }
  return {s1 / z, s2 / z};
}

}  // namespace

TEST_CASE("ladder operator on a two-level photon space") {
  const FockSpace sp{2, 3};
  const SystemParams p;
  const OperatorSet ops = build_operators(sp, p);
  // a = [[0,1],[0,0]] tensor identity
  for (int j = 0; j < 3; ++j) {
    CHECK(ops.a(j, 3 + j) == Complex(1.0));
    CHECK(ops.a(3 + j, j) == Complex(0.0));
  }
  CHECK(ops.a.cwiseAbs().sum() == doctest::Approx(3.0));
  CHECK_THROWS_AS(build_operators(FockSpace{1, 3}, p), std::invalid_argument);
}

TEST_CASE("canonical commutator holds away from the truncation boundary") {
  const FockSpace sp{5, 4};
  const OperatorSet ops = build_operators(sp, SystemParams{});
  const DenseMatrix comm = ops.a * ops.ad - ops.ad * ops.a;
  for (int na = 0; na < sp.n_cut_a; ++na)
    for (int nb = 0; nb < sp.n_cut_b; ++nb) {
      const int i = na * sp.n_cut_b + nb;
      const double expected = (na == sp.n_cut_a - 1) ? 1.0 - sp.n_cut_a : 1.0;
      CHECK(std::abs(comm(i, i) - Complex(expected)) < 1e-12);
      for (int j = 0; j < sp.dim(); ++j)
        if (j != i) CHECK(std::abs(comm(i, j)) < 1e-14);
    }
}

TEST_CASE("hamiltonian is diagonal for an undriven uncoupled system") {
  SystemParams p;
  p.delta_c = 0.7;
  p.omega_m = 1.3;
  const FockSpace sp{3, 4};
  const OperatorSet ops = build_operators(sp, p);
  for (int na = 0; na < 3; ++na)
    for (int nb = 0; nb < 4; ++nb) {
      const int i = na * 4 + nb;
      CHECK(std::abs(ops.h(i, i) - Complex(0.7 * na + 1.3 * nb)) < 1e-12);
    }
  CHECK((ops.h - ops.h.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("expanded displacement square differs from the literal square only at the top level") {
  const FockSpace sp{2, 6};
  const OperatorSet ops = build_operators(sp, SystemParams{});
  const DenseMatrix x = ops.b + ops.bd;
  const DenseMatrix diff = (x * x - ops.x_sq).eval();
  for (int na = 0; na < sp.n_cut_a; ++na)
    for (int nb = 0; nb < sp.n_cut_b; ++nb)
      for (int na2 = 0; na2 < sp.n_cut_a; ++na2)
        for (int nb2 = 0; nb2 < sp.n_cut_b; ++nb2) {
          const Complex v = diff(na * 6 + nb, na2 * 6 + nb2);
          if (nb == 5 && nb2 == 5 && na == na2)
            CHECK(std::abs(v) > 0.5);  // truncated commutator correction
          else
            CHECK(std::abs(v) < 1e-12);
        }
}

TEST_CASE("vacuum is the fixed point without drive and noise") {
  SystemParams p;
  p.delta_c = 1.0;
  p.g_opt = 1.4;
  p.gamma_a = 0.1;
  p.gamma_b = 0.1;
  const FockSpace sp{4, 4};
  const OperatorSet ops = build_operators(sp, p);
  const DenseMatrix d = lindblad_rhs(vacuum_state(sp), ops, p);
  CHECK(d.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("single photon decays at gamma_a") {
  SystemParams p;
  p.delta_c = 0.0;
  p.gamma_a = 0.01;
  const FockSpace sp{3, 2};
  const OperatorSet ops = build_operators(sp, p);
  DenseMatrix rho = DenseMatrix::Zero(sp.dim(), sp.dim());
  rho(1 * 2 + 0, 1 * 2 + 0) = 1.0;  // |1_a 0_b>
  const DenseMatrix d = lindblad_rhs(rho, ops, p);
  CHECK(trace_prod(d, ops.num_a).real() == doctest::Approx(-0.01).epsilon(1e-12));
}

TEST_CASE("thermal pumping matches the occupation noise term") {
  SystemParams p;
  p.gamma_b = 0.1;
  p.nbar_b = 2.0;
  const FockSpace sp{2, 5};
  const OperatorSet ops = build_operators(sp, p);
  const DenseMatrix d = lindblad_rhs(vacuum_state(sp), ops, p);
  CHECK(trace_prod(d, ops.num_b).real() == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("generator output is hermitian and traceless") {
  SystemParams p;
  p.delta_c = 1.0;
  p.g_opt = 0.8;
  p.rabi = 0.4;
  p.gamma_a = 0.05;
  p.gamma_b = 0.02;
  p.nbar_a = 0.3;
  p.nbar_b = 1.1;
  const FockSpace sp{4, 5};
  const OperatorSet ops = build_operators(sp, p);
  const DenseMatrix rho = random_density(sp, 42);
  const DenseMatrix d = lindblad_rhs(rho, ops, p);
  CHECK((d - d.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(d.trace()) < 1e-12);

  DenseMatrix wrong = DenseMatrix::Zero(3, 3);
  CHECK_THROWS_AS(lindblad_rhs(wrong, ops, p), std::invalid_argument);
}

TEST_CASE("exact moments equal dense-product traces") {
  const FockSpace sp{4, 5};
  const OperatorSet ops = build_operators(sp, SystemParams{});
  const DenseMatrix rho = random_density(sp, 7);
  const MomentState m = exact_moments(rho, ops);

  const auto check = [&](Complex got, const DenseMatrix& x) {
    CHECK(std::abs(got - trace_prod(rho, x)) < 1e-12);
  };
  check(m.m_a, ops.a);
  check(m.m_ad, ops.ad);
  check(m.m_b, ops.b);
  check(m.m_bd, ops.bd);
  check(m.n_a, ops.num_a);
  check(m.n_b, ops.num_b);
  check(m.m_abd, ops.a * ops.bd);
  check(m.m_adb, ops.ad * ops.b);
  check(m.m_ab, ops.a * ops.b);
  check(m.m_adbd, ops.ad * ops.bd);
  check(m.m_aa, ops.a * ops.a);
  check(m.m_adad, ops.ad * ops.ad);
  check(m.m_bb, ops.b * ops.b);
  check(m.m_bdbd, ops.bd * ops.bd);
  // hermiticity of rho makes conjugate slots exact partners
  CHECK(std::abs(m.m_ad - std::conj(m.m_a)) < 1e-12);
  CHECK(std::abs(m.n_a.imag()) < 1e-14);
}

TEST_CASE("displaced vacuum reproduces coherent moments") {
  const FockSpace sp{12, 2};
  const OperatorSet ops = build_operators(sp, SystemParams{});
  const DenseMatrix rho = displaced_vacuum(ops, Complex(0.3, 0.0));
  const MomentState m = exact_moments(rho, ops);
  CHECK(std::abs(m.m_a - Complex(0.3)) < 1e-6);
  CHECK(std::abs(m.m_aa - Complex(0.09)) < 1e-6);
  CHECK(std::abs(m.n_a - Complex(0.09)) < 1e-6);
  const ExactG2 g = exact_g2(rho, ops);
  REQUIRE(g.g2_a.has_value());
  CHECK(*g.g2_a == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("thermal state matches direct geometric sums") {
  const FockSpace sp{2, 30};
  const OperatorSet ops = build_operators(sp, SystemParams{});
  const DenseMatrix rho = thermal_state(sp, 0.0, 2.0);
  const MomentState m = exact_moments(rho, ops);
  const GeomSums ref = geometric_sums(2.0, 30);
  CHECK(std::abs(m.n_b.real() - ref.n) < 1e-12);
  CHECK(std::abs(m.m_bb) < 1e-14);
  const ExactG2 g = exact_g2(rho, ops);
  REQUIRE(g.g2_b.has_value());
  CHECK(*g.g2_b == doctest::Approx(ref.n2f / (ref.n * ref.n)).epsilon(1e-12));
  // the 30-level truncation already sits close to the ideal thermal value 2
  CHECK(std::abs(*g.g2_b - 2.0) < 1e-3);
  CHECK(!g.g2_a.has_value());  // photon sector is empty
}

TEST_CASE("exact g2 of a single photon vanishes") {
  const FockSpace sp{3, 2};
  const OperatorSet ops = build_operators(sp, SystemParams{});
  DenseMatrix rho = DenseMatrix::Zero(sp.dim(), sp.dim());
  rho(1 * 2 + 0, 1 * 2 + 0) = 1.0;
  const ExactG2 g = exact_g2(rho, ops);
  REQUIRE(g.g2_a.has_value());
  CHECK(*g.g2_a == 0.0);
}

TEST_CASE("evolve: decoupled thermal relaxation follows the analytic curve") {
  SystemParams p;
  p.gamma_b = 0.1;
  p.nbar_b = 2.0;
  const FockSpace sp{2, 30};
  const OperatorSet ops = build_operators(sp, p);
  const auto grid = make_time_grid(10.0, 21);
  const EvolveResult res =
      evolve(vacuum_state(sp), ops, p, grid, oracle_stepper_defaults());
  REQUIRE(res.status == IntegrationStatus::ok);
  REQUIRE(!res.trace_abort);
  REQUIRE(res.samples.size() == 21);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double expect = 2.0 * (1.0 - std::exp(-0.1 * grid[k]));
    const MomentState m = exact_moments(res.samples[k], ops);
    CHECK(std::abs(m.n_b.real() - expect) < 1e-5);
  }
  const MomentState m10 = exact_moments(res.samples.back(), ops);
  CHECK(std::abs(m10.n_b.real() - 1.2642411176571153) < 1e-5);
  CHECK(res.worst.trace_dev < 1e-8);
  CHECK(res.worst.herm_dev < 1e-10);
  CHECK(res.worst.min_diag > -1e-10);
}

TEST_CASE("evolve: driven empty cavity reaches the closed-form steady state") {
  SystemParams p;
  p.delta_c = 1.0;
  p.rabi = 0.1;
  p.gamma_a = 0.01;
  const FockSpace sp{6, 2};
  const OperatorSet ops = build_operators(sp, p);
  const double grid[] = {0.0, 2000.0};
  const EvolveResult res =
      evolve(vacuum_state(sp), ops, p, grid, oracle_stepper_defaults());
  REQUIRE(res.status == IntegrationStatus::ok);
  const MomentState m = exact_moments(res.samples.back(), ops);
  const Complex ss = Complex(0, -0.1) / (Complex(0, 1.0) + 0.005);
  CHECK(std::abs(m.m_a - ss) < 1e-4);
  CHECK(std::abs(ss - Complex(-0.09999, -0.0005)) < 1e-4);
}

TEST_CASE("evolve: vacuum is stationary for any coupling when undriven") {
  SystemParams p;
  p.delta_c = 1.0;
  p.g_opt = 1.4;
  p.gamma_a = 0.01;
  p.gamma_b = 0.001;
  const FockSpace sp{4, 6};
  const OperatorSet ops = build_operators(sp, p);
  const auto grid = make_time_grid(5.0, 6);
  const DenseMatrix rho0 = vacuum_state(sp);
  const EvolveResult res = evolve(rho0, ops, p, grid, oracle_stepper_defaults());
  REQUIRE(res.status == IntegrationStatus::ok);
  for (const auto& s : res.samples) CHECK((s - rho0).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("evolve aborts when the initial trace is already off") {
  SystemParams p;
  p.gamma_b = 0.1;
  const FockSpace sp{2, 4};
  const OperatorSet ops = build_operators(sp, p);
  DenseMatrix rho = vacuum_state(sp);
  rho(0, 0) += 5e-6;  // trace deviation beyond the abort threshold
  const auto grid = make_time_grid(1.0, 3);
  const EvolveResult res = evolve(rho, ops, p, grid, oracle_stepper_defaults());
  CHECK(res.trace_abort);
  CHECK(res.samples.empty());
}

TEST_CASE("run_oracle streams the same information as evolve") {
  SystemParams p;
  p.delta_c = 1.0;
  p.rabi = 0.2;
  p.gamma_a = 0.05;
  const FockSpace sp{5, 3};
  const auto grid = make_time_grid(3.0, 7);
  const OracleTrajectory run = run_oracle(p, sp, grid, oracle_stepper_defaults());
  REQUIRE(run.ok());
  REQUIRE(run.times.size() == 7);
  const OperatorSet ops = build_operators(sp, p);
  const EvolveResult res = evolve(vacuum_state(sp), ops, p, grid, oracle_stepper_defaults());
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const MomentState a = run.moments[k];
    const MomentState b = exact_moments(res.samples[k], ops);
    CHECK(std::abs(a.n_a - b.n_a) == 0.0);
    CHECK(std::abs(a.m_a - b.m_a) == 0.0);
  }
}

TEST_CASE("cutoff convergence flags a resolved weak run as converged") {
  SystemParams p;
  p.delta_c = 1.0;
  p.rabi = 0.1;
  p.gamma_a = 0.01;
  const FockSpace base{5, 3};
  const auto grid = make_time_grid(5.0, 11);
  const ConvergenceReport rep =
      cutoff_convergence(p, base, grid, oracle_stepper_defaults());
  CHECK(rep.bumped.n_cut_a == 9);
  CHECK(rep.bumped.n_cut_b == 7);
  CHECK(rep.delta < 1e-6);
  CHECK(!rep.under_resolved);
}
