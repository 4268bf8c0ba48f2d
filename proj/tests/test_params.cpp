#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <stdexcept>

#include "qomsim/params.hpp"

using namespace qomsim;

namespace {

bool mentions(const std::vector<std::string>& errs, const std::string& needle) {
  for (const auto& e : errs)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("validate accepts physical parameters") {
  SystemParams p;
  p.omega_m = 1.0;
  p.gamma_a = 0.01;
  p.gamma_b = 0.001;
  p.nbar_a = 0.0;
  p.nbar_b = 2.0;
  CHECK(validate(p).empty());
}

TEST_CASE("validate reports each violated invariant with its field") {
  SystemParams p;
  p.gamma_a = -0.1;
  auto errs = validate(p);
  REQUIRE(errs.size() == 1);
  CHECK(mentions(errs, "gamma_a >= 0"));

  p.omega_m = 0.0;
  p.nbar_b = -1.0;
  errs = validate(p);
  CHECK(errs.size() == 3);
  CHECK(mentions(errs, "omega_m > 0"));
  CHECK(mentions(errs, "gamma_a >= 0"));
  CHECK(mentions(errs, "nbar_b >= 0"));
}

TEST_CASE("validate is idempotent on valid parameters") {
  SystemParams p;
  p.delta_c = 1.0;
  p.g_opt = -0.2;  // negative coupling is allowed
  REQUIRE(validate(p).empty());
  CHECK(validate(p).empty());
}

TEST_CASE("sim config invariants") {
  SimConfig c;
  CHECK(validate(c).empty());
  c.t_end = 0.0;
  CHECK(mentions(validate(c), "t_end > 0"));
  c = SimConfig{};
  c.n_samples = 1;
  CHECK(mentions(validate(c), "n_samples >= 2"));
  c = SimConfig{};
  c.rel_tol = 0.0;
  c.abs_tol = -1.0;
  CHECK(validate(c).size() == 2);
}

TEST_CASE("stability margin values") {
  SystemParams p;
  p.omega_m = 1.0;

  p.g_opt = 1.4;
  CHECK(stability_margin(p, 0.0) == 1.0);
  CHECK(stability_margin(p, 2.0) == doctest::Approx(12.2).epsilon(1e-15));

  p.g_opt = -0.3;
  CHECK(stability_margin(p, 1.0) == doctest::Approx(-0.2).epsilon(1e-14));
}

TEST_CASE("stability margin is linear in the photon number") {
  SystemParams p;
  p.omega_m = 1.0;
  p.g_opt = 1.5;
  // dyadic inputs keep the identity exact in floating point
  for (double s1 : {0.0, 0.25, 0.5, 2.0})
    for (double s2 : {0.125, 1.0, 4.0})
      CHECK(stability_margin(p, s1) + stability_margin(p, s2) - p.omega_m ==
            stability_margin(p, s1 + s2));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  p.g_opt = -0.7;
  for (int k = 0; k < 50; ++k) {
    const double s1 = u(rng), s2 = u(rng);
    CHECK(stability_margin(p, s1) + stability_margin(p, s2) - p.omega_m ==
          doctest::Approx(stability_margin(p, s1 + s2)).epsilon(1e-12));
  }
}

TEST_CASE("stability margin rejects negative photon numbers") {
  SystemParams p;
  CHECK_THROWS_AS(stability_margin(p, -1e-9), std::domain_error);
}

TEST_CASE("rhs variant names round-trip") {
  CHECK(rhs_variant_from_string("closed") == RhsVariant::closed);
  CHECK(rhs_variant_from_string("composed") == RhsVariant::composed);
  CHECK(!rhs_variant_from_string("other").has_value());
  CHECK(std::string(to_string(RhsVariant::closed)) == "closed");
}
