#include "qomsim/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qomsim {

const char* to_string(RhsVariant v) {
  return v == RhsVariant::closed ? "closed" : "composed";
}

std::optional<RhsVariant> rhs_variant_from_string(const std::string& s) {
  if (s == "closed") return RhsVariant::closed;
  if (s == "composed") return RhsVariant::composed;
  return std::nullopt;
}

namespace {

std::string violation(const char* field, const char* rule, double got) {
  std::ostringstream os;
  os << field << " " << rule << " violated (got " << got << ")";
  return os.str();
}

}  // namespace

std::vector<std::string> validate(const SystemParams& p) {
  std::vector<std::string> v;
  if (!(p.omega_m > 0.0)) v.push_back(violation("omega_m", "> 0", p.omega_m));
  if (!(p.gamma_a >= 0.0)) v.push_back(violation("gamma_a", ">= 0", p.gamma_a));
  if (!(p.gamma_b >= 0.0)) v.push_back(violation("gamma_b", ">= 0", p.gamma_b));
  if (!(p.nbar_a >= 0.0)) v.push_back(violation("nbar_a", ">= 0", p.nbar_a));
  if (!(p.nbar_b >= 0.0)) v.push_back(violation("nbar_b", ">= 0", p.nbar_b));
  for (double x : {p.delta_c, p.g_opt, p.rabi}) {
    if (!std::isfinite(x)) {
      v.push_back("delta_c, g_opt, rabi must be finite");
      break;
    }
  }
  return v;
}

std::vector<std::string> validate(const SimConfig& c) {
  std::vector<std::string> v;
  if (!(c.t_end > 0.0)) v.push_back(violation("t_end", "> 0", c.t_end));
  if (!(c.n_samples >= 2))
    v.push_back(violation("n_samples", ">= 2", static_cast<double>(c.n_samples)));
  if (!(c.rel_tol > 0.0)) v.push_back(violation("rel_tol", "> 0", c.rel_tol));
  if (!(c.abs_tol > 0.0)) v.push_back(violation("abs_tol", "> 0", c.abs_tol));
  return v;
}

double stability_margin(const SystemParams& p, double photon_number) {
  if (!(photon_number >= 0.0))
    throw std::domain_error("stability_margin: photon number must be >= 0");
  return p.omega_m + 4.0 * photon_number * p.g_opt;
}

}  // namespace qomsim
