#include "qomsim/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qomsim {

namespace {
constexpr Complex kI{0.0, 1.0};
}

const std::array<const char*, MomentState::kSlots>& MomentState::slot_names() {
  static const std::array<const char*, kSlots> names = {
      "a",  "ad",   "b",  "bd",   "n_a", "n_b", "abd",
      "adb", "ab",  "adbd", "aa", "adad", "bb",  "bdbd"};
  return names;
}

std::array<Complex, MomentState::kSlots> MomentState::slots() const {
  return {m_a, m_ad, m_b, m_bd, n_a, n_b, m_abd, m_adb, m_ab, m_adbd, m_aa, m_adad, m_bb, m_bdbd};
}

MomentState MomentState::from_slots(const std::array<Complex, kSlots>& s) {
  MomentState m;
  m.m_a = s[0]; m.m_ad = s[1]; m.m_b = s[2]; m.m_bd = s[3];
  m.n_a = s[4]; m.n_b = s[5];
  m.m_abd = s[6]; m.m_adb = s[7]; m.m_ab = s[8]; m.m_adbd = s[9];
  m.m_aa = s[10]; m.m_adad = s[11]; m.m_bb = s[12]; m.m_bdbd = s[13];
  return m;
}

void MomentState::to_flat(std::span<double, kFlatSize> out) const {
  const auto s = slots();
  for (int i = 0; i < kSlots; ++i) {
    out[2 * i] = s[i].real();
    out[2 * i + 1] = s[i].imag();
  }
}

MomentState MomentState::from_flat(std::span<const double, kFlatSize> in) {
  std::array<Complex, kSlots> s;
  for (int i = 0; i < kSlots; ++i) s[i] = Complex(in[2 * i], in[2 * i + 1]);
  return from_slots(s);
}

Complex decorrelate_triple(Complex s_a, Complex s_b, Complex s_c,
                           Complex p_ab, Complex p_ac, Complex p_bc) {
  return s_a * p_bc + p_ab * s_c + p_ac * s_b;
}

Complex decorrelate_quad(Complex p_ab, Complex p_cd, Complex p_ac,
                         Complex p_bd, Complex p_ad, Complex p_bc) {
  return p_ab * p_cd + p_ac * p_bd + p_ad * p_bc;
}

MomentDerivative closed_rhs(const MomentState& s, const SystemParams& p) {
  const double dc = p.delta_c, om = p.omega_m, g = p.g_opt, Om = p.rabi;
  const double Ga = p.gamma_a, Gb = p.gamma_b;

  const Complex m_a = s.m_a, m_ad = s.m_ad, m_b = s.m_b, m_bd = s.m_bd;
  const Complex n_a = s.n_a, n_b = s.n_b;
  const Complex m_abd = s.m_abd, m_adb = s.m_adb, m_ab = s.m_ab, m_adbd = s.m_adbd;
  const Complex m_aa = s.m_aa, m_adad = s.m_adad, m_bb = s.m_bb, m_bdbd = s.m_bdbd;

  MomentDerivative d;

  d.m_a = -kI * dc * m_a - kI * Om - 0.5 * Ga * m_a
          - kI * g * ((m_a * m_bdbd + 2.0 * m_abd * m_bd)
                      + (m_a * m_bb + 2.0 * m_ab * m_b)
                      + 2.0 * (m_a * n_b + m_abd * m_b + m_ab * m_bd)
                      + m_a);
  d.m_ad = kI * dc * m_ad + kI * Om - 0.5 * Ga * m_ad
           + kI * g * ((m_ad * m_bb + 2.0 * m_adb * m_b)
                       + (m_ad * m_bdbd + 2.0 * m_adbd * m_bd)
                       + 2.0 * (m_ad * n_b + m_adb * m_bd + m_adbd * m_b)
                       + m_ad);

  d.m_b = -kI * om * m_b - 0.5 * Gb * m_b
          - 2.0 * kI * g * (m_ad * (m_ab + m_abd)
                            + n_a * (m_b + m_bd)
                            + m_a * (m_adb + m_adbd));
  d.m_bd = kI * om * m_bd - 0.5 * Gb * m_bd
           + 2.0 * kI * g * (m_a * (m_adbd + m_adb)
                             + n_a * (m_bd + m_b)
                             + m_ad * (m_abd + m_ab));

  d.n_a = -kI * Om * (m_ad - m_a) - Ga * n_a + Ga * p.nbar_a;
  d.n_b = -2.0 * kI * g * ((n_a * m_bdbd + 2.0 * m_adbd * m_abd)
                           - (n_a * m_bb + 2.0 * m_adb * m_ab))
          - Gb * n_b + Gb * p.nbar_b;

  d.m_abd = kI * (om - dc) * m_abd - kI * Om * m_bd - 0.5 * (Ga + Gb) * m_abd
            + kI * g * (2.0 * (2.0 * n_a * m_ab + m_adb * m_aa)
                        - (m_abd * m_bb + 2.0 * m_ab * n_b)
                        + 2.0 * ((2.0 * n_a * m_abd + m_adbd * m_aa)
                                 - (2.0 * n_b * m_abd + m_ab * m_bdbd))
                        - m_abd * (3.0 * m_bdbd + 1.0));
  d.m_adb = kI * (dc - om) * m_adb + kI * Om * m_b - 0.5 * (Ga + Gb) * m_adb
            + kI * g * ((m_adb * m_bdbd + 2.0 * m_adbd * n_b)
                        - 2.0 * (m_adad * m_abd + 2.0 * n_a * m_adbd)
                        + 2.0 * ((m_adbd * m_bb + 2.0 * m_adb * n_b)
                                 - (m_adad * m_ab + 2.0 * m_adb * n_a))
                        + m_adb * (3.0 * m_bb + 1.0));

  d.m_ab = -kI * (dc + om) * m_ab - kI * Om * m_b - 0.5 * (Ga + Gb) * m_ab
           - kI * g * (2.0 * m_abd + 3.0 * m_ab * (m_bb + 1.0))
           - kI * g * (m_ab * m_bdbd + 2.0 * m_abd * n_b)
           - 2.0 * kI * g * ((2.0 * n_a * m_abd + m_adbd * m_aa)
                             + (m_abd * m_bb + 2.0 * m_ab * n_b)
                             + (2.0 * n_a * m_ab + m_adb * m_aa));
  d.m_adbd = kI * (dc + om) * m_adbd + kI * Om * m_bd - 0.5 * (Ga + Gb) * m_adbd
             + kI * g * (2.0 * m_adb + 3.0 * m_adbd * (m_bdbd + 1.0))
             + kI * g * (m_adbd * m_bb + 2.0 * m_adb * n_b)
             + 2.0 * kI * g * ((m_adad * m_ab + 2.0 * n_a * m_adb)
                               + (m_bdbd * m_adb + 2.0 * m_adbd * n_b)
                               + (2.0 * n_a * m_adbd + m_abd * m_adad));

  d.m_aa = -2.0 * kI * dc * m_aa - 2.0 * kI * Om * m_a - Ga * m_aa
           - 2.0 * kI * g * m_aa
           - 2.0 * kI * g * (m_aa * (m_bdbd + m_bb + 2.0 * n_b)
                             + 2.0 * (m_abd * m_abd + m_ab * m_ab
                                      + 2.0 * m_ab * m_abd));
  d.m_adad = 2.0 * kI * dc * m_adad + 2.0 * kI * Om * m_ad - Ga * m_adad
             + 2.0 * kI * g * m_adad
             + 2.0 * kI * g * (m_adad * (m_bb + m_bdbd + 2.0 * n_b)
                               + 2.0 * (m_adb * m_adb + m_adbd * m_adbd
                                        + 2.0 * m_adbd * m_adb));

  d.m_bb = -2.0 * kI * om * m_bb - Gb * m_bb - 2.0 * kI * g * n_a
           - 4.0 * kI * g * (n_a * (m_bb + n_b)
                             + m_ab * (m_adbd + 2.0 * m_adb)
                             + m_adb * m_abd);
  d.m_bdbd = 2.0 * kI * om * m_bdbd - Gb * m_bdbd + 2.0 * kI * g * n_a
             + 4.0 * kI * g * (n_a * (m_bdbd + n_b)
                               + m_adbd * (m_ab + 2.0 * m_abd)
                               + m_abd * m_adb);

  return d;
}

namespace {

// Operator factors for the mechanical composition. Products in the unclosed
// equations are normally ordered within each mode, so the only pairs the
// decorrelation can request are the ten stored moments (cross-mode pairs
// commute and accept either order).
enum class Op { A, Ad, B, Bd };

Complex single_of(const MomentState& s, Op x) {
  switch (x) {
    case Op::A: return s.m_a;
    case Op::Ad: return s.m_ad;
    case Op::B: return s.m_b;
    case Op::Bd: return s.m_bd;
  }
  return {};
}

Complex pair_of(const MomentState& s, Op x, Op y) {
  if (x == y) {
    switch (x) {
      case Op::A: return s.m_aa;
      case Op::Ad: return s.m_adad;
      case Op::B: return s.m_bb;
      case Op::Bd: return s.m_bdbd;
    }
  }
  if (x == Op::Ad && y == Op::A) return s.n_a;
  if (x == Op::Bd && y == Op::B) return s.n_b;
  if ((x == Op::A && y == Op::Bd) || (x == Op::Bd && y == Op::A)) return s.m_abd;
  if ((x == Op::Ad && y == Op::B) || (x == Op::B && y == Op::Ad)) return s.m_adb;
  if ((x == Op::A && y == Op::B) || (x == Op::B && y == Op::A)) return s.m_ab;
  if ((x == Op::Ad && y == Op::Bd) || (x == Op::Bd && y == Op::Ad)) return s.m_adbd;
  throw std::logic_error("pair_of: anti-normally ordered same-mode pair requested");
}

Complex triple_of(const MomentState& s, Op x1, Op x2, Op x3) {
  return decorrelate_triple(single_of(s, x1), single_of(s, x2), single_of(s, x3),
                            pair_of(s, x1, x2), pair_of(s, x1, x3), pair_of(s, x2, x3));
}

Complex quad_of(const MomentState& s, Op x1, Op x2, Op x3, Op x4) {
  return decorrelate_quad(pair_of(s, x1, x2), pair_of(s, x3, x4),
                          pair_of(s, x1, x3), pair_of(s, x2, x4),
                          pair_of(s, x1, x4), pair_of(s, x2, x3));
}

}  // namespace

MomentDerivative composed_rhs(const MomentState& s, const SystemParams& p) {
  constexpr Op A = Op::A, Ad = Op::Ad, B = Op::B, Bd = Op::Bd;
  const double dc = p.delta_c, om = p.omega_m, g = p.g_opt, Om = p.rabi;
  const double Ga = p.gamma_a, Gb = p.gamma_b;

  const auto T = [&s](Op a, Op b, Op c) { return triple_of(s, a, b, c); };
  const auto Q = [&s](Op a, Op b, Op c, Op d) { return quad_of(s, a, b, c, d); };

  MomentDerivative d;

  d.m_a = -kI * dc * s.m_a
          - kI * g * (T(A, Bd, Bd) + T(A, B, B) + 2.0 * T(A, Bd, B) + s.m_a)
          - kI * Om - 0.5 * Ga * s.m_a;
  d.m_ad = kI * dc * s.m_ad
           + kI * g * (T(Ad, Bd, Bd) + T(Ad, B, B) + 2.0 * T(Ad, Bd, B) + s.m_ad)
           + kI * Om - 0.5 * Ga * s.m_ad;

  d.m_b = -kI * om * s.m_b - 2.0 * kI * g * (T(Ad, A, B) + T(Ad, A, Bd))
          - 0.5 * Gb * s.m_b;
  d.m_bd = kI * om * s.m_bd + 2.0 * kI * g * (T(Ad, A, Bd) + T(Ad, A, B))
           - 0.5 * Gb * s.m_bd;

  d.n_a = -kI * Om * (s.m_ad - s.m_a) - Ga * s.n_a + Ga * p.nbar_a;
  d.n_b = -2.0 * kI * g * (Q(Ad, A, Bd, Bd) - Q(Ad, A, B, B)) - Gb * s.n_b
          + Gb * p.nbar_b;

  d.m_abd = kI * (om - dc) * s.m_abd - kI * Om * s.m_bd
            - 0.5 * (Ga + Gb) * s.m_abd
            + kI * g * (2.0 * Q(Ad, A, A, B) - Q(A, Bd, B, B) - Q(A, Bd, Bd, Bd)
                        + 2.0 * (Q(Ad, A, A, Bd) - Q(A, Bd, Bd, B)) - s.m_abd);
  d.m_adb = kI * (dc - om) * s.m_adb + kI * Om * s.m_b
            - 0.5 * (Ga + Gb) * s.m_adb
            + kI * g * (Q(Ad, Bd, Bd, B) + Q(Ad, B, B, B) - 2.0 * Q(Ad, Ad, A, Bd)
                        + 2.0 * (Q(Ad, Bd, B, B) - Q(Ad, Ad, A, B)) + s.m_adb);

  d.m_ab = -kI * (dc + om) * s.m_ab - kI * Om * s.m_b
           - 0.5 * (Ga + Gb) * s.m_ab
           - kI * g * (2.0 * s.m_abd + Q(A, Bd, Bd, B) + 2.0 * Q(Ad, A, A, Bd)
                       + Q(A, B, B, B)
                       + 2.0 * (s.m_ab + Q(A, Bd, B, B) + Q(Ad, A, A, B))
                       + s.m_ab);
  d.m_adbd = kI * (dc + om) * s.m_adbd + kI * Om * s.m_bd
             - 0.5 * (Ga + Gb) * s.m_adbd
             + kI * g * (2.0 * s.m_adb + Q(Ad, Bd, B, B) + 2.0 * Q(Ad, Ad, A, B)
                         + Q(Ad, Bd, Bd, Bd)
                         + 2.0 * (s.m_adbd + Q(Ad, Bd, Bd, B) + Q(Ad, Ad, A, Bd))
                         + s.m_adbd);

  d.m_aa = -2.0 * kI * dc * s.m_aa - 2.0 * kI * Om * s.m_a - Ga * s.m_aa
           - 2.0 * kI * g * (Q(A, A, Bd, Bd) + Q(A, A, B, B) + 2.0 * Q(A, A, Bd, B)
                             + s.m_aa);
  d.m_adad = 2.0 * kI * dc * s.m_adad + 2.0 * kI * Om * s.m_ad - Ga * s.m_adad
             + 2.0 * kI * g * (Q(Ad, Ad, Bd, Bd) + Q(Ad, Ad, B, B)
                               + 2.0 * Q(Ad, Ad, Bd, B) + s.m_adad);

  d.m_bb = -2.0 * kI * om * s.m_bb - Gb * s.m_bb
           - 2.0 * kI * g * (s.n_a + 2.0 * Q(Ad, A, Bd, B) + 2.0 * Q(Ad, A, B, B));
  d.m_bdbd = 2.0 * kI * om * s.m_bdbd - Gb * s.m_bdbd
             + 2.0 * kI * g * (s.n_a + 2.0 * Q(Ad, A, Bd, B) + 2.0 * Q(Ad, A, Bd, Bd));

  return d;
}

MomentDerivative rhs(const MomentState& s, const SystemParams& p, RhsVariant v) {
  return v == RhsVariant::closed ? closed_rhs(s, p) : composed_rhs(s, p);
}

MomentState conj_flip(const MomentState& s) {
  MomentState f;
  f.m_a = std::conj(s.m_ad);
  f.m_ad = std::conj(s.m_a);
  f.m_b = std::conj(s.m_bd);
  f.m_bd = std::conj(s.m_b);
  f.n_a = std::conj(s.n_a);
  f.n_b = std::conj(s.n_b);
  f.m_abd = std::conj(s.m_adb);
  f.m_adb = std::conj(s.m_abd);
  f.m_ab = std::conj(s.m_adbd);
  f.m_adbd = std::conj(s.m_ab);
  f.m_aa = std::conj(s.m_adad);
  f.m_adad = std::conj(s.m_aa);
  f.m_bb = std::conj(s.m_bdbd);
  f.m_bdbd = std::conj(s.m_bb);
  return f;
}

double conjugacy_deviation(const MomentState& s) {
  double dev = 0.0;
  const auto upd = [&dev](Complex x, Complex y) {
    dev = std::max(dev, std::abs(x - std::conj(y)));
  };
  upd(s.m_ad, s.m_a);
  upd(s.m_bd, s.m_b);
  upd(s.m_adb, s.m_abd);
  upd(s.m_adbd, s.m_ab);
  upd(s.m_adad, s.m_aa);
  upd(s.m_bdbd, s.m_bb);
  dev = std::max(dev, std::abs(s.n_a.imag()));
  dev = std::max(dev, std::abs(s.n_b.imag()));
  return dev;
}

namespace {

// Engine-word to double in [0, 1); avoids distribution implementation
// differences across standard libraries.
double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Complex disc_sample(std::mt19937_64& rng, double radius) {
  const double r = radius * std::sqrt(unit_double(rng));
  const double th = 2.0 * std::numbers::pi * unit_double(rng);
  return Complex(r * std::cos(th), r * std::sin(th));
}

}  // namespace

MomentState random_moment_state(std::mt19937_64& rng) {
  std::array<Complex, MomentState::kSlots> s;
  for (auto& v : s) v = disc_sample(rng, 2.0);
  s[4] = Complex(2.0 * unit_double(rng), 0.0);  // n_a real nonnegative
  s[5] = Complex(2.0 * unit_double(rng), 0.0);  // n_b real nonnegative
  return MomentState::from_slots(s);
}

RhsDiscrepancyReport rhs_discrepancy_report(const SystemParams& p, int n_random,
                                            std::uint64_t seed) {
  if (n_random < 1)
    throw std::invalid_argument("rhs_discrepancy_report: n_random must be >= 1");

  RhsDiscrepancyReport rep;
  rep.seed = seed;
  rep.n_random = n_random;

  std::mt19937_64 rng(seed);
  for (int k = 0; k < n_random; ++k) {
    const MomentState s = random_moment_state(rng);
    const auto c = closed_rhs(s, p).slots();
    const auto m = composed_rhs(s, p).slots();
    for (int i = 0; i < MomentState::kSlots; ++i) {
      const double scale = std::max({1.0, std::abs(c[i]), std::abs(m[i])});
      rep.max_rel_dev[i] = std::max(rep.max_rel_dev[i], std::abs(c[i] - m[i]) / scale);
    }
  }
  for (int i = 0; i < MomentState::kSlots; ++i)
    if (rep.max_rel_dev[i] > rep.threshold) rep.flagged.push_back(i);
  return rep;
}

std::string RhsDiscrepancyReport::to_text() const {
  std::ostringstream os;
  os << "closed vs composed RHS, " << n_random << " random states, seed " << seed
     << "\n";
  os << "slot        max relative deviation (scale max(1,|closed|,|composed|))\n";
  const auto& names = MomentState::slot_names();
  for (int i = 0; i < MomentState::kSlots; ++i) {
    os << "  " << names[i];
    for (std::size_t k = std::string(names[i]).size(); k < 8; ++k) os << ' ';
    os << "  " << max_rel_dev[i];
    if (std::find(flagged.begin(), flagged.end(), i) != flagged.end())
      os << "  [exceeds " << threshold << "]";
    os << "\n";
  }
  if (flagged.empty()) os << "all equations agree to " << threshold << "\n";
  return os.str();
}

const std::vector<std::pair<int, std::string>>& known_rhs_discrepancies() {
  // The closed set reproduces the mechanical composition exactly, equation by
  // equation, so nothing is expected to exceed the report threshold.
  static const std::vector<std::pair<int, std::string>> none;
  return none;
}

}  // namespace qomsim
