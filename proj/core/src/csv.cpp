#include "qomsim/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qomsim {

const char* const kObservablesHeader =
    "t,re_a,im_a,re_ad,im_ad,re_b,im_b,re_bd,im_bd,n_a,n_b,"
    "re_abd,im_abd,re_adb,im_adb,re_ab,im_ab,re_adbd,im_adbd,"
    "re_aa,im_aa,re_adad,im_adad,re_bb,im_bb,re_bdbd,im_bdbd,"
    "g2_a,g2_b,g2_ab";

std::string format_g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_observables_csv(std::ostream& os, std::span<const double> times,
                           std::span<const MomentState> states,
                           std::span<const std::array<std::optional<double>, 3>> g2) {
  os << kObservablesHeader << "\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    const MomentState& s = states[k];
    os << format_g17(times[k]);
    const auto cpx = [&os](Complex z) {
      os << ',' << format_g17(z.real()) << ',' << format_g17(z.imag());
    };
    cpx(s.m_a);
    cpx(s.m_ad);
    cpx(s.m_b);
    cpx(s.m_bd);
    os << ',' << format_g17(s.n_a.real()) << ',' << format_g17(s.n_b.real());
    cpx(s.m_abd);
    cpx(s.m_adb);
    cpx(s.m_ab);
    cpx(s.m_adbd);
    cpx(s.m_aa);
    cpx(s.m_adad);
    cpx(s.m_bb);
    cpx(s.m_bdbd);
    for (const auto& g : g2[k]) {
      os << ',';
      if (g) os << format_g17(*g);
    }
    os << "\n";
  }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.columns = split_line(line);

  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != table.columns.size()) {
      std::ostringstream os;
      os << "read_csv: line " << lineno << " has " << cells.size()
         << " fields, expected " << table.columns.size();
      throw std::invalid_argument(os.str());
    }
    std::vector<std::optional<double>> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      if (c.empty()) {
        row.push_back(std::nullopt);
        continue;
      }
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end != c.c_str() + c.size() || errno != 0) {
        std::ostringstream os;
        os << "read_csv: line " << lineno << ": cannot parse '" << c << "'";
        throw std::invalid_argument(os.str());
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open CSV file: " + path);
  return read_csv(f);
}

std::array<double, MomentState::kFlatSize> load_flat_state_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open state file: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("state file '" + path + "': " + e.what());
  }
  if (!j.is_array() || j.size() != MomentState::kFlatSize)
    throw std::invalid_argument("state file '" + path + "': expected a JSON array of " +
                                std::to_string(MomentState::kFlatSize) + " reals");
  std::array<double, MomentState::kFlatSize> out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!j[i].is_number())
      throw std::invalid_argument("state file '" + path + "': entry " +
                                  std::to_string(i) + " is not a number");
    out[i] = j[i].get<double>();
  }
  return out;
}

}  // namespace qomsim
