#include "finadv/strategy.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

#include "finadv/errors.hpp"

namespace finadv {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

StrategyMatrix::StrategyMatrix(std::vector<StrategyRow> rows) : rows_(std::move(rows)) {
  for (const auto& r : rows_) {
    if (r.impacts.empty() || r.impacts.size() > 2) {
      throw std::invalid_argument("strategy " + r.name + " must impact one or two atoms");
    }
    for (const auto& imp : r.impacts) {
      if (imp.sign != 1 && imp.sign != -1) {
        throw std::invalid_argument("strategy " + r.name + " has a sign other than +-1");
      }
    }
    if (r.impacts.size() == 2 && r.impacts[0].atom == r.impacts[1].atom) {
      throw std::invalid_argument("strategy " + r.name + " lists the same atom twice");
    }
  }
}

std::size_t StrategyMatrix::find(std::string_view name) const {
  for (std::size_t l = 0; l < rows_.size(); ++l) {
    if (rows_[l].name == name) return l;
  }
  throw std::out_of_range("no strategy named " + std::string(name));
}

double StrategyMatrix::coefficient(std::size_t l, Var v) const {
  const auto& r = rows_.at(l);
  if (!r.active) return 0.0;
  for (const auto& imp : r.impacts) {
    if (imp.atom == v) return imp.sign;
  }
  return 0.0;
}

Eigen::MatrixXd StrategyMatrix::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_.size()), kNumNodes);
  for (std::size_t l = 0; l < rows_.size(); ++l) {
    for (std::size_t d = 0; d < kNumNodes; ++d) m(l, d) = coefficient(l, var_at(d));
  }
  return m;
}

StrategyMatrix StrategyMatrix::with_row_disabled(std::size_t l) const {
  StrategyMatrix copy = *this;
  copy.rows_.at(l).active = false;
  return copy;
}

void StrategyMatrix::check_atoms(const Hierarchy& h) const {
  for (const auto& r : rows_) {
    for (const auto& imp : r.impacts) {
      if (!h.is_atom(imp.atom)) throw NotAnAtom(imp.atom);
    }
  }
}

StrategyMatrix default_strategies() {
  return StrategyMatrix({
      {"cogs-xsga", {{Var::COGS, +1}, {Var::XSGA, -1}}},
      {"cogs-xstf", {{Var::COGS, +1}, {Var::XSTF, -1}}},
      {"cogs-invt", {{Var::COGS, +1}, {Var::INVT, -1}}},
      {"debt-term", {{Var::DLTT, +1}, {Var::LCT, -1}}},
      {"phantom-sales", {{Var::SALE, +1}, {Var::RECT, +1}}},
      {"property-expense", {{Var::XEQO, -1}, {Var::PPEGT, +1}}},
      {"depreciation", {{Var::DP, +1}}},
  });
}

StrategyMatrix parse_strategy_catalog(std::istream& in) {
  std::vector<StrategyRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string name, atom, sign;
    std::getline(ss, name, ',');
    std::getline(ss, atom, ',');
    std::getline(ss, sign, ',');
    name = trim(name);
    atom = trim(atom);
    sign = trim(sign);
    if (lineno == 1 && name == "strategy_name") continue;
    auto v = parse_code(atom);
    if (name.empty() || !v || (sign != "+1" && sign != "-1" && sign != "1" && sign != "+" && sign != "-")) {
      throw std::invalid_argument("malformed strategy catalog line " + std::to_string(lineno));
    }
    auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.name == name; });
    if (it == rows.end()) {
      rows.push_back({name, {}});
      it = std::prev(rows.end());
    }
    it->impacts.push_back({*v, sign.front() == '-' ? -1 : 1});
  }
  return StrategyMatrix(std::move(rows));
}

}  // namespace finadv
