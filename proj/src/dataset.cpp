#include "finadv/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <random>

#include "finadv/errors.hpp"

namespace finadv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Comma split with double-quote support for the id column.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.emplace_back(trim(cur));
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string quote_id(const std::string& id) {
  if (id.find_first_of(",\"\n") == std::string::npos) return id;
  std::string out = "\"";
  for (char ch : id) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

bool usable_pair_exists(const std::vector<YearRecord>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].year == rows[i - 1].year + 1) return true;
  }
  return false;
}

void check_range(const Range& r, const char* name, bool positive) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw InvalidParams(std::string(name) + ": range must be finite with lo <= hi");
  }
  if (positive && !(r.lo > 0.0)) throw InvalidParams(std::string(name) + ": range must be positive");
}

}  // namespace

void SynthParams::validate() const {
  if (n_companies < 1) throw InvalidParams("n_companies must be >= 1");
  if (min_years < 2) throw InvalidParams("min_years must be >= 2");
  if (max_years <= min_years) throw InvalidParams("max_years must exceed min_years");
  if (!(years_mean > min_years && years_mean < max_years)) {
    throw InvalidParams("years_mean must lie strictly between min_years and max_years");
  }
  if (first_year_lo > first_year_hi) throw InvalidParams("first-year range is empty");
  if (!(sales_median > 0.0) || !(sales_log_sigma >= 0.0)) {
    throw InvalidParams("sales_median must be > 0 and sales_log_sigma >= 0");
  }
  if (!(distress_fraction >= 0.0 && distress_fraction <= 1.0)) {
    throw InvalidParams("distress_fraction must be in [0, 1]");
  }
  if (!(dividend_payer_fraction >= 0.0 && dividend_payer_fraction <= 1.0)) {
    throw InvalidParams("dividend_payer_fraction must be in [0, 1]");
  }
  check_range(healthy_growth, "healthy_growth", false);
  check_range(distressed_growth, "distressed_growth", false);
  check_range(cogs_ratio, "cogs_ratio", true);
  check_range(xsga_ratio, "xsga_ratio", true);
  check_range(xstf_ratio, "xstf_ratio", true);
  check_range(am_ratio, "am_ratio", true);
  check_range(xeqo_ratio, "xeqo_ratio", true);
  check_range(other_expense_ratio, "other_expense_ratio", false);
  check_range(dp_rate, "dp_rate", true);
  check_range(net_margin, "net_margin", true);
  check_range(ppegt_to_sales, "ppegt_to_sales", true);
  check_range(accumulated_dep, "accumulated_dep", false);
  check_range(receivable_days, "receivable_days", true);
  check_range(inventory_ratio, "inventory_ratio", true);
  check_range(cash_ratio, "cash_ratio", false);
  check_range(other_assets, "other_assets", true);
  check_range(lct_ratio, "lct_ratio", true);
  check_range(dltt_ratio, "dltt_ratio", true);
  check_range(other_liabilities, "other_liabilities", false);
  check_range(ni_decline, "ni_decline", false);
  check_range(leverage_drift, "leverage_drift", false);
  check_range(accrual_gap, "accrual_gap", false);
  check_range(healthy_accrual, "healthy_accrual", false);
  check_range(eps_target, "eps_target", true);
  check_range(dividend_ratio, "dividend_ratio", false);
  if (cogs_ratio.hi + xsga_ratio.hi >= 1.0) throw InvalidParams("cost ratios exceed sales");
  if (accumulated_dep.hi >= 1.0) throw InvalidParams("accumulated_dep must stay below 1");
  if (ni_decline.hi >= 1.0) throw InvalidParams("ni_decline must stay below 1");
}

std::vector<std::string> csv_header() {
  std::vector<std::string> h{"company_id", "fiscal_year"};
  for (Var v : reported_variables()) h.emplace_back(code(v));
  return h;
}

Dataset ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return ingest_csv(in, path.string());
}

Dataset ingest_csv(std::istream& in, const std::string& source_name) {
  const auto expected = csv_header();
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(expected.front());
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = split_csv(line);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i >= header.size() || header[i] != expected[i]) throw SchemaError(expected[i]);
  }
  if (header.size() != expected.size()) throw SchemaError(header[expected.size()]);

  // Company order is first appearance in the file.
  std::vector<std::string> order;
  std::map<std::string, std::vector<YearRecord>> by_company;
  std::map<std::string, std::vector<std::pair<int, std::string>>> year_drops;

  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != expected.size()) {
      throw ParseError(row_no, "expected " + std::to_string(expected.size()) + " fields, got " +
                                   std::to_string(cells.size()));
    }
    const std::string& id = cells[0];
    if (id.empty()) throw ParseError(row_no, "empty company_id");
    int year = 0;
    {
      const auto& s = cells[1];
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), year);
      if (ec != std::errc() || p != s.data() + s.size()) {
        throw ParseError(row_no, "fiscal_year is not an integer: '" + s + "'");
      }
    }
    if (!by_company.count(id)) order.push_back(id);
    auto& rows = by_company[id];

    YearRecord rec;
    rec.year = year;
    std::string problem;
    for (std::size_t j = 2; j < cells.size(); ++j) {
      const Var v = reported_variables()[j - 2];
      const auto& s = cells[j];
      if (s.empty()) continue;  // missing
      double x = 0.0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
      if (ec != std::errc() || p != s.data() + s.size()) {
        // Text that is a recognised non-number marks the value as non-finite.
        std::string low(s);
        std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
        if (low == "nan" || low == "inf" || low == "-inf" || low == "+inf") {
          x = std::numeric_limits<double>::quiet_NaN();
        } else {
          throw ParseError(row_no, std::string(code(v)) + " is not a number: '" + s + "'");
        }
      }
      if (!std::isfinite(x)) {
        problem = "non-finite " + std::string(code(v));
        continue;
      }
      rec.values[v] = x;
    }
    if (problem.empty()) {
      for (Var v : required_variables()) {
        if (!rec.values.count(v)) {
          problem = "missing " + std::string(code(v));
          break;
        }
      }
    }
    if (problem.empty() && rec.values.at(Var::CSHO) <= 0.0) problem = "non-positive CSHO";
    if (!problem.empty()) {
      year_drops[id].emplace_back(year, problem);
      continue;
    }
    rows.push_back(std::move(rec));
  }

  Dataset out;
  out.provenance = CsvSource{source_name};
  for (const auto& id : order) {
    for (const auto& [year, why] : year_drops[id]) out.drops.push_back({id, year, why});
    auto rows = by_company[id];
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.year < b.year; });
    const bool dup = std::adjacent_find(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
                       return a.year == b.year;
                     }) != rows.end();
    if (dup) {
      out.drops.push_back({id, 0, "duplicate fiscal year"});
      continue;
    }
    if (rows.size() < 2 || !usable_pair_exists(rows)) {
      out.drops.push_back({id, 0, "fewer than 2 consecutive usable years"});
      continue;
    }
    out.companies.push_back(build_panel(id, std::move(rows)));
  }
  if (out.companies.empty()) throw EmptyDataset();
  return out;
}

Dataset generate_synthetic(const SynthParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);
  auto uni = [&](const Range& r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); };
  auto noise = [&](double sd) { return std::normal_distribution<double>(0.0, sd)(rng); };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  const int span = params.max_years - params.min_years;
  const double p_years = (params.years_mean - params.min_years) / span;

  Dataset out;
  out.provenance = SyntheticSource{params.seed, params};
  for (int c = 0; c < params.n_companies; ++c) {
    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "SYN%05d", c + 1);

    const int T = params.min_years + std::binomial_distribution<int>(span, p_years)(rng);
    const int first =
        std::uniform_int_distribution<int>(params.first_year_lo, params.first_year_hi)(rng);
    const bool distressed = coin(params.distress_fraction);

    double sale = params.sales_median * std::exp(params.sales_log_sigma * noise(1.0));
    const double growth = uni(distressed ? params.distressed_growth : params.healthy_growth);
    const double cogs_r = uni(params.cogs_ratio);
    const double xsga_r = uni(params.xsga_ratio);
    const double xstf_r = uni(params.xstf_ratio);
    const double am_r = uni(params.am_ratio);
    const double xeqo_r = uni(params.xeqo_ratio);
    const double oexp_r = uni(params.other_expense_ratio);
    const double dp_r = uni(params.dp_rate);
    const double margin = uni(params.net_margin);
    const double ppe_r = uni(params.ppegt_to_sales);
    const double accdep = uni(params.accumulated_dep);
    const double days = uni(params.receivable_days);
    const double inv_r = uni(params.inventory_ratio);
    const double cash_r = uni(params.cash_ratio);
    const double oa_r = uni(params.other_assets);
    const double lct_r = uni(params.lct_ratio);
    const double ol_r = uni(params.other_liabilities);
    double dltt_share = uni(params.dltt_ratio);
    const double accrual = uni(params.healthy_accrual);

    std::vector<YearRecord> rows;
    double ni = 0.0;
    double csho = 0.0;
    double dvp = 0.0;
    for (int t = 0; t < T; ++t) {
      if (t > 0) sale *= 1.0 + growth + noise(0.03);
      const double jitter = 1.0 + noise(0.02);
      const double cogs = sale * std::clamp(cogs_r + noise(0.01), 0.3, 0.85);
      const double xsga = sale * xsga_r * jitter;
      const double xstf = sale * xstf_r * jitter;
      const double am = sale * am_r;
      const double xeqo = sale * xeqo_r * (1.0 + noise(0.05));
      const double xagt = xeqo + sale * oexp_r;
      const double ppegt = sale * ppe_r * (1.0 + noise(0.03));
      const double ppent = ppegt * (1.0 - accdep);
      const double dp = ppegt * dp_r;
      const double rect = sale * days / 365.0 * (1.0 + noise(0.05));
      const double invt = cogs * inv_r * (1.0 + noise(0.05));
      const double act = (rect + invt) * (1.0 + cash_r);
      const double at = (act + ppent) * (1.0 + oa_r);
      const double lct = act * lct_r * (1.0 + noise(0.03));
      if (distressed && t > 0) dltt_share += uni(params.leverage_drift);
      const double dltt = at * dltt_share;
      const double lt = lct + dltt + at * ol_r;

      if (t == 0) {
        ni = sale * margin;
      } else if (distressed) {
        ni *= 1.0 - uni(params.ni_decline);
      } else {
        ni = sale * margin * (1.0 + noise(0.10));
      }
      const double oancf =
          distressed ? ni - uni(params.accrual_gap) * at : ni - (accrual + noise(0.01)) * at;

      if (t == 0) {
        csho = ni / uni(params.eps_target);
        dvp = coin(params.dividend_payer_fraction) ? ni * uni(params.dividend_ratio) : 0.0;
      } else {
        csho *= 1.0 + std::abs(noise(0.015));
      }

      YearRecord rec;
      rec.year = first + t;
      auto& v = rec.values;
      v[Var::AT] = at;
      v[Var::ACT] = act;
      v[Var::RECT] = rect;
      v[Var::INVT] = invt;
      v[Var::PPENT] = ppent;
      v[Var::PPEGT] = ppegt;
      v[Var::LT] = lt;
      v[Var::LCT] = lct;
      v[Var::DLTT] = dltt;
      v[Var::NI] = ni;
      v[Var::SALE] = sale;
      v[Var::COGS] = cogs;
      v[Var::DP] = dp;
      v[Var::AM] = am;
      v[Var::XSGA] = xsga;
      v[Var::OANCF] = oancf;
      v[Var::DVP] = dvp;
      v[Var::XSTF] = xstf;
      v[Var::CSHO] = csho;
      v[Var::XAGT] = xagt;
      v[Var::XEQO] = xeqo;
      v[Var::XOPR] = cogs + xsga;
      rows.push_back(std::move(rec));
    }
    out.companies.push_back(build_panel(idbuf, std::move(rows)));
  }
  return out;
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  const auto header = csv_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& panel : data.companies) {
    for (std::size_t t = 0; t < panel.num_years(); ++t) {
      out << quote_id(panel.company_id()) << ',' << panel.year(t);
      for (Var v : reported_variables()) out << ',' << format_double(panel.value(t, v));
      out << '\n';
    }
  }
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_dataset_csv(data, out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace finadv
