#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "finadv/panel.hpp"

namespace finadv {

/// Closed interval used for uniform draws.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct SynthParams {
  int n_companies = 200;
  double years_mean = 7.9;
  int min_years = 2;
  int max_years = 14;
  int first_year_lo = 1995;
  int first_year_hi = 2012;

  // Revenue level (thousands of currency units) and its yearly growth.
  double sales_median = 2.0e5;
  double sales_log_sigma = 1.0;
  Range healthy_growth{0.00, 0.10};
  Range distressed_growth{-0.06, 0.04};

  // Cost structure, as fractions of SALE unless noted.
  Range cogs_ratio{0.55, 0.72};
  Range xsga_ratio{0.08, 0.18};
  Range xstf_ratio{0.03, 0.10};
  Range am_ratio{0.003, 0.015};
  Range xeqo_ratio{0.01, 0.04};
  Range other_expense_ratio{0.005, 0.02};  // XAGT beyond XEQO
  Range dp_rate{0.06, 0.12};               // of PPEGT
  Range net_margin{0.03, 0.10};

  // Balance sheet.
  Range ppegt_to_sales{0.3, 0.9};
  Range accumulated_dep{0.3, 0.6};  // of PPEGT
  Range receivable_days{30.0, 80.0};
  Range inventory_ratio{0.08, 0.25};  // of COGS
  Range cash_ratio{0.2, 0.6};         // other current assets over RECT + INVT
  Range other_assets{0.1, 0.5};       // over ACT + PPENT
  Range lct_ratio{0.4, 0.9};          // of ACT
  Range dltt_ratio{0.10, 0.35};       // of AT
  Range other_liabilities{0.05, 0.20};

  // Distress signal.
  double distress_fraction = 0.6;
  Range ni_decline{0.05, 0.20};
  Range leverage_drift{0.02, 0.06};   // DLTT added per year, as a fraction of AT
  Range accrual_gap{0.02, 0.08};      // NI minus OANCF, as a fraction of AT
  Range healthy_accrual{-0.06, 0.0};

  Range eps_target{0.5, 4.0};
  double dividend_payer_fraction = 0.3;
  Range dividend_ratio{0.01, 0.05};  // of first-year NI

  std::uint64_t seed = 0;

  /// Throws InvalidParams.
  void validate() const;
};

struct CsvSource {
  std::string path;
};

struct SyntheticSource {
  std::uint64_t seed = 0;
  SynthParams params;
};

using Provenance = std::variant<CsvSource, SyntheticSource>;

/// One year or company removed during ingestion. `year` is 0 when the whole
/// company was dropped.
struct DropRecord {
  std::string company_id;
  int year = 0;
  std::string reason;
};

struct Dataset {
  std::vector<FinancialPanel> companies;
  Provenance provenance;
  std::vector<DropRecord> drops;
};

/// Column order of the panel CSV.
std::vector<std::string> csv_header();

/// Throws SchemaError, ParseError, EmptyDataset, IoError.
Dataset ingest_csv(const std::filesystem::path& path);
Dataset ingest_csv(std::istream& in, const std::string& source_name = "<stream>");

/// Deterministic in params.seed. Throws InvalidParams.
Dataset generate_synthetic(const SynthParams& params);

/// Writes reported values with round-trip precision.
void write_dataset_csv(const Dataset& data, std::ostream& out);
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace finadv
