#pragma once

// JHU CSSE confirmed-cases time series -> country-level daily counts ->
// analysis window with serial-interval history.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "proxmc/model.hpp"

namespace proxmc {

struct CumulativeSeries {
  std::string country;
  std::vector<Date> dates;
  std::vector<std::int64_t> values;
};

struct DailySeries {
  std::vector<Date> dates;
  std::vector<std::int64_t> values;
};

/// M/D/YY (JHU header) -> date. Throws ParseError.
Date parse_jhu_date(std::string_view s);
/// YYYY-MM-DD. Throws ParseError.
Date parse_iso_date(std::string_view s);
std::string format_date(Date d);
Date add_days(Date d, long days);

/// One RFC-4180 record per element; `line` holds the 1-based line of each
/// record start.
struct CsvTable {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line;
};
CsvTable read_csv(std::istream& in);

/// Sums every Province/State row of `country`. Throws LookupError (with near
/// matches) for an unknown country and ParseError for malformed input.
CumulativeSeries parse_jhu_csv(std::istream& in, const std::string& country);
CumulativeSeries parse_jhu_csv(const std::filesystem::path& path, const std::string& country);

/// First differences with negative values replaced by zero. The first date
/// of the cumulative series is dropped.
DailySeries to_daily(const CumulativeSeries& cumulative);

/// The n_days counts from `start` plus the tau days before. Throws
/// RangeError naming the admissible start dates.
CountSeries window(const DailySeries& daily, Date start, std::size_t n_days = 35, std::size_t tau = 26);

/// lambda_O = 0.05, lambda_R = 3.5 sqrt(6) sigma_Z / 4 with sigma_Z the
/// sample (n - 1) standard deviation of the window counts.
Hyperparams lambda_defaults(const CountSeries& counts);

/// date,count,role with role in {history, window}.
void write_window_csv(std::ostream& out, const CountSeries& counts);
CountSeries read_window_csv(std::istream& in);

}  // namespace proxmc
