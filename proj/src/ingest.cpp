#include "proxmc/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "proxmc/error.hpp"

namespace proxmc {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::int64_t parse_count(std::string_view s, std::size_t line, std::size_t column) {
  std::int64_t v = 0;
  if (parse_int(s, v)) return v;
  // Some revisions of the file carry counts as "123.0".
  double d = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), d);
  if (res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(d) && d == std::floor(d))
    return static_cast<std::int64_t>(d);
  throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column + 1) +
                   ": expected an integer count, got '" + std::string(s) + "'");
}

Date make_date(int y, unsigned m, unsigned d, std::string_view src) {
  const Date date{std::chrono::year(y), std::chrono::month(m), std::chrono::day(d)};
  if (!date.ok()) throw ParseError("invalid calendar date '" + std::string(src) + "'");
  return date;
}

}  // namespace

Date parse_jhu_date(std::string_view s) {
  const auto a = s.find('/');
  const auto b = a == std::string_view::npos ? a : s.find('/', a + 1);
  unsigned m = 0, d = 0;
  int y = 0;
  if (b == std::string_view::npos || !parse_int(s.substr(0, a), m) ||
      !parse_int(s.substr(a + 1, b - a - 1), d) || !parse_int(s.substr(b + 1), y))
    throw ParseError("expected an M/D/YY date, got '" + std::string(s) + "'");
  if (y < 100) y += 2000;
  return make_date(y, m, d, s);
}

Date parse_iso_date(std::string_view s) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !parse_int(s.substr(0, 4), y) ||
      !parse_int(s.substr(5, 2), m) || !parse_int(s.substr(8, 2), d))
    throw ParseError("expected a YYYY-MM-DD date, got '" + std::string(s) + "'");
  return make_date(y, m, d, s);
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

Date add_days(Date d, long days) { return Date{std::chrono::sys_days(d) + std::chrono::days(days)}; }

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, field_started = false, any = false;
  std::size_t line = 1, record_line = 1;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    table.rows.push_back(std::move(row));
    table.line.push_back(record_line);
    row.clear();
    any = false;
  };
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (!any) record_line = line;
    any = true;
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      if (in.peek() != '\n') field.push_back(c);
    } else if (c == '\n') {
      end_record();
      ++line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(record_line) + ": unterminated quoted field");
  if (any) end_record();
  return table;
}

CumulativeSeries parse_jhu_csv(std::istream& in, const std::string& country) {
  const auto table = read_csv(in);
  if (table.rows.empty()) throw ParseError("empty CSV file");
  const auto& header = table.rows.front();
  constexpr std::size_t kFirstDate = 4;
  if (header.size() <= kFirstDate || lower(header[1]).find("country") == std::string::npos)
    throw ParseError("line 1: expected header Province/State,Country/Region,Lat,Long,<dates>");

  CumulativeSeries out;
  out.country = country;
  for (std::size_t j = kFirstDate; j < header.size(); ++j) {
    try {
      out.dates.push_back(parse_jhu_date(header[j]));
    } catch (const ParseError& e) {
      throw ParseError("line 1, column " + std::to_string(j + 1) + ": " + e.what());
    }
    if (out.dates.size() > 1 && add_days(out.dates[out.dates.size() - 2], 1) != out.dates.back())
      throw ParseError("line 1, column " + std::to_string(j + 1) + ": dates are not consecutive");
  }
  out.values.assign(out.dates.size(), 0);

  std::map<std::string, int> seen;
  bool found = false;
  for (std::size_t r = 1; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() != header.size())
      throw ParseError("line " + std::to_string(table.line[r]) + ": expected " +
                       std::to_string(header.size()) + " fields, found " + std::to_string(row.size()));
    if (row[1] != country) {
      seen.emplace(row[1], 0);
      continue;
    }
    found = true;
    for (std::size_t j = kFirstDate; j < row.size(); ++j)
      out.values[j - kFirstDate] += parse_count(row[j], table.line[r], j);
  }
  if (!found) {
    const auto key = lower(country);
    std::vector<std::pair<std::size_t, std::string>> near;
    for (const auto& [name, _] : seen) {
      const auto l = lower(name);
      const std::size_t dist = edit_distance(key, l);
      if (dist <= 3 || (!key.empty() && (l.find(key) != std::string::npos || key.find(l) != std::string::npos)))
        near.emplace_back(dist, name);
    }
    std::sort(near.begin(), near.end());
    std::string msg = "unknown country '" + country + "'";
    if (!near.empty()) {
      msg += "; did you mean";
      for (std::size_t k = 0; k < std::min<std::size_t>(near.size(), 5); ++k)
        msg += (k == 0 ? " '" : ", '") + near[k].second + "'";
      msg += "?";
    }
    throw LookupError(msg);
  }
  return out;
}

CumulativeSeries parse_jhu_csv(const std::filesystem::path& path, const std::string& country) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return parse_jhu_csv(in, country);
}

DailySeries to_daily(const CumulativeSeries& cumulative) {
  if (cumulative.values.size() < 2) throw ConfigError("need at least two dates to difference");
  DailySeries out;
  out.dates.assign(cumulative.dates.begin() + 1, cumulative.dates.end());
  out.values.resize(out.dates.size());
  for (std::size_t k = 0; k < out.values.size(); ++k)
    out.values[k] = std::max<std::int64_t>(0, cumulative.values[k + 1] - cumulative.values[k]);
  return out;
}

CountSeries window(const DailySeries& daily, Date start, std::size_t n_days, std::size_t tau) {
  if (n_days == 0) throw ConfigError("window must contain at least one day");
  if (daily.dates.empty()) throw RangeError("daily series is empty");
  const auto first = std::chrono::sys_days(daily.dates.front());
  const auto begin = std::chrono::sys_days(start) - std::chrono::days(static_cast<long>(tau));
  const auto end = std::chrono::sys_days(start) + std::chrono::days(static_cast<long>(n_days) - 1);
  const auto last = std::chrono::sys_days(daily.dates.back());
  if (begin < first || end > last) {
    const Date earliest{first + std::chrono::days(static_cast<long>(tau))};
    const Date latest{last - std::chrono::days(static_cast<long>(n_days) - 1)};
    std::string msg = "window starting " + format_date(start) + " needs data from " + format_date(Date{begin}) +
                      " to " + format_date(Date{end}) + "; ";
    msg += earliest <= latest ? "admissible start dates are " + format_date(earliest) + " to " + format_date(latest)
                              : std::string("the series is too short for this window");
    throw RangeError(msg);
  }
  const auto offset = static_cast<std::size_t>((begin - first).count());
  CountSeries out;
  out.history.assign(daily.values.begin() + static_cast<std::ptrdiff_t>(offset),
                     daily.values.begin() + static_cast<std::ptrdiff_t>(offset + tau));
  out.values.assign(daily.values.begin() + static_cast<std::ptrdiff_t>(offset + tau),
                    daily.values.begin() + static_cast<std::ptrdiff_t>(offset + tau + n_days));
  out.dates.assign(daily.dates.begin() + static_cast<std::ptrdiff_t>(offset + tau),
                   daily.dates.begin() + static_cast<std::ptrdiff_t>(offset + tau + n_days));
  out.validate();
  return out;
}

Hyperparams lambda_defaults(const CountSeries& counts) {
  const std::size_t n = counts.size();
  if (n < 2) throw ConfigError("need at least two counts to estimate their spread");
  double mean = 0.0;
  for (auto v : counts.values) mean += static_cast<double>(v);
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (auto v : counts.values) ss += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sigma > 0.0)) throw ConfigError("counts in the window are constant; lambda_R would be zero");
  return Hyperparams{3.5 * std::sqrt(6.0) * sigma / 4.0, 0.05};
}

void write_window_csv(std::ostream& out, const CountSeries& counts) {
  out << "date,count,role\n";
  const std::size_t tau = counts.history.size();
  for (std::size_t k = 0; k < tau; ++k)
    out << format_date(add_days(counts.dates.front(), -static_cast<long>(tau - k))) << ','
        << counts.history[k] << ",history\n";
  for (std::size_t t = 0; t < counts.size(); ++t)
    out << format_date(counts.dates[t]) << ',' << counts.values[t] << ",window\n";
}

CountSeries read_window_csv(std::istream& in) {
  const auto table = read_csv(in);
  if (table.rows.empty() || table.rows.front() != std::vector<std::string>{"date", "count", "role"})
    throw ParseError("line 1: expected header date,count,role");
  CountSeries out;
  std::vector<Date> history_dates;
  for (std::size_t r = 1; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto where = "line " + std::to_string(table.line[r]) + ": ";
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 3) throw ParseError(where + "expected 3 fields");
    Date d;
    try {
      d = parse_iso_date(row[0]);
    } catch (const ParseError& e) {
      throw ParseError(where + e.what());
    }
    const auto v = parse_count(row[1], table.line[r], 1);
    if (row[2] == "history") {
      if (!out.values.empty()) throw ParseError(where + "history row after window rows");
      history_dates.push_back(d);
      out.history.push_back(v);
    } else if (row[2] == "window") {
      out.dates.push_back(d);
      out.values.push_back(v);
    } else {
      throw ParseError(where + "role must be 'history' or 'window'");
    }
  }
  if (out.values.empty()) throw ParseError("window file has no window rows");
  for (std::size_t k = 0; k < history_dates.size(); ++k)
    if (history_dates[k] != add_days(out.dates.front(), -static_cast<long>(history_dates.size() - k)))
      throw ParseError("history dates do not immediately precede the window");
  out.validate();
  return out;
}

}  // namespace proxmc
