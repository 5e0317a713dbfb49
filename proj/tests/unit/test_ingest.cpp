#include <doctest.h>

#include <cmath>
#include <sstream>

#include "proxmc/error.hpp"
#include "proxmc/ingest.hpp"
#include "support.hpp"

using namespace proxmc;
using namespace proxmc::testing;
using namespace std::chrono;

namespace {

const char* kSmall =
    "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20,1/24/20,1/25/20\n"
    ",Atlantis,1.0,2.0,1,3,6,6\n"
    "North,Narnia,0,0,0,2,2,5\n"
    "South,Narnia,0,0,1,1,4,3\n"
    ",\"Korea, South\",36.0,128.0,10,20,30,40\n";

CumulativeSeries parse(const std::string& text, const std::string& country) {
  std::istringstream in(text);
  return parse_jhu_csv(in, country);
}

std::string error_of(const std::string& text, const std::string& country) {
  try {
    parse(text, country);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("dates") {
  CHECK(parse_jhu_date("1/22/20") == year{2020} / January / 22);
  CHECK(parse_jhu_date("12/6/21") == year{2021} / December / 6);
  CHECK(parse_iso_date("2021-12-06") == year{2021} / December / 6);
  CHECK(format_date(year{2021} / March / 9) == "2021-03-09");
  CHECK(add_days(year{2020} / February / 28, 2) == year{2020} / March / 1);
  CHECK_THROWS_AS(parse_jhu_date("13/1/20"), ParseError);
  CHECK_THROWS_AS(parse_jhu_date("2021-01-01"), ParseError);
  CHECK_THROWS_AS(parse_iso_date("2021-02-30"), ParseError);
}

TEST_CASE("csv records") {
  std::istringstream in("a,\"b, c\",d\n\"multi\nline\",\"quote \"\"x\"\"\",\r\nlast,,\n");
  const auto t = read_csv(in);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0] == std::vector<std::string>{"a", "b, c", "d"});
  CHECK(t.rows[1] == std::vector<std::string>{"multi\nline", "quote \"x\"", ""});
  CHECK(t.rows[2] == std::vector<std::string>{"last", "", ""});
  CHECK(t.line == std::vector<std::size_t>{1, 2, 4});
  std::istringstream bad("a,\"open\n");
  CHECK_THROWS_AS(read_csv(bad), ParseError);
}

TEST_CASE("country aggregation") {
  const auto one = parse(kSmall, "Atlantis");
  CHECK(one.values == std::vector<std::int64_t>{1, 3, 6, 6});
  CHECK(one.dates.front() == year{2020} / January / 22);
  const auto two = parse(kSmall, "Narnia");
  CHECK(two.values == std::vector<std::int64_t>{1, 3, 6, 8});
  const auto korea = parse(kSmall, "Korea, South");
  CHECK(korea.values == std::vector<std::int64_t>{10, 20, 30, 40});

  const auto msg = error_of(kSmall, "Narnnia");
  CHECK(msg.find("unknown country 'Narnnia'") != std::string::npos);
  CHECK(msg.find("'Narnia'") != std::string::npos);
  CHECK_THROWS_AS(parse(kSmall, "Korea"), LookupError);
  CHECK(error_of(kSmall, "Korea").find("Korea, South") != std::string::npos);
}

TEST_CASE("malformed input") {
  const std::string header = "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20\n";
  CHECK(error_of(header + ",A,0,0,1\n", "A").find("line 2") != std::string::npos);
  CHECK(error_of(header + ",A,0,0,1,2\n,A,0,0,x,2\n", "A").find("line 3, column 5") != std::string::npos);
  CHECK_THROWS_AS(parse("Province/State,Country/Region,Lat,Long,1/22/20,1/24/20\n,A,0,0,1,2\n", "A"), ParseError);
  CHECK_THROWS_AS(parse("", "A"), ParseError);
  CHECK_THROWS_AS(parse_jhu_csv(std::filesystem::path("/nonexistent/file.csv"), "A"), ParseError);
}

TEST_CASE("daily differences") {
  CumulativeSeries c;
  c.dates = dates_from(year{2021} / January / 1, 5);
  c.values = {10, 15, 13, 20, 20};
  const auto d = to_daily(c);
  CHECK(d.values == std::vector<std::int64_t>{5, 0, 7, 0});
  CHECK(d.dates.front() == year{2021} / January / 2);
}

TEST_CASE("analysis window") {
  DailySeries d;
  d.dates = dates_from(year{2021} / January / 1, 100);
  for (int k = 0; k < 100; ++k) d.values.push_back(k);
  const Date start = year{2021} / January / 27;
  const auto w = window(d, start, 35, 26);
  CHECK(w.size() == 35);
  CHECK(w.history.size() == 26);
  CHECK(w.history.front() == 0);
  CHECK(w.values.front() == 26);
  CHECK(w.dates.front() == start);
  CHECK(w.history.size() + w.size() == 61);

  CHECK_THROWS_AS(window(d, year{2021} / January / 26, 35, 26), RangeError);
  try {
    window(d, year{2021} / March / 30, 35, 26);
    FAIL("expected RangeError");
  } catch (const RangeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2021-01-27") != std::string::npos);
    CHECK(msg.find("2021-03-07") != std::string::npos);
  }
}

TEST_CASE("default regularization weights") {
  CountSeries cs;
  cs.dates = dates_from(year{2021} / January / 1, 4);
  cs.values = {0, 0, 0, 8};
  const auto h = lambda_defaults(cs);
  // sigma^2 = (3 * 4 + 36) / 3 = 16.
  CHECK(h.lambda_R == doctest::Approx(3.5 * std::sqrt(6.0)));
  CHECK(h.lambda_O == 0.05);
  cs.values = {5, 5, 5, 5};
  CHECK_THROWS_AS(lambda_defaults(cs), ConfigError);
}

TEST_CASE("window file roundtrip") {
  const auto cs = simulate_counts(std::vector<double>(10, 1.1), 50.0, 1.02, 4);
  std::stringstream io;
  write_window_csv(io, cs);
  const auto back = read_window_csv(io);
  CHECK(back.values == cs.values);
  CHECK(back.history == cs.history);
  CHECK(back.dates == cs.dates);
  std::istringstream bad("day,count\n");
  CHECK_THROWS_AS(read_window_csv(bad), ParseError);
}

TEST_CASE("bundled fixture") {
  const auto uk = parse_jhu_csv(fixture_csv(), "United Kingdom");
  const auto daily = to_daily(uk);
  for (auto v : daily.values) CHECK(v >= 0);
  const auto w = window(daily, year{2021} / December / 6);
  CHECK(w.size() == 35);
  const auto fr = parse_jhu_csv(fixture_csv(), "France");
  CHECK(fr.values.size() == uk.values.size());
}
