// Copyright 2026 The parabc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "parabc/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "parabc/errors.hpp"
#include "parabc/io_util.hpp"

namespace parabc {
namespace {

constexpr std::size_t kJhuLeadingColumns = 4;  // Province, Country, Lat, Long

bool read_record(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

int parse_int(std::string_view text, std::string_view what) {
  const double v = parse_number(text, what);
  if (v != static_cast<int>(v)) {
    throw MalformedCsv("expected an integer for " + std::string(what));
  }
  return static_cast<int>(v);
}

}  // namespace

void stderr_warning(const std::string& message) {
  std::cerr << "warning: " << message << '\n';
}

ObservedArray ObservedSeries::window(std::size_t days) const {
  if (days > this->days()) {
    throw ShapeMismatch("requested " + std::to_string(days) +
                        " days but series for " + country + " has only " +
                        std::to_string(this->days()));
  }
  ObservedArray out(days);
  for (std::size_t d = 0; d < days; ++d) {
    out.at(0, d) = A[d];
    out.at(1, d) = R[d];
    out.at(2, d) = D[d];
  }
  return out;
}

std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw MalformedCsv("unterminated quote in record: " +
                                 std::string(line));
  fields.push_back(std::move(field));
  return fields;
}

std::chrono::year_month_day parse_jhu_date(std::string_view text) {
  const auto first = text.find('/');
  const auto second = text.find('/', first == std::string_view::npos
                                         ? first
                                         : first + 1);
  if (first == std::string_view::npos || second == std::string_view::npos) {
    throw MalformedCsv("bad date column '" + std::string(text) + "'");
  }
  const int month = parse_int(text.substr(0, first), "date month");
  const int day = parse_int(text.substr(first + 1, second - first - 1),
                            "date day");
  int year = parse_int(text.substr(second + 1), "date year");
  if (year < 100) year += 2000;
  const std::chrono::year_month_day date{
      std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
      std::chrono::day{static_cast<unsigned>(day)}};
  if (!date.ok()) {
    throw MalformedCsv("invalid date '" + std::string(text) + "'");
  }
  return date;
}

CumulativeTable read_jhu_table(std::istream& in, std::string_view country,
                               const WarningSink& warn) {
  std::string line;
  if (!read_record(in, line)) throw MalformedCsv("empty JHU table");
  const auto header = split_csv_record(line);
  if (header.size() <= kJhuLeadingColumns) {
    throw MalformedCsv("JHU header has no date columns");
  }

  CumulativeTable table;
  for (std::size_t c = kJhuLeadingColumns; c < header.size(); ++c) {
    table.dates.push_back(parse_jhu_date(header[c]));
  }
  table.counts.assign(table.dates.size(), 0.0);

  bool found = false;
  std::size_t row = 1;
  while (read_record(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv_record(line);
    if (fields.size() != header.size()) {
      throw MalformedCsv("row " + std::to_string(row) + " has " +
                         std::to_string(fields.size()) + " fields, header has " +
                         std::to_string(header.size()));
    }
    if (fields[1] != country) continue;
    found = true;
    for (std::size_t c = kJhuLeadingColumns; c < fields.size(); ++c) {
      table.counts[c - kJhuLeadingColumns] +=
          parse_number(fields[c], "JHU count");
    }
  }
  if (!found) {
    throw CountryNotFound("country '" + std::string(country) +
                          "' not found in JHU table");
  }

  double running_max = 0.0;
  for (std::size_t i = 0; i < table.counts.size(); ++i) {
    if (table.counts[i] < running_max) {
      warn("non-monotone cumulative count for " + std::string(country) +
           " on " + format_date(table.dates[i]) + ": " +
           format_number(table.counts[i]) + " raised to " +
           format_number(running_max));
      table.counts[i] = running_max;
    }
    running_max = table.counts[i];
  }
  return table;
}

RawSeries parse_jhu_csv(const std::filesystem::path& confirmed_path,
                        const std::filesystem::path& recovered_path,
                        const std::filesystem::path& deaths_path,
                        std::string_view country, const WarningSink& warn) {
  auto confirmed_in = open_input(confirmed_path);
  auto recovered_in = open_input(recovered_path);
  auto deaths_in = open_input(deaths_path);
  CumulativeTable confirmed = read_jhu_table(confirmed_in, country, warn);
  CumulativeTable recovered = read_jhu_table(recovered_in, country, warn);
  CumulativeTable deaths = read_jhu_table(deaths_in, country, warn);

  // The recovered table stopped updating earlier than the other two in the
  // upstream repository, so truncate to the common prefix of dates.
  const std::size_t n = std::min(
      {confirmed.dates.size(), recovered.dates.size(), deaths.dates.size()});
  for (std::size_t i = 0; i < n; ++i) {
    if (confirmed.dates[i] != recovered.dates[i] ||
        confirmed.dates[i] != deaths.dates[i]) {
      throw MalformedCsv("date columns of the three JHU tables disagree at " +
                         format_date(confirmed.dates[i]));
    }
  }
  if (n < confirmed.dates.size() || n < deaths.dates.size() ||
      n < recovered.dates.size()) {
    warn("JHU tables have different lengths; using the first " +
         std::to_string(n) + " dates");
  }

  RawSeries raw;
  raw.dates.assign(confirmed.dates.begin(), confirmed.dates.begin() + n);
  raw.confirmed.assign(confirmed.counts.begin(), confirmed.counts.begin() + n);
  raw.recovered.assign(recovered.counts.begin(), recovered.counts.begin() + n);
  raw.deaths.assign(deaths.counts.begin(), deaths.counts.begin() + n);
  return raw;
}

ObservedSeries derive_observed(const RawSeries& raw, std::string_view country,
                               double population, double onset_threshold,
                               const WarningSink& warn) {
  const std::size_t n = raw.confirmed.size();
  if (raw.recovered.size() != n || raw.deaths.size() != n) {
    throw ShapeMismatch("confirmed, recovered and deaths differ in length");
  }
  const auto onset = std::find_if(raw.confirmed.begin(), raw.confirmed.end(),
                                  [&](double c) { return c >= onset_threshold; });
  if (onset == raw.confirmed.end()) {
    throw OnsetNotReached("confirmed cases for " + std::string(country) +
                          " never reach " + format_number(onset_threshold));
  }
  const std::size_t start = static_cast<std::size_t>(onset - raw.confirmed.begin());

  ObservedSeries series;
  series.country = std::string(country);
  series.population = population;
  if (raw.dates.size() == n) series.start_date = raw.dates[start];
  for (std::size_t i = start; i < n; ++i) {
    double active = raw.confirmed[i] - raw.recovered[i] - raw.deaths[i];
    if (active < 0.0) {
      warn("negative active count " + format_number(active) + " for " +
           series.country + " at index " + std::to_string(i) +
           "; clamped to 0");
      active = 0.0;
    }
    series.A.push_back(active);
    series.R.push_back(raw.recovered[i]);
    series.D.push_back(raw.deaths[i]);
  }

  double peak = 0.0;
  for (std::size_t d = 0; d < series.days(); ++d) {
    peak = std::max(peak, series.A[d] + series.R[d] + series.D[d]);
  }
  if (!(population > peak)) {
    throw ConfigError("population " + format_number(population) + " of " +
                      series.country + " does not exceed the observed peak " +
                      format_number(peak));
  }
  return series;
}

double load_population(std::istream& in, std::string_view country,
                       const WarningSink& warn) {
  std::string line;
  bool found = false;
  double population = 0.0;
  std::size_t row = 0;
  while (read_record(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv_record(line);
    if (fields.size() != 2) {
      throw MalformedCsv("population table row " + std::to_string(row) +
                         " must have two fields");
    }
    if (fields[0] != country) continue;
    if (found) {
      warn("duplicate population row for " + std::string(country) +
           "; keeping the first");
      continue;
    }
    population = parse_number(fields[1], "population");
    found = true;
  }
  if (!found) {
    throw CountryNotFound("country '" + std::string(country) +
                          "' not found in population table");
  }
  return population;
}

double load_population(const std::filesystem::path& table_path,
                       std::string_view country, const WarningSink& warn) {
  auto in = open_input(table_path);
  return load_population(in, country, warn);
}

std::string format_date(std::chrono::year_month_day date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()));
  return buf;
}

std::chrono::year_month_day parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw MalformedCsv("expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  const std::chrono::year_month_day date{
      std::chrono::year{parse_int(text.substr(0, 4), "year")},
      std::chrono::month{static_cast<unsigned>(parse_int(text.substr(5, 2), "month"))},
      std::chrono::day{static_cast<unsigned>(parse_int(text.substr(8, 2), "day"))}};
  if (!date.ok()) throw MalformedCsv("invalid date '" + std::string(text) + "'");
  return date;
}

void write_series(const ObservedSeries& series,
                  const std::filesystem::path& base) {
  std::ostringstream csv;
  csv << "day,A,R,D\n";
  for (std::size_t d = 0; d < series.days(); ++d) {
    csv << d << ',' << format_number(series.A[d]) << ','
        << format_number(series.R[d]) << ',' << format_number(series.D[d])
        << '\n';
  }
  nlohmann::ordered_json header;
  header["country"] = series.country;
  header["population"] = series.population;
  header["start_date"] = format_date(series.start_date);
  header["days"] = series.days();

  std::filesystem::path csv_path = base;
  csv_path += ".csv";
  std::filesystem::path json_path = base;
  json_path += ".json";
  write_file_atomic(csv_path, csv.str());
  write_file_atomic(json_path, header.dump(2) + "\n");
}

ObservedSeries read_series(const std::filesystem::path& base) {
  std::filesystem::path csv_path = base;
  csv_path += ".csv";
  std::filesystem::path json_path = base;
  json_path += ".json";

  ObservedSeries series;
  std::size_t days = 0;
  try {
    const auto header = nlohmann::json::parse(read_file(json_path));
    series.country = header.at("country").get<std::string>();
    series.population = header.at("population").get<double>();
    series.start_date =
        parse_iso_date(header.at("start_date").get<std::string>());
    days = header.at("days").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedCsv("bad series header " + json_path.string() + ": " +
                       e.what());
  }

  auto in = open_input(csv_path);
  std::string line;
  if (!read_record(in, line) || line != "day,A,R,D") {
    throw MalformedCsv(csv_path.string() + ": expected header 'day,A,R,D'");
  }
  while (read_record(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_record(line);
    if (fields.size() != 4) {
      throw MalformedCsv(csv_path.string() + ": expected 4 fields per row");
    }
    if (parse_int(fields[0], "day") != static_cast<int>(series.days())) {
      throw MalformedCsv(csv_path.string() + ": days are not consecutive");
    }
    series.A.push_back(parse_number(fields[1], "A"));
    series.R.push_back(parse_number(fields[2], "R"));
    series.D.push_back(parse_number(fields[3], "D"));
  }
  if (series.days() != days) {
    throw MalformedCsv(csv_path.string() + ": header says " +
                       std::to_string(days) + " days, file has " +
                       std::to_string(series.days()));
  }
  return series;
}

}  // namespace parabc
