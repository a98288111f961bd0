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

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "parabc/model.hpp"

namespace parabc {

/// Receives non-fatal data-quality warnings. Defaults print to stderr.
using WarningSink = std::function<void(const std::string&)>;
void stderr_warning(const std::string& message);

/// Observed (A, R, D) series for one country, aligned so day 0 is the first
/// day at or above the onset threshold.
struct ObservedSeries {
  std::string country;
  double population = 0.0;
  std::chrono::year_month_day start_date{};
  std::vector<double> A;
  std::vector<double> R;
  std::vector<double> D;

  std::size_t days() const noexcept { return A.size(); }
  DayZero day0() const { return {A.at(0), R.at(0), D.at(0)}; }

  /// The first `days` days as a [3 x days] array. Throws ShapeMismatch when
  /// the series is shorter.
  ObservedArray window(std::size_t days) const;

  friend bool operator==(const ObservedSeries&, const ObservedSeries&) = default;
};

/// One JHU wide-format table reduced to a single country.
struct CumulativeTable {
  std::vector<std::chrono::year_month_day> dates;
  std::vector<double> counts;
};

/// Raw cumulative triples for a country, one entry per date.
struct RawSeries {
  std::vector<std::chrono::year_month_day> dates;
  std::vector<double> confirmed;
  std::vector<double> recovered;
  std::vector<double> deaths;
};

/// Splits one CSV record, honoring double-quoted fields.
std::vector<std::string> split_csv_record(std::string_view line);

/// Parses "M/D/YY" (JHU column headers).
std::chrono::year_month_day parse_jhu_date(std::string_view text);

/// Sums every province row of `country` in a JHU wide table. Dips in the
/// cumulative counts are fixed up to the running maximum with a warning.
CumulativeTable read_jhu_table(std::istream& in, std::string_view country,
                               const WarningSink& warn = stderr_warning);

RawSeries parse_jhu_csv(const std::filesystem::path& confirmed_path,
                        const std::filesystem::path& recovered_path,
                        const std::filesystem::path& deaths_path,
                        std::string_view country,
                        const WarningSink& warn = stderr_warning);

ObservedSeries derive_observed(const RawSeries& raw, std::string_view country,
                               double population, double onset_threshold = 100,
                               const WarningSink& warn = stderr_warning);

/// Reads a `country,population` table. The first matching row wins.
double load_population(std::istream& in, std::string_view country,
                       const WarningSink& warn = stderr_warning);
double load_population(const std::filesystem::path& table_path,
                       std::string_view country,
                       const WarningSink& warn = stderr_warning);

/// Cached series format: `<base>.csv` with `day,A,R,D` rows and
/// `<base>.json` holding country, population, start_date and days.
void write_series(const ObservedSeries& series,
                  const std::filesystem::path& base);
ObservedSeries read_series(const std::filesystem::path& base);

std::string format_date(std::chrono::year_month_day date);
std::chrono::year_month_day parse_iso_date(std::string_view text);

}  // namespace parabc
