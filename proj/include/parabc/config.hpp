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

#include <filesystem>
#include <string>
#include <string_view>

#include "parabc/abc.hpp"

namespace parabc {

/// Parsed run-configuration file. Sections: data, prior, model, abc,
/// runtime, output. Relative paths resolve against the file's directory.
struct AppConfig {
  RunConfig run;
  std::filesystem::path data_dir = ".";  // directory of cached series
  std::string country;

  /// Base path of the cached series: data_dir / country.
  std::filesystem::path series_base() const { return data_dir / country; }
  std::filesystem::path output_dir = "out";
  std::size_t projection_days = 120;
  std::size_t histogram_bins = 20;
};

AppConfig parse_config(std::string_view json_text,
                       const std::filesystem::path& base_dir = {});
AppConfig load_config(const std::filesystem::path& path);

std::string to_string(FilterMode mode);
FilterMode parse_filter_mode(std::string_view text);
std::string to_string(GaussianSpread spread);
GaussianSpread parse_gaussian_spread(std::string_view text);

}  // namespace parabc
