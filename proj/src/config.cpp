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

#include "parabc/config.hpp"

#include <set>

#include "json.hpp"
#include "parabc/errors.hpp"
#include "parabc/io_util.hpp"

namespace parabc {
namespace {

using nlohmann::json;

// Walks one section, rejecting keys the schema does not know about.
class Section {
 public:
  Section(const json& root, std::string name, bool required)
      : name_(std::move(name)) {
    if (root.contains(name_)) {
      node_ = &root.at(name_);
      if (!node_->is_object()) {
        throw ConfigError("config section '" + name_ + "' must be an object");
      }
    } else if (required) {
      throw ConfigError("missing config section '" + name_ + "'");
    }
  }

  template <typename T>
  void read(const char* key, T& out, bool required = false) {
    known_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) {
      if (required) throw ConfigError("missing config key '" + qualified(key) + "'");
      return;
    }
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + qualified(key) + "' has the wrong type");
    }
  }

  void check_unknown() const {
    if (node_ == nullptr) return;
    for (const auto& [key, value] : node_->items()) {
      if (!known_.contains(key)) {
        throw ConfigError("unknown config key '" + qualified(key) + "'");
      }
    }
  }

 private:
  std::string qualified(std::string_view key) const {
    return name_ + "." + std::string(key);
  }

  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string, std::less<>> known_;
};

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& text) {
  std::filesystem::path p(text);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

}  // namespace

std::string to_string(FilterMode mode) {
  return mode == FilterMode::kChunked ? "chunked" : "top_k";
}

FilterMode parse_filter_mode(std::string_view text) {
  if (text == "chunked") return FilterMode::kChunked;
  if (text == "top_k") return FilterMode::kTopK;
  throw ConfigError("filter mode must be 'chunked' or 'top_k', got '" +
                    std::string(text) + "'");
}

std::string to_string(GaussianSpread spread) {
  return spread == GaussianSpread::kVarianceSqrtH ? "variance_sqrt_h"
                                                  : "variance_h";
}

GaussianSpread parse_gaussian_spread(std::string_view text) {
  if (text == "variance_sqrt_h") return GaussianSpread::kVarianceSqrtH;
  if (text == "variance_h") return GaussianSpread::kVarianceH;
  throw ConfigError(
      "gaussian_spread must be 'variance_sqrt_h' or 'variance_h', got '" +
      std::string(text) + "'");
}

AppConfig parse_config(std::string_view json_text,
                       const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");

  static const std::set<std::string, std::less<>> kSections = {
      "data", "prior", "model", "abc", "runtime", "output"};
  for (const auto& [key, value] : root.items()) {
    if (!kSections.contains(key)) {
      throw ConfigError("unknown config section '" + key + "'");
    }
  }

  AppConfig cfg;
  RunConfig& run = cfg.run;

  Section data(root, "data", true);
  std::string dir = ".";
  data.read("dir", dir);
  cfg.data_dir = resolve(base_dir, dir);
  data.read("country", cfg.country, true);
  data.check_unknown();

  Section prior(root, "prior", false);
  prior.read("lower", run.prior.lower);
  prior.read("upper", run.prior.upper);
  prior.check_unknown();

  Section model(root, "model", false);
  std::string spread = to_string(run.spread);
  model.read("gaussian_spread", spread);
  run.spread = parse_gaussian_spread(spread);
  model.check_unknown();

  Section abc(root, "abc", true);
  abc.read("tolerance", run.tolerance, true);
  abc.read("batch_size", run.batch_size);
  abc.read("target_accepted", run.target_accepted);
  abc.read("chunk_size", run.chunk_size);
  std::string mode = to_string(run.filter_mode);
  abc.read("filter_mode", mode);
  run.filter_mode = parse_filter_mode(mode);
  abc.read("top_k", run.top_k);
  abc.read("fit_days", run.fit_days);
  abc.read("max_runs", run.max_runs);
  abc.check_unknown();

  Section runtime(root, "runtime", false);
  runtime.read("workers", run.num_workers);
  runtime.read("seed", run.seed);
  runtime.check_unknown();

  Section output(root, "output", false);
  std::string out_dir = cfg.output_dir.string();
  output.read("dir", out_dir);
  cfg.output_dir = resolve(base_dir, out_dir);
  output.read("projection_days", cfg.projection_days);
  output.read("histogram_bins", cfg.histogram_bins);
  output.check_unknown();

  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path.parent_path());
}

}  // namespace parabc
