// Copyright 2026 The Metakernel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace metakernel::cli {

inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kRunsRootEnv = "METAKERNEL_RUNS_ROOT";

struct Artifact {
  std::string name;
  std::uint64_t checksum = 0;
  std::size_t bytes = 0;
  /// False for files that carry timings; they are excluded from rerun checks.
  bool deterministic = true;
};

/// One output directory and the manifest describing how it was produced.
class RunDirectory {
 public:
  RunDirectory(std::filesystem::path dir, std::string command, std::vector<std::string> argv);

  const std::filesystem::path& path() const { return dir_; }
  nlohmann::json& params() { return params_; }
  nlohmann::json& seeds() { return seeds_; }
  const std::vector<Artifact>& artifacts() const { return artifacts_; }

  void write(const std::string& name, std::string_view content, bool deterministic = true);
  void warn(std::string message) { warnings_.push_back(std::move(message)); }
  void finish(double wall_seconds, int exit_code);

 private:
  std::filesystem::path dir_;
  std::string command_;
  std::vector<std::string> argv_;
  nlohmann::json params_ = nlohmann::json::object();
  nlohmann::json seeds_ = nlohmann::json::object();
  std::vector<Artifact> artifacts_;
  std::vector<std::string> warnings_;
};

/// `<root>/<UTC timestamp>-<command>`, root from METAKERNEL_RUNS_ROOT or
/// `runs`. A numeric suffix keeps directories unique within one second.
std::filesystem::path default_run_dir(std::string_view command);

/// Drops `--out-dir <path>` / `--out-dir=<path>` so a manifest can be replayed elsewhere.
std::vector<std::string> without_out_dir(const std::vector<std::string>& args);

nlohmann::json read_manifest(const std::filesystem::path& path);

}  // namespace metakernel::cli
