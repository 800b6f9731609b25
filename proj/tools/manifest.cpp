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

#include "manifest.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>

#include "metakernel/error.hpp"
#include "metakernel/io.hpp"
#include "metakernel/version.hpp"

namespace metakernel::cli {
namespace fs = std::filesystem;

namespace {

std::string utc_stamp(const char* format) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, format, &tm);
  return buf;
}

}  // namespace

RunDirectory::RunDirectory(fs::path dir, std::string command, std::vector<std::string> argv)
    : dir_(std::move(dir)), command_(std::move(command)), argv_(std::move(argv)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void RunDirectory::write(const std::string& name, std::string_view content, bool deterministic) {
  write_text_file(dir_ / name, content);
  artifacts_.push_back({name, fnv1a64(content), content.size(), deterministic});
}

void RunDirectory::finish(double wall_seconds, int exit_code) {
  nlohmann::json artifacts = nlohmann::json::array();
  for (const auto& a : artifacts_) {
    artifacts.push_back(
        {{"file", a.name}, {"fnv1a64", hex64(a.checksum)}, {"bytes", a.bytes}, {"deterministic", a.deterministic}});
  }
  const nlohmann::json manifest = {{"tool", "metakernel"},
                                   {"version", kVersion},
                                   {"command", command_},
                                   {"argv", argv_},
                                   {"params", params_},
                                   {"seeds", seeds_},
                                   {"artifacts", artifacts},
                                   {"warnings", warnings_},
                                   {"exit_code", exit_code},
                                   {"wall_seconds", wall_seconds},
                                   {"created_utc", utc_stamp("%Y-%m-%dT%H:%M:%SZ")}};
  write_text_file(dir_ / kManifestName, manifest.dump(2) + "\n");
}

fs::path default_run_dir(std::string_view command) {
  const char* env = std::getenv(kRunsRootEnv);
  const fs::path root = env != nullptr && *env != '\0' ? fs::path(env) : fs::path("runs");
  const std::string base = utc_stamp("%Y%m%dT%H%M%SZ") + "-" + std::string(command);
  fs::path candidate = root / base;
  for (int n = 1; fs::exists(candidate); ++n) candidate = root / (base + "-" + std::to_string(n));
  return candidate;
}

std::vector<std::string> without_out_dir(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out-dir") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out-dir=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

nlohmann::json read_manifest(const fs::path& path) {
  const fs::path file = fs::is_directory(path) ? path / kManifestName : path;
  try {
    return nlohmann::json::parse(read_text_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("cannot parse manifest " + file.string() + ": " + e.what());
  }
}

}  // namespace metakernel::cli
