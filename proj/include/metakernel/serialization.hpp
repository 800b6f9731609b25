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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "metakernel/svm.hpp"

namespace metakernel {

inline constexpr const char* kModelFormat = "metakernel-svm";
inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const KernelParams& params);
KernelParams kernel_params_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const SvmModel& model);
/// Throws InputError on an unknown format or version.
SvmModel model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const SvmModel& model);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace metakernel
