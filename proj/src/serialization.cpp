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

#include "metakernel/serialization.hpp"

#include "metakernel/error.hpp"
#include "metakernel/io.hpp"

namespace metakernel {
namespace {

using nlohmann::json;

json matrix_to_json(const RowMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

RowMatrix matrix_from_json(const json& rows, std::size_t cols) {
  RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw InputError("model: ragged support vector matrix");
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
  }
  return m;
}

}  // namespace

json to_json(const KernelParams& params) {
  return {{"family", std::string(family_name(params.family))},
          {"alpha", params.alpha},
          {"k", params.k},
          {"z", params.z},
          {"gamma", params.gamma}};
}

KernelParams kernel_params_from_json(const json& j) {
  KernelParams p;
  p.family = parse_family(j.at("family").get<std::string>());
  p.alpha = j.at("alpha").get<double>();
  p.k = j.at("k").get<double>();
  p.z = j.at("z").get<double>();
  p.gamma = j.at("gamma").get<double>();
  return p;
}

json model_to_json(const SvmModel& model) {
  json machines = json::array();
  for (const auto& m : model.machines) {
    machines.push_back({{"support_vectors", matrix_to_json(m.support_vectors)},
                        {"dual_coefs", m.dual_coefs},
                        {"bias", m.bias}});
  }
  json scaler = nullptr;
  if (model.scaler) scaler = {{"min", model.scaler->min}, {"max", model.scaler->max}};
  return {{"format", kModelFormat},
          {"version", kModelFormatVersion},
          {"kernel", to_json(model.kernel_params)},
          {"c", model.c},
          {"classes", model.classes},
          {"dimension", model.dimension()},
          {"scaler", scaler},
          {"machines", machines}};
}

SvmModel model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) throw InputError("model: unrecognised format");
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw InputError("model: unsupported version " + j.at("version").dump());
    }
    SvmModel model;
    model.kernel_params = kernel_params_from_json(j.at("kernel"));
    model.c = j.at("c").get<double>();
    model.classes = j.at("classes").get<std::vector<int>>();
    const auto dim = j.at("dimension").get<std::size_t>();
    if (!j.at("scaler").is_null()) {
      Scaler s;
      s.min = j["scaler"].at("min").get<std::vector<double>>();
      s.max = j["scaler"].at("max").get<std::vector<double>>();
      if (s.min.size() != dim || s.max.size() != dim) throw InputError("model: scaler dimension mismatch");
      model.scaler = std::move(s);
    }
    for (const auto& m : j.at("machines")) {
      BinaryMachine machine;
      machine.support_vectors = matrix_from_json(m.at("support_vectors"), dim);
      machine.dual_coefs = m.at("dual_coefs").get<std::vector<double>>();
      machine.bias = m.at("bias").get<double>();
      if (machine.dual_coefs.size() != static_cast<std::size_t>(machine.support_vectors.rows())) {
        throw InputError("model: coefficient count does not match support vector count");
      }
      model.machines.push_back(std::move(machine));
    }
    const std::size_t expected = model.classes.size() == 2 ? 1 : model.classes.size();
    if (model.classes.size() < 2 || model.machines.size() != expected) {
      throw InputError("model: machine count does not match class count");
    }
    model.kernel_params.validate();
    return model;
  } catch (const json::exception& e) {
    throw InputError(std::string("model: malformed document: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const SvmModel& model) {
  write_text_file(path, model_to_json(model).dump(2) + "\n");
}

SvmModel load_model(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError("model: cannot parse " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace metakernel
