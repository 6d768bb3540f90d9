#ifndef RKBAYES_IO_HPP
#define RKBAYES_IO_HPP

#include <string>

#include <nlohmann/json.hpp>

#include "rkbayes/assembly.hpp"
#include "rkbayes/model.hpp"
#include "rkbayes/types.hpp"

// JSON serialization of the wire-facing types. Field names are part of the
// file format contract.

namespace rkbayes::io {

nlohmann::json json_of(const Vector& v);
nlohmann::json json_of(const Matrix& m);
Vector vector_from_json(const nlohmann::json& j);
Matrix matrix_from_json(const nlohmann::json& j);

/// {"x": [...], "y": [...], "u": [[...]], "f": [[...]]}
nlohmann::json json_of(const model::DatasetPair& data);
model::DatasetPair dataset_from_json(const nlohmann::json& j);

/// {"A": [[...]], "b": [...], "B": [[...]], "sigma": s, "meta": {...}}
nlohmann::json json_of(const assembly::RegressionSystem& sys);
assembly::RegressionSystem system_from_json(const nlohmann::json& j);

/// {"mean": [...], "cov": [[...]]}
nlohmann::json json_of(const GaussianCoeff& g);
GaussianCoeff gaussian_from_json(const nlohmann::json& j);

nlohmann::json load_json(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& j);

}  // namespace rkbayes::io

#endif
