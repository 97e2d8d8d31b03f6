#pragma once

#include <filesystem>
#include <string>

#include "eqf/correspondence.hpp"
#include "eqf/tensor_core.hpp"

namespace eqf {

/// Format tag of serialized tensors.
inline constexpr const char* kTensorFormat = "curv-dense-v1";
/// Format tag of serialized closed-form metrics that have no generator.
inline constexpr const char* kMetricFixtureFormat = "metric-fixture-v1";

/// Rejected input files (parse errors, wrong format, failed validation).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"format":"curv-dense-v1","n":..,"coeffs":[...]} plus an optional
/// "construction" tag. Negative zeros are written as 0.
std::string tensor_to_json(const CurvatureTensor& r, const std::string& construction = "");

/// Parses and validates; rejects symmetry residuals above 1e-9.
CurvatureTensor tensor_from_json(const std::string& text);

/// Metric given by a tensor file (g_R) or by a metric fixture.
MetricField metric_from_json(const std::string& text);

/// Square matrix from a JSON array of rows.
Mat matrix_from_json(const std::string& text);

std::string read_file(const std::filesystem::path& path);

/// Write through a temporary file in the same directory and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace eqf
