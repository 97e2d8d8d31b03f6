#include "eqf/io.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "eqf/analysis.hpp"
#include "eqf/errors.hpp"

namespace eqf {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

Vec vector_field(const json& j, const char* key, int size) {
  if (!j.contains(key)) return Vec();
  const auto values = j.at(key).get<std::vector<double>>();
  if (static_cast<int>(values.size()) != size) {
    throw FormatError(std::string("field '") + key + "' has the wrong length");
  }
  return Eigen::Map<const Vec>(values.data(), size);
}

}  // namespace

std::string tensor_to_json(const CurvatureTensor& r, const std::string& construction) {
  nlohmann::ordered_json j;
  j["format"] = kTensorFormat;
  j["n"] = r.n();
  if (!construction.empty()) j["construction"] = construction;
  std::vector<double> coeffs(r.coeffs().begin(), r.coeffs().end());
  for (double& c : coeffs) {
    if (c == 0.0) c = 0.0;  // drop the sign of negative zeros
  }
  j["coeffs"] = coeffs;
  return j.dump() + "\n";
}

CurvatureTensor tensor_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    if (j.at("format").get<std::string>() != kTensorFormat) {
      throw FormatError("unsupported tensor format");
    }
    const int n = j.at("n").get<int>();
    auto coeffs = j.at("coeffs").get<std::vector<double>>();
    return CurvatureTensor::from_coeffs(n, std::move(coeffs), 1e-9);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed tensor file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  } catch (const std::domain_error& e) {
    throw FormatError(e.what());
  }
}

MetricField metric_from_json(const std::string& text) {
  const json j = parse(text);
  const std::string format = j.value("format", "");
  if (format == kTensorFormat) return metric_from_curv(tensor_from_json(text));
  if (format != kMetricFixtureFormat) throw FormatError("unsupported metric format");
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "round") return round_metric(j.at("n").get<int>());
    if (kind == "left-invariant") {
      return left_invariant_metric(j.at("a").get<double>(), j.at("b").get<double>(),
                                   j.at("c").get<double>());
    }
    if (kind == "bump") {
      const int n = j.at("n").get<int>();
      BumpParams params;
      params.amplitude = j.value("amplitude", params.amplitude);
      params.width = j.value("width", params.width);
      params.center = vector_field(j, "center", n + 1);
      params.direction = vector_field(j, "direction", n + 1);
      return bump_metric(n, params);
    }
    throw FormatError("unknown metric fixture kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed metric fixture: ") + e.what());
  } catch (const DimensionError& e) {
    throw FormatError(e.what());
  }
}

Mat matrix_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    const auto m = static_cast<Eigen::Index>(rows.size());
    Mat out(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != m) {
        throw FormatError("matrix must be square");
      }
      for (Eigen::Index k = 0; k < m; ++k) out(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    return out;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed matrix file: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::random_device rd;
  const auto tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

}  // namespace eqf
