#include "anncalc/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace anncalc {

namespace {

using Json = nlohmann::ordered_json;

Json encode_double(double v) {
  if (std::isnan(v)) {
    return Json("NaN");
  }
  if (std::isinf(v)) {
    return Json(v > 0 ? "Infinity" : "-Infinity");
  }
  return Json(v);
}

double decode_double(const Json& j, std::vector<std::string>& warnings,
                     const std::string& where) {
  if (j.is_number()) {
    return j.get<double>();
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    double v;
    if (s == "NaN") {
      v = std::numeric_limits<double>::quiet_NaN();
    } else if (s == "Infinity") {
      v = std::numeric_limits<double>::infinity();
    } else if (s == "-Infinity") {
      v = -std::numeric_limits<double>::infinity();
    } else {
      throw SchemaViolationError("unrecognized numeric string \"" + s +
                                 "\" in " + where);
    }
    warnings.push_back("non-finite value (" + s + ") in " + where +
                       "; the network loads but cannot be certified");
    return v;
  }
  throw SchemaViolationError("expected a number in " + where);
}

}  // namespace

std::string save(const Ann& ann,
                 const std::optional<std::string>& activation_hint) {
  Json doc;
  doc["format"] = "ann-v1";
  doc["activation_hint"] =
      activation_hint ? Json(*activation_hint) : Json(nullptr);
  Json layers = Json::array();
  for (const Layer& l : ann.layers()) {
    Json jl;
    jl["rows"] = static_cast<int>(l.W.rows());
    jl["cols"] = static_cast<int>(l.W.cols());
    Json weights = Json::array();
    for (Eigen::Index r = 0; r < l.W.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.W.cols(); ++c) {
        weights.push_back(encode_double(l.W(r, c)));
      }
    }
    jl["weights"] = std::move(weights);
    Json bias = Json::array();
    for (Eigen::Index r = 0; r < l.b.size(); ++r) {
      bias.push_back(encode_double(l.b[r]));
    }
    jl["bias"] = std::move(bias);
    layers.push_back(std::move(jl));
  }
  doc["layers"] = std::move(layers);
  return doc.dump();
}

LoadedAnn load(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw SchemaViolationError("top level must be an object");
  }
  if (!doc.contains("format") || !doc["format"].is_string() ||
      doc["format"].get<std::string>() != "ann-v1") {
    throw SchemaViolationError("missing or unsupported \"format\" tag");
  }
  if (!doc.contains("activation_hint")) {
    throw SchemaViolationError("missing \"activation_hint\"");
  }
  std::optional<std::string> hint;
  if (doc["activation_hint"].is_string()) {
    hint = doc["activation_hint"].get<std::string>();
  } else if (!doc["activation_hint"].is_null()) {
    throw SchemaViolationError("\"activation_hint\" must be a string or null");
  }
  if (!doc.contains("layers") || !doc["layers"].is_array() ||
      doc["layers"].empty()) {
    throw SchemaViolationError("\"layers\" must be a nonempty array");
  }

  std::vector<std::string> warnings;
  std::vector<Layer> layers;
  std::size_t index = 0;
  for (const Json& jl : doc["layers"]) {
    const std::string where = "layer " + std::to_string(index);
    if (!jl.is_object() || !jl.contains("rows") || !jl.contains("cols") ||
        !jl.contains("weights") || !jl.contains("bias")) {
      throw SchemaViolationError(where +
                                 " must carry rows, cols, weights, bias");
    }
    if (!jl["rows"].is_number_integer() || !jl["cols"].is_number_integer()) {
      throw SchemaViolationError(where + ": rows/cols must be integers");
    }
    const long long rows = jl["rows"].get<long long>();
    const long long cols = jl["cols"].get<long long>();
    if (rows < 1 || cols < 1) {
      throw SchemaViolationError(where + ": rows and cols must be >= 1");
    }
    if (!jl["weights"].is_array() ||
        static_cast<long long>(jl["weights"].size()) != rows * cols) {
      throw SchemaViolationError(where + ": weights length must be rows*cols");
    }
    if (!jl["bias"].is_array() ||
        static_cast<long long>(jl["bias"].size()) != rows) {
      throw SchemaViolationError(where + ": bias length must be rows");
    }
    Matrix W(rows, cols);
    std::size_t flat = 0;
    for (long long r = 0; r < rows; ++r) {
      for (long long c = 0; c < cols; ++c) {
        W(r, c) = decode_double(jl["weights"][flat++], warnings,
                                where + " weights");
      }
    }
    Vector b(rows);
    for (long long r = 0; r < rows; ++r) {
      b[r] = decode_double(jl["bias"][r], warnings, where + " bias");
    }
    layers.push_back(Layer{std::move(W), std::move(b)});
    ++index;
  }

  try {
    return LoadedAnn{Ann(std::move(layers)), std::move(hint),
                     std::move(warnings)};
  } catch (const Error& e) {
    throw SchemaViolationError(std::string("inconsistent layer shapes: ") +
                               e.what());
  }
}

void save_file(const std::string& path, const Ann& ann,
               const std::optional<std::string>& activation_hint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path + " for writing");
  }
  out << save(ann, activation_hint);
  out << '\n';
  if (!out) {
    throw Error("failed while writing " + path);
  }
}

LoadedAnn load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path + " for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load(buffer.str());
}

}  // namespace anncalc
