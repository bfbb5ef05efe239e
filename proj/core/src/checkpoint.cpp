#include "mecrl/checkpoint.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mecrl/error.hpp"

namespace mecrl::nn {

namespace {

constexpr const char* kFormat = "mecrl-mlp/1";

void write_layer(std::string& out, const char* name, const Matrix& m, bool last) {
  out += "    \"";
  out += name;
  out += "\": {\"shape\": [" + std::to_string(m.rows()) + ", " + std::to_string(m.cols()) + "], \"data\": [";
  bool first = true;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!first) out += ", ";
      first = false;
      out += format_double(m(r, c));
    }
  out += last ? "]}\n" : "]},\n";
}

Matrix read_layer(const nlohmann::json& layers, const char* name) {
  if (!layers.contains(name)) throw ValidationError(std::string("checkpoint is missing layer ") + name);
  const auto& l = layers.at(name);
  const auto shape = l.at("shape").get<std::vector<long>>();
  const auto data = l.at("data").get<std::vector<double>>();
  if (shape.size() != 2 || shape[0] < 1 || shape[1] < 1)
    throw ValidationError(std::string("checkpoint layer ") + name + " has an invalid shape");
  if (data.size() != static_cast<std::size_t>(shape[0] * shape[1]))
    throw ValidationError(std::string("checkpoint layer ") + name + " data length does not match its shape");
  Matrix m(shape[0], shape[1]);
  std::size_t k = 0;
  for (long r = 0; r < shape[0]; ++r)
    for (long c = 0; c < shape[1]; ++c) m(r, c) = data[k++];
  return m;
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) throw DomainError("cannot serialize a non-finite value");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string to_checkpoint_json(const MlpParams& p) {
  std::string out = "{\n  \"format\": \"";
  out += kFormat;
  out += "\",\n  \"layers\": {\n";
  write_layer(out, "w1", p.w1, false);
  write_layer(out, "b1", Matrix(p.b1), false);
  write_layer(out, "w2", p.w2, false);
  write_layer(out, "b2", Matrix(p.b2), true);
  out += "  }\n}\n";
  return out;
}

MlpParams from_checkpoint_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  try {
    if (doc.value("format", "") != kFormat) throw ValidationError("checkpoint: unknown format tag");
    const auto& layers = doc.at("layers");
    MlpParams p;
    p.w1 = read_layer(layers, "w1");
    const Matrix b1 = read_layer(layers, "b1");
    p.w2 = read_layer(layers, "w2");
    const Matrix b2 = read_layer(layers, "b2");
    if (b1.cols() != 1 || b2.cols() != 1) throw ValidationError("checkpoint: biases must be column vectors");
    p.b1 = b1.col(0);
    p.b2 = b2.col(0);
    if (p.b1.size() != p.w1.rows() || p.w2.cols() != p.w1.rows() || p.b2.size() != p.w2.rows())
      throw ValidationError("checkpoint: layer shapes are inconsistent");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const MlpParams& p) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << to_checkpoint_json(p);
  if (!os) throw IoError("failed writing " + path.string());
}

MlpParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_checkpoint_json(ss.str());
}

}  // namespace mecrl::nn
