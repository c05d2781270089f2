#include "vbal/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace vbal {

namespace {

[[noreturn]] void bad_format(const std::string& what) { throw PreconditionError("invalid file: " + what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad_format(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) bad_format(std::string(what) + " must be a number");
  return j.get<double>();
}

Index count(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    bad_format(std::string(what) + " must be a non-negative integer");
  return static_cast<Index>(j.get<std::int64_t>());
}

const ConvexBody& single_child(const std::vector<ConvexBody>& kids, const char* type) {
  if (kids.size() != 1) bad_format(std::string(type) + " takes exactly one child");
  return kids.front();
}

}  // namespace

Json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) bad_format("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = number(j[i], "vector entry");
  return v;
}

Json system_to_json(const VectorSystem& sys) {
  Json vectors = Json::array();
  for (Index i = 0; i < sys.count(); ++i) vectors.push_back(vector_to_json(sys.vectors().col(i)));
  Json out = {{"schema_version", kSchemaVersion},
              {"m", sys.dim()},
              {"n", sys.count()},
              {"vectors", std::move(vectors)},
              {"lambda", vector_to_json(sys.lambda())}};
  if (sys.norm_bound()) out["norm_bound"] = *sys.norm_bound();
  return out;
}

VectorSystem system_from_json(const Json& j) {
  const Index m = count(field(j, "m"), "m");
  const Index n = count(field(j, "n"), "n");
  const Json& cols = field(j, "vectors");
  if (!cols.is_array() || static_cast<Index>(cols.size()) != n) bad_format("'vectors' must hold n columns");
  Eigen::MatrixXd v(m, n);
  for (Index i = 0; i < n; ++i) {
    const Eigen::VectorXd c = vector_from_json(cols[static_cast<std::size_t>(i)]);
    if (c.size() != m) bad_format("every column must have m entries");
    v.col(i) = c;
  }
  Eigen::VectorXd lambda = j.contains("lambda") ? vector_from_json(j.at("lambda")) : Eigen::VectorXd::Zero(n);
  if (lambda.size() != n) bad_format("'lambda' must have n entries");
  std::optional<double> bound;
  if (j.contains("norm_bound") && !j.at("norm_bound").is_null()) bound = number(j.at("norm_bound"), "norm_bound");
  return VectorSystem(std::move(v), std::move(lambda), bound);
}

Json body_to_json(const ConvexBody& body) {
  using Kind = ConvexBody::Kind;
  auto kids = [&] {
    Json out = Json::array();
    for (const auto& c : body.children()) out.push_back(body_to_json(c));
    return out;
  };
  switch (body.kind()) {
    case Kind::space:
      return {{"type", "space"}, {"dim", body.dim()}};
    case Kind::halfspace:
      return {{"type", "halfspace"}, {"normal", vector_to_json(body.vector_param())}, {"offset", body.scalar_param()}};
    case Kind::ball:
      return {{"type", "ball"}, {"center", vector_to_json(body.vector_param())}, {"radius", body.scalar_param()}};
    case Kind::cube: {
      Json out = {{"type", "cube"}, {"dim", body.dim()}, {"scale", body.scalar_param()}};
      if (!body.vector_param().isZero(0.0)) out["shift"] = vector_to_json(body.vector_param());
      return out;
    }
    case Kind::intersection:
      return {{"type", "intersection"}, {"children", kids()}};
    case Kind::shifted:
      return {{"type", "shifted"}, {"shift", vector_to_json(body.vector_param())}, {"children", kids()}};
    case Kind::scaled:
      return {{"type", "scaled"}, {"factor", body.scalar_param()}, {"children", kids()}};
    case Kind::symmetrized:
      return {{"type", "symmetrized"}, {"children", kids()}};
    case Kind::slice:
    case Kind::custom:
      break;
  }
  throw PreconditionError("body_to_json: slices and custom bodies cannot be serialized");
}

ConvexBody body_from_json(const Json& j) {
  const Json& type_j = field(j, "type");
  if (!type_j.is_string()) bad_format("'type' must be a string");
  const std::string type = type_j.get<std::string>();
  std::vector<ConvexBody> kids;
  if (j.contains("children")) {
    if (!j.at("children").is_array()) bad_format("'children' must be an array");
    for (const auto& c : j.at("children")) kids.push_back(body_from_json(c));
  }
  if (type == "space") return ConvexBody::space(count(field(j, "dim"), "dim"));
  if (type == "halfspace")
    return ConvexBody::halfspace(vector_from_json(field(j, "normal")), number(field(j, "offset"), "offset"));
  if (type == "ball")
    return ConvexBody::ball(vector_from_json(field(j, "center")), number(field(j, "radius"), "radius"));
  if (type == "cube") {
    Eigen::VectorXd shift = j.contains("shift") ? vector_from_json(j.at("shift")) : Eigen::VectorXd();
    return ConvexBody::cube(count(field(j, "dim"), "dim"), number(field(j, "scale"), "scale"), std::move(shift));
  }
  if (type == "intersection") return ConvexBody::intersection(std::move(kids));
  if (type == "shifted") return shifted(single_child(kids, "shifted"), vector_from_json(field(j, "shift")));
  if (type == "scaled") return scaled(single_child(kids, "scaled"), number(field(j, "factor"), "factor"));
  if (type == "symmetrized") return symmetrize(single_child(kids, "symmetrized"));
  bad_format("unknown body type '" + type + "'");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw PreconditionError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

void write_samples_csv(std::ostream& out, const Eigen::MatrixXd& samples) {
  char buf[32];
  for (Index r = 0; r < samples.rows(); ++r) {
    for (Index c = 0; c < samples.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", samples(r, c));
      if (c > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_samples_csv(std::istream& in) {
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Index here = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || std::string_view(end).find_first_not_of(" \t") != std::string_view::npos)
        bad_format("sample row " + std::to_string(rows + 1) + " has a non-numeric entry");
      values.push_back(v);
      ++here;
    }
    if (cols < 0) cols = here;
    if (here != cols) bad_format("sample rows have different lengths");
    ++rows;
  }
  if (cols < 0) cols = 0;
  Eigen::MatrixXd out(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) out(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  return out;
}

std::string instance_hash(const VectorSystem& sys) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t dims[2] = {sys.dim(), sys.count()};
  feed(dims, sizeof dims);
  feed(sys.vectors().data(), sizeof(double) * static_cast<std::size_t>(sys.vectors().size()));
  feed(sys.lambda().data(), sizeof(double) * static_cast<std::size_t>(sys.lambda().size()));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json coloring_outputs(const VectorSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& chi) {
  const Eigen::VectorXd r = sys.residual(chi);
  const double linf = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  return {{"coloring", vector_to_json(chi)},
          {"residual_l2", r.norm()},
          {"residual_linf", linf},
          {"discrepancy", linf}};
}

Json make_report(const std::string& command, Json config, std::uint64_t seed) {
  return {{"schema_version", kSchemaVersion}, {"command", command}, {"config", std::move(config)}, {"seed", seed}};
}

}  // namespace vbal
