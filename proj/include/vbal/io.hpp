#pragma once

// File formats: instance JSON, body JSON, sample CSV and run reports.

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "vbal/convex.hpp"
#include "vbal/zonotope.hpp"

namespace vbal {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v);
Eigen::VectorXd vector_from_json(const Json& j);

/// {"schema_version", "m", "n", "vectors": [column, ...], "lambda", "norm_bound"?}
Json system_to_json(const VectorSystem& sys);
VectorSystem system_from_json(const Json& j);

/// Body descriptions: cube {dim, scale, shift?}, ball {center, radius},
/// halfspace {normal, offset}, space {dim}, intersection {children},
/// shifted {shift, children: [K]} for K + shift, scaled {factor, children: [K]},
/// symmetrized {children: [K]}. Slices and custom oracles have no file form.
Json body_to_json(const ConvexBody& body);
ConvexBody body_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

/// One sample per row, comma separated, no header, 17 significant digits.
void write_samples_csv(std::ostream& out, const Eigen::MatrixXd& samples);
Eigen::MatrixXd read_samples_csv(std::istream& in);

/// FNV-1a over the dimensions, vectors and lambda.
std::string instance_hash(const VectorSystem& sys);

/// {"coloring", "residual_l2", "residual_linf", "discrepancy"} for V chi - t.
Json coloring_outputs(const VectorSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& chi);

/// Skeleton report: {"schema_version", "command", "config", "seed", "instance_hash"?}.
Json make_report(const std::string& command, Json config, std::uint64_t seed);

}  // namespace vbal
