#pragma once

#include <string>

#include "json.hpp"
#include "qnm/channel.hpp"
#include "qnm/hermitian.hpp"

// JSON file formats.
//
// Matrix: {"dim": n, "split": [dA, dB] | null, "re": row-major n x n,
//          "im": row-major n x n}
// Channel: {"dim": d, "kraus": [matrix...]} or {"dim": d, "choi": matrix}
// Trajectory: {"times": [...], "channels": [...]}

namespace qnm {

nlohmann::json matrix_to_json(const Matrix& m, const std::optional<Split>& split = std::nullopt);
Matrix matrix_from_json(const nlohmann::json& j, std::optional<Split>* split_out = nullptr);

nlohmann::json to_json(const HermitianOperator& h);
HermitianOperator hermitian_from_json(const nlohmann::json& j);
DensityOperator density_from_json(const nlohmann::json& j);

nlohmann::json to_json(const QuantumChannel& c);
QuantumChannel channel_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ChannelTrajectory& t);
ChannelTrajectory trajectory_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// Locale-independent "%.12e" rendering used in every CSV.
std::string format_double(double v);

}  // namespace qnm
