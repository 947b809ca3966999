#pragma once

#include <cstdint>
#include <filesystem>

#include "json.hpp"
#include "opweight/mps.hpp"

namespace opweight {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Writes `<base>.opms` (tensors) and `<base>.json` (ledger, centre, time,
/// frame angles and the caller's metadata).
void write_checkpoint(const std::filesystem::path& base, const OperatorMps& state, const nlohmann::json& metadata);

/// Reads both files back; tensors and ledger are bit-identical to what was
/// written. The caller metadata is returned through `metadata`.
OperatorMps read_checkpoint(const std::filesystem::path& base, nlohmann::json& metadata);

}  // namespace opweight
