#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "statclaim/claims.hpp"
#include "statclaim/extract.hpp"

namespace statclaim {

nlohmann::json payload_to_json(const Payload& payload);
Payload payload_from_json(ClaimType type, const nlohmann::json& j);

nlohmann::json to_json(const DataSample& sample);
DataSample sample_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ClaimRecord& claim);
ClaimRecord claim_from_json(const nlohmann::json& j);

/// One compact JSON object per line.
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

void write_samples(const std::filesystem::path& path, const std::vector<DataSample>& samples);
std::vector<DataSample> read_samples(const std::filesystem::path& path);

/// Claims are written sorted by claim_id.
void write_claims(const std::filesystem::path& path, std::vector<ClaimRecord> claims);
std::vector<ClaimRecord> read_claims(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace statclaim
