#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace statclaim {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's bytes; throws Error(Io) if unreadable.
std::string sha256_file(const std::filesystem::path& path);

/// First `hex_chars` characters of sha256_hex, used for stable ids.
std::string short_hash(std::string_view data, std::size_t hex_chars = 16);

/// Named sub-seed: every stage derives its randomness from the root seed and
/// a label, never from OS entropy.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

}  // namespace statclaim
