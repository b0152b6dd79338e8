#include "statclaim/hashing.hpp"

#include <openssl/sha.h>

#include <array>
#include <fstream>
#include <iterator>

#include "statclaim/error.hpp"

namespace statclaim {

namespace {

std::array<unsigned char, SHA256_DIGEST_LENGTH> digest(std::string_view data) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> out{};
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), out.data());
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  static constexpr char kHex[] = "0123456789abcdef";
  const auto d = digest(data);
  std::string out;
  out.reserve(d.size() * 2);
  for (unsigned char byte : d) {
    out.push_back(kHex[byte >> 4]);
    out.push_back(kHex[byte & 0x0f]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

std::string short_hash(std::string_view data, std::size_t hex_chars) {
  return sha256_hex(data).substr(0, hex_chars);
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
  std::string material = std::to_string(root);
  material.push_back('/');
  material.append(label);
  const auto d = digest(material);
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) seed = (seed << 8) | d[static_cast<std::size_t>(i)];
  return seed;
}

}  // namespace statclaim
