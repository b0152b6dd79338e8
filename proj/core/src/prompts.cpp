#include "statclaim/prompts.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "statclaim/error.hpp"
#include "statclaim/hashing.hpp"

namespace statclaim {

PromptLibrary::PromptLibrary(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::Io, "no prompt directory " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    prompts_[entry.path().stem().string()] = ss.str();
  }
}

std::filesystem::path PromptLibrary::default_dir() {
  if (const char* env = std::getenv("STATCLAIM_PROMPT_DIR"); env && *env) return env;
  const std::filesystem::path source = STATCLAIM_SOURCE_PROMPT_DIR;
  if (std::filesystem::is_directory(source)) return source;
  return STATCLAIM_INSTALL_PROMPT_DIR;
}

const PromptLibrary& PromptLibrary::defaults() {
  static const PromptLibrary lib(default_dir());
  return lib;
}

bool PromptLibrary::has(const std::string& name) const { return prompts_.count(name) > 0; }

const std::string& PromptLibrary::text(const std::string& name) const {
  auto it = prompts_.find(name);
  if (it == prompts_.end()) throw Error(ErrorCode::InvalidArgument, "unknown prompt " + name);
  return it->second;
}

std::string PromptLibrary::hash(const std::string& name) const { return short_hash(text(name)); }

std::string PromptLibrary::render(const std::string& name,
                                  const std::map<std::string, std::string>& values) const {
  const std::string& tpl = text(name);
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = tpl.find("{{", pos);
    if (open == std::string::npos) break;
    const auto close = tpl.find("}}", open);
    if (close == std::string::npos) break;
    out.append(tpl, pos, open - pos);
    const std::string key = tpl.substr(open + 2, close - open - 2);
    auto it = values.find(key);
    if (it == values.end()) throw Error(ErrorCode::InvalidArgument, "prompt " + name + " needs " + key);
    out += it->second;
    pos = close + 2;
  }
  out.append(tpl, pos, std::string::npos);
  return out;
}

}  // namespace statclaim
