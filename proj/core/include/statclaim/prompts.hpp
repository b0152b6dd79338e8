#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace statclaim {

/// Prompt files with {{placeholder}} slots. Each prompt is hashed so claims
/// and traces can record exactly which text produced them.
class PromptLibrary {
 public:
  /// Loads every *.txt in `dir`.
  explicit PromptLibrary(const std::filesystem::path& dir);

  /// STATCLAIM_PROMPT_DIR if set, else the source tree, else the install prefix.
  static std::filesystem::path default_dir();
  static const PromptLibrary& defaults();

  bool has(const std::string& name) const;
  const std::string& text(const std::string& name) const;
  std::string hash(const std::string& name) const;

  /// Substitutes every {{key}}; throws InvalidArgument when a slot in the
  /// file has no value.
  std::string render(const std::string& name, const std::map<std::string, std::string>& values) const;

 private:
  std::map<std::string, std::string> prompts_;
};

}  // namespace statclaim
