#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "statclaim/chat_adapter.hpp"
#include "statclaim/table_store.hpp"

namespace statclaim {

/// Last line of `prompt` starting with `prefix`, without the prefix.
std::string prompt_field(const std::string& prompt, const std::string& prefix);

/// An offline stand-in for the verifier's model that answers every prompt
/// exactly for template claims:
///   decompose        -> the claim as its only subclaim
///   generate_sql     -> a query returning the rows the claim type needs
///                       (the year's ranking, or the country's series)
///   verdict_subclaim -> re-runs the query and evaluates the claim on it
///   synthesize       -> the rule
/// Free-text claims get NEI.
class GoldOracleAdapter : public ChatAdapter {
 public:
  explicit GoldOracleAdapter(const TableStore& store);
  std::string complete(const ChatRequest& request) override;

  /// The query generate_sql would answer for a subclaim on a table.
  std::string gold_sql(const std::string& table_id, const std::string& subclaim) const;

 private:
  const TableStore& store_;
};

/// Forwards to `inner`, except that a fixed share of subclaims always get
/// broken SQL. Which subclaims fail depends only on the seed and the
/// subclaim text, so the same claims fail whichever table is chosen.
class LossySqlAdapter : public ChatAdapter {
 public:
  LossySqlAdapter(std::shared_ptr<ChatAdapter> inner, double failure_fraction, std::uint64_t seed);
  std::string complete(const ChatRequest& request) override;
  bool fails(const std::string& subclaim) const;

 private:
  std::shared_ptr<ChatAdapter> inner_;
  double fraction_;
  std::uint64_t seed_;
};

}  // namespace statclaim
