#pragma once

#include <vector>

#include "statclaim/extract.hpp"

/// Brute-force reference implementations of the six extractors. They share
/// only the sample constructor with the production code and deliberately use
/// the most literal algorithm for each definition (all pairs, all spans,
/// full rescans). The fixture generator uses them to write expected counts.
namespace statclaim::oracle {

std::vector<DataSample> top_k(const MeasureSlice& slice, const ExtractConfig& config = {});
std::vector<DataSample> constant_change(const MeasureSlice& slice, const ExtractConfig& config = {});
std::vector<DataSample> historical_extreme(const MeasureSlice& slice,
                                           const ExtractConfig& config = {});
std::vector<DataSample> rank_shifts(const MeasureSlice& slice, const ExtractConfig& config = {});
std::vector<DataSample> change_over_time(const MeasureSlice& slice, const ExtractConfig& config = {});
std::vector<DataSample> have_trait(const MeasureSlice& slice, const ExtractConfig& config = {});

/// All six, sorted by sample_id and deduplicated.
std::vector<DataSample> extract_all(const MeasureSlice& slice, const ExtractConfig& config = {});

}  // namespace statclaim::oracle
