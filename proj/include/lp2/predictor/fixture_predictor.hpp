#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "lp2/predictor/interaction.hpp"

namespace lp2::predictor {

/// Readable canonical form of a query, e.g.
///   "v1;past=sink:wash hands|kettle:boil water;future="
/// Targets and actions are trimmed, lower-cased and whitespace-collapsed;
/// durations do not participate.
std::string canonical_query(const std::vector<HistoryEntry>& past,
                            const std::vector<HistoryEntry>& assumed_future);

/// Fixture key: hex FNV-1a of canonical_query.
std::string fixture_key(const std::vector<HistoryEntry>& past,
                        const std::vector<HistoryEntry>& assumed_future);

/// Deterministic predictor backed by a recorded table of replies.
///
/// The fixture document is a JSON object mapping keys to candidate lists in
/// the response schema. A key may be the hex fixture_key, the readable
/// canonical_query string (starting with "v1;"), or "*" as a catch-all.
class FixturePredictor final : public Predictor {
 public:
  explicit FixturePredictor(const nlohmann::json& doc);
  static FixturePredictor load(const std::filesystem::path& path);

  std::vector<InteractionCandidate> predict_next(const PredictionRequest& request,
                                                 const PredictorConfig& config) override;

  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, std::string> table_;  // key -> serialized reply
};

}  // namespace lp2::predictor
