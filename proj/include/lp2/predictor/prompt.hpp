#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lp2/predictor/interaction.hpp"

namespace lp2::predictor {

inline constexpr std::string_view kPromptVersion = "prompt-v1";

/// Candidate schema as echoed to the model (and in repair prompts).
inline constexpr std::string_view kCandidateSchema =
    R"({"object": string, "action": string, "probability": number, "duration_s": number, "reasoning": string})";

std::string build_system_prompt();
std::string build_prompt(const PredictionRequest& request, const PredictorConfig& config);
std::string build_repair_prompt(const PredictionFormatError& error);

/// Parses a model reply: a JSON array of candidates, or an object holding
/// one under "interactions". Markdown code fences and text around the JSON
/// value are ignored. Throws PredictionFormatError on anything else.
std::vector<InteractionCandidate> parse_response(std::string_view raw, Granularity granularity);

/// Inverse of parse_response for valid candidate lists.
std::string serialize_candidates(const std::vector<InteractionCandidate>& candidates);

/// Checks candidate invariants, then keeps the `max_candidates` most likely
/// (ties by target, then action). Throws PredictionFormatError.
std::vector<InteractionCandidate> finalize_candidates(std::vector<InteractionCandidate> candidates,
                                                      int max_candidates, std::string_view raw);

}  // namespace lp2::predictor
