#pragma once

#include <memory>
#include <string>

#include "lp2/predictor/interaction.hpp"

namespace lp2::predictor {

/// Environment variable holding the bearer token for the chat endpoint.
inline constexpr const char* kApiKeyEnv = "LP2_API_KEY";

/// Predictor speaking the generic chat-completion protocol: POST
/// {"model", "messages", "temperature"} to the configured endpoint, read
/// choices[0].message.content.
///
/// Transport failures are retried `max_retries` times. A reply that fails to
/// parse gets exactly one repair round-trip (the reply is echoed back with
/// the schema) before PredictionFormatError is raised. At most
/// `max_in_flight` requests are outstanding at once.
class ChatCompletionPredictor final : public Predictor {
 public:
  explicit ChatCompletionPredictor(const PredictorConfig& config);
  ~ChatCompletionPredictor() override;

  std::vector<InteractionCandidate> predict_next(const PredictionRequest& request,
                                                 const PredictorConfig& config) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lp2::predictor
