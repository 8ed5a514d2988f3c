#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lp2/dsg/scene_graph.hpp"
#include "lp2/dsg/scene_text.hpp"

namespace lp2::predictor {

using dsg::Granularity;

/// An interaction the person has already completed.
struct PastInteraction {
  dsg::NodeId object;
  std::string action;
  double duration_s = 0.0;
};

/// A predicted next interaction. `target` is a semantic class or an object
/// reference (label or id) depending on `granularity`; `object` is filled in
/// once the candidate has been grounded to a scene node.
struct InteractionCandidate {
  Granularity granularity = Granularity::semantic;
  std::string target;
  std::optional<dsg::NodeId> object;
  std::string action;
  double probability = 0.0;  // (0, 1]
  double duration_s = 0.0;   // > 0
  std::string reasoning;

  friend bool operator==(const InteractionCandidate&, const InteractionCandidate&) = default;
};

/// Interaction as shown to the predictor: objects are already rendered as
/// the class or label the model sees in the scene text.
struct HistoryEntry {
  std::string target;
  std::string action;
  double duration_s = 0.0;
};

struct PredictionRequest {
  std::string scene_text;
  std::vector<HistoryEntry> past;            // observed, oldest first
  std::vector<HistoryEntry> assumed_future;  // hypothesized continuation
};

struct PredictorConfig {
  Granularity granularity = Granularity::semantic;
  int max_candidates = 6;  // W_I
  // chat-completion client only
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4-turbo";
  double timeout_s = 60.0;
  int max_retries = 2;
  int max_in_flight = 4;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model output that cannot be turned into valid candidates. Carries the raw
/// payload so a repair prompt can echo it back.
class PredictionFormatError : public std::runtime_error {
 public:
  PredictionFormatError(const std::string& what, std::string raw)
      : std::runtime_error(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

class FixtureMissError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Source of next-interaction predictions. Implementations must be safe to
/// call concurrently. Returning an empty list means "no further
/// interactions" and ends the branch; fixture and chat predictors never do
/// that and report failures through the exceptions above instead.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<InteractionCandidate> predict_next(const PredictionRequest& request,
                                                         const PredictorConfig& config) = 0;
};

/// Renders past interactions for a prompt: semantic class or instance label.
std::vector<HistoryEntry> to_history(const dsg::SceneGraph& graph,
                                     const std::vector<PastInteraction>& past,
                                     Granularity granularity);

}  // namespace lp2::predictor
