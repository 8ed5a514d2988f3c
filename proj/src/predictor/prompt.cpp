#include "lp2/predictor/prompt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lp2::predictor {

namespace {

std::string format_seconds(double s) {
  std::ostringstream out;
  out << s;
  return out.str();
}

void render_list(std::ostringstream& out, const std::vector<HistoryEntry>& entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    out << (i + 1) << ". " << e.target << ": " << e.action << " (" << format_seconds(e.duration_s)
        << " s)\n";
  }
}

// Locates the first balanced JSON array/object in `text`, honoring strings.
std::string_view extract_json_value(std::string_view text) {
  const auto start = text.find_first_of("[{");
  if (start == std::string_view::npos) return {};
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      ++depth;
    } else if (c == ']' || c == '}') {
      if (--depth == 0) return text.substr(start, i - start + 1);
    }
  }
  return {};
}

std::string_view strip_code_fence(std::string_view text) {
  const auto open = text.find("```");
  if (open == std::string_view::npos) return text;
  auto body = open + 3;
  const auto eol = text.find('\n', body);
  if (eol == std::string_view::npos) return text;
  body = eol + 1;  // skip the language tag line
  const auto close = text.find("```", body);
  return text.substr(body, close == std::string_view::npos ? std::string_view::npos : close - body);
}

}  // namespace

std::string build_system_prompt() {
  return "You anticipate the behavior of a single person in an indoor environment. "
         "You reply with JSON only.";
}

std::string build_prompt(const PredictionRequest& request, const PredictorConfig& config) {
  const bool semantic = config.granularity == Granularity::semantic;
  std::ostringstream out;
  out << "Scene description:\n" << request.scene_text;
  if (!request.scene_text.empty() && request.scene_text.back() != '\n') out << '\n';
  out << '\n';

  if (request.past.empty()) {
    out << "There are no previous interactions observed.\n";
  } else {
    out << "Previous interactions of the person, oldest first:\n";
    render_list(out, request.past);
  }
  if (!request.assumed_future.empty()) {
    out << "Assume the person then performs these interactions, in order:\n";
    render_list(out, request.assumed_future);
  }
  out << '\n';
  out << "Predict the " << config.max_candidates
      << " interactions the person is most likely to perform next. For each, give the "
      << (semantic ? "object class" : "object label")
      << " exactly as written in the scene description, the action, the probability in (0, 1] "
         "that this is the next interaction, the expected duration in seconds, and a short "
         "reasoning.\n";
  out << "Answer with a JSON array only. Each element must have the form:\n"
      << kCandidateSchema << '\n';
  return out.str();
}

std::string build_repair_prompt(const PredictionFormatError& error) {
  std::ostringstream out;
  out << "Your previous reply could not be used: " << error.what() << ".\n"
      << "Reply again with a JSON array only. Each element must have the form:\n"
      << kCandidateSchema << '\n'
      << "probability must be a number in (0, 1] and duration_s a positive number of seconds.\n";
  return out.str();
}

std::vector<InteractionCandidate> parse_response(std::string_view raw, Granularity granularity) {
  const std::string raw_copy(raw);
  const auto fail = [&](const std::string& msg) -> PredictionFormatError {
    return PredictionFormatError(msg, raw_copy);
  };

  const auto json_text = extract_json_value(strip_code_fence(raw));
  if (json_text.empty()) throw fail("no JSON value found in model output");

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw fail(std::string("malformed JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("interactions")) doc = doc["interactions"];
  if (doc.is_object()) doc = nlohmann::json::array({doc});
  if (!doc.is_array()) throw fail("expected a JSON array of interactions");

  std::vector<InteractionCandidate> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    const std::string where = "interaction " + std::to_string(i) + ": ";
    if (!e.is_object()) throw fail(where + "not an object");
    for (const char* key : {"object", "action"}) {
      if (!e.contains(key) || !e[key].is_string()) throw fail(where + "'" + key + "' must be a string");
    }
    for (const char* key : {"probability", "duration_s"}) {
      if (!e.contains(key) || !e[key].is_number()) throw fail(where + "'" + key + "' must be a number");
    }
    if (e.contains("reasoning") && !e["reasoning"].is_string()) {
      throw fail(where + "'reasoning' must be a string");
    }
    InteractionCandidate c;
    c.granularity = granularity;
    c.target = e["object"].get<std::string>();
    c.action = e["action"].get<std::string>();
    c.probability = e["probability"].get<double>();
    c.duration_s = e["duration_s"].get<double>();
    c.reasoning = e.value("reasoning", std::string{});
    out.push_back(std::move(c));
  }
  return out;
}

std::string serialize_candidates(const std::vector<InteractionCandidate>& candidates) {
  auto doc = nlohmann::json::array();
  for (const auto& c : candidates) {
    doc.push_back({{"object", c.target},
                   {"action", c.action},
                   {"probability", c.probability},
                   {"duration_s", c.duration_s},
                   {"reasoning", c.reasoning}});
  }
  return doc.dump();
}

std::vector<InteractionCandidate> finalize_candidates(std::vector<InteractionCandidate> candidates,
                                                      int max_candidates, std::string_view raw) {
  const std::string raw_copy(raw);
  if (candidates.empty()) throw PredictionFormatError("model returned no interactions", raw_copy);
  for (const auto& c : candidates) {
    if (c.target.empty()) throw PredictionFormatError("interaction with empty object", raw_copy);
    if (!(c.probability > 0.0 && c.probability <= 1.0)) {
      throw PredictionFormatError("probability of '" + c.target + "' outside (0, 1]", raw_copy);
    }
    if (!(c.duration_s > 0.0) || !std::isfinite(c.duration_s)) {
      throw PredictionFormatError("duration of '" + c.target + "' must be positive", raw_copy);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    if (a.target != b.target) return a.target < b.target;
    return a.action < b.action;
  });
  if (max_candidates >= 1 && candidates.size() > static_cast<std::size_t>(max_candidates)) {
    candidates.resize(static_cast<std::size_t>(max_candidates));
  }
  return candidates;
}

}  // namespace lp2::predictor
