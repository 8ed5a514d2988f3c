#include "lp2/predictor/fixture_predictor.hpp"

#include <cctype>
#include <fstream>

#include "lp2/dsg/scene_text.hpp"
#include "lp2/error.hpp"
#include "lp2/hash.hpp"
#include "lp2/predictor/prompt.hpp"

namespace lp2::predictor {

namespace {

std::string normalize(const std::string& s) {
  std::string out;
  bool space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

void append(std::string& out, const std::vector<HistoryEntry>& entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) out += '|';
    out += normalize(entries[i].target) + ':' + normalize(entries[i].action);
  }
}

}  // namespace

std::string canonical_query(const std::vector<HistoryEntry>& past,
                            const std::vector<HistoryEntry>& assumed_future) {
  std::string out(dsg::kSceneTextVersion);
  out += ";past=";
  append(out, past);
  out += ";future=";
  append(out, assumed_future);
  return out;
}

std::string fixture_key(const std::vector<HistoryEntry>& past,
                        const std::vector<HistoryEntry>& assumed_future) {
  return hex64(fnv1a64(canonical_query(past, assumed_future)));
}

FixturePredictor::FixturePredictor(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("fixture document must be a JSON object");
  for (const auto& [key, reply] : doc.items()) {
    if (!reply.is_array()) throw ParseError("fixture entry '" + key + "' must be an array");
    std::string k = key;
    if (k.rfind(std::string(dsg::kSceneTextVersion) + ";", 0) == 0) k = hex64(fnv1a64(k));
    table_[k] = reply.dump();
  }
}

FixturePredictor FixturePredictor::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open fixture file '" + path.string() + "'");
  try {
    return FixturePredictor(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("fixture file '" + path.string() + "': " + e.what());
  }
}

std::vector<InteractionCandidate> FixturePredictor::predict_next(const PredictionRequest& request,
                                                                 const PredictorConfig& config) {
  const auto key = fixture_key(request.past, request.assumed_future);
  auto it = table_.find(key);
  if (it == table_.end()) it = table_.find("*");
  if (it == table_.end()) {
    throw FixtureMissError("no fixture entry for " +
                           canonical_query(request.past, request.assumed_future) + " (key " + key +
                           ")");
  }
  auto candidates = parse_response(it->second, config.granularity);
  return finalize_candidates(std::move(candidates), config.max_candidates, it->second);
}

}  // namespace lp2::predictor
