#include "lp2/predictor/chat_predictor.hpp"

#include <cstdlib>
#include <regex>
#include <semaphore>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "lp2/error.hpp"
#include "lp2/predictor/prompt.hpp"

namespace lp2::predictor {

namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ArgumentError("invalid endpoint URL '" + url + "'");
  return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& sem_;
};

}  // namespace

struct ChatCompletionPredictor::Impl {
  explicit Impl(const PredictorConfig& config)
      : endpoint(split_url(config.endpoint)),
        in_flight(std::clamp(config.max_in_flight, 1, 1024)) {
    if (const char* key = std::getenv(kApiKeyEnv)) api_key = key;
  }

  // One chat-completion round trip, with transport retries.
  std::string complete(const nlohmann::json& messages, const PredictorConfig& config) {
    const nlohmann::json body{{"model", config.model}, {"messages", messages}, {"temperature", 0}};
    const auto payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= std::max(0, config.max_retries); ++attempt) {
      SlotGuard slot(in_flight);
      httplib::Client client(endpoint.base);
      const auto timeout = std::chrono::duration<double>(config.timeout_s);
      client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      httplib::Headers headers;
      if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

      auto res = client.Post(endpoint.path, headers, payload, "application/json");
      if (!res) {
        last_error = "request failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status < 200 || res->status >= 300) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      try {
        const auto reply = nlohmann::json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        last_error = std::string("unexpected response body: ") + e.what();
      }
    }
    throw TransportError("chat endpoint " + config.endpoint + ": " + last_error);
  }

  Endpoint endpoint;
  std::string api_key;
  std::counting_semaphore<1024> in_flight;
};

ChatCompletionPredictor::ChatCompletionPredictor(const PredictorConfig& config)
    : impl_(std::make_unique<Impl>(config)) {}

ChatCompletionPredictor::~ChatCompletionPredictor() = default;

std::vector<InteractionCandidate> ChatCompletionPredictor::predict_next(
    const PredictionRequest& request, const PredictorConfig& config) {
  auto messages = nlohmann::json::array(
      {{{"role", "system"}, {"content", build_system_prompt()}},
       {{"role", "user"}, {"content", build_prompt(request, config)}}});

  const auto attempt = [&](const std::string& raw) {
    return finalize_candidates(parse_response(raw, config.granularity), config.max_candidates, raw);
  };

  const auto first = impl_->complete(messages, config);
  try {
    return attempt(first);
  } catch (const PredictionFormatError& e) {
    messages.push_back({{"role", "assistant"}, {"content", first}});
    messages.push_back({{"role", "user"}, {"content", build_repair_prompt(e)}});
  }
  return attempt(impl_->complete(messages, config));
}

}  // namespace lp2::predictor
