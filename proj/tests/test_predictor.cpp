#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "lp2/dsg/scene_text.hpp"
#include "lp2/error.hpp"
#include "lp2/predictor/fixture_predictor.hpp"
#include "lp2/predictor/grounding.hpp"
#include "lp2/predictor/interaction.hpp"
#include "lp2/predictor/prompt.hpp"
#include "support/builders.hpp"

using namespace lp2;
using namespace lp2::predictor;
using lp2::testing::candidate;
using nlohmann::json;

namespace {

const json kTwoCandidates = json::parse(R"([
  {"object": "kettle", "action": "boil water", "probability": 0.7, "duration_s": 90, "reasoning": "tea"},
  {"object": "towel", "action": "dry hands", "probability": 0.2, "duration_s": 5, "reasoning": "wet"}
])");

PredictionRequest request(std::vector<HistoryEntry> past, std::vector<HistoryEntry> future = {}) {
  return {"In the environment, there are the rooms: kitchen.\n", std::move(past), std::move(future)};
}

}  // namespace

TEST_CASE("fixture: passthrough of a recorded reply") {
  const std::vector<HistoryEntry> past{{"sink", "wash hands", 12.0}};
  FixturePredictor fixture(json{{fixture_key(past, {}), kTwoCandidates}});
  const auto out = fixture.predict_next(request(past), {});
  REQUIRE(out.size() == 2);
  CHECK(out[0].target == "kettle");
  CHECK(out[0].action == "boil water");
  CHECK(out[0].probability == 0.7);
  CHECK(out[0].duration_s == 90.0);
  CHECK(out[0].reasoning == "tea");
  CHECK(out[1].target == "towel");
  CHECK(serialize_candidates(out) == serialize_candidates(fixture.predict_next(request(past), {})));
}

TEST_CASE("fixture: readable keys, normalization and misses") {
  const std::vector<HistoryEntry> past{{"sink", "wash hands", 12.0}};
  CHECK(canonical_query(past, {}) == "v1;past=sink:wash hands;future=");
  FixturePredictor fixture(json{{"v1;past=sink:wash hands;future=", kTwoCandidates}});
  // formatting and durations do not change the key
  const std::vector<HistoryEntry> messy{{"  Sink ", "Wash   HANDS", 3.0}};
  CHECK(fixture.predict_next(request(messy), {}).size() == 2);
  CHECK_THROWS_AS(fixture.predict_next(request({}), {}), FixtureMissError);

  FixturePredictor wildcard(json{{"*", kTwoCandidates}});
  CHECK(wildcard.predict_next(request({}), {}).size() == 2);
  CHECK_THROWS_AS(FixturePredictor(json::array()), ParseError);
}

TEST_CASE("fixture: referentially transparent") {
  FixturePredictor fixture = FixturePredictor::load(LP2_TEST_DATA "/fixture.json");
  std::mt19937_64 rng(1);
  const std::vector<std::string> targets{"sink", "cup", "stove", "sofa"};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<HistoryEntry> past;
    const auto n = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int i = 0; i < n; ++i) past.push_back({targets[rng() % targets.size()], "use", 1.0});
    const auto a = fixture.predict_next(request(past), {});
    const auto b = fixture.predict_next(request(past), {});
    CHECK(a == b);
  }
}

TEST_CASE("parse: probability zero is a format error") {
  const auto raw = R"([{"object": "cup", "action": "drink", "probability": 0, "duration_s": 5}])";
  const auto parsed = parse_response(raw, Granularity::semantic);
  try {
    finalize_candidates(parsed, 6, raw);
    FAIL("expected PredictionFormatError");
  } catch (const PredictionFormatError& e) {
    CHECK(e.raw() == raw);
  }
  FixturePredictor fixture(json{{"*", json::parse(raw)}});
  CHECK_THROWS_AS(fixture.predict_next(request({}), {}), PredictionFormatError);
  CHECK_THROWS_AS(finalize_candidates({candidate("cup", "drink", 1.5, 5)}, 6, ""), PredictionFormatError);
  CHECK_THROWS_AS(finalize_candidates({candidate("cup", "drink", 0.5, 0)}, 6, ""), PredictionFormatError);
  CHECK_THROWS_AS(finalize_candidates({}, 6, ""), PredictionFormatError);
}

TEST_CASE("parse: truncation keeps the most likely candidates") {
  json reply = json::array();
  for (int i = 0; i < 9; ++i) {
    reply.push_back({{"object", "obj" + std::to_string(i)}, {"action", "use"},
                     {"probability", 0.05 + 0.1 * ((i * 4) % 9)}, {"duration_s", 3}, {"reasoning", ""}});
  }
  FixturePredictor fixture(json{{"*", reply}});
  PredictorConfig config;
  config.max_candidates = 6;
  const auto out = fixture.predict_next(request({}), config);
  REQUIRE(out.size() == 6);
  for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i - 1].probability >= out[i].probability);
  CHECK(out.back().probability == doctest::Approx(0.35));
}

TEST_CASE("prompt: empty past uses the no-history phrase") {
  const auto text = build_prompt(request({}), {});
  CHECK(text.find("no previous interactions observed") != std::string::npos);
  const auto with = build_prompt(request({{"sink", "wash hands", 12.0}}, {{"cup", "drink", 4.0}}), {});
  CHECK(with.find("no previous interactions observed") == std::string::npos);
  CHECK(with.find("1. sink: wash hands (12 s)") != std::string::npos);
  CHECK(with.find("1. cup: drink (4 s)") != std::string::npos);
  CHECK(build_prompt(request({}), {}) == text);
  CHECK(kPromptVersion == "prompt-v1");
}

TEST_CASE("parse: code fences, wrappers and trailing commentary") {
  const std::string body =
      R"([{"object": "cup", "action": "drink", "probability": 0.5, "duration_s": 4, "reasoning": "r"}])";
  CHECK(parse_response("```json\n" + body + "\n```\nHope this helps.", Granularity::semantic).size() == 1);
  CHECK(parse_response("Sure: " + body + " done", Granularity::semantic).size() == 1);
  CHECK(parse_response(R"({"interactions": )" + body + "}", Granularity::semantic).size() == 1);
  const auto inst = parse_response(body, Granularity::instance);
  CHECK(inst[0].granularity == Granularity::instance);
}

TEST_CASE("parse: schema violations") {
  const auto bad =
      R"([{"object": "cup", "action": "drink", "probability": 0.5, "duration_s": "about 30"}])";
  try {
    parse_response(bad, Granularity::semantic);
    FAIL("expected PredictionFormatError");
  } catch (const PredictionFormatError& e) {
    CHECK(e.raw() == bad);
    CHECK(build_repair_prompt(e).find(std::string(kCandidateSchema)) != std::string::npos);
  }
  CHECK_THROWS_AS(parse_response("no json here", Granularity::semantic), PredictionFormatError);
  CHECK_THROWS_AS(parse_response("[1, 2", Granularity::semantic), PredictionFormatError);
  CHECK_THROWS_AS(parse_response(R"([{"object": 3}])", Granularity::semantic), PredictionFormatError);
}

TEST_CASE("parse: serialize round trip is the identity") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> p(1e-6, 1.0), tau(0.1, 600.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<InteractionCandidate> list;
    const auto n = 1 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i) {
      auto c = candidate("object \"" + std::to_string(rng() % 100) + "\"", "act\n" + std::to_string(i),
                         p(rng), tau(rng));
      c.reasoning = "because {" + std::to_string(i) + "}";
      list.push_back(c);
    }
    CHECK(parse_response(serialize_candidates(list), Granularity::semantic) == list);
  }
}

TEST_CASE("grounding: inverse-distance split") {
  const auto g = lp2::testing::line_scene({0.0, 1.0, 2.0},
                                          {{"s1", "sink", "sink_1", {0.0, 0.1}},
                                           {"c1", "cup", "cup_1", {1.0, 0.1}},
                                           {"c2", "cup", "cup_2", {2.0, 0.1}}});
  const auto single = ground_semantic({candidate("sink", "wash", 0.6, 10)}, g, "p2", 3);
  REQUIRE(single.candidates.size() == 1);
  CHECK(single.candidates[0].probability == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(single.candidates[0].object == "s1");
  CHECK(single.candidates[0].granularity == Granularity::instance);

  const auto pair = ground_semantic({candidate("cup", "drink", 0.6, 10)}, g, "p0", 3);
  REQUIRE(pair.candidates.size() == 2);
  CHECK(pair.candidates[0].object == "c1");
  CHECK(pair.candidates[0].probability == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(pair.candidates[1].probability == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(pair.candidates[1].duration_s == 10.0);
  CHECK(pair.candidates[1].action == "drink");

  // at the object: distance clamped to 0.5 m against 1 m
  const auto clamp = ground_semantic({candidate("cup", "drink", 0.6, 10)}, g, "p1", 3);
  REQUIRE(clamp.candidates.size() == 2);
  CHECK(std::isfinite(clamp.candidates[0].probability));
  CHECK(clamp.candidates[0].probability == doctest::Approx(0.6 * 2.0 / 3.0).epsilon(1e-12));

  const auto missing = ground_semantic({candidate("piano", "play", 0.5, 10)}, g, "p0", 3);
  CHECK(missing.candidates.empty());
  CHECK(missing.warnings.size() == 1);
}

TEST_CASE("grounding: instance references resolve by id or label") {
  const auto g = lp2::testing::line_scene({0.0, 1.0}, {{"c1", "cup", "cup_1", {1.0, 0.1}}});
  const auto out = ground_instances({candidate("cup_1", "drink", 0.5, 3, Granularity::instance),
                                     candidate("c1", "wash", 0.3, 3, Granularity::instance),
                                     candidate("ghost", "x", 0.2, 3, Granularity::instance)},
                                    g);
  REQUIRE(out.candidates.size() == 2);
  CHECK(out.candidates[0].object == "c1");
  CHECK(out.candidates[1].object == "c1");
  CHECK(out.warnings.size() == 1);
}

TEST_CASE("grounding: mass preservation and size bound") {
  std::mt19937_64 rng(21);
  const std::vector<std::string> classes{"chair", "cup", "lamp", "plant"};
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = lp2::testing::random_lattice_scene(rng, 30, 25, classes);
    std::vector<InteractionCandidate> cands;
    for (const auto& cls : classes) cands.push_back(candidate(cls, "use", 0.1 + 0.2 * (rng() % 4), 5));
    const std::size_t n_s = 1 + rng() % 4;
    const auto& from = g.places()[rng() % g.places().size()];
    const auto out = ground_semantic(cands, g, from, n_s);
    CHECK(out.candidates.size() <= cands.size() * n_s);
    for (const auto& c : cands) {
      double mass = 0.0;
      bool any = false;
      for (const auto& o : out.candidates) {
        if (g.node(*o.object).semantic_class == c.target) {
          mass += o.probability;
          any = true;
        }
      }
      if (any) CHECK(mass == doctest::Approx(c.probability).epsilon(1e-12));
    }
  }
}

TEST_CASE("history rendering follows granularity") {
  const auto g = lp2::testing::line_scene({0.0}, {{"c1", "cup", "cup_1", {0.0, 0.1}}});
  const std::vector<PastInteraction> past{{"c1", "drink", 4.0}};
  CHECK(to_history(g, past, Granularity::semantic)[0].target == "cup");
  CHECK(to_history(g, past, Granularity::instance)[0].target == "cup_1");
}
