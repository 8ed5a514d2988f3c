#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lp2/dsg/scene_graph.hpp"
#include "lp2/error.hpp"
#include "lp2/spatial/spatial.hpp"

namespace lp2::eval {

using spatial::TrajectorySample;

struct TimedInteraction {
  dsg::NodeId object;
  std::string action;
  double t_start = 0.0;  // s
  double t_end = 0.0;    // s

  double duration() const { return t_end - t_start; }
  friend bool operator==(const TimedInteraction&, const TimedInteraction&) = default;
};

/// A recorded walk. Position k is sampled at t = k / rate_hz.
struct TrajectoryRecord {
  std::string name;
  std::string scene;  // scene file reference
  double rate_hz = 10.0;
  std::vector<Vec2> positions;
  std::vector<TimedInteraction> interactions;

  double time_of(std::size_t k) const { return static_cast<double>(k) / rate_hz; }
  double duration() const;
  std::vector<TrajectorySample> samples() const;
  /// Linear interpolation, clamped to the recorded span.
  Vec2 position_at(double t) const;

  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

/// Throws ValidationError on non-positive rate, fewer than two positions,
/// non-finite values, or interactions that are empty, unsorted, overlapping
/// or outside the recorded span.
void validate(const TrajectoryRecord& record);

TrajectoryRecord record_from_json(const nlohmann::json& doc, std::string name = {});
nlohmann::json to_json(const TrajectoryRecord& record);

/// Records plus the scene graphs they reference, keyed by scene reference.
struct Dataset {
  std::vector<TrajectoryRecord> records;
  std::map<std::string, dsg::SceneGraph> scenes;
  std::vector<std::string> subsets;  // filters already applied

  const dsg::SceneGraph& scene_of(const TrajectoryRecord& record) const;
};

/// Loads a record file (single record, array, or {"records": [...]}) or a
/// directory of record files. Scene references resolve relative to the
/// file that names them.
Dataset load_dataset(const std::filesystem::path& path);

class SplitError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct Split {
  std::string name;
  std::string scene;
  double rate_hz = 10.0;
  double t_split = 0.0;
  Vec2 current;                                    // position at t_split
  std::vector<TrajectorySample> past;              // t <= t_split
  std::vector<TrajectorySample> future;            // t > t_split
  std::vector<TimedInteraction> past_interactions;  // started before t_split
  std::vector<TimedInteraction> future_interactions;

  /// Future relative to the split: (0, current) followed by the future
  /// samples shifted by -t_split.
  std::vector<TrajectorySample> future_track() const;
};

inline constexpr double kFutureSpan = 60.0;  // s

/// min(end of the second interaction, duration - 60 s), clamped to the
/// first timestamp. Throws SplitError with fewer than two interactions on a
/// record shorter than 60 s.
double split_time(const TrajectoryRecord& record);

Split split_past_future(const TrajectoryRecord& record);

/// Inverse of split_past_future.
TrajectoryRecord merge(const Split& split);

}  // namespace lp2::eval
