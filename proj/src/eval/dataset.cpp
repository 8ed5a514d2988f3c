#include "lp2/eval/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace lp2::eval {

namespace fs = std::filesystem;

double TrajectoryRecord::duration() const {
  return positions.empty() ? 0.0 : time_of(positions.size() - 1);
}

std::vector<TrajectorySample> TrajectoryRecord::samples() const {
  std::vector<TrajectorySample> out;
  out.reserve(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) out.push_back({time_of(k), positions[k]});
  return out;
}

Vec2 TrajectoryRecord::position_at(double t) const {
  if (positions.empty()) throw ArgumentError("position_at: empty record");
  const double u = std::clamp(t * rate_hz, 0.0, static_cast<double>(positions.size() - 1));
  const auto k = static_cast<std::size_t>(std::floor(u));
  if (k + 1 >= positions.size()) return positions.back();
  return lerp(positions[k], positions[k + 1], u - static_cast<double>(k));
}

void validate(const TrajectoryRecord& r) {
  const auto fail = [&](const std::string& msg) {
    throw ValidationError("record '" + r.name + "': " + msg);
  };
  if (!(r.rate_hz > 0.0) || !std::isfinite(r.rate_hz)) fail("rate_hz must be > 0");
  if (r.positions.size() < 2) fail("at least two positions required");
  for (const auto& p : r.positions) {
    if (!is_finite(p)) fail("non-finite position");
  }
  const double end = r.duration();
  double prev_end = -1.0;
  for (const auto& in : r.interactions) {
    if (in.object.empty()) fail("interaction without object");
    if (!std::isfinite(in.t_start) || !std::isfinite(in.t_end) || !(in.t_end > in.t_start)) {
      fail("interaction with object " + in.object + " has t_end <= t_start");
    }
    if (in.t_start < 0.0 || in.t_end > end + 1e-9) {
      fail("interaction with object " + in.object + " lies outside the recorded span");
    }
    if (in.t_start < prev_end) fail("interactions overlap or are not time-sorted");
    prev_end = in.t_end;
  }
}

TrajectoryRecord record_from_json(const nlohmann::json& doc, std::string name) {
  try {
    TrajectoryRecord r;
    r.name = doc.contains("name") ? doc.at("name").get<std::string>() : std::move(name);
    r.scene = doc.at("scene").get<std::string>();
    r.rate_hz = doc.at("rate_hz").get<double>();
    for (const auto& p : doc.at("positions")) {
      if (!p.is_array() || p.size() < 2) throw ParseError("position must be [x, y]");
      r.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    if (doc.contains("interactions")) {
      for (const auto& in : doc.at("interactions")) {
        const auto& obj = in.at("object");
        r.interactions.push_back({obj.is_string() ? obj.get<std::string>() : obj.dump(),
                                  in.value("action", std::string{}), in.at("t_start").get<double>(),
                                  in.at("t_end").get<double>()});
      }
    }
    validate(r);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("record '" + name + "': " + e.what());
  }
}

nlohmann::json to_json(const TrajectoryRecord& r) {
  nlohmann::json doc;
  doc["name"] = r.name;
  doc["scene"] = r.scene;
  doc["rate_hz"] = r.rate_hz;
  auto& pos = doc["positions"] = nlohmann::json::array();
  for (const auto& p : r.positions) pos.push_back({p.x, p.y});
  auto& ins = doc["interactions"] = nlohmann::json::array();
  for (const auto& in : r.interactions) {
    ins.push_back({{"object", in.object}, {"action", in.action}, {"t_start", in.t_start},
                   {"t_end", in.t_end}});
  }
  return doc;
}

const dsg::SceneGraph& Dataset::scene_of(const TrajectoryRecord& record) const {
  auto it = scenes.find(record.scene);
  if (it == scenes.end()) {
    throw ValidationError("record '" + record.name + "' references unknown scene " + record.scene);
  }
  return it->second;
}

namespace {

void load_file(const fs::path& file, Dataset& out) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open " + file.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  const nlohmann::json* list = &doc;
  if (doc.is_object() && doc.contains("records")) list = &doc.at("records");
  std::vector<nlohmann::json> items;
  if (list->is_array()) {
    items.assign(list->begin(), list->end());
  } else {
    items.push_back(*list);
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto fallback = file.stem().string();
    if (items.size() > 1) fallback += "#" + std::to_string(i);
    auto record = record_from_json(items[i], fallback);
    fs::path scene = record.scene;
    if (scene.is_relative()) scene = file.parent_path() / scene;
    const auto key = scene.lexically_normal().string();
    if (!out.scenes.contains(key)) out.scenes.emplace(key, dsg::load_scene_graph(scene));
    record.scene = key;
    out.records.push_back(std::move(record));
  }
}

}  // namespace

Dataset load_dataset(const fs::path& path) {
  Dataset out;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) load_file(f, out);
  } else {
    load_file(path, out);
  }
  if (out.records.empty()) throw ValidationError("dataset " + path.string() + " has no records");
  return out;
}

double split_time(const TrajectoryRecord& record) {
  const double duration = record.duration();
  const double tail = duration - kFutureSpan;
  if (record.interactions.size() < 2) {
    if (tail < 0.0) {
      throw SplitError("record '" + record.name +
                       "': fewer than two interactions and shorter than 60 s");
    }
    return tail;
  }
  return std::max(0.0, std::min(record.interactions[1].t_end, tail));
}

Split split_past_future(const TrajectoryRecord& record) {
  validate(record);
  Split s;
  s.name = record.name;
  s.scene = record.scene;
  s.rate_hz = record.rate_hz;
  s.t_split = split_time(record);
  s.current = record.position_at(s.t_split);
  for (std::size_t k = 0; k < record.positions.size(); ++k) {
    const TrajectorySample sample{record.time_of(k), record.positions[k]};
    (sample.t <= s.t_split ? s.past : s.future).push_back(sample);
  }
  for (const auto& in : record.interactions) {
    (in.t_start < s.t_split ? s.past_interactions : s.future_interactions).push_back(in);
  }
  return s;
}

std::vector<TrajectorySample> Split::future_track() const {
  std::vector<TrajectorySample> out{{0.0, current}};
  for (const auto& f : future) out.push_back({f.t - t_split, f.position});
  return out;
}

TrajectoryRecord merge(const Split& split) {
  TrajectoryRecord r;
  r.name = split.name;
  r.scene = split.scene;
  r.rate_hz = split.rate_hz;
  for (const auto& p : split.past) r.positions.push_back(p.position);
  for (const auto& p : split.future) r.positions.push_back(p.position);
  r.interactions = split.past_interactions;
  r.interactions.insert(r.interactions.end(), split.future_interactions.begin(),
                        split.future_interactions.end());
  return r;
}

}  // namespace lp2::eval
