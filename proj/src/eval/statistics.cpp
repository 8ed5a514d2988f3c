#include "lp2/eval/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lp2::eval {

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  out.count = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(values.size()));
  return out;
}

double path_length(std::span<const Vec2> positions) {
  double total = 0.0;
  for (std::size_t i = 1; i < positions.size(); ++i) total += distance(positions[i - 1], positions[i]);
  return total;
}

std::optional<double> path_efficiency(std::span<const Vec2> positions) {
  const double traveled = path_length(positions);
  if (!(traveled > 0.0)) return std::nullopt;
  return distance(positions.front(), positions.back()) / traveled;
}

std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::vector<std::string> class_sequence(const TrajectoryRecord& record,
                                        const dsg::SceneGraph& graph) {
  std::vector<std::string> out;
  for (const auto& in : record.interactions) out.push_back(graph.node(in.object).semantic_class);
  return out;
}

DatasetStats dataset_stats(const Dataset& dataset) {
  if (dataset.records.empty()) throw ArgumentError("dataset_stats: empty dataset");
  DatasetStats out;
  out.records = dataset.records.size();
  std::vector<double> distances, durations, counts, efficiencies;
  std::vector<std::vector<std::string>> sequences;
  for (const auto& r : dataset.records) {
    distances.push_back(path_length(r.positions));
    durations.push_back(r.duration());
    counts.push_back(static_cast<double>(r.interactions.size()));
    if (auto e = path_efficiency(r.positions)) efficiencies.push_back(*e);
    sequences.push_back(class_sequence(r, dataset.scene_of(r)));
  }
  out.distance = mean_std(distances);
  out.duration = mean_std(durations);
  out.interactions = mean_std(counts);
  out.path_efficiency = mean_std(efficiencies);

  if (sequences.size() > 1) {
    double sum = 0.0;
    for (std::size_t i = 0; i < sequences.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < sequences.size(); ++j) {
        if (i == j) continue;
        const auto longer = std::max(sequences[i].size(), sequences[j].size());
        const double d = longer == 0 ? 0.0
                                     : static_cast<double>(levenshtein(sequences[i], sequences[j])) /
                                           static_cast<double>(longer);
        best = std::min(best, d);
      }
      sum += best;
    }
    out.normalized_levenshtein = sum / static_cast<double>(sequences.size());
  }
  return out;
}

std::string_view to_string(Subset subset) {
  switch (subset) {
    case Subset::walking_at_start: return "walking_at_start";
    case Subset::future_distance_upper_quartile: return "future_distance_upper_quartile";
  }
  return "?";
}

Subset parse_subset(std::string_view name) {
  if (name == "walking_at_start" || name == "walking") return Subset::walking_at_start;
  if (name == "future_distance_upper_quartile" || name == "upper_quartile") {
    return Subset::future_distance_upper_quartile;
  }
  throw ArgumentError("unknown subset '" + std::string(name) +
                      "' (expected walking_at_start or future_distance_upper_quartile)");
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ArgumentError("percentile of an empty set");
  if (!(q >= 0.0 && q <= 100.0)) throw ArgumentError("percentile rank must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Dataset subset_filter(const Dataset& dataset, Subset which) {
  const auto label = std::string(to_string(which));
  if (std::find(dataset.subsets.begin(), dataset.subsets.end(), label) != dataset.subsets.end()) {
    return dataset;
  }
  Dataset out;
  out.scenes = dataset.scenes;
  out.subsets = dataset.subsets;
  out.subsets.push_back(label);

  std::vector<const TrajectoryRecord*> kept;
  std::vector<double> future_distance;
  for (const auto& r : dataset.records) {
    Split s;
    try {
      s = split_past_future(r);
    } catch (const ValidationError&) {
      continue;
    }
    if (which == Subset::walking_at_start) {
      const bool inside = std::any_of(r.interactions.begin(), r.interactions.end(), [&](const auto& in) {
        return s.t_split >= in.t_start && s.t_split < in.t_end;
      });
      if (!inside) out.records.push_back(r);
      continue;
    }
    std::vector<Vec2> track;
    for (const auto& p : s.future_track()) track.push_back(p.position);
    kept.push_back(&r);
    future_distance.push_back(path_length(track));
  }
  if (which == Subset::future_distance_upper_quartile && !kept.empty()) {
    const double q75 = percentile(future_distance, 75.0);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (future_distance[i] > q75) out.records.push_back(*kept[i]);
    }
  }
  return out;
}

}  // namespace lp2::eval
