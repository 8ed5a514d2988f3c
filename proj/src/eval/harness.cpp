#include "lp2/eval/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "lp2/ctmc/ctmc.hpp"
#include "lp2/eval/baselines.hpp"
#include "lp2/eval/oracle_predictor.hpp"
#include "lp2/hash.hpp"

namespace lp2::eval {

namespace fs = std::filesystem;

std::uint64_t record_seed(std::uint64_t seed, const std::string& record) {
  return seed ^ fnv1a64(record);
}

namespace {

std::vector<std::pair<std::size_t, WindowValues>> ade_table(
    const std::vector<DiscreteTrajectory>& trajectories, std::span<const TrajectorySample> track,
    const EvalConfig& config) {
  std::vector<std::pair<std::size_t, WindowValues>> out;
  for (auto n : config.best_of) {
    out.emplace_back(n, bon_ade(trajectories, track, n, config.windows, config.squared_ade));
  }
  return out;
}

std::size_t max_best_of(const EvalConfig& config) {
  std::size_t n = 1;
  for (auto v : config.best_of) n = std::max(n, v);
  return n;
}

}  // namespace

RecordResult evaluate_record(const TrajectoryRecord& record, const dsg::SceneGraph& graph,
                             predictor::Predictor* predictor,
                             const predictor::PredictorConfig& predictor_config,
                             const EvalConfig& config) {
  const auto split = split_past_future(record);
  const auto track = split.future_track();
  const auto seed = record_seed(config.seed, record.name);
  const auto n_max = max_best_of(config);

  RecordResult result;
  result.record = record.name;
  result.t_split = split.t_split;

  auto params = config.tree;
  std::optional<GroundTruthPredictor> oracle;
  if (config.oracle != Oracle::none) {
    oracle.emplace(graph, split.future_interactions);
    predictor = &*oracle;
    params.granularity = config.oracle == Oracle::semantic ? dsg::Granularity::semantic
                                                           : dsg::Granularity::instance;
  }
  if (predictor == nullptr) throw ArgumentError("evaluate_record: no predictor configured");

  std::vector<predictor::PastInteraction> past;
  for (const auto& in : split.past_interactions) past.push_back({in.object, in.action, in.duration()});

  const auto raw = tree::build_tree(graph, *predictor, split.current, past, params, predictor_config);
  const auto grounded = tree::ground_paths(raw, graph, config.grounding);
  result.sequences = grounded.leaves().size();
  result.accuracy = interaction_top10_accuracy(grounded, graph, split.future_interactions);

  {
    auto chain = ctmc::build_generator(grounded, {config.v_walk, false});
    result.steady_horizon = ctmc::horizon_of_meaning(chain, config.tv_threshold, config.tv_t_max, 1.0);
    const auto trajectories =
        spatial::top_n_trajectories(grounded, chain, n_max, config.dt, config.mode, config.horizon, seed);
    const auto dist = spatial::SpatioTemporalDistribution::from_tree(grounded, std::move(chain), config.sigma);
    result.methods.push_back({"lp2", nll_mixture(dist, track, config.windows, config.dt, config.horizon),
                              ade_table(trajectories, track, config)});
  }
  if (config.no_interaction_times) {
    auto chain = ctmc::build_generator(grounded, {config.v_walk, true});
    const auto trajectories =
        spatial::top_n_trajectories(grounded, chain, n_max, config.dt, config.mode, config.horizon, seed);
    const auto dist = spatial::SpatioTemporalDistribution::from_tree(grounded, std::move(chain), config.sigma);
    result.methods.push_back({"lp2-no-interaction-times",
                              nll_mixture(dist, track, config.windows, config.dt, config.horizon),
                              ade_table(trajectories, track, config)});
  }
  if (config.deterministic_walk) {
    const spatial::WalkParams walk{config.dt, config.horizon, config.v_walk, false};
    const auto all = spatial::deterministic_walk_distribution(grounded, result.sequences, walk);
    result.methods.push_back({"lp2-deterministic-walk",
                              nll_samples(all, track, config.windows, config.dt, config.horizon),
                              ade_table(all, track, config)});
  }
  if (config.constant_velocity) {
    std::vector<DiscreteTrajectory> one{baseline_constant_velocity(split.past, config.horizon, config.dt)};
    result.methods.push_back({"constant-velocity",
                              nll_samples(one, track, config.windows, config.dt, config.horizon),
                              ade_table(one, track, config)});
  }
  if (config.random_walk) {
    const auto walks = baseline_random_walk(graph, split.current, config.horizon, config.dt, n_max,
                                            seed, config.v_walk);
    result.methods.push_back({"random-walk",
                              nll_samples(walks, track, config.windows, config.dt, config.horizon),
                              ade_table(walks, track, config)});
  }
  if (config.random_goal) {
    const auto walks = baseline_random_goal(graph, split.current, config.horizon, config.dt, n_max,
                                            seed, config.v_walk);
    result.methods.push_back({"random-goal",
                              nll_samples(walks, track, config.windows, config.dt, config.horizon),
                              ade_table(walks, track, config)});
  }
  return result;
}

MetricsReport evaluate_dataset(const Dataset& dataset, predictor::Predictor* predictor,
                               const predictor::PredictorConfig& predictor_config,
                               const EvalConfig& config, int jobs) {
  const auto count = dataset.records.size();
  std::vector<std::optional<RecordResult>> results(count);
  std::vector<std::string> errors(count);
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (auto i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      const auto& record = dataset.records[i];
      try {
        results[i] = evaluate_record(record, dataset.scene_of(record), predictor, predictor_config, config);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp<int>(jobs, 1, 64));
  if (threads == 1 || count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  }

  MetricsReport report;
  report.windows = config.windows;
  report.subsets = dataset.subsets;
  for (std::size_t i = 0; i < count; ++i) {
    if (results[i]) {
      report.records.push_back(std::move(*results[i]));
    } else {
      report.failures.push_back({dataset.records[i].name, errors[i]});
    }
  }
  return report;
}

namespace {

struct Accumulator {
  double sum = 0.0;
  std::size_t count = 0;
  void add(double v) {
    sum += v;
    ++count;
  }
  std::string str() const {
    if (count == 0) return {};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", sum / static_cast<double>(count));
    return buf;
  }
};

std::ofstream open_csv(const fs::path& path, const std::string& manifest_hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# manifest " << manifest_hash << '\n';
  return out;
}

// Method names in first-seen order.
std::vector<std::string> method_order(const MetricsReport& report) {
  std::vector<std::string> out;
  for (const auto& r : report.records) {
    for (const auto& m : r.methods) {
      if (std::find(out.begin(), out.end(), m.method) == out.end()) out.push_back(m.method);
    }
  }
  return out;
}

}  // namespace

std::vector<fs::path> write_report(const MetricsReport& report, const fs::path& dir,
                                   const std::string& manifest_hash) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  const auto methods = method_order(report);
  const auto& windows = report.windows;

  {
    const auto path = dir / "nll_curve.csv";
    auto out = open_csv(path, manifest_hash);
    out << "method,t,nll,records\n";
    for (const auto& name : methods) {
      std::map<long long, std::pair<double, Accumulator>> curve;  // keyed by t in ms
      for (const auto& r : report.records) {
        for (const auto& m : r.methods) {
          if (m.method != name) continue;
          for (std::size_t k = 0; k < m.nll.times.size(); ++k) {
            auto& slot = curve[std::llround(m.nll.times[k] * 1000.0)];
            slot.first = m.nll.times[k];
            slot.second.add(m.nll.values[k]);
          }
        }
      }
      char t[32];
      for (const auto& [key, slot] : curve) {
        std::snprintf(t, sizeof t, "%.3f", slot.first);
        out << name << ',' << t << ',' << slot.second.str() << ',' << slot.second.count << '\n';
      }
    }
    written.push_back(path);
  }

  {
    const auto path = dir / "nll_windows.csv";
    auto out = open_csv(path, manifest_hash);
    out << "method";
    for (const auto& w : windows) out << ',' << w.label();
    out << ",records\n";
    for (const auto& name : methods) {
      std::vector<Accumulator> acc(windows.size());
      std::size_t n = 0;
      for (const auto& r : report.records) {
        for (const auto& m : r.methods) {
          if (m.method != name) continue;
          ++n;
          for (std::size_t w = 0; w < windows.size(); ++w) {
            if (m.nll.windows[w]) acc[w].add(*m.nll.windows[w]);
          }
        }
      }
      out << name;
      for (const auto& a : acc) out << ',' << a.str();
      out << ',' << n << '\n';
    }
    written.push_back(path);
  }

  {
    const auto path = dir / "ade.csv";
    auto out = open_csv(path, manifest_hash);
    out << "method,n";
    for (const auto& w : windows) out << ',' << w.label();
    out << '\n';
    for (const auto& name : methods) {
      std::map<std::size_t, std::vector<Accumulator>> table;
      for (const auto& r : report.records) {
        for (const auto& m : r.methods) {
          if (m.method != name) continue;
          for (const auto& [n, values] : m.ade) {
            auto& acc = table.try_emplace(n, windows.size()).first->second;
            for (std::size_t w = 0; w < windows.size(); ++w) {
              if (values[w]) acc[w].add(*values[w]);
            }
          }
        }
      }
      for (const auto& [n, acc] : table) {
        out << name << ',' << n;
        for (const auto& a : acc) out << ',' << a.str();
        out << '\n';
      }
    }
    written.push_back(path);
  }

  {
    const auto path = dir / "accuracy.csv";
    auto out = open_csv(path, manifest_hash);
    out << "interaction,granularity,hits,total,accuracy\n";
    const auto row = [&](const char* which, const char* granularity,
                         std::optional<bool> TopKAccuracy::*field) {
      std::size_t hits = 0, total = 0;
      for (const auto& r : report.records) {
        if (!r.accuracy || !((*r.accuracy).*field)) continue;
        ++total;
        if (*((*r.accuracy).*field)) ++hits;
      }
      char acc[32] = "";
      if (total > 0) {
        std::snprintf(acc, sizeof acc, "%.4f", static_cast<double>(hits) / static_cast<double>(total));
      }
      out << which << ',' << granularity << ',' << hits << ',' << total << ',' << acc << '\n';
    };
    row("first", "semantic", &TopKAccuracy::first_semantic);
    row("first", "instance", &TopKAccuracy::first_instance);
    row("second", "semantic", &TopKAccuracy::second_semantic);
    row("second", "instance", &TopKAccuracy::second_instance);
    written.push_back(path);
  }

  {
    const auto path = dir / "records.csv";
    auto out = open_csv(path, manifest_hash);
    out << "record,status,t_split,sequences,steady_horizon,detail\n";
    char buf[64];
    for (const auto& r : report.records) {
      std::snprintf(buf, sizeof buf, "%.3f", r.t_split);
      out << r.record << ",ok," << buf << ',' << r.sequences << ',';
      if (r.steady_horizon) {
        std::snprintf(buf, sizeof buf, "%.3f", *r.steady_horizon);
        out << buf;
      }
      out << ",\n";
    }
    for (const auto& f : report.failures) {
      auto detail = f.reason;
      std::replace(detail.begin(), detail.end(), ',', ';');
      std::replace(detail.begin(), detail.end(), '\n', ' ');
      out << f.record << ",failed,,,," << detail << '\n';
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace lp2::eval
