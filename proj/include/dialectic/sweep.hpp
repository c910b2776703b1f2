#pragma once

/**
 * Hyperparameter sweeps over the annealing decay constant (anneal-decay
 * mode) or over fixed temperatures (constant-temp mode, which pins theta to
 * zero and walks tau0 across the grid). Each grid point runs
 * repeats_per_point independent runs, each with its own derived seed and its
 * own transcript; aggregation reports mean/stddev of the novelty score per
 * grid point, and results land in CSV for external plotting.
 *
 * The Bernoulli panel and the synthetic backend live here too: they are
 * experiment instruments (measuring the loop itself under a known approval
 * law), not judging rules.
 */

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialectic/engine.hpp"
#include "dialectic/rng.hpp"
#include "dialectic/store.hpp"
#include "dialectic/types.hpp"

namespace dialectic {

enum class SweepMode { anneal_decay, constant_temp };

inline std::string to_string(SweepMode m) {
  return m == SweepMode::anneal_decay ? "anneal-decay" : "constant-temp";
}

inline SweepMode sweep_mode_from_string(const std::string& s) {
  if (s == "anneal-decay") return SweepMode::anneal_decay;
  if (s == "constant-temp") return SweepMode::constant_temp;
  throw std::invalid_argument("unknown sweep mode: " + s);
}

struct SweepSpec {
  SweepMode mode = SweepMode::anneal_decay;
  std::vector<double> grid;
  int repeats_per_point = 1;
  DialecticConfig base_config;
  std::string initial_thesis;
  std::uint64_t seed = 0;
};

inline void validate_sweep_spec(const SweepSpec& spec) {
  if (spec.grid.empty()) throw std::invalid_argument("sweep grid is empty");
  for (std::size_t i = 1; i < spec.grid.size(); ++i) {
    if (!(spec.grid[i] > spec.grid[i - 1]))
      throw std::invalid_argument("sweep grid must be strictly increasing");
  }
  if (spec.repeats_per_point < 1)
    throw std::invalid_argument("repeats_per_point must be >= 1");
  if (detail::trim_copy(spec.initial_thesis).empty())
    throw std::invalid_argument("sweep initial thesis is empty");
}

inline void to_json(nlohmann::json& j, const SweepSpec& s) {
  j = nlohmann::json{{"mode", to_string(s.mode)},
                     {"grid", s.grid},
                     {"repeats_per_point", s.repeats_per_point},
                     {"base_config", s.base_config},
                     {"initial_thesis", s.initial_thesis},
                     {"seed", s.seed}};
}

inline void from_json(const nlohmann::json& j, SweepSpec& s) {
  s.mode = sweep_mode_from_string(j.at("mode").get<std::string>());
  j.at("grid").get_to(s.grid);
  j.at("repeats_per_point").get_to(s.repeats_per_point);
  j.at("base_config").get_to(s.base_config);
  j.at("initial_thesis").get_to(s.initial_thesis);
  s.seed = j.value("seed", std::uint64_t{0});
}

struct SweepRow {
  double grid_value = 0.0;
  int run_index = 0;  // repeat number within the grid point
  double novelty_score = 0.0;
  int iterations_attempted = 0;
  std::string transcript_ref;  // run id
  bool failed = false;
};

// Everything one run needs from the outside world. The factory is invoked
// once per run with that run's derived seed, so stateful test backends get
// a fresh confined instance each time; it must be safe to call from worker
// threads.
struct SweepWorld {
  std::shared_ptr<GenerationBackend> backend;
  std::shared_ptr<VoterPanel> panel;
};
using WorldFactory = std::function<SweepWorld(std::uint64_t run_seed)>;

struct SweepOptions {
  std::optional<std::filesystem::path> runs_dir;  // set: persist transcripts
  int workers = 1;
  std::function<void(const SweepRow&)> on_row;  // progress hook, serialized
};

// Per-run config for one sweep task. constant-temp mode pins theta to zero
// and walks tau0; anneal-decay walks theta.
inline DialecticConfig sweep_run_config(const SweepSpec& spec, double grid_value,
                                        std::uint64_t run_seed) {
  DialecticConfig config = spec.base_config;
  if (spec.mode == SweepMode::anneal_decay) {
    config.theta = grid_value;
  } else {
    config.theta = 0.0;
    config.tau0 = grid_value;
  }
  config.run_seed = run_seed;
  return config;
}

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec,
                                       const WorldFactory& make_world,
                                       const SweepOptions& options = {}) {
  validate_sweep_spec(spec);
  struct Task {
    double grid_value;
    int run_index;
    std::uint64_t run_seed;
  };
  std::vector<Task> tasks;
  tasks.reserve(spec.grid.size() * static_cast<std::size_t>(spec.repeats_per_point));
  for (double grid_value : spec.grid) {
    for (int r = 0; r < spec.repeats_per_point; ++r) {
      tasks.push_back({grid_value, r, derive_run_seed(spec.seed, tasks.size())});
    }
  }

  std::vector<SweepRow> rows(tasks.size());
  std::mutex progress_mutex;

  auto execute = [&](std::size_t task_index) {
    const Task& task = tasks[task_index];
    DialecticConfig config = sweep_run_config(spec, task.grid_value, task.run_seed);
    SweepRow row;
    row.grid_value = task.grid_value;
    row.run_index = task.run_index;
    row.transcript_ref = run_id_for(config);
    try {
      SweepWorld world = make_world(task.run_seed);
      RunOutcome outcome;
      if (options.runs_dir) {
        auto sink = open_run(config, spec.initial_thesis,
                             transcript_path(*options.runs_dir, row.transcript_ref));
        outcome = run_dialectic(config, spec.initial_thesis, *world.backend,
                                *world.panel, *sink, builtin_templates(), {},
                                row.transcript_ref);
      } else {
        MemorySink sink;
        outcome = run_dialectic(config, spec.initial_thesis, *world.backend,
                                *world.panel, sink, builtin_templates(), {},
                                row.transcript_ref);
      }
      row.novelty_score = outcome.novelty_score;
      row.iterations_attempted = outcome.iterations_attempted;
      row.failed = outcome.halt_reason == HaltReason::backend_error;
    } catch (const std::exception&) {
      row.failed = true;  // a broken run must not abort the sweep
    }
    rows[task_index] = row;
    if (options.on_row) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      options.on_row(row);
    }
  };

  int workers = std::max(1, options.workers);
  if (workers == 1 || tasks.size() <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) execute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(workers), tasks.size());
    pool.reserve(n);
    for (std::size_t w = 0; w < n; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) break;
          execute(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Aggregation

struct SweepSummaryRow {
  double grid_value = 0.0;
  int n = 0;       // non-failed runs at this grid point
  double mean = 0.0;
  double stddev = 0.0;  // sample stddev; 0 when n < 2
};

// Groups rows by grid value (ascending) over non-failed runs. Grid values
// come verbatim from the spec's grid vector, so exact keying is safe.
inline std::vector<SweepSummaryRow> summarize(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("no sweep rows to summarize");
  std::map<double, std::vector<double>> by_value;
  for (const auto& row : rows) {
    if (row.failed) continue;
    by_value[row.grid_value].push_back(row.novelty_score);
  }
  std::vector<SweepSummaryRow> out;
  out.reserve(by_value.size());
  for (const auto& [grid_value, scores] : by_value) {
    SweepSummaryRow s;
    s.grid_value = grid_value;
    s.n = static_cast<int>(scores.size());
    double sum = 0.0;
    for (double v : scores) sum += v;
    s.mean = sum / static_cast<double>(scores.size());
    if (scores.size() > 1) {
      double ss = 0.0;
      for (double v : scores) ss += (v - s.mean) * (v - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(scores.size() - 1));
    }
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV / manifest emission

namespace detail {

inline std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

}  // namespace detail

inline void emit_csv(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write CSV " + path.string());
  out << "grid_value,run_index,novelty_score,iterations_attempted,transcript_ref,failed\n";
  for (const auto& row : rows) {
    out << detail::format_number(row.grid_value) << ',' << row.run_index << ','
        << detail::format_number(row.novelty_score) << ','
        << row.iterations_attempted << ',' << row.transcript_ref << ','
        << (row.failed ? "true" : "false") << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed for CSV " + path.string());
}

inline void emit_csv(const std::vector<SweepSummaryRow>& summary,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write CSV " + path.string());
  out << "grid_value,n,mean,stddev\n";
  for (const auto& row : summary) {
    out << detail::format_number(row.grid_value) << ',' << row.n << ','
        << detail::format_number(row.mean) << ','
        << detail::format_number(row.stddev) << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed for CSV " + path.string());
}

// Records what produced a sweep's results, next to the results.
inline void write_sweep_manifest(const SweepSpec& spec,
                                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path.string());
  nlohmann::json doc = spec;
  doc["created_at"] = now_iso8601_utc();
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("write failed for manifest " + path.string());
}

// ---------------------------------------------------------------------------
// Synthetic world: instruments for measuring the loop under a known law

// Approves each iteration's novelty with probability p (one draw per
// iteration — all judges agree), and always affirms validity. Lets sweep
// statistics be checked against the analytic attempt-count expectation.
class BernoulliPanel : public VoterPanel {
 public:
  BernoulliPanel(std::vector<std::string> models, double approve_probability,
                 std::uint64_t seed)
      : models_(std::move(models)),
        rng_(seed),
        coin_(approve_probability) {
    if (models_.empty()) throw std::invalid_argument("panel needs at least one model");
    if (approve_probability < 0.0 || approve_probability > 1.0)
      throw std::invalid_argument("approve_probability must be in [0, 1]");
  }

  std::vector<std::string> models() const override { return models_; }

  std::string ask(const std::string&, VoteQuestion question, const std::string&,
                  const std::string&) override {
    if (question == VoteQuestion::validity) return "yes";
    if (novelty_asks_ % models_.size() == 0) approve_ = coin_(rng_);
    ++novelty_asks_;
    return approve_ ? "yes" : "no";
  }

 private:
  std::vector<std::string> models_;
  std::mt19937_64 rng_;
  std::bernoulli_distribution coin_;
  std::size_t novelty_asks_ = 0;
  bool approve_ = false;
};

// Emits minimal well-formed responses so the loop exercises its real parsing
// path without a live model. Deterministic given the call sequence.
class SyntheticBackend : public GenerationBackend {
 public:
  GenerationResponse generate(const GenerationRequest& request) override {
    ++calls_;
    GenerationResponse resp;
    bool antithesis =
        request.request_tag.find("/antithesis") != std::string::npos;
    std::string label =
        antithesis ? "Summary of Antithesis" : "Summary of Synthesis (Next Thesis)";
    std::string role = antithesis ? "counterpoint" : "unified view";
    resp.text = label + ": synthetic " + role + " #" + std::to_string(calls_) + ".";
    resp.model_echo = request.model;
    resp.latency_ms = 0;
    resp.from_cache = false;
    return resp;
  }

 private:
  std::size_t calls_ = 0;
};

// Factory for the all-synthetic world used by statistical checks and
// offline sweeps.
inline WorldFactory synthetic_world_factory(std::vector<std::string> panel_models,
                                            double approve_probability) {
  return [panel_models = std::move(panel_models),
          approve_probability](std::uint64_t run_seed) {
    SweepWorld world;
    world.backend = std::make_shared<SyntheticBackend>();
    world.panel = std::make_shared<BernoulliPanel>(
        panel_models, approve_probability, run_seed ^ 0xb5297a4d3f8c6a21ULL);
    return world;
  };
}

}  // namespace dialectic
