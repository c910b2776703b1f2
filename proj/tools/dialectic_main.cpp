// Operator entry point: run one dialectic, sweep hyperparameters, verify
// transcripts by replay, render reports, and dump the prompt templates.
//
// Exit codes: 0 ok, 2 config/usage error, 3 auth error, 4 io/backend error,
// 5 replay divergence. Progress and diagnostics go to stderr; data (JSON,
// CSV, reports, prompt dumps) goes to stdout.

#include <cmath>
#include <cstdio>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dialectic/dialectic.hpp"
#include "dialectic/http_backend.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAuth = 3;
constexpr int kExitIo = 4;
constexpr int kExitDivergence = 5;

// Operator-level configuration: endpoint, directories, and the default run
// hyperparameters. Loadable from JSON; flags override file, file overrides
// builtins.
struct CliConfig {
  std::string endpoint = "https://api.openai.com";
  std::string completions_path = "/v1/chat/completions";
  std::string credential_env = "OPENAI_API_KEY";
  std::string runs_dir = "runs";
  std::string cache_dir = ".dialectic-cache";
  int concurrency = 4;
  dialectic::DialecticConfig defaults;
};

CliConfig load_cli_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dialectic::IoError("cannot open config file " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded())
    throw std::invalid_argument("config file " + path + " is not valid JSON");
  CliConfig cfg;
  cfg.endpoint = doc.value("endpoint", cfg.endpoint);
  cfg.completions_path = doc.value("completions_path", cfg.completions_path);
  cfg.credential_env = doc.value("credential_env", cfg.credential_env);
  cfg.runs_dir = doc.value("runs_dir", cfg.runs_dir);
  cfg.cache_dir = doc.value("cache_dir", cfg.cache_dir);
  cfg.concurrency = doc.value("concurrency", cfg.concurrency);
  if (doc.contains("defaults")) {
    const nlohmann::json& d = doc["defaults"];
    auto& def = cfg.defaults;
    def.tau0 = d.value("tau0", def.tau0);
    def.tau_antithesis = d.value("tau_antithesis", def.tau_antithesis);
    def.theta = d.value("theta", def.theta);
    def.max_iterations = d.value("max_iterations", def.max_iterations);
    def.core_model = d.value("core_model", def.core_model);
    if (d.contains("panel_models"))
      def.panel_models = d["panel_models"].get<std::vector<std::string>>();
    def.run_seed = d.value("run_seed", def.run_seed);
  }
  return cfg;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> split_csv_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_csv(text)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number in grid: '" + item + "'");
    }
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dialectic::IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Display convention for temperatures: truncate (not round) to 4 decimals,
// matching how per-iteration temperature columns are conventionally printed.
double display_temp(double tau) { return std::floor(tau * 10000.0) / 10000.0; }

std::string truncate_to(const std::string& text, std::size_t width) {
  std::string one_line;
  one_line.reserve(text.size());
  for (char c : text) one_line.push_back(c == '\n' ? ' ' : c);
  if (one_line.size() <= width) return one_line;
  return one_line.substr(0, width > 3 ? width - 3 : width) + "...";
}

// ---------------------------------------------------------------------------
// Scripted world (for `run --backend scripted` and scripted sweeps)

// Script file shape:
//   {
//     "generations": [{"match": "...", "response": "..."}, ...],
//     "votes": {"validity": ["yes", ...], "novelty": ["yes", ...]}
//   }
// "votes" may also be a single string, meaning: answer every question with
// that string. Generation entries are consumed by first substring match of
// prompt or request tag; empty match is a wildcard.
struct ScriptFile {
  std::vector<dialectic::ScriptEntry> generations;
  bool constant_votes = false;
  std::string constant_answer;
  std::deque<std::string> validity_votes;
  std::deque<std::string> novelty_votes;
};

ScriptFile load_script(const std::string& path) {
  nlohmann::json doc = nlohmann::json::parse(read_text_file(path), nullptr, false);
  if (doc.is_discarded())
    throw std::invalid_argument("script file " + path + " is not valid JSON");
  ScriptFile script;
  if (!doc.contains("generations") || !doc["generations"].is_array() ||
      doc["generations"].empty())
    throw std::invalid_argument("script file " + path +
                                " needs a non-empty 'generations' array");
  for (const auto& entry : doc["generations"]) {
    script.generations.push_back(
        {entry.value("match", ""), entry.at("response").get<std::string>()});
  }
  if (!doc.contains("votes")) {
    script.constant_votes = true;
    script.constant_answer = "yes";
  } else if (doc["votes"].is_string()) {
    script.constant_votes = true;
    script.constant_answer = doc["votes"].get<std::string>();
  } else {
    for (const auto& v : doc["votes"].value("validity", std::vector<std::string>{}))
      script.validity_votes.push_back(v);
    for (const auto& v : doc["votes"].value("novelty", std::vector<std::string>{}))
      script.novelty_votes.push_back(v);
  }
  return script;
}

// Panel answering from per-question FIFO queues (or a constant). Exhaustion
// is a script authoring mistake and fails loudly rather than as a vote.
class QueuePanel : public dialectic::VoterPanel {
 public:
  QueuePanel(std::vector<std::string> models, ScriptFile script)
      : models_(std::move(models)), script_(std::move(script)) {}

  std::vector<std::string> models() const override { return models_; }

  std::string ask(const std::string&, dialectic::VoteQuestion question,
                  const std::string&, const std::string& request_tag) override {
    if (script_.constant_votes) return script_.constant_answer;
    auto& queue = question == dialectic::VoteQuestion::validity
                      ? script_.validity_votes
                      : script_.novelty_votes;
    if (queue.empty())
      throw std::invalid_argument("script vote list for " + to_string(question) +
                                  " exhausted at '" + request_tag + "'");
    std::string answer = queue.front();
    queue.pop_front();
    return answer;
  }

 private:
  std::vector<std::string> models_;
  ScriptFile script_;
};

// ---------------------------------------------------------------------------
// run

struct RunFlags {
  std::optional<std::string> thesis;
  std::optional<std::string> thesis_file;
  std::optional<double> tau0;
  std::optional<double> tau_antithesis;
  std::optional<double> theta;
  std::optional<int> max_iterations;
  std::optional<std::string> panel;
  std::optional<std::string> core_model;
  std::optional<std::uint64_t> seed;
  std::string backend = "live";
  std::optional<std::string> script_path;
  std::optional<std::string> runs_dir;
  std::string cache = "off";
  std::optional<std::string> prompts_dir;
  std::optional<int> max_tokens;
  bool json = false;
};

dialectic::DialecticConfig effective_config(const CliConfig& cli,
                                            const RunFlags& flags) {
  dialectic::DialecticConfig config = cli.defaults;
  if (flags.tau0) config.tau0 = *flags.tau0;
  if (flags.tau_antithesis) config.tau_antithesis = *flags.tau_antithesis;
  if (flags.theta) config.theta = *flags.theta;
  if (flags.max_iterations) config.max_iterations = *flags.max_iterations;
  if (flags.panel) config.panel_models = split_csv(*flags.panel);
  if (flags.core_model) config.core_model = *flags.core_model;
  if (flags.seed) config.run_seed = *flags.seed;
  return config;
}

std::string effective_thesis(const RunFlags& flags) {
  if (flags.thesis && flags.thesis_file)
    throw std::invalid_argument("--thesis and --thesis-file are mutually exclusive");
  if (flags.thesis) return *flags.thesis;
  if (flags.thesis_file) return read_text_file(*flags.thesis_file);
  throw std::invalid_argument("one of --thesis / --thesis-file is required");
}

int cmd_run(const CliConfig& cli, const RunFlags& flags) {
  dialectic::DialecticConfig config = effective_config(cli, flags);
  auto warnings = dialectic::normalize_config(config);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  std::string thesis = effective_thesis(flags);

  dialectic::TemplateSet templates =
      flags.prompts_dir ? dialectic::load_templates(*flags.prompts_dir)
                        : dialectic::builtin_templates();

  std::shared_ptr<dialectic::GenerationBackend> backend;
  std::shared_ptr<dialectic::VoterPanel> panel;
  if (flags.backend == "scripted") {
    if (!flags.script_path)
      throw std::invalid_argument("--backend scripted requires --script");
    ScriptFile script = load_script(*flags.script_path);
    backend = std::make_shared<dialectic::ScriptedBackend>(script.generations);
    panel = std::make_shared<QueuePanel>(config.panel_models, std::move(script));
  } else if (flags.backend == "live") {
    dialectic::HttpBackendConfig http;
    http.base_url = cli.endpoint;
    http.completions_path = cli.completions_path;
    http.credential_env = cli.credential_env;
    backend = std::make_shared<dialectic::HttpBackend>(http);
    if (flags.cache == "on") {
      backend = std::make_shared<dialectic::CachingBackend>(backend, cli.cache_dir);
    }
    panel = std::make_shared<dialectic::BackendPanel>(backend, config.panel_models);
  } else {
    throw std::invalid_argument("unknown backend '" + flags.backend +
                                "' (expected live or scripted)");
  }

  std::filesystem::path runs_dir = flags.runs_dir ? *flags.runs_dir : cli.runs_dir;
  std::string run_id = dialectic::run_id_for(config);
  std::filesystem::path path = dialectic::transcript_path(runs_dir, run_id);
  auto sink = dialectic::open_run(config, thesis, path);

  auto observer = [](const dialectic::IterationRecord& r) {
    std::fprintf(stderr, "[%d] tau=%.4f validity %dy/%dn/%du novelty %dy/%dn/%du -> %s\n",
                 r.index, display_temp(r.synthesis_temperature),
                 r.validity_verdict.counted_yes,
                 r.validity_verdict.counted_no, r.validity_verdict.unparseable,
                 r.novelty_verdict.counted_yes, r.novelty_verdict.counted_no,
                 r.novelty_verdict.unparseable, r.accepted ? "accepted" : "rejected");
  };

  dialectic::RunOutcome outcome = dialectic::run_dialectic(
      config, thesis, *backend, *panel, *sink, templates, observer, run_id);

  std::fprintf(stderr, "halt=%s attempted=%d accepted=%d novelty_score=%.4f\n",
               to_string(outcome.halt_reason).c_str(), outcome.iterations_attempted,
               outcome.iterations_accepted, outcome.novelty_score);
  if (outcome.final_synthesis) {
    std::fprintf(stderr, "final synthesis: %s\n",
                 truncate_to(outcome.final_synthesis->summary, 160).c_str());
  }
  std::fprintf(stderr, "transcript: %s\n", path.string().c_str());

  if (flags.json) {
    nlohmann::json payload = dialectic::load_transcript(path);
    std::cout << payload.dump(2) << "\n";
  }
  if (outcome.halt_reason == dialectic::HaltReason::backend_error) {
    std::cerr << "error: run halted early: " << outcome.error_message << "\n";
    return kExitIo;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepFlags {
  std::string mode = "anneal-decay";
  std::string grid;
  int repeats = 10;
  std::optional<std::string> thesis;
  std::optional<std::string> thesis_file;
  std::optional<double> tau0;
  std::optional<double> tau_antithesis;
  std::optional<int> max_iterations;
  std::optional<std::string> panel;
  std::optional<std::string> core_model;
  std::optional<std::uint64_t> seed;
  std::string backend = "synthetic";
  std::optional<std::string> script_path;
  double approve_probability = 0.8;
  std::string out_dir = "sweep-out";
  std::string transcripts = "on";
  std::optional<int> workers;
  bool json = false;
};

int cmd_sweep(const CliConfig& cli, const SweepFlags& flags) {
  dialectic::SweepSpec spec;
  spec.mode = dialectic::sweep_mode_from_string(flags.mode);
  spec.grid = split_csv_doubles(flags.grid);
  spec.repeats_per_point = flags.repeats;
  spec.seed = flags.seed.value_or(0);

  RunFlags base;
  base.tau0 = flags.tau0;
  base.tau_antithesis = flags.tau_antithesis;
  base.max_iterations = flags.max_iterations;
  base.panel = flags.panel;
  base.core_model = flags.core_model;
  spec.base_config = effective_config(cli, base);
  auto warnings = dialectic::normalize_config(spec.base_config);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  base.thesis = flags.thesis;
  base.thesis_file = flags.thesis_file;
  spec.initial_thesis = effective_thesis(base);

  dialectic::WorldFactory factory;
  if (flags.backend == "synthetic") {
    factory = dialectic::synthetic_world_factory(spec.base_config.panel_models,
                                                 flags.approve_probability);
  } else if (flags.backend == "scripted") {
    if (!flags.script_path)
      throw std::invalid_argument("--backend scripted requires --script");
    std::string script_path = *flags.script_path;
    std::vector<std::string> panel_models = spec.base_config.panel_models;
    // Each run re-reads the script so it gets its own confined instances.
    factory = [script_path, panel_models](std::uint64_t) {
      ScriptFile script = load_script(script_path);
      dialectic::SweepWorld world;
      world.backend =
          std::make_shared<dialectic::ScriptedBackend>(script.generations);
      world.panel = std::make_shared<QueuePanel>(panel_models, std::move(script));
      return world;
    };
  } else if (flags.backend == "live") {
    dialectic::HttpBackendConfig http;
    http.base_url = cli.endpoint;
    http.completions_path = cli.completions_path;
    http.credential_env = cli.credential_env;
    auto backend = std::make_shared<dialectic::HttpBackend>(http);
    std::shared_ptr<dialectic::GenerationBackend> shared = backend;
    // Sweeps cache by default to avoid paying twice for identical calls.
    shared = std::make_shared<dialectic::CachingBackend>(shared, cli.cache_dir);
    std::vector<std::string> panel_models = spec.base_config.panel_models;
    factory = [shared, panel_models](std::uint64_t) {
      dialectic::SweepWorld world;
      world.backend = shared;
      world.panel =
          std::make_shared<dialectic::BackendPanel>(shared, panel_models);
      return world;
    };
  } else {
    throw std::invalid_argument("unknown backend '" + flags.backend +
                                "' (expected synthetic, scripted, or live)");
  }

  std::filesystem::path out_dir = flags.out_dir;
  std::filesystem::create_directories(out_dir);

  dialectic::SweepOptions options;
  options.workers = flags.workers.value_or(cli.concurrency);
  if (flags.transcripts == "on") {
    options.runs_dir = out_dir / "runs";
  } else if (flags.transcripts != "off") {
    throw std::invalid_argument("--transcripts expects on or off");
  }
  options.on_row = [](const dialectic::SweepRow& row) {
    std::fprintf(stderr, "grid=%g run=%d score=%.4f attempted=%d%s\n",
                 row.grid_value, row.run_index, row.novelty_score,
                 row.iterations_attempted, row.failed ? " FAILED" : "");
  };

  std::vector<dialectic::SweepRow> rows = dialectic::run_sweep(spec, factory, options);
  std::vector<dialectic::SweepSummaryRow> summary = dialectic::summarize(rows);

  dialectic::emit_csv(rows, out_dir / "rows.csv");
  dialectic::emit_csv(summary, out_dir / "summary.csv");
  dialectic::write_sweep_manifest(spec, out_dir / "manifest.json");
  std::fprintf(stderr, "sweep results in %s\n", out_dir.string().c_str());

  if (flags.json) {
    nlohmann::json payload;
    payload["spec"] = spec;
    payload["summary"] = nlohmann::json::array();
    for (const auto& s : summary) {
      payload["summary"].push_back({{"grid_value", s.grid_value},
                                    {"n", s.n},
                                    {"mean", s.mean},
                                    {"stddev", s.stddev}});
    }
    payload["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
      payload["rows"].push_back({{"grid_value", r.grid_value},
                                 {"run_index", r.run_index},
                                 {"novelty_score", r.novelty_score},
                                 {"iterations_attempted", r.iterations_attempted},
                                 {"transcript_ref", r.transcript_ref},
                                 {"failed", r.failed}});
    }
    std::cout << payload.dump(2) << "\n";
  }
  for (const auto& row : rows) {
    if (row.failed) {
      std::cerr << "warning: some runs failed; see rows.csv\n";
      return kExitIo;
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// replay / report / prompts

int cmd_replay(const std::string& path, bool json) {
  dialectic::ReplayReport report = dialectic::replay(std::filesystem::path(path));
  if (json) {
    nlohmann::json payload{{"ok", report.ok()}, {"divergences", report.divergences}};
    std::cout << payload.dump(2) << "\n";
  } else if (report.ok()) {
    std::cout << "replay ok: every derived field recomputes identically\n";
  } else {
    std::cout << report.divergences.size() << " divergence(s):\n";
    for (const auto& d : report.divergences) std::cout << "  " << d << "\n";
  }
  return report.ok() ? kExitOk : kExitDivergence;
}

int cmd_report(const std::string& path, int width, bool json) {
  dialectic::TranscriptEnvelope env =
      dialectic::load_transcript(std::filesystem::path(path));
  if (json) {
    std::cout << nlohmann::json(env).dump(2) << "\n";
    return kExitOk;
  }
  std::size_t w = width > 8 ? static_cast<std::size_t>(width) : 8;
  std::cout << "run " << env.run_id << " created " << env.created_at << "\n";
  std::cout << "model " << env.config.core_model << ", panel of "
            << env.config.panel_models.size() << ", tau0 " << env.config.tau0
            << ", tau_antithesis " << env.config.tau_antithesis << ", theta "
            << env.config.theta << ", max " << env.config.max_iterations
            << " iterations\n";
  std::cout << "thesis: " << truncate_to(env.initial_thesis, w) << "\n\n";
  std::printf("%-4s %-8s %-12s %-12s %-9s %s\n", "it", "temp", "validity",
              "novelty", "verdict", "synthesis summary");
  for (const auto& r : env.records) {
    auto tally = [](const dialectic::PanelVerdict& v) {
      return std::to_string(v.counted_yes) + "y/" + std::to_string(v.counted_no) +
             "n/" + std::to_string(v.unparseable) + "u";
    };
    std::printf("%-4d %-8.4f %-12s %-12s %-9s %s\n", r.index,
                display_temp(r.synthesis_temperature),
                tally(r.validity_verdict).c_str(),
                tally(r.novelty_verdict).c_str(),
                r.accepted ? "accepted" : "rejected",
                truncate_to(r.synthesis.summary, w).c_str());
  }
  if (env.outcome) {
    std::cout << "\nhalt=" << to_string(env.outcome->halt_reason)
              << " attempted=" << env.outcome->iterations_attempted
              << " accepted=" << env.outcome->iterations_accepted
              << " novelty_score=" << env.outcome->novelty_score << "\n";
    if (env.outcome->final_synthesis)
      std::cout << "final: " << truncate_to(env.outcome->final_synthesis->summary, w)
                << "\n";
  } else {
    std::cout << "\nrun is not finalized\n";
  }
  return kExitOk;
}

int cmd_prompts(const std::optional<std::string>& prompts_dir, bool json) {
  dialectic::TemplateSet set = prompts_dir ? dialectic::load_templates(*prompts_dir)
                                           : dialectic::builtin_templates();
  const dialectic::PromptTemplate* all[] = {&set.antithesis, &set.synthesis,
                                            &set.soundness, &set.novelty};
  if (json) {
    nlohmann::json payload;
    for (const auto* t : all) payload[to_string(t->id)] = t->body;
    std::cout << payload.dump(2) << "\n";
    return kExitOk;
  }
  for (const auto* t : all) {
    std::cout << "=== " << to_string(t->id) << " ===\n";
    std::cout << t->body << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dialectical self-reflection engine"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "JSON config file");

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Execute one dialectical run");
  run->add_option("--thesis", run_flags.thesis, "Initial thesis text");
  run->add_option("--thesis-file", run_flags.thesis_file, "File with the initial thesis");
  run->add_option("--tau0", run_flags.tau0, "Initial synthesis temperature");
  run->add_option("--tau-antithesis", run_flags.tau_antithesis, "Antithesis temperature");
  run->add_option("--theta", run_flags.theta, "Annealing decay constant");
  run->add_option("--max-iterations", run_flags.max_iterations, "Iteration budget");
  run->add_option("--panel", run_flags.panel, "Comma-separated judge models");
  run->add_option("--core-model", run_flags.core_model, "Generation model");
  run->add_option("--seed", run_flags.seed, "Run seed (drives the run id)");
  run->add_option("--backend", run_flags.backend, "live or scripted")
      ->check(CLI::IsMember({"live", "scripted"}));
  run->add_option("--script", run_flags.script_path, "Script JSON for scripted backend");
  run->add_option("--runs-dir", run_flags.runs_dir, "Transcript directory");
  run->add_option("--cache", run_flags.cache, "Response cache: on or off")
      ->check(CLI::IsMember({"on", "off"}));
  run->add_option("--prompts-dir", run_flags.prompts_dir,
                  "Directory with prompt template overrides");
  run->add_option("--max-tokens", run_flags.max_tokens, "Completion token cap");
  run->add_flag("--json", run_flags.json, "Print the transcript as JSON to stdout");

  SweepFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "Grid-sweep hyperparameters");
  sweep->add_option("--mode", sweep_flags.mode, "anneal-decay or constant-temp")
      ->check(CLI::IsMember({"anneal-decay", "constant-temp"}));
  sweep->add_option("--grid", sweep_flags.grid, "Comma-separated grid values")
      ->required();
  sweep->add_option("--repeats", sweep_flags.repeats, "Runs per grid point");
  sweep->add_option("--thesis", sweep_flags.thesis, "Initial thesis text");
  sweep->add_option("--thesis-file", sweep_flags.thesis_file, "File with the initial thesis");
  sweep->add_option("--tau0", sweep_flags.tau0, "Base initial synthesis temperature");
  sweep->add_option("--tau-antithesis", sweep_flags.tau_antithesis, "Antithesis temperature");
  sweep->add_option("--max-iterations", sweep_flags.max_iterations, "Iteration budget");
  sweep->add_option("--panel", sweep_flags.panel, "Comma-separated judge models");
  sweep->add_option("--core-model", sweep_flags.core_model, "Generation model");
  sweep->add_option("--seed", sweep_flags.seed, "Sweep seed");
  sweep->add_option("--backend", sweep_flags.backend, "synthetic, scripted, or live")
      ->check(CLI::IsMember({"synthetic", "scripted", "live"}));
  sweep->add_option("--script", sweep_flags.script_path, "Script JSON (scripted backend)");
  sweep->add_option("--approve-p", sweep_flags.approve_probability,
                    "Synthetic panel approval probability");
  sweep->add_option("--out-dir", sweep_flags.out_dir, "Result directory");
  sweep->add_option("--transcripts", sweep_flags.transcripts,
                    "Write per-run transcripts: on or off")
      ->check(CLI::IsMember({"on", "off"}));
  sweep->add_option("--workers", sweep_flags.workers, "Concurrent runs");
  sweep->add_flag("--json", sweep_flags.json, "Print rows and summary as JSON");

  std::string replay_path;
  bool replay_json = false;
  CLI::App* replay = app.add_subcommand("replay", "Verify a transcript by re-execution");
  replay->add_option("transcript", replay_path, "Transcript JSONL path")->required();
  replay->add_flag("--json", replay_json, "Print the report as JSON");

  std::string report_path;
  int report_width = 72;
  bool report_json = false;
  CLI::App* report = app.add_subcommand("report", "Render a transcript as a table");
  report->add_option("transcript", report_path, "Transcript JSONL path")->required();
  report->add_option("--width", report_width, "Summary truncation width");
  report->add_flag("--json", report_json, "Print the transcript as JSON");

  std::optional<std::string> prompts_dir;
  bool prompts_json = false;
  CLI::App* prompts = app.add_subcommand("prompts", "Dump the prompt templates");
  prompts->add_subcommand("show", "Dump the prompt templates byte-exact");
  prompts->add_option("--prompts-dir", prompts_dir, "Directory with template overrides");
  prompts->add_flag("--json", prompts_json, "Print templates as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help lands here too; CLI11 returns 0 for it and nonzero otherwise.
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    CliConfig cli = config_path ? load_cli_config(*config_path) : CliConfig{};
    if (run->parsed()) return cmd_run(cli, run_flags);
    if (sweep->parsed()) return cmd_sweep(cli, sweep_flags);
    if (replay->parsed()) return cmd_replay(replay_path, replay_json);
    if (report->parsed()) return cmd_report(report_path, report_width, report_json);
    if (prompts->parsed()) return cmd_prompts(prompts_dir, prompts_json);
    std::cerr << "error: no subcommand\n";
    return kExitConfig;
  } catch (const dialectic::AuthError& e) {
    std::cerr << "auth error: " << e.what() << "\n";
    return kExitAuth;
  } catch (const dialectic::CorruptTranscriptError& e) {
    std::cerr << "corrupt transcript: " << e.what() << "\n";
    return kExitIo;
  } catch (const dialectic::StoreError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const dialectic::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
