#pragma once

/**
 * Append-only JSONL transcripts and replay verification.
 *
 * A transcript is one header line, one line per iteration, and one outcome
 * line. The header carries the only timestamp; every other line is a pure
 * function of config + recorded raw model text, which is what makes replay
 * meaningful: re-running the engine against the recorded raw responses and
 * votes must reproduce every derived field bit-for-bit (temperatures at
 * 1e-9 relative). The run id is derived from the run seed, so identical
 * configurations yield identically-named transcripts.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialectic/engine.hpp"
#include "dialectic/json_io.hpp"
#include "dialectic/rng.hpp"
#include "dialectic/sink.hpp"
#include "dialectic/types.hpp"

namespace dialectic {

struct StoreError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PathExistsError : StoreError {
  using StoreError::StoreError;
};
struct IoError : StoreError {
  using StoreError::StoreError;
};
struct CorruptTranscriptError : StoreError {
  using StoreError::StoreError;
};

inline std::string run_id_for(const DialecticConfig& config) {
  return uuid_from_seed(config.run_seed);
}

inline std::filesystem::path transcript_path(const std::filesystem::path& runs_dir,
                                             const std::string& run_id) {
  return runs_dir / (run_id + ".jsonl");
}

inline std::string now_iso8601_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

constexpr int kTranscriptSchemaVersion = 1;

struct TranscriptEnvelope {
  int schema_version = kTranscriptSchemaVersion;
  std::string run_id;
  std::string created_at;
  DialecticConfig config;
  std::string initial_thesis;
  std::vector<IterationRecord> records;
  std::optional<RunOutcome> outcome;  // present iff the run was finalized
  nlohmann::json header_raw;          // keeps fields this version doesn't know
};

inline void to_json(nlohmann::json& j, const TranscriptEnvelope& env) {
  j = nlohmann::json{{"schema_version", env.schema_version},
                     {"run_id", env.run_id},
                     {"created_at", env.created_at},
                     {"config", env.config},
                     {"initial_thesis", env.initial_thesis},
                     {"records", env.records}};
  if (env.outcome) j["outcome"] = *env.outcome;
}

// Writes one line per event, flushed before returning, and refuses gaps,
// double finalization, and writes after finalization. One writer per file.
class FileTranscriptSink : public TranscriptSink {
 public:
  FileTranscriptSink(std::filesystem::path path, std::ofstream stream,
                     std::string run_id)
      : path_(std::move(path)), out_(std::move(stream)), run_id_(std::move(run_id)) {}

  void append_iteration(const IterationRecord& record) override {
    if (finalized_) throw std::logic_error("transcript already finalized");
    if (record.index != appended_)
      throw std::logic_error("iteration index gap: expected " +
                             std::to_string(appended_) + ", got " +
                             std::to_string(record.index));
    nlohmann::json line = record;
    line["type"] = "iteration";
    write_line(line);
    ++appended_;
  }

  void finalize(const RunOutcome& outcome) override {
    if (finalized_) throw std::logic_error("transcript already finalized");
    nlohmann::json line = outcome;
    line["type"] = "outcome";
    write_line(line);
    finalized_ = true;
    out_.close();
  }

  const std::string& run_id() const { return run_id_; }
  const std::filesystem::path& path() const { return path_; }
  bool finalized() const { return finalized_; }

 private:
  void write_line(const nlohmann::json& line) {
    out_ << line.dump() << '\n';
    out_.flush();
    if (!out_) throw IoError("write failed for transcript " + path_.string());
  }

  std::filesystem::path path_;
  std::ofstream out_;
  std::string run_id_;
  int appended_ = 0;
  bool finalized_ = false;
};

// Creates the transcript file and writes its header line. Refuses to
// clobber an existing file — transcripts are append-only by contract.
inline std::unique_ptr<FileTranscriptSink> open_run(const DialecticConfig& config,
                                                    const std::string& initial_thesis,
                                                    const std::filesystem::path& path) {
  if (std::filesystem::exists(path))
    throw PathExistsError("transcript already exists: " + path.string());
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create transcript " + path.string());
  std::string run_id = run_id_for(config);
  nlohmann::json header{{"type", "header"},
                        {"schema_version", kTranscriptSchemaVersion},
                        {"run_id", run_id},
                        {"created_at", now_iso8601_utc()},
                        {"config", config},
                        {"initial_thesis", initial_thesis}};
  out << header.dump() << '\n';
  out.flush();
  if (!out) throw IoError("cannot write header to " + path.string());
  return std::make_unique<FileTranscriptSink>(path, std::move(out), run_id);
}

inline TranscriptEnvelope load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open transcript " + path.string());
  TranscriptEnvelope env;
  std::string line;
  int line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded())
      throw CorruptTranscriptError(path.string() + ":" + std::to_string(line_no) +
                                   " is not valid JSON");
    std::string type = doc.value("type", "");
    try {
      if (!seen_header) {
        if (type != "header")
          throw CorruptTranscriptError(path.string() + " does not start with a header line");
        env.schema_version = doc.at("schema_version").get<int>();
        env.run_id = doc.at("run_id").get<std::string>();
        env.created_at = doc.at("created_at").get<std::string>();
        env.config = doc.at("config").get<DialecticConfig>();
        env.initial_thesis = doc.at("initial_thesis").get<std::string>();
        env.header_raw = doc;
        seen_header = true;
      } else if (type == "iteration") {
        if (env.outcome)
          throw CorruptTranscriptError(path.string() + ": iteration after outcome at line " +
                                       std::to_string(line_no));
        IterationRecord record = doc.get<IterationRecord>();
        if (record.index != static_cast<int>(env.records.size()))
          throw CorruptTranscriptError(path.string() + ": iteration index gap at line " +
                                       std::to_string(line_no));
        env.records.push_back(std::move(record));
      } else if (type == "outcome") {
        if (env.outcome)
          throw CorruptTranscriptError(path.string() + ": duplicate outcome at line " +
                                       std::to_string(line_no));
        env.outcome = doc.get<RunOutcome>();
      } else {
        throw CorruptTranscriptError(path.string() + ": unknown line type '" + type +
                                     "' at line " + std::to_string(line_no));
      }
    } catch (const CorruptTranscriptError&) {
      throw;
    } catch (const std::exception& err) {
      throw CorruptTranscriptError(path.string() + ":" + std::to_string(line_no) +
                                   " malformed: " + err.what());
    }
  }
  if (!seen_header) throw CorruptTranscriptError(path.string() + " is empty");
  return env;
}

// ---------------------------------------------------------------------------
// Replay

// Feeds back the recorded raw generations in order. When the queue runs dry
// it reproduces the recorded backend failure, if there was one.
class ReplayBackend : public GenerationBackend {
 public:
  explicit ReplayBackend(const TranscriptEnvelope& env) {
    for (const auto& record : env.records) {
      queue_.push_back(record.antithesis.raw_response);
      queue_.push_back(record.synthesis.raw_response);
    }
    if (env.outcome && env.outcome->halt_reason == HaltReason::backend_error)
      recorded_error_ = env.outcome->error_message.empty()
                            ? "recorded backend failure"
                            : env.outcome->error_message;
  }

  GenerationResponse generate(const GenerationRequest& request) override {
    if (queue_.empty()) {
      if (!recorded_error_.empty()) throw BackendError(recorded_error_);
      throw ScriptExhaustedError("replay backend exhausted at request '" +
                                 request.request_tag + "'");
    }
    GenerationResponse resp;
    resp.text = std::move(queue_.front());
    queue_.pop_front();
    resp.model_echo = request.model;
    resp.latency_ms = 0;
    resp.from_cache = false;
    return resp;
  }

 private:
  std::deque<std::string> queue_;
  std::string recorded_error_;
};

// Feeds back the recorded panel votes, question by question, reproducing
// recorded per-voter failures as backend errors.
class ReplayPanel : public VoterPanel {
 public:
  explicit ReplayPanel(const TranscriptEnvelope& env)
      : models_(env.config.panel_models) {
    for (const auto& record : env.records) {
      for (const auto& v : record.novelty_verdict.votes)
        novelty_.push_back({v.raw_text, v.error});
      for (const auto& v : record.validity_verdict.votes)
        validity_.push_back({v.raw_text, v.error});
    }
  }

  std::vector<std::string> models() const override { return models_; }

  std::string ask(const std::string&, VoteQuestion question, const std::string&,
                  const std::string& request_tag) override {
    auto& queue = question == VoteQuestion::novelty ? novelty_ : validity_;
    if (queue.empty())
      throw BackendError("replay vote queue exhausted at '" + request_tag + "'");
    Entry entry = std::move(queue.front());
    queue.pop_front();
    if (!entry.error.empty()) throw BackendError(entry.error);
    return entry.raw_text;
  }

 private:
  struct Entry {
    std::string raw_text;
    std::string error;
  };
  std::vector<std::string> models_;
  std::deque<Entry> novelty_;
  std::deque<Entry> validity_;
};

struct ReplayReport {
  std::vector<std::string> divergences;
  bool ok() const { return divergences.empty(); }
};

namespace detail {

inline bool temperature_close(double a, double b) {
  double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return true;
  return std::abs(a - b) <= 1e-9 * scale;
}

// Structural diff with field paths. Temperatures get the relative
// tolerance; everything else must match exactly.
inline void diff_json(const nlohmann::json& recorded, const nlohmann::json& recomputed,
                      const std::string& path, const std::string& key,
                      std::vector<std::string>& out) {
  if (recorded.is_object() && recomputed.is_object()) {
    for (auto it = recorded.begin(); it != recorded.end(); ++it) {
      if (!recomputed.contains(it.key())) {
        out.push_back(path + "." + it.key() + ": missing in recomputation");
        continue;
      }
      diff_json(it.value(), recomputed[it.key()], path + "." + it.key(), it.key(), out);
    }
    for (auto it = recomputed.begin(); it != recomputed.end(); ++it) {
      if (!recorded.contains(it.key()))
        out.push_back(path + "." + it.key() + ": missing in recording");
    }
    return;
  }
  if (recorded.is_array() && recomputed.is_array()) {
    if (recorded.size() != recomputed.size()) {
      out.push_back(path + ".length: recorded " + std::to_string(recorded.size()) +
                    " != recomputed " + std::to_string(recomputed.size()));
      return;
    }
    for (std::size_t i = 0; i < recorded.size(); ++i) {
      diff_json(recorded[i], recomputed[i], path + "[" + std::to_string(i) + "]", key, out);
    }
    return;
  }
  if (recorded.is_number() && recomputed.is_number() &&
      key == "synthesis_temperature") {
    if (!temperature_close(recorded.get<double>(), recomputed.get<double>()))
      out.push_back(path + ": recorded " + recorded.dump() + " != recomputed " +
                    recomputed.dump());
    return;
  }
  if (recorded != recomputed) {
    out.push_back(path + ": recorded " + recorded.dump() + " != recomputed " +
                  recomputed.dump());
  }
}

}  // namespace detail

// Re-executes the engine against the recorded raw material and reports every
// derived field that fails to recompute identically.
inline ReplayReport replay(const TranscriptEnvelope& env) {
  if (!env.outcome)
    throw CorruptTranscriptError("transcript is not finalized; nothing to verify");
  ReplayReport report;

  std::string expected_id = run_id_for(env.config);
  if (expected_id != env.run_id)
    report.divergences.push_back("header.run_id: recorded " + env.run_id +
                                 " != recomputed " + expected_id);

  ReplayBackend backend(env);
  ReplayPanel panel(env);
  MemorySink sink;
  run_dialectic(env.config, env.initial_thesis, backend, panel, sink,
                builtin_templates(), {}, "replay");

  const auto& recomputed = sink.records();
  if (recomputed.size() != env.records.size()) {
    report.divergences.push_back(
        "records.length: recorded " + std::to_string(env.records.size()) +
        " != recomputed " + std::to_string(recomputed.size()));
  }
  std::size_t shared = std::min(recomputed.size(), env.records.size());
  for (std::size_t i = 0; i < shared; ++i) {
    detail::diff_json(nlohmann::json(env.records[i]), nlohmann::json(recomputed[i]),
                      "records[" + std::to_string(i) + "]", "", report.divergences);
  }
  detail::diff_json(nlohmann::json(*env.outcome), nlohmann::json(sink.outcome()),
                    "outcome", "", report.divergences);
  return report;
}

inline ReplayReport replay(const std::filesystem::path& path) {
  return replay(load_transcript(path));
}

}  // namespace dialectic
