#pragma once

/**
 * The dialectical loop.
 *
 * Each iteration generates an antithesis to the current thesis at a fixed
 * temperature, synthesizes the two at an annealed temperature, and puts the
 * result to the judge panel. An accepted synthesis' summary becomes the next
 * thesis; the first rejection halts the run (greedy stop). Every iteration
 * is persisted before its verdict is acted on, so rejected work is never
 * lost. The run's novelty score is the fraction of attempted iterations
 * whose novelty majority was yes.
 */

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dialectic/backend.hpp"
#include "dialectic/mamv.hpp"
#include "dialectic/prompts.hpp"
#include "dialectic/schedule.hpp"
#include "dialectic/sink.hpp"
#include "dialectic/types.hpp"

namespace dialectic {

// One full cycle: antithesis, then synthesis (which consumes the antithesis
// summary — the generation order is load-bearing), then the panel verdict.
inline IterationRecord step(const DialecticConfig& config, int index,
                            const Proposition& thesis_in,
                            GenerationBackend& backend, VoterPanel& panel,
                            const TemplateSet& templates,
                            const std::string& tag_prefix = "run") {
  if (index < 0 || index >= config.max_iterations)
    throw std::invalid_argument("iteration index out of range");
  std::string tag = tag_prefix + "/iter" + std::to_string(index);

  GenerationRequest antithesis_request;
  antithesis_request.model = config.core_model;
  antithesis_request.prompt =
      render(templates.antithesis, {{"thesis", thesis_in.summary}});
  antithesis_request.temperature = clamp_temperature(config.tau_antithesis);
  antithesis_request.request_tag = tag + "/antithesis";
  Proposition antithesis =
      parse_antithesis(backend.generate(antithesis_request).text);

  double tau = temperature_at(config.tau0, config.theta, index);

  GenerationRequest synthesis_request;
  synthesis_request.model = config.core_model;
  synthesis_request.prompt =
      render(templates.synthesis,
             {{"thesis", thesis_in.summary}, {"antithesis", antithesis.summary}});
  synthesis_request.temperature = tau;
  synthesis_request.request_tag = tag + "/synthesis";
  Proposition synthesis =
      parse_synthesis(backend.generate(synthesis_request).text);

  MamvAssessment verdict =
      assess(thesis_in, antithesis, synthesis, panel, templates, tag + "/mamv");

  IterationRecord record;
  record.index = index;
  record.thesis_in = thesis_in;
  record.antithesis = antithesis;
  record.synthesis = synthesis;
  record.synthesis_temperature = tau;
  record.validity_verdict = verdict.validity;
  record.novelty_verdict = verdict.novelty;
  record.accepted = verdict.accepted;
  record.mamv_diagnostics = verdict.diagnostics;
  return record;
}

// The accepted synthesis' summary, promoted to the next iteration's thesis.
inline Proposition next_thesis(const IterationRecord& record) {
  if (!record.accepted)
    throw std::logic_error("next_thesis requires an accepted record");
  return make_thesis(record.synthesis.summary);
}

using IterationObserver = std::function<void(const IterationRecord&)>;

inline RunOutcome run_dialectic(const DialecticConfig& config,
                                const std::string& initial_thesis,
                                GenerationBackend& backend, VoterPanel& panel,
                                TranscriptSink& sink,
                                const TemplateSet& templates,
                                const IterationObserver& observer = {},
                                const std::string& tag_prefix = "run") {
  std::string trimmed = detail::trim_copy(initial_thesis);
  if (trimmed.empty())
    throw std::invalid_argument("initial thesis is empty after trimming");

  Proposition thesis = make_thesis(trimmed);
  std::vector<IterationRecord> records;
  RunOutcome outcome;

  auto finish = [&](HaltReason reason, const std::string& error_message = "") {
    outcome.iterations_attempted = static_cast<int>(records.size());
    outcome.iterations_accepted = 0;
    int novel = 0;
    for (const auto& r : records) {
      if (r.accepted) ++outcome.iterations_accepted;
      if (r.novelty_verdict.majority == MajorityVote::yes) ++novel;
    }
    outcome.novelty_score =
        records.empty() ? 0.0
                        : static_cast<double>(novel) /
                              static_cast<double>(records.size());
    outcome.halt_reason = reason;
    outcome.error_message = error_message;
    for (auto it = records.rbegin(); it != records.rend(); ++it) {
      if (it->accepted) {
        outcome.final_synthesis = it->synthesis;
        break;
      }
    }
    sink.finalize(outcome);  // sink failures propagate: persistence is not optional
    return outcome;
  };

  for (int index = 0; index < config.max_iterations; ++index) {
    IterationRecord record;
    try {
      record = step(config, index, thesis, backend, panel, templates, tag_prefix);
    } catch (const BackendError& err) {
      return finish(HaltReason::backend_error, err.what());
    }
    records.push_back(record);
    sink.append_iteration(record);  // persist before acting on the verdict
    if (observer) observer(record);
    if (!record.accepted) return finish(HaltReason::mamv_rejected);
    thesis = next_thesis(record);
  }
  return finish(HaltReason::max_iterations);
}

}  // namespace dialectic
