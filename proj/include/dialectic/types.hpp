#pragma once

/**
 * Core domain types for the dialectical self-reflection engine:
 * run configuration, propositions, per-iteration records, votes,
 * panel verdicts and run outcomes.
 */

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dialectic {

enum class PropositionKind { thesis, antithesis, synthesis };
enum class ParseConfidence { structured, fallback };
enum class VoteQuestion { validity, novelty };
enum class VoteAnswer { yes, no, unparseable };
enum class MajorityVote { yes, no };
enum class HaltReason { mamv_rejected, max_iterations, backend_error };
enum class TiePolicy { reject_on_tie };

inline std::string to_string(PropositionKind k) {
  switch (k) {
    case PropositionKind::thesis: return "thesis";
    case PropositionKind::antithesis: return "antithesis";
    case PropositionKind::synthesis: return "synthesis";
  }
  return "thesis";
}

inline std::string to_string(ParseConfidence c) {
  return c == ParseConfidence::structured ? "structured" : "fallback";
}

inline std::string to_string(VoteQuestion q) {
  return q == VoteQuestion::validity ? "validity" : "novelty";
}

inline std::string to_string(VoteAnswer a) {
  switch (a) {
    case VoteAnswer::yes: return "yes";
    case VoteAnswer::no: return "no";
    case VoteAnswer::unparseable: return "unparseable";
  }
  return "unparseable";
}

inline std::string to_string(MajorityVote m) {
  return m == MajorityVote::yes ? "yes" : "no";
}

inline std::string to_string(HaltReason r) {
  switch (r) {
    case HaltReason::mamv_rejected: return "mamv-rejected";
    case HaltReason::max_iterations: return "max-iterations";
    case HaltReason::backend_error: return "backend-error";
  }
  return "backend-error";
}

inline std::string to_string(TiePolicy) { return "reject-on-tie"; }

inline PropositionKind proposition_kind_from_string(const std::string& s) {
  if (s == "thesis") return PropositionKind::thesis;
  if (s == "antithesis") return PropositionKind::antithesis;
  if (s == "synthesis") return PropositionKind::synthesis;
  throw std::invalid_argument("unknown proposition kind: " + s);
}

inline ParseConfidence parse_confidence_from_string(const std::string& s) {
  if (s == "structured") return ParseConfidence::structured;
  if (s == "fallback") return ParseConfidence::fallback;
  throw std::invalid_argument("unknown parse confidence: " + s);
}

inline VoteQuestion vote_question_from_string(const std::string& s) {
  if (s == "validity") return VoteQuestion::validity;
  if (s == "novelty") return VoteQuestion::novelty;
  throw std::invalid_argument("unknown vote question: " + s);
}

inline VoteAnswer vote_answer_from_string(const std::string& s) {
  if (s == "yes") return VoteAnswer::yes;
  if (s == "no") return VoteAnswer::no;
  if (s == "unparseable") return VoteAnswer::unparseable;
  throw std::invalid_argument("unknown vote answer: " + s);
}

inline MajorityVote majority_vote_from_string(const std::string& s) {
  if (s == "yes") return MajorityVote::yes;
  if (s == "no") return MajorityVote::no;
  throw std::invalid_argument("unknown majority vote: " + s);
}

inline HaltReason halt_reason_from_string(const std::string& s) {
  if (s == "mamv-rejected") return HaltReason::mamv_rejected;
  if (s == "max-iterations") return HaltReason::max_iterations;
  if (s == "backend-error") return HaltReason::backend_error;
  throw std::invalid_argument("unknown halt reason: " + s);
}

inline TiePolicy tie_policy_from_string(const std::string& s) {
  if (s == "reject-on-tie") return TiePolicy::reject_on_tie;
  throw std::invalid_argument("unknown tie policy: " + s);
}

// Hyperparameters and identity of one dialectical run.
struct DialecticConfig {
  double tau0 = 0.7;             // initial synthesis temperature
  double tau_antithesis = 0.5;   // fixed antithesis temperature
  double theta = 0.3;            // annealing decay constant; 0 = constant temperature
  int max_iterations = 5;
  std::string core_model = "gpt-4o";
  std::vector<std::string> panel_models = {"gpt-4o-mini", "gpt-4-32k", "gpt-4"};
  TiePolicy tie_policy = TiePolicy::reject_on_tie;
  std::uint64_t run_seed = 0;    // provenance; also drives the run id
};

// Clamps temperatures to the wire protocol's legal range, throws
// std::invalid_argument on unrecoverable settings, and returns warnings
// for suspicious-but-legal ones (e.g. an even panel).
inline std::vector<std::string> normalize_config(DialecticConfig& cfg) {
  std::vector<std::string> warnings;
  if (cfg.theta < 0.0) throw std::invalid_argument("theta must be >= 0");
  if (cfg.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (cfg.core_model.empty()) throw std::invalid_argument("core_model must be set");
  if (cfg.panel_models.empty()) throw std::invalid_argument("panel_models must be non-empty");
  auto clamp_tau = [&](double& t, const char* name) {
    if (t < 0.0 || t > 2.0) {
      warnings.push_back(std::string(name) + " clamped to [0, 2] (was " +
                         std::to_string(t) + ")");
      t = t < 0.0 ? 0.0 : 2.0;
    }
  };
  clamp_tau(cfg.tau0, "tau0");
  clamp_tau(cfg.tau_antithesis, "tau_antithesis");
  if (cfg.panel_models.size() % 2 == 0) {
    warnings.push_back("panel has an even number of voters (" +
                       std::to_string(cfg.panel_models.size()) +
                       "); ties reject the iteration");
  }
  return warnings;
}

// One thesis, antithesis or synthesis, with both the raw model response
// and the extracted summary that drives the chain.
struct Proposition {
  PropositionKind kind = PropositionKind::thesis;
  std::string full_text;
  std::string summary;
  std::string raw_response;
  ParseConfidence parse_confidence = ParseConfidence::structured;
};

inline Proposition make_thesis(const std::string& text) {
  return Proposition{PropositionKind::thesis, text, text, text,
                     ParseConfidence::structured};
}

// A single judge's answer to one question.
struct Vote {
  std::string voter_model;
  VoteQuestion question = VoteQuestion::validity;
  std::string raw_text;
  VoteAnswer parsed = VoteAnswer::unparseable;
  // Non-empty when the voter's backend call failed; such votes are
  // unparseable regardless of raw_text.
  std::string error;
};

// Majority aggregation over a panel for one question.
struct PanelVerdict {
  std::vector<Vote> votes;
  int counted_yes = 0;
  int counted_no = 0;
  int unparseable = 0;
  MajorityVote majority = MajorityVote::no;
};

struct MamvAssessment {
  PanelVerdict validity;
  PanelVerdict novelty;
  bool accepted = false;
  std::string diagnostics;  // set when e.g. every voter on a question errored
};

// One full dialectical cycle.
struct IterationRecord {
  int index = 0;
  Proposition thesis_in;
  Proposition antithesis;
  Proposition synthesis;
  double synthesis_temperature = 0.0;
  PanelVerdict validity_verdict;
  PanelVerdict novelty_verdict;
  bool accepted = false;
  std::string mamv_diagnostics;
};

struct RunOutcome {
  std::optional<Proposition> final_synthesis;
  int iterations_attempted = 0;
  int iterations_accepted = 0;
  double novelty_score = 0.0;
  HaltReason halt_reason = HaltReason::max_iterations;
  std::string error_message;  // set when halt_reason = backend-error
};

}  // namespace dialectic
