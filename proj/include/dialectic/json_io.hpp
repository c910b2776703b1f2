#pragma once

/**
 * JSON (de)serialization for the domain types. nlohmann::json keeps object
 * keys sorted and round-trips doubles exactly, so serializing the same value
 * twice yields identical bytes — the transcript determinism guarantees lean
 * on that. Empty diagnostic strings and absent syntheses are omitted rather
 * than written as "" / null.
 */

#include <nlohmann/json.hpp>

#include "dialectic/types.hpp"

namespace dialectic {

inline void to_json(nlohmann::json& j, const DialecticConfig& c) {
  j = nlohmann::json{{"tau0", c.tau0},
                     {"tau_antithesis", c.tau_antithesis},
                     {"theta", c.theta},
                     {"max_iterations", c.max_iterations},
                     {"core_model", c.core_model},
                     {"panel_models", c.panel_models},
                     {"tie_policy", to_string(c.tie_policy)},
                     {"run_seed", c.run_seed}};
}

inline void from_json(const nlohmann::json& j, DialecticConfig& c) {
  j.at("tau0").get_to(c.tau0);
  j.at("tau_antithesis").get_to(c.tau_antithesis);
  j.at("theta").get_to(c.theta);
  j.at("max_iterations").get_to(c.max_iterations);
  j.at("core_model").get_to(c.core_model);
  j.at("panel_models").get_to(c.panel_models);
  c.tie_policy = tie_policy_from_string(j.value("tie_policy", "reject-on-tie"));
  c.run_seed = j.value("run_seed", std::uint64_t{0});
}

inline void to_json(nlohmann::json& j, const Proposition& p) {
  j = nlohmann::json{{"kind", to_string(p.kind)},
                     {"full_text", p.full_text},
                     {"summary", p.summary},
                     {"raw_response", p.raw_response},
                     {"parse_confidence", to_string(p.parse_confidence)}};
}

inline void from_json(const nlohmann::json& j, Proposition& p) {
  p.kind = proposition_kind_from_string(j.at("kind").get<std::string>());
  j.at("full_text").get_to(p.full_text);
  j.at("summary").get_to(p.summary);
  j.at("raw_response").get_to(p.raw_response);
  p.parse_confidence =
      parse_confidence_from_string(j.at("parse_confidence").get<std::string>());
}

inline void to_json(nlohmann::json& j, const Vote& v) {
  j = nlohmann::json{{"voter_model", v.voter_model},
                     {"question", to_string(v.question)},
                     {"raw_text", v.raw_text},
                     {"parsed", to_string(v.parsed)}};
  if (!v.error.empty()) j["error"] = v.error;
}

inline void from_json(const nlohmann::json& j, Vote& v) {
  j.at("voter_model").get_to(v.voter_model);
  v.question = vote_question_from_string(j.at("question").get<std::string>());
  j.at("raw_text").get_to(v.raw_text);
  v.parsed = vote_answer_from_string(j.at("parsed").get<std::string>());
  v.error = j.value("error", "");
}

inline void to_json(nlohmann::json& j, const PanelVerdict& p) {
  j = nlohmann::json{{"votes", p.votes},
                     {"counted_yes", p.counted_yes},
                     {"counted_no", p.counted_no},
                     {"unparseable", p.unparseable},
                     {"majority", to_string(p.majority)}};
}

inline void from_json(const nlohmann::json& j, PanelVerdict& p) {
  j.at("votes").get_to(p.votes);
  j.at("counted_yes").get_to(p.counted_yes);
  j.at("counted_no").get_to(p.counted_no);
  j.at("unparseable").get_to(p.unparseable);
  p.majority = majority_vote_from_string(j.at("majority").get<std::string>());
}

inline void to_json(nlohmann::json& j, const IterationRecord& r) {
  j = nlohmann::json{{"index", r.index},
                     {"thesis_in", r.thesis_in},
                     {"antithesis", r.antithesis},
                     {"synthesis", r.synthesis},
                     {"synthesis_temperature", r.synthesis_temperature},
                     {"validity_verdict", r.validity_verdict},
                     {"novelty_verdict", r.novelty_verdict},
                     {"accepted", r.accepted}};
  if (!r.mamv_diagnostics.empty()) j["mamv_diagnostics"] = r.mamv_diagnostics;
}

inline void from_json(const nlohmann::json& j, IterationRecord& r) {
  j.at("index").get_to(r.index);
  j.at("thesis_in").get_to(r.thesis_in);
  j.at("antithesis").get_to(r.antithesis);
  j.at("synthesis").get_to(r.synthesis);
  j.at("synthesis_temperature").get_to(r.synthesis_temperature);
  j.at("validity_verdict").get_to(r.validity_verdict);
  j.at("novelty_verdict").get_to(r.novelty_verdict);
  j.at("accepted").get_to(r.accepted);
  r.mamv_diagnostics = j.value("mamv_diagnostics", "");
}

inline void to_json(nlohmann::json& j, const RunOutcome& o) {
  j = nlohmann::json{{"iterations_attempted", o.iterations_attempted},
                     {"iterations_accepted", o.iterations_accepted},
                     {"novelty_score", o.novelty_score},
                     {"halt_reason", to_string(o.halt_reason)}};
  if (o.final_synthesis) j["final_synthesis"] = *o.final_synthesis;
  if (!o.error_message.empty()) j["error_message"] = o.error_message;
}

inline void from_json(const nlohmann::json& j, RunOutcome& o) {
  j.at("iterations_attempted").get_to(o.iterations_attempted);
  j.at("iterations_accepted").get_to(o.iterations_accepted);
  j.at("novelty_score").get_to(o.novelty_score);
  o.halt_reason = halt_reason_from_string(j.at("halt_reason").get<std::string>());
  if (j.contains("final_synthesis"))
    o.final_synthesis = j.at("final_synthesis").get<Proposition>();
  else
    o.final_synthesis.reset();
  o.error_message = j.value("error_message", "");
}

}  // namespace dialectic
