#pragma once

/**
 * Multi-agent majority voting over the synthesis.
 *
 * Each judge model is asked two yes/no questions — novelty first (is the
 * synthesis new information relative to the thesis?), then validity (does it
 * adhere to the synthesis process?). Each question takes its own strict
 * majority: yes wins only when yes votes outnumber no votes; unparseable
 * replies count toward neither side; ties reject. An iteration is accepted
 * only when both majorities are yes.
 */

#include <cctype>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dialectic/backend.hpp"
#include "dialectic/prompts.hpp"
#include "dialectic/types.hpp"

namespace dialectic {

// Normalizes a free-form judge reply to yes/no/unparseable. The leading
// word wins; failing that, a reply mentioning exactly one of the two words
// (on word boundaries, so "novel" never reads as "no") counts as that word.
inline VoteAnswer parse_vote(const std::string& raw) {
  std::vector<std::string> words;
  std::string current;
  for (char ch : raw) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  if (words.empty()) return VoteAnswer::unparseable;
  if (words.front() == "yes") return VoteAnswer::yes;
  if (words.front() == "no") return VoteAnswer::no;
  int yes_seen = 0, no_seen = 0;
  for (const auto& w : words) {
    if (w == "yes") ++yes_seen;
    if (w == "no") ++no_seen;
  }
  if (yes_seen > 0 && no_seen == 0) return VoteAnswer::yes;
  if (no_seen > 0 && yes_seen == 0) return VoteAnswer::no;
  return VoteAnswer::unparseable;
}

// Strict majority: yes only when yes votes outnumber no votes. Unparseable
// votes are neutral, so ties — including all-unparseable panels — reject.
inline MajorityVote majority(const std::vector<Vote>& votes) {
  if (votes.empty()) throw std::invalid_argument("empty panel: no votes to count");
  int yes = 0, no = 0;
  for (const auto& v : votes) {
    if (v.parsed == VoteAnswer::yes) ++yes;
    if (v.parsed == VoteAnswer::no) ++no;
  }
  return yes > no ? MajorityVote::yes : MajorityVote::no;
}

inline PanelVerdict make_panel_verdict(std::vector<Vote> votes) {
  PanelVerdict verdict;
  verdict.majority = majority(votes);
  for (const auto& v : votes) {
    switch (v.parsed) {
      case VoteAnswer::yes: ++verdict.counted_yes; break;
      case VoteAnswer::no: ++verdict.counted_no; break;
      case VoteAnswer::unparseable: ++verdict.unparseable; break;
    }
  }
  verdict.votes = std::move(votes);
  return verdict;
}

// A panel of judge models that can be asked one rendered question at a time.
class VoterPanel {
 public:
  virtual ~VoterPanel() = default;
  virtual std::vector<std::string> models() const = 0;
  // Returns the judge's raw reply text; throws BackendError on failure.
  virtual std::string ask(const std::string& model, VoteQuestion question,
                          const std::string& prompt,
                          const std::string& request_tag) = 0;
};

// Panel whose judges share one generation backend. Judges answer at
// temperature 0 — the sampling knobs under study belong to the core model,
// and deterministic judging keeps runs reproducible.
class BackendPanel : public VoterPanel {
 public:
  BackendPanel(std::shared_ptr<GenerationBackend> backend,
               std::vector<std::string> models)
      : backend_(std::move(backend)), models_(std::move(models)) {
    if (models_.empty()) throw std::invalid_argument("panel needs at least one model");
  }

  std::vector<std::string> models() const override { return models_; }

  std::string ask(const std::string& model, VoteQuestion, const std::string& prompt,
                  const std::string& request_tag) override {
    GenerationRequest request;
    request.model = model;
    request.prompt = prompt;
    request.temperature = 0.0;
    request.request_tag = request_tag;
    return backend_->generate(request).text;
  }

 private:
  std::shared_ptr<GenerationBackend> backend_;
  std::vector<std::string> models_;
};

// Runs Algorithm 2 against the panel: per judge, novelty then validity.
// A failed judge call becomes an unparseable vote carrying the error text
// rather than aborting the whole panel; if every judge fails a question the
// assessment is rejected with a diagnostic.
inline MamvAssessment assess(const Proposition& thesis,
                             const Proposition& antithesis,
                             const Proposition& synthesis, VoterPanel& panel,
                             const TemplateSet& templates,
                             const std::string& tag_prefix = "mamv") {
  if (thesis.full_text.empty() || antithesis.full_text.empty() ||
      synthesis.full_text.empty()) {
    throw std::invalid_argument("assess requires non-empty propositions");
  }
  std::string novelty_prompt =
      render(templates.novelty,
             {{"synthesis", synthesis.full_text}, {"thesis", thesis.full_text}});
  std::string soundness_prompt = render(templates.soundness,
                                        {{"thesis", thesis.full_text},
                                         {"antithesis", antithesis.full_text},
                                         {"synthesis", synthesis.full_text}});
  std::vector<Vote> novelty_votes;
  std::vector<Vote> validity_votes;
  auto ask_one = [&](const std::string& model, VoteQuestion question,
                     const std::string& prompt) {
    Vote vote;
    vote.voter_model = model;
    vote.question = question;
    try {
      vote.raw_text = panel.ask(model, question, prompt,
                                tag_prefix + "/" + to_string(question) + "/" + model);
      vote.parsed = parse_vote(vote.raw_text);
    } catch (const BackendError& err) {
      vote.parsed = VoteAnswer::unparseable;
      vote.error = err.what();
    }
    return vote;
  };
  for (const auto& model : panel.models()) {
    novelty_votes.push_back(ask_one(model, VoteQuestion::novelty, novelty_prompt));
    validity_votes.push_back(ask_one(model, VoteQuestion::validity, soundness_prompt));
  }

  MamvAssessment out;
  out.novelty = make_panel_verdict(std::move(novelty_votes));
  out.validity = make_panel_verdict(std::move(validity_votes));
  auto all_errored = [](const PanelVerdict& verdict) {
    for (const auto& v : verdict.votes)
      if (v.error.empty()) return false;
    return true;
  };
  if (all_errored(out.novelty)) {
    out.diagnostics = "every judge failed the novelty question";
  } else if (all_errored(out.validity)) {
    out.diagnostics = "every judge failed the validity question";
  }
  // An all-errored question yields all-unparseable votes, hence a no
  // majority — the conjunction below already rejects it.
  out.accepted = out.validity.majority == MajorityVote::yes &&
                 out.novelty.majority == MajorityVote::yes;
  return out;
}

// Fraction of attempted iterations whose novelty majority was yes.
inline double novelty_score(const std::vector<IterationRecord>& records) {
  if (records.empty())
    throw std::invalid_argument("novelty_score needs at least one record");
  int novel = 0;
  for (const auto& r : records)
    if (r.novelty_verdict.majority == MajorityVote::yes) ++novel;
  return static_cast<double>(novel) / static_cast<double>(records.size());
}

}  // namespace dialectic
