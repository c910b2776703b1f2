#pragma once

/**
 * Prompt templates and response parsing.
 *
 * Four built-in templates drive the loop: one generates the antithesis, one
 * the synthesis, and two ask the judge panel its yes/no questions (soundness
 * of the synthesis step, novelty of the synthesis against the thesis).
 * Placeholders are {thesis}, {antithesis}, {synthesis}; anything else inside
 * braces is literal text. Rendering is a single left-to-right pass — bound
 * values are never re-expanded.
 *
 * The parser extracts labeled sections ("Summary of Antithesis", "Summary of
 * Synthesis (Next Thesis)", ...) from model responses. Headings tolerate
 * bold markers, trailing colons and case changes, because models decorate
 * them inconsistently. When no heading matches, the whole response is used
 * as the summary and flagged via parse_confidence = fallback.
 */

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dialectic/types.hpp"

namespace dialectic {

enum class TemplateId { antithesis, synthesis, soundness, novelty };

inline std::string to_string(TemplateId id) {
  switch (id) {
    case TemplateId::antithesis: return "antithesis";
    case TemplateId::synthesis: return "synthesis";
    case TemplateId::soundness: return "soundness";
    case TemplateId::novelty: return "novelty";
  }
  return "antithesis";
}

struct PromptTemplate {
  TemplateId id = TemplateId::antithesis;
  std::string body;
};

struct TemplateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// A placeholder is {name} with name in [A-Za-z_]+; anything else is literal.
inline bool is_placeholder_at(const std::string& body, std::size_t open,
                              std::string& name_out, std::size_t& close_out) {
  std::size_t i = open + 1;
  while (i < body.size() && (std::isalpha(static_cast<unsigned char>(body[i])) || body[i] == '_'))
    ++i;
  if (i == open + 1 || i >= body.size() || body[i] != '}') return false;
  name_out = body.substr(open + 1, i - open - 1);
  close_out = i;
  return true;
}

}  // namespace detail

inline std::vector<std::string> placeholders_of(const std::string& body) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{') continue;
    std::string name;
    std::size_t close;
    if (detail::is_placeholder_at(body, i, name, close)) {
      names.push_back(name);
      i = close;
    }
  }
  return names;
}

// Rejects templates naming anything other than the three recognized slots.
inline void validate_template(const PromptTemplate& tmpl) {
  for (const auto& name : placeholders_of(tmpl.body)) {
    if (name != "thesis" && name != "antithesis" && name != "synthesis") {
      throw TemplateError("unknown placeholder {" + name + "} in template '" +
                          to_string(tmpl.id) + "'");
    }
  }
}

// Single pass, left to right; inserted bindings are not re-scanned.
inline std::string render(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& bindings) {
  std::string out;
  out.reserve(tmpl.body.size());
  const std::string& body = tmpl.body;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '{') {
      std::string name;
      std::size_t close;
      if (detail::is_placeholder_at(body, i, name, close)) {
        auto it = bindings.find(name);
        if (it == bindings.end()) {
          throw TemplateError("missing binding for placeholder {" + name +
                              "} in template '" + to_string(tmpl.id) + "'");
        }
        out += it->second;
        i = close;
        continue;
      }
    }
    out.push_back(body[i]);
  }
  return out;
}

struct TemplateSet {
  PromptTemplate antithesis;
  PromptTemplate synthesis;
  PromptTemplate soundness;
  PromptTemplate novelty;

  const PromptTemplate& get(TemplateId id) const {
    switch (id) {
      case TemplateId::antithesis: return antithesis;
      case TemplateId::synthesis: return synthesis;
      case TemplateId::soundness: return soundness;
      case TemplateId::novelty: return novelty;
    }
    return antithesis;
  }
};

inline TemplateSet builtin_templates() {
  TemplateSet set;
  set.antithesis = PromptTemplate{
      TemplateId::antithesis,
      "You are following Hegel's dialectical method.\n"
      "You have access to a Thesis.\n"
      "\n"
      "Your task:\n"
      "1. Read the Thesis below.\n"
      "2. Imagine you are someone X, who has an orthogonal OR diametrically "
      "opposed perspective on the same topic.\n"
      "3. Produce a competing thesis that is self-consistent, follows an "
      "argumentative structure, and contradicts the Thesis.\n"
      "4. Include novel, opinionated perspectives or angles beyond what has "
      "been stated.\n"
      "5. Provide a concise \"Summary of Antithesis\" at the end.\n"
      "\n"
      "Format for your response:\n"
      "Premises:\n"
      "- Premise 1\n"
      "- Premise 2\n"
      "- (... as many premises as needed)\n"
      "Reasoning:\n"
      "Explain how these premises contradict or challenge the Thesis, adding "
      "original, opinionated perspectives\n"
      "Conclusion:\n"
      "The final claim that directly opposes or contradicts the Thesis\n"
      "Antithesis:\n"
      "Summary of Antithesis:\n"
      "One- or two-sentence summary capturing the essence of this Antithesis\n"
      "\n"
      "Thesis: {thesis}"};
  set.synthesis = PromptTemplate{
      TemplateId::synthesis,
      "You are following Hegel's dialectical method.\n"
      "You have access to the summary of the previous conversations, "
      "including the Thesis and Antithesis.\n"
      "\n"
      "Your task:\n"
      "1. Read the Thesis and Antithesis below.\n"
      "2. Produce a Synthesis that either:\n"
      "- Qualifies the contradictory statements so that Thesis and Antithesis "
      "unify without contradiction, OR\n"
      "- Negates contradictory statements, explicitly listing which ones are "
      "negated and explaining why.\n"
      "3. Present a coherent, integrated perspective that resolves or "
      "clarifies these contradictions.\n"
      "4. Provide a short \"Summary of Synthesis\" statement, which will be "
      "used as the next Thesis.\n"
      "\n"
      "Format for your response:\n"
      "Thesis UNION Antithesis:\n"
      "Premises:\n"
      "- Premise 1\n"
      "- Premise 2\n"
      "- (... as many premises as needed)\n"
      "Reasoning:\n"
      "Conclusion:\n"
      "Synthesis:\n"
      "Detailed explanation of how you integrated or negated contradictions. "
      "Include any new perspectives gleaned from the conversation if "
      "relevant.\n"
      "- If qualifying contradictions, detail how they are harmonized.\n"
      "- If negating specific statements, list them and briefly explain why.\n"
      "- If both are lacking an important premise, introduce that confounding "
      "or missing premise.\n"
      "- Explain how this new perspective leads to a coherent, possibly novel "
      "position.\n"
      "Summary of Synthesis (Next Thesis):\n"
      "One- or two-sentence statement that unifies the positions and serves "
      "as the next Thesis.\n"
      "\n"
      "Thesis: {thesis}\n"
      "Antithesis: {antithesis}"};
  set.soundness = PromptTemplate{
      TemplateId::soundness,
      "You are following Hegel's dialectical method.\n"
      "You have access to the Thesis and Antithesis.\n"
      "\n"
      "Your task:\n"
      "1. Read the Thesis and Antithesis below.\n"
      "2. Check whether Synthesis either:\n"
      "- Qualifies the contradictory statements so that Thesis and Antithesis "
      "unify without contradiction, OR\n"
      "- Negates contradictory statements, explicitly listing which ones are "
      "negated and explaining why.\n"
      "3. Check whether synthesis present a coherent, integrated perspective "
      "that resolves or clarifies these contradictions.\n"
      "\n"
      "Keeping all this in consideration, please assess whether the synthesis "
      "provided, derived from thesis and antithesis texts, adheres to the "
      "synthesis process. Reply with 'yes' if it is true and 'no' if it is "
      "not.\n"
      "\n"
      "Source Text 1: {thesis},\n"
      "Source Text 2: {antithesis},\n"
      "Synthesized Text: {synthesis}.\n"
      "Response (yes/no):"};
  set.novelty = PromptTemplate{
      TemplateId::novelty,
      "Please assess whether the source text is novel in comparison to the "
      "target text. Here novelty means the source contains new information "
      "that is not identical to the target. Reply with \"yes\" if it is "
      "novel and \"no\" if it is not.\n"
      "Source Text: {synthesis},\n"
      "Target Text: {thesis}.\n"
      "Response (yes/no):"};
  validate_template(set.antithesis);
  validate_template(set.synthesis);
  validate_template(set.soundness);
  validate_template(set.novelty);
  return set;
}

// Overlays builtin bodies with <id>.txt files from dir, when present.
inline TemplateSet load_templates(const std::filesystem::path& dir) {
  TemplateSet set = builtin_templates();
  auto overlay = [&](PromptTemplate& tmpl) {
    std::filesystem::path file = dir / (to_string(tmpl.id) + ".txt");
    if (!std::filesystem::exists(file)) return;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw TemplateError("cannot read template file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    tmpl.body = buf.str();
    validate_template(tmpl);
  };
  overlay(set.antithesis);
  overlay(set.synthesis);
  overlay(set.soundness);
  overlay(set.novelty);
  return set;
}

// ---------------------------------------------------------------------------
// Section parsing

// One labeled region of a raw response, as offsets so the original text is
// always reconstructible: raw[0, first heading) + each [heading_begin, end).
struct SectionSpan {
  std::string label;          // canonical label, e.g. "Summary of Antithesis"
  std::size_t heading_begin;  // start of the heading line
  std::size_t body_begin;     // just past the heading marker / colon
  std::size_t end;            // start of the next heading, or raw size
};

struct ParsedSections {
  std::vector<SectionSpan> sections;
  std::size_t preamble_end = 0;  // raw[0, preamble_end) precedes any heading
};

namespace detail {

// Longest first, so "Summary of Synthesis (Next Thesis)" wins over
// "Summary of Synthesis" and "Thesis UNION Antithesis" over "Thesis".
inline const std::vector<std::string>& known_labels() {
  static const std::vector<std::string> labels = {
      "Summary of Synthesis (Next Thesis)",
      "Thesis UNION Antithesis",
      "Summary of Synthesis",
      "Summary of Antithesis",
      "Antithesis",
      "Synthesis",
      "Premises",
      "Reasoning",
      "Conclusion",
      "Thesis",
  };
  return labels;
}

inline bool is_markup(char c) { return c == '*' || c == '_' || c == '#'; }

// Matches label at pos, case-insensitively, allowing any horizontal
// whitespace run where the label has a single space. Returns end position.
inline bool match_label(const std::string& text, std::size_t pos,
                        const std::string& label, std::size_t& end_out) {
  std::size_t i = pos;
  for (std::size_t k = 0; k < label.size(); ++k) {
    if (label[k] == ' ') {
      if (i >= text.size() || (text[i] != ' ' && text[i] != '\t')) return false;
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    } else {
      if (i >= text.size()) return false;
      char a = static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
      char b = static_cast<char>(std::tolower(static_cast<unsigned char>(label[k])));
      if (a != b) return false;
      ++i;
    }
  }
  end_out = i;
  return true;
}

// Tries to read a heading at the start of the line beginning at line_begin.
// Grammar: ^[ \t]* [markup]* LABEL [markup or space]* (':' | EOL)
inline std::optional<SectionSpan> match_heading(const std::string& text,
                                                std::size_t line_begin,
                                                std::size_t line_end) {
  std::size_t i = line_begin;
  while (i < line_end && (text[i] == ' ' || text[i] == '\t')) ++i;
  while (i < line_end && is_markup(text[i])) ++i;
  while (i < line_end && (text[i] == ' ' || text[i] == '\t')) ++i;
  for (const auto& label : known_labels()) {
    std::size_t after = 0;
    if (!match_label(text, i, label, after) || after > line_end) continue;
    std::size_t j = after;
    while (j < line_end && (is_markup(text[j]) || text[j] == ' ' || text[j] == '\t')) ++j;
    if (j < line_end && text[j] == ':') {
      ++j;  // body starts right after the colon, same line
      return SectionSpan{label, line_begin, j, text.size()};
    }
    if (j == line_end) {  // bare heading line, body starts next line
      return SectionSpan{label, line_begin, std::min(line_end + 1, text.size()),
                         text.size()};
    }
  }
  return std::nullopt;
}

inline std::string trim_copy(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

inline ParsedSections parse_sections(const std::string& raw) {
  ParsedSections out;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t line_end = raw.find('\n', pos);
    if (line_end == std::string::npos) line_end = raw.size();
    if (auto span = detail::match_heading(raw, pos, line_end)) {
      if (!out.sections.empty()) out.sections.back().end = span->heading_begin;
      out.sections.push_back(*span);
    }
    if (line_end == raw.size()) break;
    pos = line_end + 1;
  }
  out.preamble_end = out.sections.empty() ? raw.size() : out.sections.front().heading_begin;
  return out;
}

// Trimmed body text of a section; always a substring of raw.
inline std::string section_text(const std::string& raw, const SectionSpan& span) {
  return detail::trim_copy(raw.substr(span.body_begin, span.end - span.body_begin));
}

namespace detail {

inline Proposition parse_with_labels(const std::string& raw, PropositionKind kind,
                                     const std::vector<std::string>& summary_labels) {
  if (trim_copy(raw).empty())
    throw std::invalid_argument("empty response: nothing to parse");
  ParsedSections sections = parse_sections(raw);
  for (const auto& span : sections.sections) {
    for (const auto& wanted : summary_labels) {
      if (span.label != wanted) continue;
      std::string body = section_text(raw, span);
      if (body.empty()) continue;  // heading with nothing under it
      Proposition p;
      p.kind = kind;
      p.full_text = raw;
      p.summary = body;
      p.raw_response = raw;
      p.parse_confidence = ParseConfidence::structured;
      return p;
    }
  }
  Proposition p;
  p.kind = kind;
  p.full_text = raw;
  p.summary = raw;  // fallback keeps the chain alive; flagged for reporting
  p.raw_response = raw;
  p.parse_confidence = ParseConfidence::fallback;
  return p;
}

}  // namespace detail

inline Proposition parse_antithesis(const std::string& raw) {
  return detail::parse_with_labels(raw, PropositionKind::antithesis,
                                   {"Summary of Antithesis"});
}

inline Proposition parse_synthesis(const std::string& raw) {
  return detail::parse_with_labels(
      raw, PropositionKind::synthesis,
      {"Summary of Synthesis (Next Thesis)", "Summary of Synthesis"});
}

}  // namespace dialectic
