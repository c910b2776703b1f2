#pragma once

// Fixed 50-item corpus of model-reply shapes: well-formatted responses with
// every heading decoration we tolerate (asterisks, bold, markdown hashes,
// trailing colons, shuffled case, stray whitespace) plus degenerate replies
// (bare paragraphs, judge-style yes/no lines, emoji, wrong-section text).
// Every extracted summary must be a substring of the raw reply; the variant
// forms must parse as structured rather than fallback.

#include <string>
#include <vector>

namespace corpus {

enum class Parser { antithesis, synthesis };

struct Item {
  std::string raw;
  Parser parser;
  bool expect_structured;
};

inline const std::vector<Item>& items() {
  static const std::vector<Item> all = {
      // --- antithesis replies, structured variants -------------------------
      {"Premises:\n- Energy transfer is observed in fixed amounts.\n"
       "Reasoning:\nBlackbody radiation defies continuous models.\n"
       "Conclusion:\nEnergy is quantized.\nAntithesis:\nFull opposing text.\n"
       "Summary of Antithesis:\nEnergy is quantized, not continuous.",
       Parser::antithesis, true},
      {"Summary of Antithesis: a compact counterclaim on one line.",
       Parser::antithesis, true},
      {"*Summary of Antithesis*: Energy, contrary to the traditional view, is "
       "a discrete phenomenon.",
       Parser::antithesis, true},
      {"**Summary of Antithesis:** markets are inherently unstable.",
       Parser::antithesis, true},
      {"## Summary of Antithesis\nMarkdown-heading style counterclaim.",
       Parser::antithesis, true},
      {"SUMMARY OF ANTITHESIS: the shouted counterclaim.", Parser::antithesis,
       true},
      {"summary of antithesis:\nthe lowercase counterclaim.",
       Parser::antithesis, true},
      {"  Summary of Antithesis :  spaced colon form.", Parser::antithesis,
       true},
      {"Some preamble the model insisted on writing first.\n\n"
       "Summary of Antithesis:\nThe counterclaim, stated plainly.",
       Parser::antithesis, true},
      {"Summary Of Antithesis: Mixed Case Words Everywhere.",
       Parser::antithesis, true},
      {"_Summary of Antithesis_: underscore-decorated counterclaim.",
       Parser::antithesis, true},
      {"Summary of Antithesis:\nFirst summary line.\nSecond summary line.",
       Parser::antithesis, true},
      {"Summary of Antithesis:\nThe core counterclaim.\nConclusion:\n"
       "Restated conclusion after the summary.",
       Parser::antithesis, true},
      {"\tSummary of Antithesis: tab-indented heading.", Parser::antithesis,
       true},
      {"Summary  of   Antithesis: label with uneven internal spacing.",
       Parser::antithesis, true},
      {"***Summary of Antithesis***: triple-starred claim.",
       Parser::antithesis, true},
      {"sUmMaRy Of AnTiThEsIs: ransom-note casing.", Parser::antithesis, true},
      {"Reasoning:\nLong chain of argument.\nSummary of Antithesis\n"
       "Bare heading with body on the next line.",
       Parser::antithesis, true},

      // --- antithesis replies, degenerate (fallback) -----------------------
      {"A bare paragraph with no recognizable format at all.",
       Parser::antithesis, false},
      {"Summary of Antithesis:", Parser::antithesis, false},
      {"The antithesis rejects the thesis entirely, but never labels itself.",
       Parser::antithesis, false},
      {"- bullet one\n- bullet two\n- bullet three", Parser::antithesis,
       false},
      {"I cannot assess this request.", Parser::antithesis, false},
      {"Sure! Here's my response:\nEnergy must be discrete.",
       Parser::antithesis, false},
      {"Summary of Synthesis (Next Thesis):\nWrong section for this parser.",
       Parser::antithesis, false},
      {"   padded reply with no structure   ", Parser::antithesis, false},

      // --- synthesis replies, structured variants --------------------------
      {"*Summary of Synthesis (Next Thesis)*: Energy behaves as both a "
       "continuous quantity in classical contexts and discrete packets at "
       "quantum scales.",
       Parser::synthesis, true},
      {"Summary of Synthesis (Next Thesis):\nThe unified view in one "
       "sentence.",
       Parser::synthesis, true},
      {"Summary of Synthesis: the suffix-free variant.", Parser::synthesis,
       true},
      {"SUMMARY OF SYNTHESIS (NEXT THESIS): the loud unified claim.",
       Parser::synthesis, true},
      {"**Summary of Synthesis (Next Thesis):** bolded unified claim.",
       Parser::synthesis, true},
      {"Thesis UNION Antithesis:\nPremises:\n- A\n- B\nReasoning:\nBecause.\n"
       "Conclusion:\nTherefore.\nSynthesis:\nLong integrated body.\n"
       "Summary of Synthesis (Next Thesis):\nThe reconciled position.",
       Parser::synthesis, true},
      {"## Summary of Synthesis\nMarkdown-heading unified claim.",
       Parser::synthesis, true},
      {"Synthesis:\nBody only here.\nSummary of Synthesis:\nActual summary "
       "text.",
       Parser::synthesis, true},
      {"summary of synthesis (next thesis): lowercase unified claim.",
       Parser::synthesis, true},
      {"Summary of Synthesis (Next Thesis) :  spaced colon unified claim.",
       Parser::synthesis, true},
      {"_Summary of Synthesis_: underscore variant without suffix.",
       Parser::synthesis, true},
      {"Summary of Synthesis:\nShort one.\nSummary of Synthesis (Next "
       "Thesis):\nPreferred long one.",
       Parser::synthesis, true},
      {"Summary of Synthesis (Next Thesis):\r\nCRLF-terminated unified "
       "claim.",
       Parser::synthesis, true},
      {"#### summary of synthesis (next thesis)\ndeeply nested markdown "
       "heading.",
       Parser::synthesis, true},
      {"   Summary of Synthesis (Next Thesis): indented unified claim.",
       Parser::synthesis, true},

      // --- synthesis / judge replies, degenerate (fallback) ----------------
      {"yes", Parser::synthesis, false},
      {"No.", Parser::synthesis, false},
      {"yes, the synthesis adheres to the process.", Parser::synthesis,
       false},
      {"Response: no, nothing new was added.", Parser::synthesis, false},
      {"Je ne peux pas répondre à cette question.", Parser::synthesis, false},
      {"\xF0\x9F\x9A\x80\xF0\x9F\x9A\x80\xF0\x9F\x9A\x80", Parser::synthesis,
       false},
      {"Final synthesis **Summary of Synthesis (Next Thesis)** mid-line "
       "never counts as a heading.\nBody on the next line.",
       Parser::synthesis, false},
      {"Thesis: restated verbatim\nAntithesis: restated verbatim",
       Parser::synthesis, false},
      {"Summary of Synthesis (Next Thesis): ", Parser::synthesis, false},
  };
  return all;
}

}  // namespace corpus
