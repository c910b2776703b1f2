#pragma once

/// Where iteration records go as a run produces them. The file-backed
/// implementation lives in store.hpp; MemorySink serves tests and replay.

#include <stdexcept>
#include <vector>

#include "dialectic/types.hpp"

namespace dialectic {

class TranscriptSink {
 public:
  virtual ~TranscriptSink() = default;
  virtual void append_iteration(const IterationRecord& record) = 0;
  virtual void finalize(const RunOutcome& outcome) = 0;
};

class MemorySink : public TranscriptSink {
 public:
  void append_iteration(const IterationRecord& record) override {
    if (finalized_) throw std::logic_error("sink already finalized");
    if (record.index != static_cast<int>(records_.size()))
      throw std::logic_error("iteration index gap");
    records_.push_back(record);
  }

  void finalize(const RunOutcome& outcome) override {
    if (finalized_) throw std::logic_error("sink already finalized");
    outcome_ = outcome;
    finalized_ = true;
  }

  const std::vector<IterationRecord>& records() const { return records_; }
  const RunOutcome& outcome() const {
    if (!finalized_) throw std::logic_error("run not finalized");
    return outcome_;
  }
  bool finalized() const { return finalized_; }

 private:
  std::vector<IterationRecord> records_;
  RunOutcome outcome_;
  bool finalized_ = false;
};

}  // namespace dialectic
