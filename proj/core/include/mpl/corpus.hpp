#pragma once

#include <string>
#include <vector>

namespace mpl {

// A self-contained worked example: either a triple to verify against an
// expected verdict, or a scripted play whose final state is asserted.
struct CorpusEntry {
  enum class Kind { Verify, Simulate };

  std::string name;
  Kind kind = Kind::Verify;
  const char* note = "";
  const char* mechanism = "";
  const char* interpretation = "";  // JSON document

  // Verify
  const char* pre = "";
  const char* post = "";
  const char* expected = "";  // "valid" | "invalid" | "inexact"
  int depth_cap = 0;          // 0 = library default

  // Simulate
  const char* script = "";        // one binding group per choice point, ';'-separated
  const char* expect_final = "";  // bindings the final state must contain
};

const std::vector<CorpusEntry>& corpus_entries();

struct CorpusReport {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs every entry, concurrently unless told otherwise; reports come back in
// corpus order.
std::vector<CorpusReport> run_corpus(bool parallel = true);

}  // namespace mpl
