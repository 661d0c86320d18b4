#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ragdepth/random.hpp"

namespace ragdepth::harness {

struct QAExample {
  std::string question;
  std::vector<std::string> answers;
  std::string gold_document;
  std::vector<std::string> distracting_documents;
  // Filled by validation; an example with violations is kept, not dropped.
  std::vector<std::string> violations;

  bool valid() const { return violations.empty(); }
};

struct Dataset {
  std::vector<QAExample> examples;
  std::vector<std::string> warnings;
};

// Case-insensitive substring search.
bool contains_answer(std::string_view text, const std::vector<std::string>& answers);

std::vector<std::string> validate_example(const QAExample& example);

// One JSON object per line with fields question, answers, gold, distractors.
// Blank lines are skipped.
Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const std::vector<QAExample>& examples);

// Templated factoid questions; every example passes validation.
std::vector<QAExample> gen_synthetic_qa(std::size_t n, Rng& rng, std::size_t distractors = 2);

}  // namespace ragdepth::harness
