#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ragdepth/harness/dataset.hpp"

namespace ragdepth::harness {

inline constexpr std::string_view kInstructionQueryAhead =
    "You are given a question and you MUST respond with a short answer (max 5 tokens) based on "
    "the provided documents. If none of the documents contain the answer and you do not know the "
    "answer, please respond with NO-RES.";

inline constexpr std::string_view kInstructionQueryAfter =
    "You are given a question and you MUST respond with a short answer (max 5 tokens) based on "
    "the provided documents. If none of the documents contain the answer and you do not know the "
    "answer, please respond with NO-RES. The question will be presented both before and after "
    "the documents.";

enum class QueryOrder { QueryFirst, QueryLast, QueryBoth };

std::string to_string(QueryOrder order);
QueryOrder parse_query_order(std::string_view s);

struct PromptLayout {
  QueryOrder order = QueryOrder::QueryFirst;
  // 0 means gold only.
  std::size_t distractors = 0;

  std::string_view instruction() const;
  // e.g. "query_both+gold+2dis"
  std::string label() const;
  bool operator==(const PromptLayout&) const = default;
};

PromptLayout parse_layout(std::string_view label);

struct Message {
  std::string role;
  std::string content;
  bool operator==(const Message&) const = default;
};

// Instruction as a system message, then question and documents as user
// messages. Gold first, then distractors in dataset order.
std::vector<Message> assemble_prompt(const QAExample& example, const PromptLayout& layout);

// Canonical text form used for golden files.
std::string render_prompt(const std::vector<Message>& messages);

}  // namespace ragdepth::harness
