#include "ragdepth/harness/prompt.hpp"

#include "json.hpp"

#include "ragdepth/errors.hpp"

namespace ragdepth::harness {

std::string to_string(QueryOrder order) {
  switch (order) {
    case QueryOrder::QueryFirst: return "query_first";
    case QueryOrder::QueryLast: return "query_last";
    case QueryOrder::QueryBoth: return "query_both";
  }
  return "?";
}

QueryOrder parse_query_order(std::string_view s) {
  if (s == "query_first") return QueryOrder::QueryFirst;
  if (s == "query_last") return QueryOrder::QueryLast;
  if (s == "query_both") return QueryOrder::QueryBoth;
  throw ConfigError("unknown query order '" + std::string(s) + "'");
}

std::string_view PromptLayout::instruction() const {
  return order == QueryOrder::QueryFirst ? kInstructionQueryAhead : kInstructionQueryAfter;
}

std::string PromptLayout::label() const {
  std::string s = to_string(order) + "+gold";
  if (distractors > 0) s += "+" + std::to_string(distractors) + "dis";
  return s;
}

PromptLayout parse_layout(std::string_view label) {
  PromptLayout layout;
  const auto plus = label.find('+');
  layout.order = parse_query_order(label.substr(0, plus));
  if (plus == std::string_view::npos) return layout;
  std::string_view rest = label.substr(plus + 1);
  if (rest.substr(0, 4) != "gold") throw ConfigError("bad layout '" + std::string(label) + "'");
  rest.remove_prefix(4);
  if (rest.empty()) return layout;
  if (rest.front() != '+' || rest.size() < 5 || rest.substr(rest.size() - 3) != "dis") {
    throw ConfigError("bad layout '" + std::string(label) + "'");
  }
  const std::string digits(rest.substr(1, rest.size() - 4));
  try {
    std::size_t used = 0;
    const long k = std::stol(digits, &used);
    if (used != digits.size() || k < 1) throw std::invalid_argument("k");
    layout.distractors = static_cast<std::size_t>(k);
  } catch (const std::exception&) {
    throw ConfigError("bad distractor count in layout '" + std::string(label) + "'");
  }
  return layout;
}

std::vector<Message> assemble_prompt(const QAExample& example, const PromptLayout& layout) {
  if (layout.distractors > example.distracting_documents.size()) {
    throw ConfigError("layout " + layout.label() + " needs " + std::to_string(layout.distractors) +
                      " distractors, example has " +
                      std::to_string(example.distracting_documents.size()));
  }
  std::vector<Message> out;
  out.push_back({"system", std::string(layout.instruction())});
  const Message question{"user", "Question: " + example.question};
  if (layout.order != QueryOrder::QueryLast) out.push_back(question);
  out.push_back({"user", "Document [1]: " + example.gold_document});
  for (std::size_t k = 0; k < layout.distractors; ++k) {
    out.push_back({"user", "Document [" + std::to_string(k + 2) + "]: " +
                               example.distracting_documents[k]});
  }
  if (layout.order != QueryOrder::QueryFirst) out.push_back(question);
  return out;
}

std::string render_prompt(const std::vector<Message>& messages) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& m : messages) j.push_back({{"role", m.role}, {"content", m.content}});
  return j.dump(2) + "\n";
}

}  // namespace ragdepth::harness
