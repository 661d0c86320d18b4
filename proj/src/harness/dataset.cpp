#include "ragdepth/harness/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include "json.hpp"
#include <ostream>

#include "ragdepth/errors.hpp"

namespace ragdepth::harness {

using json = nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string> string_array(const json& j, const char* field, std::size_t line) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    throw ParseError(std::string("field '") + field + "' must be an array of strings", line);
  }
  std::vector<std::string> out;
  for (const auto& v : j.at(field)) {
    if (!v.is_string()) throw ParseError(std::string("field '") + field + "' must hold strings", line);
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string string_field(const json& j, const char* field, std::size_t line) {
  if (!j.contains(field) || !j.at(field).is_string()) {
    throw ParseError(std::string("field '") + field + "' must be a string", line);
  }
  return j.at(field).get<std::string>();
}

}  // namespace

bool contains_answer(std::string_view text, const std::vector<std::string>& answers) {
  const std::string hay = lower(text);
  return std::any_of(answers.begin(), answers.end(), [&](const std::string& a) {
    return !a.empty() && hay.find(lower(a)) != std::string::npos;
  });
}

std::vector<std::string> validate_example(const QAExample& example) {
  std::vector<std::string> v;
  if (example.answers.empty()) v.push_back("no answers");
  if (!contains_answer(example.gold_document, example.answers)) v.push_back("gold lacks answer");
  for (std::size_t i = 0; i < example.distracting_documents.size(); ++i) {
    if (contains_answer(example.distracting_documents[i], example.answers)) {
      v.push_back("distractor " + std::to_string(i) + " contains answer");
    }
  }
  return v;
}

Dataset parse_dataset(std::istream& in) {
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("record must be a JSON object", line_no);
    QAExample ex;
    ex.question = string_field(j, "question", line_no);
    ex.answers = string_array(j, "answers", line_no);
    if (ex.answers.empty()) throw ParseError("answers must be non-empty", line_no);
    ex.gold_document = string_field(j, "gold", line_no);
    ex.distracting_documents = string_array(j, "distractors", line_no);
    ex.violations = validate_example(ex);
    for (const auto& v : ex.violations) {
      ds.warnings.push_back("line " + std::to_string(line_no) + ": " + v);
    }
    ds.examples.push_back(std::move(ex));
  }
  if (ds.examples.empty()) ds.warnings.push_back("dataset is empty");
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path.string());
  return parse_dataset(in);
}

void write_dataset(std::ostream& out, const std::vector<QAExample>& examples) {
  for (const auto& ex : examples) {
    json j = {{"question", ex.question},
              {"answers", ex.answers},
              {"gold", ex.gold_document},
              {"distractors", ex.distracting_documents}};
    out << j.dump() << '\n';
  }
}

namespace {

struct Fact {
  const char* subject;
  const char* relation;
  const char* answer;
};

constexpr std::array<Fact, 12> kFacts{{
    {"Alvoria", "capital", "Merrowick"},
    {"Brennland", "capital", "Ostgard"},
    {"Castavel", "capital", "Lunebridge"},
    {"Dunmarrow", "capital", "Quillhaven"},
    {"Eskareth", "capital", "Tamsford"},
    {"Felthorne", "capital", "Varnholt"},
    {"Gallowen", "capital", "Sirecliff"},
    {"Hestmoor", "capital", "Ardwyn"},
    {"Istrava", "capital", "Pellmark"},
    {"Jorvane", "capital", "Cobbleton"},
    {"Kestrelia", "capital", "Dravemoor"},
    {"Lothmere", "capital", "Yarrowby"},
}};

constexpr std::array<const char*, 4> kFillers{
    "is known for its river trade and wool markets.",
    "has a long coastline with several fishing villages.",
    "was mapped in detail during the last survey.",
    "hosts an annual festival in early spring.",
};

}  // namespace

std::vector<QAExample> gen_synthetic_qa(std::size_t n, Rng& rng, std::size_t distractors) {
  detail::require(n >= 1, "need at least one example");
  detail::require(distractors < kFacts.size(), "too many distractors requested");
  std::vector<QAExample> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t f = rng.index(kFacts.size());
    const Fact& fact = kFacts[f];
    QAExample ex;
    ex.question = std::string("What is the ") + fact.relation + " of " + fact.subject + "?";
    ex.answers = {fact.answer};
    ex.gold_document = std::string(fact.subject) + " " + kFillers[rng.index(kFillers.size())] +
                       " Its " + fact.relation + " is " + fact.answer + ".";
    // Distractors talk about the same subject or other facts, never this answer.
    for (std::size_t d = 0; d < distractors; ++d) {
      std::size_t o = rng.index(kFacts.size() - 1);
      if (o >= f) ++o;
      const Fact& other = kFacts[o];
      if (d % 2 == 0) {
        ex.distracting_documents.push_back(std::string(fact.subject) + " " +
                                           kFillers[rng.index(kFillers.size())]);
      } else {
        ex.distracting_documents.push_back(std::string("The ") + other.relation + " of " +
                                           other.subject + " is " + other.answer + ".");
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace ragdepth::harness
