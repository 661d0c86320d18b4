#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "ragdepth/errors.hpp"
#include "ragdepth/harness/client.hpp"
#include "ragdepth/harness/dataset.hpp"
#include "ragdepth/harness/eval.hpp"
#include "ragdepth/harness/prompt.hpp"

using namespace ragdepth;
using namespace ragdepth::harness;

namespace {

const std::filesystem::path kData = RAGDEPTH_TEST_DATA_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string completion_body(const std::string& text) {
  return R"({"choices":[{"index":0,"message":{"role":"assistant","content":")" + text +
         R"("}}]})";
}

// Local chat-completions stand-in; `handler` sees every request.
class MockServer {
 public:
  explicit MockServer(std::function<void(const httplib::Request&, httplib::Response&)> handler)
      : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      last_auth = req.get_header_value("Authorization");
      handler_(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> hits{0};
  std::string last_auth;

 private:
  httplib::Server server_;
  std::function<void(const httplib::Request&, httplib::Response&)> handler_;
  int port_ = 0;
  std::thread thread_;
};

EndpointConfig test_endpoint(const std::string& url) {
  ::setenv("RAGDEPTH_TEST_KEY", "sk-test", 1);
  EndpointConfig cfg;
  cfg.base_url = url;
  cfg.api_key_env = "RAGDEPTH_TEST_KEY";
  cfg.initial_backoff = std::chrono::milliseconds(5);
  cfg.timeout = std::chrono::milliseconds(2000);
  return cfg;
}

std::vector<Message> sample_messages() { return {{"system", "s"}, {"user", "Question: q"}}; }

}  // namespace

TEST_CASE("fixture dataset loads and validates") {
  const auto ds = load_dataset(kData / "fixtures" / "qa_fixture.jsonl");
  REQUIRE(ds.examples.size() == 2);
  CHECK(ds.warnings.empty());
  CHECK(ds.examples[0].answers.size() == 2);
  CHECK(ds.examples[0].distracting_documents.size() == 3);
  for (const auto& ex : ds.examples) CHECK(ex.valid());
}

TEST_CASE("dataset parsing errors and warnings") {
  std::istringstream empty("");
  const auto e = parse_dataset(empty);
  CHECK(e.examples.empty());
  REQUIRE(e.warnings.size() == 1);

  std::istringstream bad_json("\n{\"question\": \"q\", \"answers\": [\"a\"], \"gold\": \"a\", \"distractors\": []}\n{oops\n");
  try {
    parse_dataset(bad_json);
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.line() == 3);
  }

  std::istringstream missing("{\"question\": \"q\", \"gold\": \"a\", \"distractors\": []}\n");
  CHECK_THROWS_AS(parse_dataset(missing), ParseError);
  std::istringstream no_answers("{\"question\": \"q\", \"answers\": [], \"gold\": \"a\", \"distractors\": []}\n");
  CHECK_THROWS_AS(parse_dataset(no_answers), ParseError);

  std::istringstream flawed(
      "{\"question\": \"q\", \"answers\": [\"Oskel\"], \"gold\": \"nothing here\", "
      "\"distractors\": [\"oskel again\", \"fine\"]}\n");
  const auto f = parse_dataset(flawed);
  REQUIRE(f.examples.size() == 1);
  CHECK(f.examples[0].violations.size() == 2);
  CHECK(f.warnings.size() == 2);

  CHECK_THROWS_AS(load_dataset(kData / "fixtures" / "does_not_exist.jsonl"), ConfigError);
}

TEST_CASE("synthetic examples round-trip through JSONL") {
  Rng rng(4);
  const auto exs = gen_synthetic_qa(1000, rng, 3);
  for (const auto& ex : exs) CHECK(validate_example(ex).empty());
  std::stringstream buf;
  write_dataset(buf, exs);
  const auto back = parse_dataset(buf);
  REQUIRE(back.examples.size() == 1000);
  CHECK(back.warnings.empty());
  for (std::size_t i = 0; i < exs.size(); ++i) {
    CHECK(back.examples[i].question == exs[i].question);
    CHECK(back.examples[i].answers == exs[i].answers);
    CHECK(back.examples[i].gold_document == exs[i].gold_document);
    CHECK(back.examples[i].distracting_documents == exs[i].distracting_documents);
  }
}

TEST_CASE("assembled prompts match golden files") {
  const auto ds = load_dataset(kData / "fixtures" / "qa_fixture.jsonl");
  int compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kData / "golden")) {
    const std::string name = entry.path().stem().string();
    const auto us = name.find('_');
    const std::size_t idx = std::stoul(name.substr(7, us - 7));
    std::string label = name.substr(us + 1);
    // Layout labels use '+' where file names use '_' between parts.
    const auto gold = label.find("_gold");
    label.replace(gold, 1, "+");
    if (const auto dis = label.find("_", gold + 1); dis != std::string::npos) label.replace(dis, 1, "+");
    CAPTURE(name);
    const auto layout = parse_layout(label);
    CHECK(layout.label() == label);
    CHECK(render_prompt(assemble_prompt(ds.examples.at(idx), layout)) == slurp(entry.path()));
    ++compared;
  }
  CHECK(compared == 9);
}

TEST_CASE("prompt structure") {
  const auto ds = load_dataset(kData / "fixtures" / "qa_fixture.jsonl");
  const auto& ex = ds.examples[0];
  const auto both = assemble_prompt(ex, {QueryOrder::QueryBoth, 2});
  CHECK(both.front().content == kInstructionQueryAfter);
  CHECK(std::count(both.begin(), both.end(), Message{"user", "Question: " + ex.question}) == 2);
  const auto first = assemble_prompt(ex, {QueryOrder::QueryFirst, 3});
  CHECK(first.front().content == kInstructionQueryAhead);
  CHECK(first.size() == 6);
  CHECK(first[1].content.rfind("Question: ", 0) == 0);
  const auto last = assemble_prompt(ex, {QueryOrder::QueryLast, 0});
  CHECK(last.back().content.rfind("Question: ", 0) == 0);
  CHECK(last.size() == 3);
  CHECK_THROWS_AS(assemble_prompt(ds.examples[1], {QueryOrder::QueryFirst, 3}), ConfigError);
  CHECK_THROWS(parse_layout("query_sideways+gold"));
  CHECK(parse_layout("query_both+gold+2dis") == PromptLayout{QueryOrder::QueryBoth, 2});
}

TEST_CASE("normalization and scoring") {
  CHECK(normalize("  Mira   Castellane. ") == "mira castellane");
  CHECK(normalize("NO-RES") == "nores");
  const std::vector<std::string> answers{"Mira Castellane", "M. Castellane"};
  CHECK(score("mira castellane", answers).matched);
  CHECK(score("It was Mira Castellane!", answers).matched);
  CHECK(score("M Castellane", answers).matched);
  CHECK_FALSE(score("Castellane", answers).matched);
  const auto abstain = score(" no-res. ", answers);
  CHECK(abstain.abstained);
  CHECK_FALSE(abstain.matched);
  // Abstention never counts as a match, even when the answer itself abstains.
  CHECK_FALSE(score("NO-RES", {"NO RES", "nores"}).matched);
  CHECK_FALSE(score("", answers).matched);
}

TEST_CASE("client retries transient statuses") {
  std::atomic<int> calls{0};
  MockServer server([&](const httplib::Request& req, httplib::Response& res) {
    if (calls++ < 2) {
      res.status = 429;
      return;
    }
    const auto body = nlohmann::json::parse(req.body);
    CHECK(body["messages"].size() == 2);
    CHECK(body["temperature"] == 0.0);
    res.set_content(completion_body("Paris"), "application/json");
  });
  const auto c = query_endpoint(sample_messages(), test_endpoint(server.url()));
  CHECK(c.text == "Paris");
  CHECK(c.retries == 2);
  CHECK(server.hits == 3);
  CHECK(server.last_auth == "Bearer sk-test");
}

TEST_CASE("client gives up after the attempt budget") {
  MockServer server([](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  CHECK_THROWS_AS(query_endpoint(sample_messages(), test_endpoint(server.url())), EndpointError);
  CHECK(server.hits == 3);
}

TEST_CASE("client error classes") {
  MockServer unauthorized([](const httplib::Request&, httplib::Response& res) { res.status = 401; });
  CHECK_THROWS_AS(query_endpoint(sample_messages(), test_endpoint(unauthorized.url())), AuthError);
  CHECK(unauthorized.hits == 1);

  MockServer garbled([](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"choices\": []}", "application/json");
  });
  CHECK_THROWS_AS(query_endpoint(sample_messages(), test_endpoint(garbled.url())), MalformedResponse);

  MockServer slow([](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(400));
    res.set_content(completion_body("late"), "application/json");
  });
  auto cfg = test_endpoint(slow.url());
  cfg.timeout = std::chrono::milliseconds(100);
  cfg.attempts = 2;
  CHECK_THROWS_AS(query_endpoint(sample_messages(), cfg), TimeoutError);

  MockServer never([](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion_body("x"), "application/json");
  });
  auto no_key = test_endpoint(never.url());
  no_key.api_key_env = "RAGDEPTH_TEST_KEY_UNSET";
  ::unsetenv("RAGDEPTH_TEST_KEY_UNSET");
  CHECK_THROWS_AS(query_endpoint(sample_messages(), no_key), AuthError);
  CHECK(never.hits == 0);
}

TEST_CASE("evaluation with a stub backend") {
  Rng rng(8);
  const auto exs = gen_synthetic_qa(20, rng, 2);
  const std::vector<PromptLayout> layouts{{QueryOrder::QueryFirst, 0},
                                          {QueryOrder::QueryLast, 2},
                                          {QueryOrder::QueryBoth, 1}};
  // Answers by reading the gold document back out of the prompt.
  EvalConfig oracle;
  oracle.max_in_flight = 5;
  oracle.backend = [&](const std::vector<Message>& m) {
    for (const auto& ex : exs) {
      for (const auto& msg : m) {
        if (msg.content == "Document [1]: " + ex.gold_document) return Completion{ex.answers[0], 0, 1.0};
      }
    }
    return Completion{"unknown", 0, 1.0};
  };
  const auto good = run_eval(exs, layouts, oracle);
  REQUIRE(good.records.size() == 60);
  for (std::size_t k = 0; k < good.records.size(); ++k) {
    CHECK(good.records[k].example_id == k / 3);
    CHECK(good.records[k].layout == layouts[k % 3]);
  }
  for (const auto& l : layouts) CHECK(good.accuracy(l) == 1.0);
  const auto summary = good.summary("stub");
  CHECK(summary.rows.size() == 3);
  CHECK(good.results().rows.size() == 60);

  EvalConfig abstainer;
  abstainer.backend = [](const std::vector<Message>&) { return Completion{"NO-RES", 0, 1.0}; };
  const auto none = run_eval(exs, layouts, abstainer);
  for (const auto& l : layouts) CHECK(none.accuracy(l) == 0.0);
  for (const auto& r : none.records) CHECK(r.abstained);

  std::atomic<int> n{0};
  EvalConfig flaky;
  flaky.backend = [&](const std::vector<Message>&) -> Completion {
    if (n++ % 4 == 0) throw EndpointError("boom");
    return Completion{"x", 0, 1.0};
  };
  const auto partial = run_eval(exs, layouts, flaky);
  CHECK(partial.failures == 15);

  EvalConfig locked;
  locked.backend = [](const std::vector<Message>&) -> Completion { throw AuthError("no"); };
  CHECK_THROWS_AS(run_eval(exs, layouts, locked), AuthError);

  CHECK_THROWS_AS(run_eval(exs, {{QueryOrder::QueryFirst, 5}}, oracle), ConfigError);
}

TEST_CASE("evaluation against the mock endpoint") {
  MockServer server([](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const std::string gold = body["messages"][2]["content"];
    res.set_content(completion_body(gold.find("Oskel") != std::string::npos ? "Oskel" : "NO-RES"),
                    "application/json");
  });
  const auto ds = load_dataset(kData / "fixtures" / "qa_fixture.jsonl");
  EvalConfig cfg;
  cfg.endpoint = test_endpoint(server.url());
  cfg.max_in_flight = 2;
  cfg.requests_per_second = 50;
  const auto report = run_eval(ds.examples, {{QueryOrder::QueryFirst, 1}}, cfg);
  REQUIRE(report.records.size() == 2);
  CHECK(report.records[0].abstained);
  CHECK(report.records[1].matched);
  CHECK(report.failures == 0);
}
