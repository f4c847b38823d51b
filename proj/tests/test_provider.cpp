#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "iconicity/provider.hpp"

#include <httplib.h>
#include <json.hpp>

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <thread>

using namespace iconicity;
namespace fs = std::filesystem;

namespace {

// Echoes each "input: w,ipa" line as "(w,ipa)". Words listed in `garbled`
// get an unparseable reply; log-probabilities encode a per-word perplexity.
class EchoProvider final : public Provider {
 public:
  std::map<std::string, double> perplexity_of;
  std::set<std::string> garbled;
  std::atomic<int> calls{0};

  ProviderResponse complete(const ProviderRequest& request) override {
    ++calls;
    std::this_thread::sleep_for(std::chrono::microseconds(std::hash<std::string>{}(request.user) % 2000));
    std::istringstream in(request.user);
    std::string line, text;
    double ppl = 1.0;
    while (std::getline(in, line)) {
      const auto body = line.substr(std::string("input: ").size());
      const auto word = body.substr(0, body.find(','));
      if (garbled.count(word)) return {"I cannot segment that.", std::vector<double>{-0.01}};
      if (perplexity_of.count(word)) ppl = perplexity_of.at(word);
      text += (text.empty() ? "" : "\n") + std::string("(") + body + ")";
    }
    return {text, std::vector<double>{-std::log(ppl)}};
  }
  std::string name() const override { return "echo"; }
};

Lexicon lexicon(std::size_t n) {
  Lexicon l;
  l.language = "en";
  for (std::size_t i = 0; i < n; ++i) {
    const std::string w = "w" + std::to_string(i);
    l.entries.push_back({w, w, 7.0 - 0.001 * static_cast<double>(i), "ipa" + std::to_string(i)});
  }
  // An inflected form sharing a lemma and an untranscribed lemma.
  l.entries.push_back({"w0s", "w0", 1.0, "ipa0s"});
  l.entries.push_back({"silent", "silent", 1.0, ""});
  return l;
}

SegmentOptions options() {
  SegmentOptions o;
  o.language = "en";
  o.model = "m";
  o.clock = [] { return std::string("T"); };
  return o;
}

struct Server {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> hits{0};
  std::function<void(const httplib::Request&, httplib::Response&, int)> handler;

  Server() {
    server.Post("/v1/complete", [this](const httplib::Request& req, httplib::Response& res) {
      handler(req, res, ++hits);
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Server() {
    server.stop();
    thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1/complete"; }
};

void echo_reply(const httplib::Request& req, httplib::Response& res) {
  const auto j = nlohmann::json::parse(req.body);
  const std::string user = j.at("user");
  res.set_content(nlohmann::json{{"text", "(" + user.substr(7) + ")"}, {"logprobs", {-0.05, -0.15}}}.dump(),
                  "application/json");
}

}  // namespace

TEST(HttpProvider, RetriesTransientFailuresWithDoublingBackoff) {
  Server s;
  s.handler = [](const httplib::Request& req, httplib::Response& res, int hit) {
    if (hit == 1) res.status = 503;
    else if (hit == 2) res.status = 429;
    else echo_reply(req, res);
  };
  HttpProvider p({.url = s.url(), .model = "m"});
  std::vector<std::chrono::milliseconds> slept;
  p.sleep = [&](std::chrono::milliseconds d) { slept.push_back(d); };
  const auto r = p.complete({"m", "sys", "input: run,rʌn", true});
  EXPECT_EQ(r.text, "(run,rʌn)");
  ASSERT_TRUE(r.logprobs.has_value());
  EXPECT_EQ(r.logprobs->size(), 2u);
  EXPECT_EQ(s.hits.load(), 3);
  EXPECT_EQ(slept, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(500), std::chrono::milliseconds(1000)}));
}

TEST(HttpProvider, GivesUpAfterThreeAttempts) {
  Server s;
  s.handler = [](const httplib::Request&, httplib::Response& res, int) { res.status = 500; };
  HttpProvider p({.url = s.url(), .model = "m"});
  p.sleep = [](std::chrono::milliseconds) {};
  EXPECT_THROW(p.complete({"m", "s", "u", true}), ProviderError);
  EXPECT_EQ(s.hits.load(), 3);
}

TEST(HttpProvider, ClientErrorsAreNotRetried) {
  Server s;
  s.handler = [](const httplib::Request&, httplib::Response& res, int) { res.status = 400; };
  HttpProvider p({.url = s.url(), .model = "m"});
  p.sleep = [](std::chrono::milliseconds) {};
  EXPECT_THROW(p.complete({"m", "s", "u", true}), ProviderError);
  EXPECT_EQ(s.hits.load(), 1);
}

TEST(HttpProvider, TransportFailureIsProviderError) {
  HttpProvider p({.url = "http://127.0.0.1:1/none", .model = "m", .attempts = 2,
                  .timeout = std::chrono::seconds(2)});
  int sleeps = 0;
  p.sleep = [&](std::chrono::milliseconds) { ++sleeps; };
  EXPECT_THROW(p.complete({"m", "s", "u", true}), ProviderError);
  EXPECT_EQ(sleeps, 1);
}

TEST(HttpProvider, SendsRequestFieldsAndBearerToken) {
  Server s;
  nlohmann::json seen;
  std::string auth;
  s.handler = [&](const httplib::Request& req, httplib::Response& res, int) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    echo_reply(req, res);
  };
  HttpProvider p({.url = s.url(), .model = "gm", .api_key = "k123"});
  p.complete({"gm", "system text", "input: a,b", true});
  EXPECT_EQ(seen.at("model"), "gm");
  EXPECT_EQ(seen.at("system"), "system text");
  EXPECT_EQ(seen.at("user"), "input: a,b");
  EXPECT_EQ(seen.at("structured_output"), true);
  EXPECT_EQ(auth, "Bearer k123");
}

TEST(AuditReplay, RoundTripReproducesSegmentation) {
  const auto audit = fs::temp_directory_path() / "iconicity_audit.jsonl";
  fs::remove(audit);
  Server s;
  s.handler = [](const httplib::Request& req, httplib::Response& res, int) { echo_reply(req, res); };
  HttpProvider live({.url = s.url(), .model = "m"}, std::make_shared<AuditLog>(audit));
  const auto lex = lexicon(12);
  const auto first = segment_lexicon(lex, live, options());

  ReplayProvider replay(audit);
  EXPECT_EQ(replay.size(), 12u);
  const auto second = segment_lexicon(lex, replay, options());
  EXPECT_EQ(first.morphemes.morphemes, second.morphemes.morphemes);
  EXPECT_EQ(first.kept.size(), 12u);

  const std::vector<WordInput> unseen{{"zzz", "z"}};
  const auto prompt = build_prompt("en", unseen);
  EXPECT_THROW(replay.complete({"m", prompt.system, prompt.user, true}), ProviderError);
}

TEST(SegmentLexicon, MergeIsIndependentOfConcurrency) {
  const auto lex = lexicon(40);
  EchoProvider p;
  auto o = options();
  o.in_flight = 1;
  const auto serial = segment_lexicon(lex, p, o);
  o.in_flight = 8;
  const auto parallel = segment_lexicon(lex, p, o);
  o.batch_size = 3;
  const auto batched = segment_lexicon(lex, p, o);
  EXPECT_EQ(serial.morphemes.morphemes, parallel.morphemes.morphemes);
  EXPECT_EQ(serial.morphemes.morphemes, batched.morphemes.morphemes);
  ASSERT_EQ(serial.kept.size(), 40u);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(serial.kept[i].word, "w" + std::to_string(i));
}

TEST(SegmentLexicon, SourcesAreSurfaceWordsOfTheLemma) {
  EchoProvider p;
  const auto run = segment_lexicon(lexicon(3), p, options());
  ASSERT_FALSE(run.morphemes.morphemes.empty());
  EXPECT_EQ(run.morphemes.morphemes[0].form, "w0");
  EXPECT_EQ(run.morphemes.morphemes[0].sources, (std::vector<std::string>{"w0", "w0s"}));
}

TEST(SegmentLexicon, FilterAndFailures) {
  EchoProvider p;
  p.perplexity_of["w1"] = 1.5;
  p.perplexity_of["w2"] = 1.39;
  p.garbled.insert("w3");
  const auto run = segment_lexicon(lexicon(5), p, options());
  EXPECT_EQ(run.kept.size(), 3u);
  ASSERT_EQ(run.dropped.size(), 1u);
  EXPECT_EQ(run.dropped[0].word, "w1");
  ASSERT_EQ(run.failures.size(), 1u);
  EXPECT_EQ(run.failures[0].word, "w3");

  auto o = options();
  o.filter = false;
  EXPECT_EQ(segment_lexicon(lexicon(5), p, o).kept.size(), 4u);
}

TEST(SegmentLexicon, CachedWordsAreNotRequested) {
  EchoProvider p;
  const auto first = segment_lexicon(lexicon(6), p, options());
  const int calls = p.calls.load();
  const auto second = segment_lexicon(lexicon(6), p, options(), first.kept);
  EXPECT_EQ(p.calls.load(), calls);
  EXPECT_EQ(second.morphemes.morphemes, first.morphemes.morphemes);
}

TEST(SegmentLexicon, ProviderErrorsPropagate) {
  struct Down final : Provider {
    ProviderResponse complete(const ProviderRequest&) override { throw ProviderError("down"); }
    std::string name() const override { return "down"; }
  } down;
  EXPECT_THROW(segment_lexicon(lexicon(4), down, options()), ProviderError);
}
