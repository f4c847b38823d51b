#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "iconicity/provider.hpp"

#include "iconicity/digest.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <ctime>
#include <fstream>
#include <thread>

namespace iconicity {

using json = nlohmann::ordered_json;

std::string ProviderRequest::key() const {
  const json j = {{"model", model}, {"system", system}, {"user", user}, {"structured_output", structured_output}};
  return sha256_hex(j.dump());
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

json request_json(const ProviderRequest& r) {
  return {{"model", r.model}, {"system", r.system}, {"user", r.user}, {"structured_output", r.structured_output}};
}

json response_json(const ProviderResponse& r) {
  json j = {{"text", r.text}};
  if (r.logprobs) j["logprobs"] = *r.logprobs;
  return j;
}

ProviderResponse response_from(const json& j) {
  ProviderResponse r;
  r.text = j.at("text").get<std::string>();
  if (j.contains("logprobs") && !j["logprobs"].is_null()) r.logprobs = j["logprobs"].get<std::vector<double>>();
  return r;
}

}  // namespace

ProviderResponse parse_provider_response(const std::string& body) {
  try {
    return response_from(json::parse(body));
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed provider response: ") + e.what());
  }
}

AuditLog::AuditLog(std::filesystem::path path) : path_(std::move(path)) {}

void AuditLog::record(const ProviderRequest& request, const ProviderResponse& response) {
  const json j = {{"key", request.key()},
                  {"timestamp", utc_timestamp()},
                  {"request", request_json(request)},
                  {"response", response_json(response)}};
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw ProviderError("cannot write audit log " + path_.string());
  out << j.dump() << '\n';
}

HttpProvider::HttpProvider(HttpProviderOptions options, std::shared_ptr<AuditLog> audit)
    : options_(std::move(options)), audit_(std::move(audit)) {
  sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  const auto scheme_end = options_.url.find("://");
  if (scheme_end == std::string::npos) throw InputError("provider URL needs a scheme: " + options_.url);
  const auto path_start = options_.url.find('/', scheme_end + 3);
  scheme_host_port_ = options_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : options_.url.substr(path_start);
  if (options_.attempts < 1) throw InputError("provider attempts must be at least 1");
}

ProviderResponse HttpProvider::complete(const ProviderRequest& request) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);
  const std::string body = request_json(request).dump();

  std::string last_error;
  auto backoff = options_.initial_backoff;
  for (int attempt = 1; attempt <= options_.attempts; ++attempt) {
    auto res = client.Post(path_, headers, body, "application/json");
    bool transient = false;
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      transient = true;
    } else if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      transient = true;
    } else if (res->status != 200) {
      throw ProviderError("provider returned HTTP " + std::to_string(res->status) + ": " + res->body);
    } else {
      auto response = parse_provider_response(res->body);
      if (audit_) audit_->record(request, response);
      return response;
    }
    if (transient && attempt < options_.attempts) {
      sleep(backoff);
      backoff *= 2;
    }
  }
  throw ProviderError("provider failed after " + std::to_string(options_.attempts) + " attempts: " + last_error);
}

ReplayProvider::ReplayProvider(const std::filesystem::path& audit_log) {
  std::ifstream in(audit_log, std::ios::binary);
  if (!in) throw InputError("cannot open replay log " + audit_log.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      // Later records win, so a re-run overrides an earlier exchange.
      responses_[j.at("key").get<std::string>()] = response_from(j.at("response"));
    } catch (const json::exception& e) {
      throw InputError(audit_log.string() + ":" + std::to_string(lineno) + ": bad audit record: " + e.what());
    }
  }
}

ProviderResponse ReplayProvider::complete(const ProviderRequest& request) {
  auto it = responses_.find(request.key());
  if (it == responses_.end()) throw ProviderError("no recorded response for request " + request.key());
  return it->second;
}

namespace {

struct Job {
  std::vector<WordInput> words;
};

struct JobResult {
  std::vector<Segmentation> segmentations;
  std::vector<SegmentFailure> failures;
};

JobResult run_job(const Job& job, Provider& provider, const SegmentOptions& options) {
  const auto prompt = build_prompt(options.language, job.words);
  const ProviderRequest request{options.model, prompt.system, prompt.user, true};
  const auto response = provider.complete(request);
  JobResult out;
  std::vector<std::vector<MorphPair>> parsed;
  try {
    parsed = parse_batch_response(response.text, job.words.size(), options.parse);
  } catch (const InputError& e) {
    for (const auto& w : job.words) out.failures.push_back({w.lemma, e.what()});
    return out;
  }
  std::optional<double> ppl;
  if (response.logprobs && !response.logprobs->empty()) ppl = perplexity(*response.logprobs);
  const std::string stamp = options.clock ? options.clock() : utc_timestamp();
  for (std::size_t i = 0; i < job.words.size(); ++i)
    out.segmentations.push_back({job.words[i].lemma, job.words[i].ipa, std::move(parsed[i]), ppl, provider.name(), stamp});
  return out;
}

}  // namespace

SegmentRun segment_lexicon(const Lexicon& lexicon, Provider& provider, const SegmentOptions& options,
                           std::span<const Segmentation> cached) {
  if (options.batch_size < 1) throw InputError("batch size must be at least 1");
  fewshot_set(options.language);

  // Lemma order follows the lexicon's frequency order.
  std::vector<std::string> lemmas;
  std::unordered_map<std::string, std::string> ipa_of;
  std::unordered_map<std::string, std::vector<std::string>> sources_of;
  for (const auto& lx : lexicon.entries) {
    const std::string lemma = lx.lemma.empty() ? lx.word : lx.lemma;
    auto& src = sources_of[lemma];
    if (src.empty()) lemmas.push_back(lemma);
    src.push_back(lx.word);
    if (lx.transcribable() && (!ipa_of.count(lemma) || lx.word == lemma)) ipa_of[lemma] = lx.ipa;
  }

  std::unordered_map<std::string, const Segmentation*> from_cache;
  for (const auto& s : cached) from_cache[s.word] = &s;

  std::vector<Job> jobs;
  for (const auto& lemma : lemmas) {
    if (from_cache.count(lemma) || !ipa_of.count(lemma)) continue;
    if (jobs.empty() || jobs.back().words.size() == options.batch_size) jobs.emplace_back();
    jobs.back().words.push_back({lemma, ipa_of[lemma]});
  }

  std::vector<JobResult> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        results[j] = run_job(jobs[j], provider, options);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  {
    const auto n_threads = std::min(std::max<std::size_t>(options.in_flight, 1), jobs.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Single merge in lemma order.
  std::unordered_map<std::string, Segmentation> fresh;
  SegmentRun run;
  for (auto& r : results) {
    for (auto& s : r.segmentations) fresh.emplace(s.word, std::move(s));
    for (auto& f : r.failures) run.failures.push_back(std::move(f));
  }
  std::vector<Segmentation> all;
  for (const auto& lemma : lemmas) {
    if (auto c = from_cache.find(lemma); c != from_cache.end()) all.push_back(*c->second);
    else if (auto f = fresh.find(lemma); f != fresh.end()) all.push_back(std::move(f->second));
  }
  if (options.filter) {
    auto filtered = perplexity_filter(std::move(all), options.threshold);
    run.kept = std::move(filtered.kept);
    run.dropped = std::move(filtered.dropped);
  } else {
    run.kept = std::move(all);
  }
  run.morphemes = dedupe_into_morpheme_set(run.kept, options.language, sources_of);
  return run;
}

}  // namespace iconicity
