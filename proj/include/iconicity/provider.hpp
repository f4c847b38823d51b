#pragma once

#include "iconicity/corpus.hpp"
#include "iconicity/segmentation.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace iconicity {

struct ProviderRequest {
  std::string model;
  std::string system;
  std::string user;
  bool structured_output = true;

  /// Stable key used to match recorded responses.
  std::string key() const;
};

struct ProviderResponse {
  std::string text;
  std::optional<std::vector<double>> logprobs;
};

class Provider {
 public:
  virtual ~Provider() = default;
  /// Throws ProviderError once retries are exhausted. Must be thread-safe.
  virtual ProviderResponse complete(const ProviderRequest& request) = 0;
  virtual std::string name() const = 0;
};

/// Appends one JSON line per exchange. Thread-safe.
class AuditLog {
 public:
  explicit AuditLog(std::filesystem::path path);
  void record(const ProviderRequest& request, const ProviderResponse& response);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

struct HttpProviderOptions {
  std::string url;       // scheme://host[:port]/path
  std::string model;
  std::string api_key;   // sent as a bearer token when non-empty
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{120};
};

/// POSTs {model, system, user, structured_output} and expects
/// {text, logprobs?}. Transport failures, 429 and 5xx are retried with
/// doubling backoff.
class HttpProvider final : public Provider {
 public:
  explicit HttpProvider(HttpProviderOptions options, std::shared_ptr<AuditLog> audit = nullptr);
  ProviderResponse complete(const ProviderRequest& request) override;
  std::string name() const override { return "http:" + options_.model; }

  // Injectable for tests.
  std::function<void(std::chrono::milliseconds)> sleep;

 private:
  HttpProviderOptions options_;
  std::string scheme_host_port_;
  std::string path_;
  std::shared_ptr<AuditLog> audit_;
};

/// Serves responses recorded by an AuditLog.
class ReplayProvider final : public Provider {
 public:
  explicit ReplayProvider(const std::filesystem::path& audit_log);
  ProviderResponse complete(const ProviderRequest& request) override;
  std::string name() const override { return "replay"; }
  std::size_t size() const { return responses_.size(); }

 private:
  std::unordered_map<std::string, ProviderResponse> responses_;
};

ProviderResponse parse_provider_response(const std::string& body);

struct SegmentOptions {
  std::string language;
  std::string model;
  std::size_t batch_size = 1;
  std::size_t in_flight = 4;
  bool filter = true;
  double threshold = 1.4;
  ParseOptions parse;
  std::function<std::string()> clock;  // timestamp source; defaults to UTC now
};

struct SegmentFailure {
  std::string word;
  std::string reason;
};

struct SegmentRun {
  std::vector<Segmentation> kept;
  std::vector<Segmentation> dropped;  // perplexity above threshold
  std::vector<SegmentFailure> failures;
  MorphemeSet morphemes;
};

/// Segments every distinct transcribable lemma. Words already in `cached`
/// are not re-requested. Morpheme sources are the surface words sharing a
/// lemma.
SegmentRun segment_lexicon(const Lexicon& lexicon, Provider& provider, const SegmentOptions& options,
                           std::span<const Segmentation> cached = {});

std::string utc_timestamp();

}  // namespace iconicity
