#pragma once

#include "iconicity/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace iconicity {

struct MorphPair {
  std::string morpheme;
  std::string transcription;
  friend bool operator==(const MorphPair&, const MorphPair&) = default;
};

struct FewShotExample {
  std::string word;
  std::string ipa;
  std::string response;  // rendered pair list
};

struct FewShotSet {
  std::string code;  // e.g. "en"
  std::string name;  // substituted for {lang}
  std::vector<FewShotExample> examples;
};

/// System text with {lang} and {examples} slots.
const std::string& system_template();
const std::vector<FewShotSet>& fewshot_sets();
const FewShotSet& fewshot_set(std::string_view language);
std::vector<std::string> supported_languages();

struct WordInput {
  std::string lemma;
  std::string ipa;
};

struct Prompt {
  std::string system;
  std::string user;
};

/// Blocks of `input: word,ipa` followed by the pair line, blank-line separated.
std::string render_examples(const FewShotSet& set);
Prompt build_prompt(std::string_view language, std::span<const WordInput> batch);

struct ParseOptions {
  // One shipped Tamil example segments a transcription chunk with no
  // orthographic counterpart.
  bool allow_empty_form = false;
};

/// Parses `(m1,t1),(m2,t2)`. Whitespace between and inside pairs is trimmed.
std::vector<MorphPair> parse_response(std::string_view text, const ParseOptions& options = {});
std::string render_pairs(std::span<const MorphPair> pairs);

/// One pair list per non-empty line; the count must match.
std::vector<std::vector<MorphPair>> parse_batch_response(std::string_view text, std::size_t n_words,
                                                         const ParseOptions& options = {});

/// exp(-mean log-probability).
double perplexity(std::span<const double> logprobs);

struct Segmentation {
  std::string word;
  std::string ipa;
  std::vector<MorphPair> pairs;
  std::optional<double> perplexity;
  std::string provider;
  std::string timestamp;
};

struct FilterResult {
  std::vector<Segmentation> kept;
  std::vector<Segmentation> dropped;
};

/// Drops perplexity strictly above the threshold. Throws InputError when a
/// segmentation has no perplexity.
FilterResult perplexity_filter(std::vector<Segmentation> segmentations, double threshold = 1.4);

/// Unique (form, transcription) pairs in first-seen order. Sources are the
/// segmented words, or the words listed for them in `sources_of` (lemma to
/// surface words).
MorphemeSet dedupe_into_morpheme_set(std::span<const Segmentation> segmentations, const std::string& language,
                                     const std::unordered_map<std::string, std::vector<std::string>>& sources_of = {});

struct VerificationSample {
  std::vector<Morpheme> morphemes;
  bool short_set = false;  // fewer morphemes than requested
};

VerificationSample sample_for_verification(const MorphemeSet& set, std::size_t n, std::uint64_t seed);
void write_verification_sheet(std::ostream& out, const VerificationSample& sample);

struct ErrorRate {
  double rate = 0.0;        // fraction
  double half_width = 0.0;  // 95% normal approximation, fraction
};

ErrorRate error_rate_ci(std::size_t errors, std::size_t n);
/// "2.00% ± 2.24%"
std::string format_error_rate(const ErrorRate& e, int decimals = 2);

// Line-delimited JSON cache, one record per word.
void append_segmentation_cache(const std::filesystem::path& path, std::span<const Segmentation> segmentations);
std::vector<Segmentation> load_segmentation_cache(const std::filesystem::path& path);

}  // namespace iconicity
