#include "iconicity/segmentation.hpp"

#include "iconicity/rng.hpp"
#include "iconicity/unicode.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace iconicity {

const FewShotSet& fewshot_set(std::string_view language) {
  for (const auto& set : fewshot_sets())
    if (set.code == language) return set;
  throw InputError("no segmentation examples for language '" + std::string(language) + "'");
}

std::vector<std::string> supported_languages() {
  std::vector<std::string> out;
  for (const auto& set : fewshot_sets()) out.push_back(set.code);
  return out;
}

std::string render_examples(const FewShotSet& set) {
  std::string out;
  for (std::size_t i = 0; i < set.examples.size(); ++i) {
    const auto& ex = set.examples[i];
    if (i > 0) out += "\n\n";
    out += "input: " + ex.word + "," + ex.ipa + "\n" + ex.response;
  }
  return out;
}

namespace {

void replace_all(std::string& text, std::string_view slot, std::string_view value) {
  for (auto pos = text.find(slot); pos != std::string::npos; pos = text.find(slot, pos + value.size()))
    text.replace(pos, slot.size(), value);
}

}  // namespace

Prompt build_prompt(std::string_view language, std::span<const WordInput> batch) {
  const auto& set = fewshot_set(language);
  if (batch.empty()) throw InputError("segmentation batch is empty");
  Prompt p;
  p.system = system_template();
  // Examples first so a language name containing "{examples}" cannot recurse.
  replace_all(p.system, "{examples}", render_examples(set));
  replace_all(p.system, "{lang}", set.name);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].lemma.empty()) throw InputError("segmentation batch has an empty lemma");
    if (i > 0) p.user += "\n";
    p.user += "input: " + batch[i].lemma + "," + batch[i].ipa;
  }
  return p;
}

std::vector<MorphPair> parse_response(std::string_view text, const ParseOptions& options) {
  std::vector<MorphPair> out;
  std::size_t i = 0;
  const auto skip_space = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_space();
  if (i == text.size()) throw InputError("empty segmentation response");
  while (true) {
    skip_space();
    if (i >= text.size() || text[i] != '(') {
      if (i < text.size() && text[i] == ')') throw InputError("unbalanced parentheses in segmentation response");
      throw InputError("expected '(' at byte " + std::to_string(i) + " of segmentation response");
    }
    const auto open = i++;
    const auto close = text.find_first_of("()", i);
    if (close == std::string_view::npos || text[close] == '(')
      throw InputError("unbalanced parentheses in segmentation response at byte " + std::to_string(open));
    const auto body = text.substr(i, close - i);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos)
      throw InputError("pair without a comma: (" + std::string(body) + ")");
    MorphPair pair{std::string(trim(body.substr(0, comma))), std::string(trim(body.substr(comma + 1)))};
    if (pair.transcription.empty() || (pair.morpheme.empty() && !options.allow_empty_form))
      throw InputError("pair with an empty side: (" + std::string(body) + ")");
    out.push_back(std::move(pair));
    i = close + 1;
    skip_space();
    if (i == text.size()) break;
    if (text[i] == ',') {
      ++i;
      skip_space();
      if (i == text.size()) break;  // trailing comma
      continue;
    }
    if (text[i] == ')') throw InputError("unbalanced parentheses in segmentation response");
    throw InputError("unexpected text after pair at byte " + std::to_string(i));
  }
  return out;
}

std::string render_pairs(std::span<const MorphPair> pairs) {
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0) out += ",";
    out += "(" + pairs[i].morpheme + "," + pairs[i].transcription + ")";
  }
  return out;
}

std::vector<std::vector<MorphPair>> parse_batch_response(std::string_view text, std::size_t n_words,
                                                         const ParseOptions& options) {
  if (n_words == 1) return {parse_response(text, options)};
  std::vector<std::vector<MorphPair>> out;
  for (const auto& line : split(text, '\n'))
    if (!trim(line).empty()) out.push_back(parse_response(line, options));
  if (out.size() != n_words)
    throw InputError("response has " + std::to_string(out.size()) + " lines for " + std::to_string(n_words) +
                     " words");
  return out;
}

double perplexity(std::span<const double> logprobs) {
  if (logprobs.empty()) throw InputError("perplexity of an empty token sequence");
  double sum = 0.0;
  for (double lp : logprobs) {
    if (!std::isfinite(lp) || lp > 0.0) throw InputError("invalid token log-probability");
    sum += lp;
  }
  return std::exp(-sum / static_cast<double>(logprobs.size()));
}

FilterResult perplexity_filter(std::vector<Segmentation> segmentations, double threshold) {
  FilterResult out;
  for (auto& s : segmentations) {
    if (!s.perplexity) throw InputError("segmentation of '" + s.word + "' has no perplexity");
    (*s.perplexity > threshold ? out.dropped : out.kept).push_back(std::move(s));
  }
  return out;
}

MorphemeSet dedupe_into_morpheme_set(std::span<const Segmentation> segmentations, const std::string& language,
                                     const std::unordered_map<std::string, std::vector<std::string>>& sources_of) {
  MorphemeSet set;
  set.language = language;
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::unordered_set<std::string>> seen;
  for (const auto& s : segmentations) {
    std::vector<std::string> words{s.word};
    if (auto it = sources_of.find(s.word); it != sources_of.end()) words = it->second;
    for (const auto& p : s.pairs) {
      const std::string key = p.morpheme + '\x1f' + p.transcription;
      auto [it, fresh] = slot.emplace(key, set.morphemes.size());
      if (fresh) {
        set.morphemes.push_back({p.morpheme, p.transcription, {}, language});
        seen.emplace_back();
      }
      auto& m = set.morphemes[it->second];
      for (const auto& w : words)
        if (seen[it->second].insert(w).second) m.sources.push_back(w);
    }
  }
  return set;
}

VerificationSample sample_for_verification(const MorphemeSet& set, std::size_t n, std::uint64_t seed) {
  if (set.morphemes.empty()) throw InputError("verification sample from an empty morpheme set");
  std::mt19937_64 gen(splitmix64(seed));
  auto order = random_permutation(static_cast<Index>(set.size()), gen);
  VerificationSample out;
  out.short_set = set.size() < n;
  order.resize(std::min(n, set.size()));
  for (Index i : order) out.morphemes.push_back(set.morphemes[static_cast<std::size_t>(i)]);
  return out;
}

void write_verification_sheet(std::ostream& out, const VerificationSample& sample) {
  out << "morpheme\ttranscription\texample_source\tverdict\n";
  for (const auto& m : sample.morphemes)
    out << m.form << '\t' << m.transcription << '\t' << (m.sources.empty() ? "" : m.sources.front()) << "\t\n";
}

ErrorRate error_rate_ci(std::size_t errors, std::size_t n) {
  if (n == 0) throw InputError("error rate over zero items");
  if (errors > n) throw InputError("more errors than items");
  const double p = static_cast<double>(errors) / static_cast<double>(n);
  return {p, 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

std::string format_error_rate(const ErrorRate& e, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f%% ± %.*f%%", decimals, 100.0 * e.rate, decimals, 100.0 * e.half_width);
  return buf;
}

namespace {

using json = nlohmann::ordered_json;

json to_json(const Segmentation& s) {
  json pairs = json::array();
  for (const auto& p : s.pairs) pairs.push_back({p.morpheme, p.transcription});
  json j = {{"word", s.word}, {"ipa", s.ipa}, {"pairs", pairs}};
  j["perplexity"] = s.perplexity ? json(*s.perplexity) : json(nullptr);
  j["provider"] = s.provider;
  j["timestamp"] = s.timestamp;
  return j;
}

}  // namespace

void append_segmentation_cache(const std::filesystem::path& path, std::span<const Segmentation> segmentations) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw InputError("cannot open segmentation cache " + path.string());
  for (const auto& s : segmentations) out << to_json(s).dump() << '\n';
}

std::vector<Segmentation> load_segmentation_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open segmentation cache " + path.string());
  std::vector<Segmentation> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      Segmentation s;
      s.word = j.at("word").get<std::string>();
      s.ipa = j.value("ipa", "");
      for (const auto& p : j.at("pairs")) s.pairs.push_back({p.at(0).get<std::string>(), p.at(1).get<std::string>()});
      if (j.contains("perplexity") && !j["perplexity"].is_null()) s.perplexity = j["perplexity"].get<double>();
      s.provider = j.value("provider", "");
      s.timestamp = j.value("timestamp", "");
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": bad cache record: " + e.what());
    }
  }
  return out;
}

}  // namespace iconicity
