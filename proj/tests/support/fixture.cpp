#include "fixture.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

namespace fixture {

namespace {

// Columns: syllabic consonantal sonorant continuant voice nasal labial coronal
// anterior dorsal strident lateral high low front back round tense.
const std::vector<std::pair<std::string, std::string>>& table() {
  static const std::vector<std::pair<std::string, std::string>> t = {
      {"a", "+-+++--000---+---0"},  {"ɑ", "+-+++--000---+-+-0"},  {"e", "+-+++--000----+--+"},
      {"ε", "+-+++--000----+---"},  {"i", "+-+++--000--+-+--+"},  {"ɪ", "+-+++--000--+-+---"},
      {"o", "+-+++-+000-----+++"},  {"ɔ", "+-+++-+000-----++-"},  {"u", "+-+++-+000--+--+++"},
      {"ʊ", "+-+++-+000--+--++-"},  {"p", "-+----+-0---000000"},  {"b", "-+--+-+-0---000000"},
      {"t", "-+-----++---000000"},  {"d", "-+--+--++---000000"},  {"k", "-+------0+--000000"},
      {"g", "-+--+---0+--000000"},  {"tʃ", "-+-----+--+-000000"}, {"f", "-+-+--+-0-+-000000"},
      {"v", "-+-++-+-0-+-000000"},  {"s", "-+-+---++-+-000000"},  {"z", "-+-++--++-+-000000"},
      {"ʃ", "-+-+---+--+-000000"},  {"ʒ", "-+-++--+--+-000000"},  {"m", "-++-+++-0---000000"},
      {"n", "-++-++-++---000000"},  {"l", "-++++--++--+000000"},  {"r", "-++++--++---000000"},
  };
  return t;
}

constexpr int kVoice = 4;

const std::vector<std::string> kVowels = {"a", "ɑ", "e", "ε", "i", "ɪ", "o", "ɔ", "u", "ʊ"};
const std::vector<std::string> kConsonants = {"p", "b", "t", "d", "k", "g", "tʃ", "f", "v",
                                              "s", "z", "ʃ", "ʒ", "m", "n", "l", "r"};
const std::vector<std::string> kBigVowels = {"ɑ", "ɔ", "u", "ʊ"};
const std::vector<std::string> kSmallVowels = {"i", "ɪ", "e", "ε"};

std::string numbered(char prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%04zu", prefix, i);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& gen) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(gen)];
}

std::vector<double> gaussian(int dims, double sd, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, sd);
  std::vector<double> out(static_cast<std::size_t>(dims));
  for (auto& x : out) x = n(gen);
  return out;
}

}  // namespace

const std::vector<std::string>& segments() {
  static const std::vector<std::string> s = [] {
    std::vector<std::string> out;
    for (const auto& [seg, _] : table()) out.push_back(seg);
    return out;
  }();
  return s;
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> f = {"syllabic", "consonantal", "sonorant", "continuant", "voice",
                                             "nasal",    "labial",      "coronal",  "anterior",   "dorsal",
                                             "strident", "lateral",     "high",     "low",        "front",
                                             "back",     "round",       "tense"};
  return f;
}

const std::vector<std::vector<int>>& feature_rows() {
  static const std::vector<std::vector<int>> rows = [] {
    std::vector<std::vector<int>> out;
    for (const auto& [seg, code] : table()) {
      if (code.size() != feature_names().size()) throw std::logic_error("fixture row width for " + seg);
      std::vector<int> row;
      for (char c : code) row.push_back(c == '+' ? 1 : c == '-' ? -1 : 0);
      out.push_back(row);
    }
    return out;
  }();
  return rows;
}

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (const auto& p : parts) s += p;
  return s;
}

Language generate(const Options& o) {
  std::mt19937_64 gen(o.seed * 0x9E3779B97F4A7C15ULL + 17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto voice_of = [](const std::string& seg) {
    const auto& segs = segments();
    const auto at = std::find(segs.begin(), segs.end(), seg) - segs.begin();
    return static_cast<double>(feature_rows()[static_cast<std::size_t>(at)][kVoice]);
  };
  Language lang;

  // Morphemes alternate consonants and vowels, so no two consonants touch and
  // greedy tokenization recovers exactly the generated segments.
  for (std::size_t i = 0; i < o.n_morphemes; ++i) {
    Morpheme m;
    m.form = numbered('m', i);
    const int len = std::uniform_int_distribution<int>(2, 5)(gen);
    bool vowel = unit(gen) < 0.5;
    for (int s = 0; s < len; ++s, vowel = !vowel) m.segments.push_back(vowel ? pick(kVowels, gen) : pick(kConsonants, gen));
    double sum = 0.0;
    for (const auto& s : m.segments) sum += voice_of(s);
    m.voice = sum / static_cast<double>(m.segments.size());
    m.semantic = gaussian(o.semantic_dims, o.noise, gen);
    m.semantic[0] = std::exp(1.5 * m.voice);
    lang.morphemes.push_back(std::move(m));
  }
  if (o.permute_semantic) {
    std::vector<std::vector<double>> vecs;
    for (auto& m : lang.morphemes) vecs.push_back(m.semantic);
    std::shuffle(vecs.begin(), vecs.end(), gen);
    for (std::size_t i = 0; i < vecs.size(); ++i) lang.morphemes[i].semantic = vecs[i];
  }

  const auto big = gaussian(o.semantic_dims, 1.0, gen);
  const auto small = gaussian(o.semantic_dims, 1.0, gen);
  const auto sharp = gaussian(o.semantic_dims, 1.0, gen);
  const auto round = gaussian(o.semantic_dims, 1.0, gen);
  const auto near = [&](const std::vector<double>& centre) {
    auto v = gaussian(o.semantic_dims, 0.1, gen);
    for (std::size_t d = 0; d < v.size(); ++d) v[d] += centre[d];
    return v;
  };
  for (const char* w : {"big", "huge", "large"}) lang.exemplars.emplace_back(w, near(big));
  for (const char* w : {"small", "tiny", "little"}) lang.exemplars.emplace_back(w, near(small));
  for (const char* w : {"sharp", "spiky"}) lang.exemplars.emplace_back(w, near(sharp));
  for (const char* w : {"round", "soft"}) lang.exemplars.emplace_back(w, near(round));

  for (std::size_t i = 0; i < o.n_words; ++i) {
    Word w;
    w.word = numbered('w', i);
    w.latent = unit(gen);
    w.zipf = 3.0 + 4.0 * unit(gen);
    const int n_vowels = std::uniform_int_distribution<int>(3, 5)(gen);
    const auto n_big = static_cast<int>(std::lround(w.latent * n_vowels));
    std::vector<std::string> vowels;
    for (int v = 0; v < n_vowels; ++v) vowels.push_back(v < n_big ? pick(kBigVowels, gen) : pick(kSmallVowels, gen));
    std::shuffle(vowels.begin(), vowels.end(), gen);
    for (const auto& v : vowels) {
      w.segments.push_back(pick(kConsonants, gen));
      w.segments.push_back(v);
    }
    w.semantic = gaussian(o.semantic_dims, o.noise, gen);
    for (std::size_t d = 0; d < w.semantic.size(); ++d) w.semantic[d] += small[d] + w.latent * (big[d] - small[d]);
    lang.words.push_back(std::move(w));
  }
  return lang;
}

Paths write(const std::filesystem::path& dir, const Options& o) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Paths p{dir,
          dir / "features.tsv",
          dir / "lexicon.tsv",
          dir / "morphemes.tsv",
          dir / "vectors.txt",
          dir / "scales.json",
          dir / "config.json"};
  const auto lang = generate(o);
  const auto open = [](const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
  };

  {
    auto out = open(p.features);
    out << "segment";
    for (const auto& f : feature_names()) out << '\t' << f;
    out << '\n';
    for (const auto& [seg, code] : table()) {
      out << seg;
      for (char c : code) out << '\t' << (c == '+' ? "+" : c == '-' ? "-" : "0");
      out << '\n';
    }
  }
  {
    auto out = open(p.lexicon);
    out << "word\tlemma\tzipf\tipa\n";
    for (const auto& w : lang.words) out << w.word << '\t' << w.word << '\t' << num(w.zipf) << '\t' << join(w.segments) << '\n';
  }
  {
    auto out = open(p.morphemes);
    out << "form\ttranscription\tlanguage\tsources\n";
    for (std::size_t i = 0; i < lang.morphemes.size(); ++i) {
      const auto& m = lang.morphemes[i];
      out << m.form << '\t' << join(m.segments) << '\t' << o.language << '\t'
          << lang.words[i % lang.words.size()].word << '\n';
    }
  }
  {
    auto out = open(p.vectors);
    const auto row = [&](const std::string& token, const std::vector<double>& v) {
      out << token;
      for (double x : v) out << ' ' << num(x);
      out << '\n';
    };
    for (const auto& m : lang.morphemes) row(m.form, m.semantic);
    for (const auto& w : lang.words) row(w.word, w.semantic);
    for (const auto& [w, v] : lang.exemplars) row(w, v);
  }
  {
    nlohmann::ordered_json scales = {
        {"scales",
         {{{"name", "size"},
           {"phonetic", {{"pos", kBigVowels}, {"neg", kSmallVowels}}},
           {"semantic", {{o.language, {{"pos", {"big", "huge", "large"}}, {"neg", {"small", "tiny", "little"}}}}}}},
          {{"name", "sharpness"},
           {"phonetic", {{"pos", {"p", "t", "k"}}, {"neg", {"m", "n", "l"}}}},
           {"semantic", {{o.language, {{"pos", {"sharp", "spiky"}}, {"neg", {"round", "soft"}}}}}}}}}};
    open(p.scales) << scales.dump(2) << '\n';
  }
  {
    nlohmann::ordered_json config = {
        {"languages", {o.language}},
        {"inputs", {{o.language, {{"lexicon", "lexicon.tsv"}, {"morphemes", "morphemes.tsv"}, {"vectors", "vectors.txt"}}}}},
        {"feature_table", "features.tsv"},
        {"scales", "scales.json"},
        {"output_dir", "results"},
        {"parameters",
         {{"shuffles", o.shuffles},
          {"null_points", o.null_points},
          {"subspace_shuffles", o.subspace_shuffles},
          {"subspace_null_points", o.subspace_null_points},
          {"subspace_pool", o.subspace_pool}}},
        {"seed", o.seed}};
    open(p.config) << config.dump(2) << '\n';
  }
  return p;
}

}  // namespace fixture
