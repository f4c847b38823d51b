#pragma once

// Synthetic language generator shared by the tests and tools/make_fixture.
//
// Two planted signals live in one fixture directory:
//  * morphemes: semantic dimension 0 is exp(1.5 v) where v is the mean
//    `voice` value over the morpheme's segments; other dimensions are noise.
//  * lexicon words: a latent t in [0, 1] places the word on the line from
//    the "small" exemplar centroid to the "big" one, and round(t L) of its L
//    vowels come from the scale's positive pole.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fixture {

struct Options {
  std::string language = "xa";
  std::size_t n_morphemes = 400;
  std::size_t n_words = 600;
  int semantic_dims = 8;
  double noise = 0.3;           // sd of non-signal semantic coordinates
  std::uint64_t seed = 1;
  bool permute_semantic = false;  // control: morpheme vectors shuffled across forms
  // Analysis parameters written into config.json.
  std::size_t shuffles = 1000;
  std::size_t null_points = 500;
  std::size_t subspace_shuffles = 5000;
  std::size_t subspace_null_points = 5000;
  std::size_t subspace_pool = 400;
};

struct Paths {
  std::filesystem::path dir, features, lexicon, morphemes, vectors, scales, config;
};

/// Segment keys of the fixture feature table, which covers every phonetic
/// exemplar in the shipped scale config.
const std::vector<std::string>& segments();
const std::vector<std::string>& feature_names();
/// Ternary values, one row per segment.
const std::vector<std::vector<int>>& feature_rows();

struct Morpheme {
  std::string form;
  std::vector<std::string> segments;
  double voice = 0.0;  // pooled `voice` value, computed here independently
  std::vector<double> semantic;
};

struct Word {
  std::string word;
  std::vector<std::string> segments;
  double latent = 0.0;
  std::vector<double> semantic;
  double zipf = 0.0;
};

struct Language {
  std::vector<Morpheme> morphemes;
  std::vector<Word> words;
  std::vector<std::pair<std::string, std::vector<double>>> exemplars;
};

Language generate(const Options& options);

/// Writes features.tsv, lexicon.tsv, morphemes.tsv, vectors.txt, scales.json
/// and config.json into `dir`. The config's output_dir is `dir/results`.
Paths write(const std::filesystem::path& dir, const Options& options);

std::string join(const std::vector<std::string>& parts);

}  // namespace fixture
