#pragma once

#include "iconicity/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace iconicity {

struct Lexeme {
  std::string word;
  std::string lemma;
  double zipf = 0.0;
  std::string ipa;  // empty when untranscribable

  bool transcribable() const { return !ipa.empty(); }
  friend bool operator==(const Lexeme&, const Lexeme&) = default;
};

/// Frequency-ranked word list: descending zipf, ties by word.
struct Lexicon {
  std::string language;
  std::vector<Lexeme> entries;
  std::vector<std::string> warnings;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

Lexicon load_lexicon(const std::filesystem::path& path, std::string language);
Lexicon parse_lexicon(std::istream& in, std::string language);
void write_lexicon(std::ostream& out, const Lexicon& lexicon);

Lexicon top_n(const Lexicon& lexicon, std::size_t n);

/// Keeps lexemes with zipf strictly above the cutoff, order preserved.
Lexicon zipf_filter(const Lexicon& lexicon, double cutoff);

struct Morpheme {
  std::string form;
  std::string transcription;
  std::vector<std::string> sources;  // first-seen order, unique
  std::string language;

  std::string id() const { return form + "/" + transcription; }
  friend bool operator==(const Morpheme&, const Morpheme&) = default;
};

struct MorphemeSet {
  std::string language;
  std::vector<Morpheme> morphemes;

  std::size_t size() const { return morphemes.size(); }
};

MorphemeSet load_morphemes(const std::filesystem::path& path);
MorphemeSet parse_morphemes(std::istream& in);
void write_morphemes(std::ostream& out, const MorphemeSet& set);

/// Throws InputError unless every morpheme has a non-empty source list drawn
/// from the lexicon's words.
void validate_morpheme_sources(const MorphemeSet& set, const Lexicon& lexicon);

/// Ternary articulatory features per IPA segment.
class SegmentFeatureTable {
 public:
  SegmentFeatureTable() = default;
  SegmentFeatureTable(std::vector<std::string> feature_names,
                      std::vector<std::string> segments,
                      const std::vector<std::vector<int>>& rows);

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::string>& segments() const { return segments_; }
  const Matrix<double>& values() const { return values_; }

  Index segment_count() const { return values_.rows(); }
  Index feature_count() const { return values_.cols(); }
  std::size_t longest_segment() const { return longest_; }

  std::optional<Index> find(std::string_view segment) const;
  bool contains(std::string_view segment) const { return find(segment).has_value(); }
  auto row(Index i) const { return values_.row(i); }

 private:
  std::vector<std::string> feature_names_;
  std::vector<std::string> segments_;
  Matrix<double> values_;
  std::unordered_map<std::string, Index> index_;
  std::size_t longest_ = 0;  // in code points
};

SegmentFeatureTable load_feature_table(const std::filesystem::path& path);
SegmentFeatureTable parse_feature_table(std::istream& in);
void write_feature_table(std::ostream& out, const SegmentFeatureTable& table);

struct SemanticLoad {
  EmbeddingMatrix matrix;             // rows follow vocabulary order
  std::vector<std::string> missing;   // vocabulary items absent from the file
};

/// Reads the `token v1 ... vD` text format (optional `N D` header line).
/// Only vocabulary tokens are materialized, but every row's width is checked.
SemanticLoad load_semantic_embeddings(const std::filesystem::path& path,
                                      std::span<const std::string> vocabulary);
SemanticLoad parse_semantic_embeddings(std::istream& in, std::span<const std::string> vocabulary);
void write_semantic_embeddings(std::ostream& out, const EmbeddingMatrix& matrix);

/// Shortest decimal representation that reads back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace iconicity
