#include "iconicity/corpus.hpp"

#include "iconicity/unicode.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

namespace iconicity {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void strip_bom(std::string& line) {
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

bool lexeme_before(const Lexeme& a, const Lexeme& b) {
  if (a.zipf != b.zipf) return a.zipf > b.zipf;
  return a.word < b.word;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw InputError("not a number: '" + std::string(text) + "'");
  return value;
}

// ---------------------------------------------------------------- lexicon

Lexicon parse_lexicon(std::istream& in, std::string language) {
  Lexicon lexicon;
  lexicon.language = std::move(language);

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::unordered_map<std::string, std::size_t> by_word;

  while (next_line(in, line)) {
    ++line_no;
    if (line_no == 1) strip_bom(line);
    if (trim(line).empty()) continue;
    if (!header_seen) {
      const auto cols = split(line, '\t');
      if (cols.size() != 4 || trim(cols[0]) != "word" || trim(cols[1]) != "lemma" ||
          trim(cols[2]) != "zipf" || trim(cols[3]) != "ipa")
        throw InputError(where(line_no) + "expected header 'word\\tlemma\\tzipf\\tipa'");
      header_seen = true;
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() == 3) cols.emplace_back();
    if (cols.size() != 4)
      throw InputError(where(line_no) + "expected 4 tab-separated columns, got " +
                       std::to_string(cols.size()));
    Lexeme lx;
    lx.word = nfc(trim(cols[0]));
    lx.lemma = nfc(trim(cols[1]));
    lx.ipa = nfc(trim(cols[3]));
    if (lx.word.empty()) throw InputError(where(line_no) + "empty word");
    if (lx.lemma.empty()) lx.lemma = lx.word;
    try {
      lx.zipf = parse_double(cols[2]);
    } catch (const InputError&) {
      throw InputError(where(line_no) + "non-numeric zipf '" + std::string(cols[2]) +
                       "' for word '" + lx.word + "'");
    }
    if (!std::isfinite(lx.zipf))
      throw InputError(where(line_no) + "non-finite zipf for word '" + lx.word + "'");

    auto [it, inserted] = by_word.try_emplace(lx.word, lexicon.entries.size());
    if (inserted) {
      lexicon.entries.push_back(std::move(lx));
      continue;
    }
    Lexeme& kept = lexicon.entries[it->second];
    if (kept.ipa != lx.ipa)
      lexicon.warnings.push_back(where(line_no) + "duplicate word '" + lx.word +
                                 "' with differing IPA ('" + kept.ipa + "' vs '" + lx.ipa +
                                 "'); keeping the higher-zipf row (first on ties)");
    if (lx.zipf > kept.zipf) kept = std::move(lx);
  }

  std::stable_sort(lexicon.entries.begin(), lexicon.entries.end(), lexeme_before);
  return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path, std::string language) {
  auto in = open_input(path);
  try {
    return parse_lexicon(in, std::move(language));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_lexicon(std::ostream& out, const Lexicon& lexicon) {
  out << "word\tlemma\tzipf\tipa\n";
  for (const auto& lx : lexicon.entries)
    out << lx.word << '\t' << lx.lemma << '\t' << format_double(lx.zipf) << '\t' << lx.ipa << '\n';
}

Lexicon top_n(const Lexicon& lexicon, std::size_t n) {
  Lexicon out;
  out.language = lexicon.language;
  out.entries = lexicon.entries;
  std::stable_sort(out.entries.begin(), out.entries.end(), lexeme_before);
  if (out.entries.size() > n) out.entries.resize(n);
  return out;
}

Lexicon zipf_filter(const Lexicon& lexicon, double cutoff) {
  Lexicon out;
  out.language = lexicon.language;
  for (const auto& lx : lexicon.entries)
    if (lx.zipf > cutoff) out.entries.push_back(lx);
  return out;
}

// ---------------------------------------------------------------- morphemes

MorphemeSet parse_morphemes(std::istream& in) {
  MorphemeSet set;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::set<std::pair<std::string, std::string>> seen;

  while (next_line(in, line)) {
    ++line_no;
    if (line_no == 1) strip_bom(line);
    if (trim(line).empty()) continue;
    const auto cols = split(line, '\t');
    if (!header_seen) {
      if (cols.size() != 4 || trim(cols[0]) != "form" || trim(cols[1]) != "transcription" ||
          trim(cols[2]) != "language" || trim(cols[3]) != "sources")
        throw InputError(where(line_no) +
                         "expected header 'form\\ttranscription\\tlanguage\\tsources'");
      header_seen = true;
      continue;
    }
    if (cols.size() != 4) throw InputError(where(line_no) + "expected 4 columns");
    Morpheme m;
    m.form = nfc(trim(cols[0]));
    m.transcription = nfc(trim(cols[1]));
    m.language = std::string(trim(cols[2]));
    if (m.transcription.empty()) throw InputError(where(line_no) + "empty transcription");
    for (auto src : split(cols[3], '|')) {
      auto word = nfc(trim(src));
      if (!word.empty() && std::find(m.sources.begin(), m.sources.end(), word) == m.sources.end())
        m.sources.push_back(std::move(word));
    }
    if (set.language.empty()) set.language = m.language;
    if (m.language != set.language)
      throw InputError(where(line_no) + "mixed languages in one morpheme file");
    if (!seen.emplace(m.form, m.transcription).second)
      throw InputError(where(line_no) + "duplicate morpheme " + m.id());
    set.morphemes.push_back(std::move(m));
  }
  return set;
}

MorphemeSet load_morphemes(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_morphemes(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_morphemes(std::ostream& out, const MorphemeSet& set) {
  out << "form\ttranscription\tlanguage\tsources\n";
  for (const auto& m : set.morphemes) {
    out << m.form << '\t' << m.transcription << '\t' << m.language << '\t';
    for (std::size_t i = 0; i < m.sources.size(); ++i) out << (i ? "|" : "") << m.sources[i];
    out << '\n';
  }
}

void validate_morpheme_sources(const MorphemeSet& set, const Lexicon& lexicon) {
  std::unordered_set<std::string> words;
  for (const auto& lx : lexicon.entries) words.insert(lx.word);
  for (const auto& m : set.morphemes) {
    if (m.sources.empty()) throw InputError("morpheme " + m.id() + " has no source words");
    for (const auto& s : m.sources)
      if (!words.contains(s))
        throw InputError("morpheme " + m.id() + " cites source '" + s + "' absent from the lexicon");
  }
}

// ---------------------------------------------------------------- features

SegmentFeatureTable::SegmentFeatureTable(std::vector<std::string> feature_names,
                                         std::vector<std::string> segments,
                                         const std::vector<std::vector<int>>& rows)
    : feature_names_(std::move(feature_names)), segments_(std::move(segments)) {
  if (segments_.size() != rows.size()) throw InputError("segment/row count mismatch");
  std::unordered_set<std::string> names;
  for (const auto& f : feature_names_) {
    if (f.empty()) throw InputError("empty feature name");
    if (!names.insert(f).second) throw InputError("duplicate feature name '" + f + "'");
  }
  const auto width = static_cast<Index>(feature_names_.size());
  values_.resize(static_cast<Index>(segments_.size()), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& seg = segments_[r];
    if (seg.empty()) throw InputError("empty segment key at row " + std::to_string(r + 1));
    if (static_cast<Index>(rows[r].size()) != width)
      throw InputError("ragged row for segment '" + seg + "': " + std::to_string(rows[r].size()) +
                       " values, expected " + std::to_string(width));
    for (Index c = 0; c < width; ++c) {
      const int v = rows[r][static_cast<std::size_t>(c)];
      if (v < -1 || v > 1)
        throw InputError("segment '" + seg + "' feature '" + feature_names_[static_cast<std::size_t>(c)] +
                         "' has value " + std::to_string(v) + " outside {-1,0,+1}");
      values_(static_cast<Index>(r), c) = v;
    }
    if (!index_.emplace(seg, static_cast<Index>(r)).second)
      throw InputError("duplicate segment '" + seg + "'");
    longest_ = std::max(longest_, code_point_count(seg));
  }
}

std::optional<Index> SegmentFeatureTable::find(std::string_view segment) const {
  auto it = index_.find(std::string(segment));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SegmentFeatureTable parse_feature_table(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  std::vector<std::string> segments;
  std::vector<std::vector<int>> rows;
  bool header_seen = false;

  while (next_line(in, line)) {
    ++line_no;
    if (line_no == 1) strip_bom(line);
    if (trim(line).empty()) continue;
    const auto cols = split(line, '\t');
    if (!header_seen) {
      if (cols.empty() || trim(cols[0]) != "segment")
        throw InputError(where(line_no) + "first header column must be 'segment'");
      for (std::size_t i = 1; i < cols.size(); ++i) names.emplace_back(trim(cols[i]));
      header_seen = true;
      continue;
    }
    std::string seg = nfc(trim(cols[0]));
    if (cols.size() != names.size() + 1)
      throw InputError(where(line_no) + "ragged row for segment '" + seg + "'");
    std::vector<int> row;
    row.reserve(names.size());
    for (std::size_t i = 1; i < cols.size(); ++i) {
      const auto cell = trim(cols[i]);
      int v = 0;
      if (cell == "+" || cell == "+1" || cell == "1") v = 1;
      else if (cell == "-" || cell == "-1") v = -1;
      else if (cell == "0") v = 0;
      else
        throw InputError(where(line_no) + "segment '" + seg + "' has value '" + std::string(cell) +
                         "' outside {-1,0,+1}");
      row.push_back(v);
    }
    segments.push_back(std::move(seg));
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw InputError("feature table is empty");
  return SegmentFeatureTable(std::move(names), std::move(segments), rows);
}

SegmentFeatureTable load_feature_table(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_feature_table(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_feature_table(std::ostream& out, const SegmentFeatureTable& table) {
  out << "segment";
  for (const auto& f : table.feature_names()) out << '\t' << f;
  out << '\n';
  for (Index r = 0; r < table.segment_count(); ++r) {
    out << table.segments()[static_cast<std::size_t>(r)];
    for (Index c = 0; c < table.feature_count(); ++c)
      out << '\t' << static_cast<int>(table.values()(r, c));
    out << '\n';
  }
}

// ---------------------------------------------------------------- semantic vectors

SemanticLoad parse_semantic_embeddings(std::istream& in, std::span<const std::string> vocabulary) {
  std::unordered_map<std::string, std::size_t> wanted;
  std::vector<std::string> order;
  for (const auto& v : vocabulary) {
    auto key = nfc(v);
    if (wanted.try_emplace(key, order.size()).second) order.push_back(std::move(key));
  }

  std::vector<std::vector<double>> found(order.size());
  std::vector<bool> present(order.size(), false);
  long dim = -1;
  std::string line;
  std::size_t line_no = 0;

  while (next_line(in, line)) {
    ++line_no;
    if (line_no == 1) strip_bom(line);
    const auto body = trim(line);
    if (body.empty()) continue;

    std::vector<std::string_view> fields;
    for (auto f : split(body, ' '))
      if (!f.empty()) fields.push_back(f);

    if (line_no == 1 && fields.size() == 2) {
      const auto is_count = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
      };
      if (is_count(fields[0]) && is_count(fields[1])) {
        dim = std::stol(std::string(fields[1]));
        continue;
      }
    }
    const long width = static_cast<long>(fields.size()) - 1;
    if (width < 1) throw InputError(where(line_no) + "row without values");
    if (dim < 0) dim = width;
    if (width != dim)
      throw InputError(where(line_no) + "dimension mismatch: " + std::to_string(width) +
                       " values, expected " + std::to_string(dim));

    auto it = wanted.find(nfc(fields[0]));
    if (it == wanted.end() || present[it->second]) continue;
    auto& vec = found[it->second];
    vec.reserve(static_cast<std::size_t>(width));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      try {
        vec.push_back(parse_double(fields[i]));
      } catch (const InputError&) {
        throw InputError(where(line_no) + "bad value '" + std::string(fields[i]) + "'");
      }
    }
    present[it->second] = true;
  }

  SemanticLoad result;
  std::size_t n_found = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (present[i]) ++n_found;
    else result.missing.push_back(order[i]);
  }
  if (n_found == 0) throw InputError("no vocabulary item found in the vector file");

  result.matrix.values.resize(static_cast<Index>(n_found), dim);
  Index row = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!present[i]) continue;
    result.matrix.ids.push_back(order[i]);
    for (Index c = 0; c < dim; ++c) result.matrix.values(row, c) = found[i][static_cast<std::size_t>(c)];
    ++row;
  }
  return result;
}

SemanticLoad load_semantic_embeddings(const std::filesystem::path& path,
                                      std::span<const std::string> vocabulary) {
  auto in = open_input(path);
  try {
    return parse_semantic_embeddings(in, vocabulary);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_semantic_embeddings(std::ostream& out, const EmbeddingMatrix& matrix) {
  out << matrix.size() << ' ' << matrix.dims() << '\n';
  for (Index r = 0; r < matrix.size(); ++r) {
    out << matrix.ids[static_cast<std::size_t>(r)];
    for (Index c = 0; c < matrix.dims(); ++c) out << ' ' << format_double(matrix.values(r, c));
    out << '\n';
  }
}

}  // namespace iconicity
