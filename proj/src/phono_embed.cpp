#include "iconicity/phono_embed.hpp"

#include "iconicity/unicode.hpp"

#include <bit>
#include <fstream>
#include <ostream>

namespace iconicity {

Tokenization try_tokenize_ipa(std::string_view transcription, const SegmentFeatureTable& table) {
  Tokenization out;
  const auto offsets = code_point_offsets(transcription);
  const std::size_t n = offsets.size() - 1;
  const std::size_t longest = std::max<std::size_t>(table.longest_segment(), 1);

  std::size_t i = 0;
  while (i < n) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(longest, n - i); len >= 1; --len) {
      const auto piece = transcription.substr(offsets[i], offsets[i + len] - offsets[i]);
      if (table.contains(piece)) {
        out.segments.emplace_back(piece);
        matched = len;
        break;
      }
    }
    if (matched == 0) {
      out.unknown.emplace_back(transcription.substr(offsets[i], offsets[i + 1] - offsets[i]));
      matched = 1;
    }
    i += matched;
  }
  return out;
}

Tokenization tokenize_ipa(std::string_view transcription, const SegmentFeatureTable& table) {
  if (transcription.empty()) throw InputError("empty transcription");
  auto tok = try_tokenize_ipa(transcription, table);
  if (tok.segments.empty())
    throw InputError("no known segment in transcription '" + std::string(transcription) + "'");
  return tok;
}

Vector<double> mean_pool(std::span<const std::string> segments, const SegmentFeatureTable& table) {
  if (segments.empty()) throw InputError("mean_pool of an empty segment list");
  Vector<double> sum = Vector<double>::Zero(table.feature_count());
  for (const auto& seg : segments) {
    const auto row = table.find(seg);
    if (!row) throw InputError("unknown segment '" + seg + "'");
    sum += table.row(*row).transpose();
  }
  return sum / static_cast<double>(segments.size());
}

ColumnDrop drop_zero_variance(const EmbeddingMatrix& matrix) {
  if (matrix.size() < 2) throw AnalysisError("zero-variance check needs at least 2 rows");
  ColumnDrop out;
  out.kept = varying_columns(matrix.values);
  if (out.kept.empty()) throw AnalysisError("every dimension has zero variance (degenerate space)");
  out.matrix.ids = matrix.ids;
  out.matrix.values = matrix.values(Eigen::all, out.kept);
  if (!matrix.columns.empty())
    for (Index c : out.kept) out.matrix.columns.push_back(matrix.columns[static_cast<std::size_t>(c)]);
  return out;
}

ColumnTransform fit_normalization(const Matrix<double>& values, Normalization mode) {
  ColumnTransform t;
  if (mode == Normalization::z_score) {
    t.offset = column_means(values);
    t.scale = column_population_sd(values);
  } else {
    t.offset = values.colwise().minCoeff();
    t.scale = values.colwise().maxCoeff() - t.offset;
  }
  for (Index c = 0; c < t.scale.size(); ++c)
    if (!(t.scale(c) > 0.0))
      throw AnalysisError("cannot normalize zero-variance column " + std::to_string(c));
  return t;
}

EmbeddingMatrix normalize_dataset(const EmbeddingMatrix& matrix, Normalization mode) {
  EmbeddingMatrix out = matrix;
  out.values = fit_normalization(matrix.values, mode).apply(matrix.values);
  return out;
}

CosineResult cosine_similarity_matrix(const EmbeddingMatrix& matrix) {
  CosineResult out;
  std::vector<Index> rows;
  for (Index r = 0; r < matrix.size(); ++r) {
    if (matrix.values.row(r).norm() > kZeroNormThreshold) {
      rows.push_back(r);
      out.matrix.ids.push_back(matrix.ids[static_cast<std::size_t>(r)]);
    } else {
      out.excluded.push_back(matrix.ids[static_cast<std::size_t>(r)]);
    }
  }
  out.matrix.values = cosine_similarity(matrix.values(rows, Eigen::all));
  return out;
}

PooledEmbeddings pool_transcriptions(std::span<const PhoneticItem> items,
                                     const SegmentFeatureTable& table) {
  PooledEmbeddings out;
  out.matrix.columns = table.feature_names();
  std::vector<Vector<double>> rows;
  for (const auto& item : items) {
    if (item.transcription.empty()) {
      out.excluded.push_back({item.id, "no transcription"});
      continue;
    }
    const auto tok = try_tokenize_ipa(item.transcription, table);
    for (const auto& u : tok.unknown) ++out.unknown_characters[u];
    if (tok.segments.empty()) {
      out.excluded.push_back({item.id, "no known segment in '" + item.transcription + "'"});
      continue;
    }
    rows.push_back(mean_pool(tok.segments, table));
    out.matrix.ids.push_back(item.id);
  }
  out.matrix.values.resize(static_cast<Index>(rows.size()), table.feature_count());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.matrix.values.row(static_cast<Index>(r)) = rows[r].transpose();
  return out;
}

PhoneticSpace build_phonetic_space(std::span<const PhoneticItem> items,
                                   const SegmentFeatureTable& table, Normalization mode) {
  auto pooled = pool_transcriptions(items, table);
  auto dropped = drop_zero_variance(pooled.matrix);

  PhoneticSpace space;
  space.kept_features = std::move(dropped.kept);
  space.transform = fit_normalization(dropped.matrix.values, mode);
  space.embeddings = std::move(dropped.matrix);
  space.embeddings.values = space.transform.apply(space.embeddings.values);
  space.excluded = std::move(pooled.excluded);
  space.unknown_characters = std::move(pooled.unknown_characters);
  return space;
}

// ------------------------------------------------------------ export

static_assert(std::endian::native == std::endian::little, "binary similarity export assumes little-endian");

void write_similarity_binary(const std::filesystem::path& base, const SimilarityMatrix& sim) {
  auto bin_path = base;
  bin_path += ".bin";
  auto ids_path = base;
  ids_path += ".ids";
  std::ofstream bin(bin_path, std::ios::binary);
  std::ofstream ids(ids_path, std::ios::binary);
  if (!bin || !ids) throw InputError("cannot write " + base.string() + ".{bin,ids}");
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = sim.values;
  bin.write(reinterpret_cast<const char*>(row_major.data()),
            static_cast<std::streamsize>(row_major.size() * sizeof(double)));
  for (const auto& id : sim.ids) ids << id << '\n';
}

SimilarityMatrix read_similarity_binary(const std::filesystem::path& base) {
  auto bin_path = base;
  bin_path += ".bin";
  auto ids_path = base;
  ids_path += ".ids";
  std::ifstream ids(ids_path, std::ios::binary);
  if (!ids) throw InputError("cannot open " + ids_path.string());
  SimilarityMatrix sim;
  for (std::string line; std::getline(ids, line);) sim.ids.push_back(line);
  const auto n = static_cast<Index>(sim.ids.size());

  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw InputError("cannot open " + bin_path.string());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major(n, n);
  bin.read(reinterpret_cast<char*>(row_major.data()), static_cast<std::streamsize>(n * n * sizeof(double)));
  if (bin.gcount() != static_cast<std::streamsize>(n * n * sizeof(double)) || bin.peek() != EOF)
    throw InputError(bin_path.string() + ": size does not match " + std::to_string(n) + " ids");
  sim.values = row_major;
  return sim;
}

void write_similarity_tsv(std::ostream& out, const SimilarityMatrix& sim) {
  out << "id";
  for (const auto& id : sim.ids) out << '\t' << id;
  out << '\n';
  for (Index r = 0; r < sim.size(); ++r) {
    out << sim.ids[static_cast<std::size_t>(r)];
    for (Index c = 0; c < sim.size(); ++c) out << '\t' << format_double(sim.values(r, c));
    out << '\n';
  }
}

}  // namespace iconicity
