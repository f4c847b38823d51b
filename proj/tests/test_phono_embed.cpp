#include "iconicity/phono_embed.hpp"

#include "fixture.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace iconicity;

namespace {

SegmentFeatureTable small_table() {
  return SegmentFeatureTable({"f1", "f2", "f3"}, {"tʃ", "t", "a", "ʃ"}, {{1, 0, -1}, {-1, 0, 1}, {1, 1, 1}, {0, -1, 0}});
}

SegmentFeatureTable fixture_table() {
  return SegmentFeatureTable(fixture::feature_names(), fixture::segments(), fixture::feature_rows());
}

}  // namespace

TEST(Tokenize, LongestMatchWins) {
  const auto t = small_table();
  EXPECT_EQ(tokenize_ipa("tʃa", t).segments, (std::vector<std::string>{"tʃ", "a"}));
  EXPECT_EQ(tokenize_ipa("a", t).segments, (std::vector<std::string>{"a"}));
  EXPECT_EQ(tokenize_ipa("tʃʃ", t).segments, (std::vector<std::string>{"tʃ", "ʃ"}));
}

TEST(Tokenize, UnknownCharactersSkippedAndReported) {
  const auto t = small_table();
  const auto r = try_tokenize_ipa("axq", t);
  EXPECT_EQ(r.segments, (std::vector<std::string>{"a"}));
  EXPECT_EQ(r.unknown, (std::vector<std::string>{"x", "q"}));
  EXPECT_THROW(tokenize_ipa("xq", t), InputError);
}

TEST(MeanPool, SingleSegmentIsIdentity) {
  const auto t = small_table();
  const std::vector<std::string> s{"a"};
  EXPECT_EQ(mean_pool(s, t), Vector<double>::Ones(3));
}

TEST(MeanPool, Symmetric) {
  const auto t = small_table();
  const std::vector<std::string> s{"tʃ", "t"};
  EXPECT_EQ(mean_pool(s, t), Vector<double>::Zero(3));
}

TEST(MeanPool, MatchesSumThenDivide) {
  const auto t = fixture_table();
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> segs;
    std::vector<std::size_t> rows;
    for (int i = 0; i < 3; ++i) {
      rows.push_back(gen() % fixture::segments().size());
      segs.push_back(fixture::segments()[rows.back()]);
    }
    const auto pooled = mean_pool(segs, t);
    for (std::size_t f = 0; f < fixture::feature_names().size(); ++f) {
      double sum = 0;
      for (auto r : rows) sum += fixture::feature_rows()[r][f];
      EXPECT_NEAR(pooled(static_cast<Index>(f)), sum / 3.0, 1e-15);
    }
  }
}

TEST(ZeroVariance, Drops) {
  EmbeddingMatrix m;
  m.ids = {"a", "b", "c"};
  m.columns = {"x", "y", "z"};
  m.values.resize(3, 3);
  m.values << 0.5, 1, 2, 0.5, 2, 2, 0.5, 3, 2;
  const auto d = drop_zero_variance(m);
  EXPECT_EQ(d.kept, (std::vector<Index>{1}));
  EXPECT_EQ(d.matrix.columns, (std::vector<std::string>{"y"}));

  m.values << 1, 2, 3, 4, 5, 7, 0, 1, 1;
  EXPECT_EQ(drop_zero_variance(m).kept.size(), 3u);
}

TEST(Normalize, TwoPointZScore) {
  EmbeddingMatrix m;
  m.ids = {"a", "b"};
  m.values.resize(2, 1);
  m.values << 1, 3;
  const auto z = normalize_dataset(m);
  EXPECT_DOUBLE_EQ(z.values(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(z.values(1, 0), 1.0);
}

TEST(Normalize, IdempotentAndCentered) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n(2.0, 3.0);
  EmbeddingMatrix m;
  m.values.resize(5, 3);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 3; ++j) m.values(i, j) = n(gen);
  m.ids = {"a", "b", "c", "d", "e"};
  const auto z = normalize_dataset(m);
  for (Index j = 0; j < 3; ++j) {
    long double s = 0, ss = 0;
    for (Index i = 0; i < 5; ++i) s += z.values(i, j);
    for (Index i = 0; i < 5; ++i) ss += (z.values(i, j) - s / 5) * (z.values(i, j) - s / 5);
    EXPECT_LT(std::abs(static_cast<double>(s / 5)), 1e-12);
    EXPECT_NEAR(static_cast<double>(ss / 5), 1.0, 1e-12);
  }
  EXPECT_LT((normalize_dataset(z).values - z.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Normalize, MinMax) {
  EmbeddingMatrix m;
  m.ids = {"a", "b", "c"};
  m.values.resize(3, 1);
  m.values << 2, 4, 3;
  const auto z = normalize_dataset(m, Normalization::min_max);
  EXPECT_DOUBLE_EQ(z.values(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(z.values(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(z.values(2, 0), 0.5);
}

TEST(Cosine, Anchors) {
  Matrix<double> rows(4, 2);
  rows << 1, 0, 0, 1, 1, 1, -1, -1;
  const auto s = cosine_similarity(rows);
  EXPECT_DOUBLE_EQ(s(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(s(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(s(2, 3), -1.0);
}

TEST(Cosine, SymmetricUnitDiagonalMatchesOracle) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> n;
  Matrix<double> rows(20, 7);
  oracle::Mat o(20, oracle::Vec(7));
  for (Index i = 0; i < 20; ++i)
    for (Index j = 0; j < 7; ++j) o[i][j] = rows(i, j) = n(gen);
  const auto s = cosine_similarity(rows);
  const auto ref = oracle::cosine(o);
  for (Index i = 0; i < 20; ++i) {
    EXPECT_EQ(s(i, i), 1.0);
    for (Index j = 0; j < 20; ++j) {
      EXPECT_EQ(s(i, j), s(j, i));
      EXPECT_NEAR(s(i, j), ref[i][j], 1e-14);
    }
  }
}

TEST(Cosine, ZeroNormRowsExcluded) {
  EmbeddingMatrix m;
  m.ids = {"a", "zero", "b"};
  m.values.resize(3, 2);
  m.values << 1, 0, 0, 0, 0, 1;
  const auto r = cosine_similarity_matrix(m);
  EXPECT_EQ(r.excluded, (std::vector<std::string>{"zero"}));
  EXPECT_EQ(r.matrix.ids, (std::vector<std::string>{"a", "b"}));
}

TEST(PhoneticSpace, DropsZeroVarianceAndNormalizes) {
  const auto t = small_table();
  // f2 is 0 for both tʃ and t, so it drops.
  const std::vector<PhoneticItem> items{{"1", "tʃ"}, {"2", "t"}, {"3", "tʃt"}, {"4", "xq"}};
  const auto space = build_phonetic_space(items, t);
  EXPECT_EQ(space.kept_features, (std::vector<Index>{0, 2}));
  EXPECT_EQ(space.embeddings.columns, (std::vector<std::string>{"f1", "f3"}));
  ASSERT_EQ(space.excluded.size(), 1u);
  EXPECT_EQ(space.excluded[0].id, "4");
  EXPECT_EQ(space.unknown_characters.at("x"), 1u);
  EXPECT_NEAR(space.embeddings.values.col(0).mean(), 0.0, 1e-15);
}

TEST(SimilarityExport, BinaryRoundTrip) {
  SimilarityMatrix s;
  s.ids = {"a", "b"};
  s.values.resize(2, 2);
  s.values << 1, 0.25, 0.25, 1;
  const auto base = std::filesystem::temp_directory_path() / "iconicity_sim_roundtrip";
  write_similarity_binary(base, s);
  const auto back = read_similarity_binary(base);
  EXPECT_EQ(back.ids, s.ids);
  EXPECT_EQ(back.values, s.values);
}
