#include "iconicity/subspace.hpp"

#include "vocabulary.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace iconicity;

using fixture::fixture_vocabulary;

namespace {

Matrix<double> rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix<double> m(static_cast<Index>(r.size()), static_cast<Index>(r.begin()->size()));
  Index i = 0;
  for (const auto& row : r) {
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vector<double> point(double x, double y) { return (Vector<double>(2) << x, y).finished(); }

SubspaceOptions options(std::size_t n_words = 400) {
  SubspaceOptions o;
  o.n_words = n_words;
  return o;
}

}  // namespace

TEST(Line, CentroidArithmetic) {
  const auto line = build_line(rows({{1, 0}, {3, 0}}), rows({{-1, 0}, {-3, 0}}), Space::semantic);
  EXPECT_EQ(line.origin, point(-2, 0));
  EXPECT_EQ(line.direction, point(4, 0));
  const auto single = build_line(rows({{1, 1}}), rows({{0, 0}}), Space::phonetic);
  EXPECT_EQ(single.direction, point(1, 1));
  EXPECT_THROW(build_line(rows({{1, 1}}), rows({{1, 1}}), Space::semantic), AnalysisError);
  EXPECT_THROW(build_line(Matrix<double>(0, 2), rows({{1, 1}}), Space::semantic), InputError);
}

TEST(Line, ProjectionAnchors) {
  const auto line = build_line(rows({{1, 0}, {3, 0}}), rows({{-1, 0}, {-3, 0}}), Space::semantic);
  EXPECT_DOUBLE_EQ(project(point(2, 0), line), 1.0);
  EXPECT_DOUBLE_EQ(project(point(-2, 0), line), 0.0);
  EXPECT_DOUBLE_EQ(project(point(0, 5), line), 0.5);
  EXPECT_DOUBLE_EQ(perpendicular_distance(point(7, 0), line), 0.0);
  EXPECT_DOUBLE_EQ(perpendicular_distance(point(0, 5), line), 5.0);
}

TEST(Line, PythagoreanIdentity) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> g;
  for (int t = 0; t < 200; ++t) {
    Matrix<double> pos(2, 10), neg(3, 10);
    for (Index i = 0; i < 10; ++i) {
      pos(0, i) = g(gen), pos(1, i) = g(gen);
      neg(0, i) = g(gen), neg(1, i) = g(gen), neg(2, i) = g(gen);
    }
    const auto line = build_line(pos, neg, Space::semantic);
    Vector<double> p(10);
    for (Index i = 0; i < 10; ++i) p(i) = 3 * g(gen);
    const double t_ = project(p, line);
    const double d = perpendicular_distance(p, line);
    const double lhs = (p - line.origin).squaredNorm();
    EXPECT_NEAR(d * d + t_ * t_ * line.direction.squaredNorm(), lhs, 1e-10 * lhs);
  }
}

TEST(Line, ProjectRowsAgreesWithProject) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> g;
  Matrix<double> pts(15, 4);
  for (Index i = 0; i < 15; ++i)
    for (Index j = 0; j < 4; ++j) pts(i, j) = g(gen);
  const auto line = build_line(pts.topRows(2), pts.bottomRows(2), Space::phonetic);
  const auto all = project_rows(pts, line);
  for (Index i = 0; i < 15; ++i) EXPECT_NEAR(all(i), project(pts.row(i).transpose(), line), 1e-14);
}

TEST(SelectWords, ShortPoolFlagged) {
  EmbeddingMatrix v;
  v.ids = {"a", "b", "c", "d", "e"};
  v.values = rows({{0, 1}, {0, 2}, {1, 0}, {2, 1}, {3, 3}});
  const auto line = build_line(rows({{1, 0}}), rows({{0, 0}}), Space::semantic);
  const auto s = select_words(v, line, 10000);
  EXPECT_EQ(s.rows.size(), 5u);
  EXPECT_TRUE(s.short_pool);
  const auto one = select_words(v, line, 1);
  EXPECT_EQ(one.rows, (std::vector<Index>{2}));
  EXPECT_FALSE(one.short_pool);
}

TEST(SelectWords, MatchesFullSortOracle) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> g;
  EmbeddingMatrix v;
  v.values.resize(100, 6);
  for (Index i = 0; i < 100; ++i) {
    v.ids.push_back("w" + std::to_string(1000 + i));
    for (Index j = 0; j < 6; ++j) v.values(i, j) = g(gen);
  }
  const auto line = build_line(v.values.topRows(3), v.values.middleRows(3, 3), Space::semantic);
  std::vector<std::pair<double, std::string>> ref;
  for (Index i = 0; i < 100; ++i) {
    const Vector<double> p = v.values.row(i).transpose() - line.origin;
    const double t = p.dot(line.direction) / line.direction.squaredNorm();
    ref.emplace_back((p - t * line.direction).norm(), v.ids[static_cast<std::size_t>(i)]);
  }
  std::sort(ref.begin(), ref.end());
  const auto s = select_words(v, line, 30);
  ASSERT_EQ(s.rows.size(), 30u);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(v.ids[static_cast<std::size_t>(s.rows[i])], ref[i].second);
}

TEST(ScaleAlignment, PlantedSignalHitsFloor) {
  auto v = fixture_vocabulary(1);
  const auto r = scale_alignment(v.size, "xa", {v.vectors, v.lexicon}, v.table, options());
  EXPECT_GT(r.rho, 0.9);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 5001.0);
  EXPECT_EQ(r.n_words, 400u);
  EXPECT_EQ(r.projections.size(), 400u);
}

TEST(ScaleAlignment, ShuffledPhonologyMostlyNotSignificant) {
  int significant = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto v = fixture_vocabulary(seed, true);
    auto o = options();
    o.permutation.seed = seed;
    o.permutation.n_shuffles = o.permutation.null_points = 1000;
    const auto r = scale_alignment(v.size, "xa", {v.vectors, v.lexicon}, v.table, o);
    EXPECT_LT(std::abs(r.rho), 0.2);
    significant += r.p_value < 0.05;
  }
  EXPECT_LE(significant, 2);
}

TEST(ScaleAlignment, PoleSwapNegatesRhoExactly) {
  auto v = fixture_vocabulary(2);
  for (const auto* scale : {&v.size, &v.sharpness}) {
    const auto base = scale_alignment(*scale, "xa", {v.vectors, v.lexicon}, v.table, options());
    const auto phon = scale_alignment(swap_poles(*scale, true, false), "xa", {v.vectors, v.lexicon}, v.table, options());
    const auto sem = scale_alignment(swap_poles(*scale, false, true), "xa", {v.vectors, v.lexicon}, v.table, options());
    const auto both = scale_alignment(swap_poles(*scale, true, true), "xa", {v.vectors, v.lexicon}, v.table, options());
    EXPECT_EQ(phon.rho, -base.rho);
    EXPECT_EQ(sem.rho, -base.rho);
    EXPECT_EQ(both.rho, base.rho);
    EXPECT_EQ(phon.p_value, base.p_value);
  }
}

TEST(ScaleAlignment, MissingExemplarIsNamed) {
  auto v = fixture_vocabulary(3);
  auto scale = v.size;
  scale.semantic["xa"].pos.push_back("enormous");
  try {
    scale_alignment(scale, "xa", {v.vectors, v.lexicon}, v.table, options());
    FAIL();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("enormous"), std::string::npos) << msg;
    EXPECT_NE(msg.find("size"), std::string::npos) << msg;
    EXPECT_NE(msg.find("xa"), std::string::npos) << msg;
  }
  EXPECT_THROW(scale_alignment(v.size, "en", {v.vectors, v.lexicon}, v.table, options()), InputError);
  auto bad_segment = v.size;
  bad_segment.phonetic_pos.push_back("ʘ");
  EXPECT_THROW(scale_alignment(bad_segment, "xa", {v.vectors, v.lexicon}, v.table, options()), InputError);
}

TEST(ScaleAlignment, CountsDroppedCandidates) {
  auto v = fixture_vocabulary(4);
  v.lexicon.entries[0].ipa.clear();
  v.lexicon.entries[1].ipa = "ʘʘ";
  v.lexicon.entries.push_back({"novector", "novector", 3.0, "pa"});
  const auto r = scale_alignment(v.size, "xa", {v.vectors, v.lexicon}, v.table, options(10000));
  EXPECT_EQ(r.missing_ipa, 1u);
  EXPECT_EQ(r.untokenizable, 1u);
  EXPECT_EQ(r.missing_embedding, 1u);
  EXPECT_TRUE(r.short_pool);
  EXPECT_EQ(r.n_words, 598u);
}

TEST(SwapPoles, Involution) {
  const ScaleConfig s{"s", {"a"}, {"b"}, {{"en", {{"x"}, {"y"}}}}};
  EXPECT_EQ(swap_poles(swap_poles(s, true, true), true, true), s);
  EXPECT_EQ(swap_poles(s, true, false).phonetic_pos, (std::vector<std::string>{"b"}));
  EXPECT_EQ(swap_poles(s, false, true).semantic.at("en").pos, (std::vector<std::string>{"y"}));
}
