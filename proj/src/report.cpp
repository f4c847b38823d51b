#include "iconicity/report.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace iconicity {

Json to_json(const NullSummary& s) {
  return {{"mean", s.mean}, {"sd", s.sd}, {"q05", s.q05}, {"q50", s.q50}, {"q95", s.q95}, {"max", s.max}};
}

Json to_json(const AlignmentResult& r) {
  return {{"statistic", r.statistic},
          {"value", r.value},
          {"p_value", r.p_value},
          {"stars", significance_stars(r.p_value)},
          {"alternative", to_string(r.alternative)},
          {"n_shuffles", r.n_shuffles},
          {"null_points", r.null_points},
          {"seed", r.seed},
          {"null", to_json(r.null_summary)}};
}

AlignmentResult alignment_from_json(const Json& j) {
  AlignmentResult r;
  r.statistic = j.at("statistic").get<std::string>();
  r.value = j.at("value").get<double>();
  r.p_value = j.at("p_value").get<double>();
  r.alternative = alternative_from_string(j.at("alternative").get<std::string>());
  r.n_shuffles = j.at("n_shuffles").get<std::size_t>();
  r.null_points = j.at("null_points").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  const auto& n = j.at("null");
  r.null_summary = {n.at("mean").get<double>(), n.at("sd").get<double>(), n.at("q05").get<double>(),
                    n.at("q50").get<double>(),  n.at("q95").get<double>(), n.at("max").get<double>()};
  return r;
}

Json to_json(const ScaleResult& r) {
  return {{"language", r.language},
          {"scale", r.scale},
          {"rho", r.rho},
          {"p_value", r.p_value},
          {"stars", significance_stars(r.p_value)},
          {"n_words", r.n_words},
          {"short_pool", r.short_pool},
          {"dropped", {{"missing_embedding", r.missing_embedding},
                       {"missing_ipa", r.missing_ipa},
                       {"untokenizable", r.untokenizable}}},
          {"phonetic_features", r.kept_features},
          {"alignment", to_json(r.alignment)}};
}

namespace {

Json features_json(const std::vector<PoleFeature>& fs) {
  Json out = Json::array();
  for (const auto& f : fs) out.push_back({{"feature", f.name}, {"loading", f.loading}});
  return out;
}

Json words_json(const std::vector<PoleWord>& ws) {
  Json out = Json::array();
  for (const auto& w : ws) out.push_back({{"word", w.word}, {"similarity", w.similarity}});
  return out;
}

Json matrix_json(const Matrix<double>& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename V>
Json vector_json(const V& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix<double> matrix_from(const Json& j, Index rows, Index cols, const char* what) {
  if (static_cast<Index>(j.size()) != rows) throw InputError(std::string("CCA model field '") + what + "' has wrong shape");
  Matrix<double> m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Index>(row.size()) != cols)
      throw InputError(std::string("CCA model field '") + what + "' has wrong shape");
    for (Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

RowVector<double> row_from(const Json& j) {
  RowVector<double> v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

}  // namespace

Json to_json(const PoleReport& r) {
  return {{"component", r.component},
          {"rho", r.rho},
          {"p_value", r.p_value},
          {"stars", significance_stars(r.p_value)},
          {"phonetic_pos", features_json(r.phonetic_pos)},
          {"phonetic_neg", features_json(r.phonetic_neg)},
          {"semantic_pos", words_json(r.semantic_pos)},
          {"semantic_neg", words_json(r.semantic_neg)},
          {"semantic_pos_short", r.semantic_pos_short},
          {"semantic_neg_short", r.semantic_neg_short}};
}

Json cca_model_to_json(const CcaModel& m) {
  return {{"n_components", m.n_components},
          {"ridge", m.ridge},
          {"dims_phonetic", m.weights_phonetic.rows()},
          {"dims_semantic", m.weights_semantic.rows()},
          {"canonical_pearson", vector_json(m.canonical_pearson)},
          {"weights_phonetic", matrix_json(m.weights_phonetic)},
          {"weights_semantic", matrix_json(m.weights_semantic)},
          {"loadings_phonetic", matrix_json(m.loadings_phonetic)},
          {"loadings_semantic", matrix_json(m.loadings_semantic)},
          {"mean_phonetic", vector_json(m.mean_phonetic)},
          {"mean_semantic", vector_json(m.mean_semantic)},
          {"semantic_scale", vector_json(m.semantic_scale)}};
}

CcaModel cca_model_from_json(const Json& j) {
  try {
    CcaModel m;
    m.n_components = j.at("n_components").get<Index>();
    m.ridge = j.at("ridge").get<double>();
    const auto dx = j.at("dims_phonetic").get<Index>();
    const auto dy = j.at("dims_semantic").get<Index>();
    const auto k = m.n_components;
    m.canonical_pearson = row_from(j.at("canonical_pearson")).transpose();
    m.weights_phonetic = matrix_from(j.at("weights_phonetic"), dx, k, "weights_phonetic");
    m.weights_semantic = matrix_from(j.at("weights_semantic"), dy, k, "weights_semantic");
    m.loadings_phonetic = matrix_from(j.at("loadings_phonetic"), dx, k, "loadings_phonetic");
    m.loadings_semantic = matrix_from(j.at("loadings_semantic"), dy, k, "loadings_semantic");
    m.mean_phonetic = row_from(j.at("mean_phonetic"));
    m.mean_semantic = row_from(j.at("mean_semantic"));
    m.semantic_scale = row_from(j.at("semantic_scale"));
    return m;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed CCA model: ") + e.what());
  }
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string format_cell(double value, double p_value) { return format_fixed(value) + significance_stars(p_value); }

namespace {

std::string display_name(const std::string& code) {
  for (const auto& set : fewshot_sets())
    if (set.code == code) return set.name;
  return code;
}

std::string cell(const Json& result) {
  if (result.is_null()) return "";
  return format_cell(result.at("value").get<double>(), result.at("p_value").get<double>());
}

void row(std::ostringstream& out, const std::vector<std::string>& cells) {
  out << '|';
  for (const auto& c : cells) out << ' ' << c << " |";
  out << '\n';
}

void header(std::ostringstream& out, const std::vector<std::string>& cells) {
  row(out, cells);
  out << '|';
  for (std::size_t i = 0; i < cells.size(); ++i) out << " --- |";
  out << '\n';
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

const Json& null_json() {
  static const Json n = nullptr;
  return n;
}

const Json& member(const Json& j, const char* key) { return j.contains(key) ? j.at(key) : null_json(); }

}  // namespace

std::string render_global_table(const std::vector<Json>& payloads) {
  std::size_t components = 0;
  for (const auto& p : payloads) {
    const auto& cca = member(member(p, "results"), "cca");
    if (cca.is_array()) components = std::max(components, cca.size());
  }
  std::vector<std::string> head{"Language", "n morphemes", "RSA (ρ)", "MI (bits)", "kNN overlap"};
  for (std::size_t c = 0; c < components; ++c) head.push_back("CCA CV" + std::to_string(c + 1) + " (ρ)");
  std::ostringstream out;
  header(out, head);
  for (const auto& p : payloads) {
    const auto& res = member(p, "results");
    std::vector<std::string> cells{display_name(p.at("language").get<std::string>()),
                                   std::to_string(p.at("n_morphemes").get<std::size_t>()),
                                   cell(member(res, "rsa")), cell(member(res, "mi")), cell(member(res, "knn_overlap"))};
    const auto& cca = member(res, "cca");
    for (std::size_t c = 0; c < components; ++c)
      cells.push_back(cca.is_array() && c < cca.size() ? cell(cca.at(c)) : "");
    row(out, cells);
  }
  out << "\nLevels: * p < 0.05, ** p < 0.01, *** p < 0.001.\n";
  return out.str();
}

std::string render_subspace_table(const Json& payload) {
  std::vector<std::string> languages, scales;
  std::set<std::string> seen_lang, seen_scale;
  for (const auto& r : payload.at("results")) {
    const auto lang = r.at("language").get<std::string>();
    const auto scale = r.at("scale").get<std::string>();
    if (seen_lang.insert(lang).second) languages.push_back(lang);
    if (seen_scale.insert(scale).second) scales.push_back(scale);
  }
  const auto find = [&](const std::string& lang, const std::string& scale) -> const Json* {
    for (const auto& r : payload.at("results"))
      if (r.at("language") == lang && r.at("scale") == scale) return &r;
    return nullptr;
  };

  std::ostringstream out;
  std::vector<std::string> head{"Language"};
  for (const auto& s : scales) head.push_back(s);
  header(out, head);
  for (const auto& lang : languages) {
    std::vector<std::string> cells{display_name(lang)};
    for (const auto& s : scales) {
      const Json* r = find(lang, s);
      cells.push_back(r ? format_cell(r->at("rho").get<double>(), r->at("p_value").get<double>()) : "");
    }
    row(out, cells);
  }
  out << "\nLevels: * p < 0.05, ** p < 0.01, *** p < 0.001.\n\nWords per cell:\n\n";
  header(out, head);
  for (const auto& lang : languages) {
    std::vector<std::string> cells{display_name(lang)};
    for (const auto& s : scales) {
      const Json* r = find(lang, s);
      std::string c;
      if (r) {
        c = std::to_string(r->at("n_words").get<std::size_t>());
        if (r->at("short_pool").get<bool>()) c += " (short)";
      }
      cells.push_back(c);
    }
    row(out, cells);
  }
  return out.str();
}

std::string render_pole_table(const Json& payload) {
  std::ostringstream out;
  out << "## " << display_name(payload.at("language").get<std::string>()) << "\n\n";
  const auto& components = payload.at("components");
  if (components.empty()) {
    out << "No component reached p < 0.05.\n";
    return out.str();
  }
  header(out, {"CV", "ρ", "Semantic Pole (+)", "Phonetic Pole (+)", "Semantic Pole (-)", "Phonetic Pole (-)",
               "Semantic Interpretation", "Phonetic Interpretation"});
  const auto words = [](const Json& list) {
    std::vector<std::string> w;
    for (const auto& x : list) w.push_back(x.at("word").get<std::string>());
    return join(w);
  };
  const auto features = [](const Json& list) {
    std::vector<std::string> f;
    for (const auto& x : list) f.push_back(x.at("feature").get<std::string>());
    return join(f);
  };
  for (const auto& c : components)
    row(out, {std::to_string(c.at("component").get<Index>()),
              format_cell(c.at("rho").get<double>(), c.at("p_value").get<double>()), words(c.at("semantic_pos")),
              features(c.at("phonetic_pos")), words(c.at("semantic_neg")), features(c.at("phonetic_neg")), "", ""});
  return out.str();
}

std::string render_error_rate_table(const std::vector<ErrorRow>& rows) {
  std::ostringstream out;
  header(out, {"Language", "Errors", "Error rate (95% CI)"});
  for (const auto& r : rows)
    row(out, {display_name(r.language), std::to_string(r.errors) + "/" + std::to_string(r.n),
              format_error_rate(error_rate_ci(r.errors, r.n))});
  return out.str();
}

std::string dump_payload(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace iconicity
