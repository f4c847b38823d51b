#include "iconicity/pipeline.hpp"

#include "iconicity/align.hpp"
#include "iconicity/digest.hpp"
#include "iconicity/provider.hpp"
#include "iconicity/rng.hpp"
#include "iconicity/scales.hpp"
#include "iconicity/subspace.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace iconicity {

namespace fs = std::filesystem;

namespace {

std::string normalization_name(Normalization n) { return n == Normalization::z_score ? "z_score" : "min_max"; }

Normalization normalization_from(const std::string& s) {
  if (s == "z_score" || s == "zscore") return Normalization::z_score;
  if (s == "min_max" || s == "minmax") return Normalization::min_max;
  throw InputError("unknown normalization '" + s + "'");
}

std::string cca_null_name(CcaNull n) { return n == CcaNull::refit ? "refit" : "scores"; }

CcaNull cca_null_from(const std::string& s) {
  if (s == "refit") return CcaNull::refit;
  if (s == "scores") return CcaNull::scores;
  throw InputError("unknown cca_null '" + s + "'");
}

std::string pole_direction_name(PoleDirection d) { return d == PoleDirection::weights ? "weights" : "loadings"; }

PoleDirection pole_direction_from(const std::string& s) {
  if (s == "weights") return PoleDirection::weights;
  if (s == "loadings") return PoleDirection::loadings;
  throw InputError("unknown pole_direction '" + s + "'");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InputError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const Json::exception&) {
      throw InputError(std::string("config key '") + key + "' has the wrong type");
    }
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
}

Json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

const LanguageInputs& inputs_for(const RunConfig& config, const std::string& language) {
  auto it = config.inputs.find(language);
  if (it == config.inputs.end()) throw InputError("no inputs configured for language '" + language + "'");
  return it->second;
}

fs::path scales_path(const RunConfig& config) {
  return config.scales.empty() ? default_scales_path() : config.scales;
}

/// Records written outputs and input digests in results/manifest.json.
void update_manifest(const RunConfig& config, const std::string& started, const std::vector<fs::path>& outputs,
                     const std::map<std::string, std::string>& inputs) {
  const auto path = config.output_dir / "manifest.json";
  Json m = fs::exists(path) ? read_json(path) : Json::object();
  m["tool_version"] = kToolVersion;
  m["config_hash"] = config_hash(config);
  m["config"] = result_config_json(config);
  if (!m.contains("inputs")) m["inputs"] = Json::object();
  for (const auto& [name, digest] : inputs) m["inputs"][name] = digest;
  if (!m.contains("outputs")) m["outputs"] = Json::object();
  const auto finished = utc_timestamp();
  for (const auto& out : outputs) {
    const auto rel = fs::relative(out, config.output_dir).generic_string();
    m["outputs"][rel] = {{"sha256", sha256_file(out)}, {"started", started}, {"finished", finished}};
  }
  write_text(path, dump_payload(m));
}

std::string file_digest(const fs::path& p) { return p.empty() ? "" : sha256_file(p); }

}  // namespace

// ------------------------------------------------------------------ config

RunConfig run_config_from_json(const Json& j, const fs::path& base) {
  reject_unknown(j, {"languages", "inputs", "feature_table", "scales", "output_dir", "analyses", "parameters", "seed",
                     "workers"},
                 "run config");
  RunConfig c;
  read_if(j, "languages", c.languages);
  std::string s;
  if (j.contains("feature_table")) {
    read_if(j, "feature_table", s);
    c.feature_table = resolve(base, s);
  }
  if (j.contains("scales")) {
    s.clear();
    read_if(j, "scales", s);
    c.scales = resolve(base, s);
  }
  if (j.contains("output_dir")) {
    read_if(j, "output_dir", s);
    c.output_dir = resolve(base, s);
  }
  if (j.contains("inputs")) {
    for (const auto& [lang, v] : j.at("inputs").items()) {
      reject_unknown(v, {"lexicon", "morphemes", "vectors"}, "inputs." + lang);
      LanguageInputs in;
      std::string p;
      if (v.contains("lexicon")) { read_if(v, "lexicon", p); in.lexicon = resolve(base, p); }
      if (v.contains("morphemes")) { read_if(v, "morphemes", p); in.morphemes = resolve(base, p); }
      if (v.contains("vectors")) { read_if(v, "vectors", p); in.vectors = resolve(base, p); }
      c.inputs[lang] = in;
    }
  }
  if (j.contains("analyses")) {
    const auto& a = j.at("analyses");
    reject_unknown(a, {"rsa", "mi", "knn", "cca", "subspace"}, "analyses");
    read_if(a, "rsa", c.analyses.rsa);
    read_if(a, "mi", c.analyses.mi);
    read_if(a, "knn", c.analyses.knn);
    read_if(a, "cca", c.analyses.cca);
    read_if(a, "subspace", c.analyses.subspace);
  }
  if (j.contains("parameters")) {
    const auto& p = j.at("parameters");
    reject_unknown(p, {"k", "bins", "n_components", "shuffles", "null_points", "subspace_shuffles",
                       "subspace_null_points", "percentile", "threshold", "zipf_cutoff", "neighbors", "top_words",
                       "subspace_pool", "subspace_candidates", "ridge", "normalization", "cca_null", "pole_direction",
                       "scatter"},
                   "parameters");
    auto& q = c.params;
    read_if(p, "k", q.k);
    read_if(p, "bins", q.bins);
    read_if(p, "n_components", q.n_components);
    read_if(p, "shuffles", q.shuffles);
    read_if(p, "null_points", q.null_points);
    read_if(p, "subspace_shuffles", q.subspace_shuffles);
    read_if(p, "subspace_null_points", q.subspace_null_points);
    read_if(p, "percentile", q.percentile);
    read_if(p, "threshold", q.threshold);
    read_if(p, "zipf_cutoff", q.zipf_cutoff);
    read_if(p, "neighbors", q.neighbors);
    read_if(p, "top_words", q.top_words);
    read_if(p, "subspace_pool", q.subspace_pool);
    read_if(p, "subspace_candidates", q.subspace_candidates);
    read_if(p, "ridge", q.ridge);
    read_if(p, "scatter", q.scatter);
    std::string e;
    if (p.contains("normalization")) { read_if(p, "normalization", e); q.normalization = normalization_from(e); }
    if (p.contains("cca_null")) { read_if(p, "cca_null", e); q.cca_null = cca_null_from(e); }
    if (p.contains("pole_direction")) { read_if(p, "pole_direction", e); q.pole_direction = pole_direction_from(e); }
  }
  read_if(j, "seed", c.seed);
  read_if(j, "workers", c.workers);
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  return run_config_from_json(read_json(path), path.parent_path());
}

Json result_config_json(const RunConfig& c) {
  const auto& p = c.params;
  return {{"languages", c.languages},
          {"analyses", {{"rsa", c.analyses.rsa}, {"mi", c.analyses.mi}, {"knn", c.analyses.knn},
                        {"cca", c.analyses.cca}, {"subspace", c.analyses.subspace}}},
          {"parameters", {{"k", p.k},
                          {"bins", p.bins},
                          {"n_components", p.n_components},
                          {"shuffles", p.shuffles},
                          {"null_points", p.null_points},
                          {"subspace_shuffles", p.subspace_shuffles},
                          {"subspace_null_points", p.subspace_null_points},
                          {"percentile", p.percentile},
                          {"threshold", p.threshold},
                          {"zipf_cutoff", p.zipf_cutoff},
                          {"neighbors", p.neighbors},
                          {"top_words", p.top_words},
                          {"subspace_pool", p.subspace_pool},
                          {"subspace_candidates", p.subspace_candidates},
                          {"ridge", p.ridge},
                          {"normalization", normalization_name(p.normalization)},
                          {"cca_null", cca_null_name(p.cca_null)},
                          {"pole_direction", pole_direction_name(p.pole_direction)},
                          {"scatter", p.scatter}}},
          {"seed", c.seed}};
}

Json run_config_to_json(const RunConfig& c) {
  Json j = result_config_json(c);
  Json inputs = Json::object();
  for (const auto& [lang, in] : c.inputs)
    inputs[lang] = {{"lexicon", in.lexicon.string()}, {"morphemes", in.morphemes.string()},
                    {"vectors", in.vectors.string()}};
  j["inputs"] = inputs;
  j["feature_table"] = c.feature_table.string();
  j["scales"] = c.scales.string();
  j["output_dir"] = c.output_dir.string();
  j["workers"] = c.workers;
  return j;
}

std::string config_hash(const RunConfig& config) { return sha256_hex(result_config_json(config).dump()); }

void validate(const RunConfig& c) {
  const auto& p = c.params;
  const auto fail = [](const std::string& what) { throw InputError("parameter out of bounds: " + what); };
  if (c.languages.empty()) fail("languages must not be empty");
  std::set<std::string> seen;
  for (const auto& l : c.languages)
    if (!seen.insert(l).second) fail("language '" + l + "' listed twice");
  if (p.k < 1) fail("k must be >= 1");
  if (p.bins < 2) fail("bins must be >= 2");
  if (p.n_components < 1) fail("n_components must be >= 1");
  if (p.shuffles < 1) fail("shuffles must be >= 1");
  if (p.null_points < 1 || p.null_points > p.shuffles) fail("null_points must lie in [1, shuffles]");
  if (p.subspace_shuffles < 1) fail("subspace_shuffles must be >= 1");
  if (p.subspace_null_points < 1 || p.subspace_null_points > p.subspace_shuffles)
    fail("subspace_null_points must lie in [1, subspace_shuffles]");
  if (!(p.percentile >= 0.0 && p.percentile <= 100.0)) fail("percentile must lie in [0, 100]");
  if (!(p.threshold >= 0.0)) fail("threshold must be >= 0");
  if (!std::isfinite(p.zipf_cutoff)) fail("zipf_cutoff must be finite");
  if (p.neighbors < 1) fail("neighbors must be >= 1");
  if (p.top_words < 1) fail("top_words must be >= 1");
  if (p.subspace_pool < 3) fail("subspace_pool must be >= 3");
  if (!(p.ridge >= 0.0)) fail("ridge must be >= 0");
  if (c.workers < 1) fail("workers must be >= 1");
}

std::uint64_t analysis_seed(const RunConfig& config, std::string_view analysis, std::string_view language,
                            std::string_view extra) {
  return extra.empty() ? derive_seed(config.seed, {analysis, language})
                       : derive_seed(config.seed, {analysis, language, extra});
}

// ------------------------------------------------------------------ preparation

PreparedLanguage prepare_language(const RunConfig& config, const std::string& language,
                                  const SegmentFeatureTable& table) {
  const auto& in = inputs_for(config, language);
  if (in.morphemes.empty()) throw InputError("no morpheme file configured for '" + language + "'");
  if (in.vectors.empty()) throw InputError("no vector file configured for '" + language + "'");

  PreparedLanguage out;
  out.language = language;
  const MorphemeSet morphemes = load_morphemes(in.morphemes);
  out.digests["morphemes"] = file_digest(in.morphemes);
  out.digests["vectors"] = file_digest(in.vectors);
  if (!in.lexicon.empty()) {
    validate_morpheme_sources(morphemes, load_lexicon(in.lexicon, language));
    out.digests["lexicon"] = file_digest(in.lexicon);
  }
  out.n_input = morphemes.size();

  std::vector<std::string> forms;
  std::unordered_set<std::string> seen;
  for (const auto& m : morphemes.morphemes)
    if (seen.insert(m.form).second) forms.push_back(m.form);
  const auto sem = load_semantic_embeddings(in.vectors, forms);
  std::unordered_map<std::string, Index> row_of;
  for (std::size_t r = 0; r < sem.matrix.ids.size(); ++r) row_of.emplace(sem.matrix.ids[r], static_cast<Index>(r));

  std::vector<PhoneticItem> items;
  std::unordered_map<std::string, Index> semantic_row;
  for (const auto& m : morphemes.morphemes) {
    auto it = row_of.find(m.form);
    if (it == row_of.end()) {
      out.excluded.push_back({m.id(), "no semantic vector"});
      continue;
    }
    if (sem.matrix.values.row(it->second).norm() <= kZeroNormThreshold) {
      out.excluded.push_back({m.id(), "zero-norm semantic vector"});
      continue;
    }
    items.push_back({m.id(), m.transcription});
    semantic_row.emplace(m.id(), it->second);
  }
  if (items.size() < 3) throw AnalysisError(language + ": fewer than 3 morphemes have semantic vectors");

  // Zero-norm phonetic rows leave the population, which moves the
  // normalization, so refit until stable.
  PhoneticSpace space;
  for (;;) {
    space = build_phonetic_space(items, table, config.params.normalization);
    for (const auto& e : space.excluded) out.excluded.push_back(e);
    std::unordered_set<std::string> drop;
    for (const auto& e : space.excluded) drop.insert(e.id);
    for (Index r = 0; r < space.embeddings.size(); ++r)
      if (space.embeddings.values.row(r).norm() <= kZeroNormThreshold) {
        drop.insert(space.embeddings.ids[static_cast<std::size_t>(r)]);
        out.excluded.push_back({space.embeddings.ids[static_cast<std::size_t>(r)], "zero-norm phonetic embedding"});
      }
    if (drop.empty()) break;
    std::erase_if(items, [&](const PhoneticItem& it) { return drop.count(it.id) > 0; });
    if (items.size() < 3) throw AnalysisError(language + ": fewer than 3 morphemes remain after exclusions");
  }
  out.unknown_characters = space.unknown_characters;
  out.phonetic = std::move(space.embeddings);

  out.semantic.ids = out.phonetic.ids;
  out.semantic.values.resize(out.phonetic.size(), sem.matrix.dims());
  for (std::size_t i = 0; i < out.semantic.ids.size(); ++i)
    out.semantic.values.row(static_cast<Index>(i)) = sem.matrix.values.row(semantic_row.at(out.semantic.ids[i]));

  // Standardize semantic columns for CCA; a constant column keeps unit scale.
  auto& t = out.semantic_transform;
  t.offset = column_means(out.semantic.values);
  t.scale = column_population_sd(out.semantic.values);
  for (Index c = 0; c < t.scale.size(); ++c)
    if (!(t.scale(c) > 0.0)) t.scale(c) = 1.0;

  // Similarity matrices are cached by input digest.
  const auto key = sha256_hex(out.digests["morphemes"] + out.digests["vectors"] + sha256_hex(Json(table.feature_names()).dump()) +
                              normalization_name(config.params.normalization) + "sim-v1")
                       .substr(0, 16);
  const auto cache = config.output_dir / "cache" / (language + "-" + key);
  auto phon_base = cache;
  phon_base += ".phonetic";
  auto sem_base = cache;
  sem_base += ".semantic";
  bool cached = false;
  if (fs::exists(fs::path(phon_base) += ".bin") && fs::exists(fs::path(sem_base) += ".bin")) {
    try {
      out.phonetic_sim = read_similarity_binary(phon_base);
      out.semantic_sim = read_similarity_binary(sem_base);
      cached = out.phonetic_sim.ids == out.phonetic.ids && out.semantic_sim.ids == out.phonetic.ids;
    } catch (const InputError&) {
      cached = false;
    }
  }
  if (!cached) {
    out.phonetic_sim = cosine_similarity_matrix(out.phonetic).matrix;
    out.semantic_sim = cosine_similarity_matrix(out.semantic).matrix;
    fs::create_directories(cache.parent_path());
    write_similarity_binary(phon_base, out.phonetic_sim);
    write_similarity_binary(sem_base, out.semantic_sim);
  }
  return out;
}

// ------------------------------------------------------------------ global

std::vector<Json> run_global(const RunConfig& config) {
  validate(config);
  const auto started = utc_timestamp();
  const auto& a = config.analyses;
  std::vector<Json> payloads;
  std::vector<fs::path> written;
  std::map<std::string, std::string> manifest_inputs;

  if (a.rsa || a.mi || a.knn || a.cca) {
    if (config.feature_table.empty()) throw InputError("no feature table configured");
    const auto table = load_feature_table(config.feature_table);
    manifest_inputs["feature_table"] = file_digest(config.feature_table);
    const auto& p = config.params;

    for (const auto& lang : config.languages) {
      const auto prep = prepare_language(config, lang, table);
      for (const auto& [name, digest] : prep.digests) manifest_inputs[lang + "." + name] = digest;
      const auto options = [&](const char* analysis) {
        return PermutationOptions{.n_shuffles = p.shuffles, .null_points = p.null_points,
                                  .seed = analysis_seed(config, analysis, lang), .alternative = Alternative::greater,
                                  .workers = config.workers};
      };

      Json results = Json::object();
      results["rsa"] = a.rsa ? to_json(rsa(prep.phonetic_sim, prep.semantic_sim, options("rsa"))) : Json(nullptr);
      results["mi"] = a.mi ? to_json(mutual_information(prep.phonetic_sim, prep.semantic_sim, p.bins, options("mi")))
                           : Json(nullptr);
      results["knn_overlap"] =
          a.knn ? to_json(knn_overlap(prep.phonetic_sim, prep.semantic_sim, p.k, options("knn"))) : Json(nullptr);

      Json canonical_pearson = nullptr;
      if (a.cca) {
        const Matrix<double> x = prep.phonetic.values;
        const Matrix<double> y = prep.semantic_transform.apply(prep.semantic.values);
        const CcaOptions cca_options{p.n_components, p.ridge};
        auto model = fit_cca(x, y, cca_options);
        model.semantic_scale = prep.semantic_transform.scale;
        const auto rhos = canonical_rank_correlations(model, x, y, cca_options, options("cca"), p.cca_null);
        results["cca"] = Json::array();
        for (const auto& r : rhos) results["cca"].push_back(to_json(r));
        canonical_pearson = Json::array();
        for (Index c = 0; c < model.canonical_pearson.size(); ++c) canonical_pearson.push_back(model.canonical_pearson(c));

        Json model_json = {{"language", lang},
                           {"config_hash", config_hash(config)},
                           {"phonetic_features", prep.phonetic.columns},
                           {"model", cca_model_to_json(model)}};
        const auto model_path = config.output_dir / lang / "cca_model.json";
        write_text(model_path, dump_payload(model_json));
        written.push_back(model_path);
      } else {
        results["cca"] = nullptr;
      }

      Json excluded = Json::array();
      for (const auto& e : prep.excluded) excluded.push_back({{"id", e.id}, {"reason", e.reason}});
      Json unknown = Json::object();
      for (const auto& [ch, count] : prep.unknown_characters) unknown[ch] = count;

      Json payload = {{"language", lang},
                      {"tool_version", kToolVersion},
                      {"config_hash", config_hash(config)},
                      {"config", result_config_json(config)},
                      {"inputs", prep.digests},
                      {"n_morphemes_input", prep.n_input},
                      {"n_morphemes", prep.phonetic.size()},
                      {"phonetic_features", prep.phonetic.columns},
                      {"semantic_dims", prep.semantic.dims()},
                      {"excluded", excluded},
                      {"unknown_characters", unknown},
                      {"results", results},
                      {"cca_canonical_pearson", canonical_pearson},
                      {"notes",
                       {"null samples are the first null_points of shuffles; each shuffle depends only on (seed, index)",
                        "mutual information is computed over the upper-triangle pair vectors",
                        "percentile poles use the inclusive reading (>= the 75th percentile)"}}};
      const auto path = config.output_dir / lang / "global.json";
      write_text(path, dump_payload(payload));
      written.push_back(path);
      payloads.push_back(std::move(payload));
    }
  }

  const auto md = config.output_dir / "global.md";
  write_text(md, render_global_table(payloads));
  written.push_back(md);
  update_manifest(config, started, written, manifest_inputs);
  return payloads;
}

// ------------------------------------------------------------------ subspace

Json run_subspace(const RunConfig& config) {
  validate(config);
  const auto started = utc_timestamp();
  const auto& p = config.params;
  std::vector<fs::path> written;
  std::map<std::string, std::string> manifest_inputs;

  Json payload = {{"tool_version", kToolVersion},
                  {"config_hash", config_hash(config)},
                  {"config", result_config_json(config)},
                  {"inputs", Json::object()},
                  {"results", Json::array()}};

  if (config.analyses.subspace) {
    if (config.feature_table.empty()) throw InputError("no feature table configured");
    const auto table = load_feature_table(config.feature_table);
    const auto scales = load_scales(scales_path(config));
    payload["inputs"]["feature_table"] = file_digest(config.feature_table);
    payload["inputs"]["scales"] = file_digest(scales_path(config));

    for (const auto& lang : config.languages) {
      const auto& in = inputs_for(config, lang);
      if (in.lexicon.empty() || in.vectors.empty())
        throw InputError("subspace analysis for '" + lang + "' needs a lexicon and a vector file");
      const auto lexicon = load_lexicon(in.lexicon, lang);
      payload["inputs"][lang] = {{"lexicon", file_digest(in.lexicon)}, {"vectors", file_digest(in.vectors)}};

      std::vector<std::string> vocab;
      std::unordered_set<std::string> seen;
      const auto add = [&](const std::string& w) {
        if (seen.insert(w).second) vocab.push_back(w);
      };
      for (const auto& lx : lexicon.entries) add(lx.word);
      for (const auto& s : scales) {
        auto it = s.semantic.find(lang);
        if (it == s.semantic.end())
          throw InputError("scale '" + s.name + "' has no semantic exemplars for language '" + lang + "'");
        for (const auto& w : it->second.pos) add(w);
        for (const auto& w : it->second.neg) add(w);
      }
      const auto vectors = load_semantic_embeddings(in.vectors, vocab).matrix;

      for (const auto& scale : scales) {
        SubspaceOptions options;
        options.n_words = p.subspace_pool;
        options.pool_top = p.subspace_candidates;
        options.normalization = p.normalization;
        options.permutation = {.n_shuffles = p.subspace_shuffles, .null_points = p.subspace_null_points,
                               .seed = analysis_seed(config, "subspace", lang, scale.name),
                               .alternative = Alternative::two_sided, .workers = config.workers};
        const auto result = scale_alignment(scale, lang, {vectors, lexicon}, table, options);
        payload["results"].push_back(to_json(result));
        if (p.scatter) {
          std::ostringstream tsv;
          tsv << "word\tsemantic\tphonetic\n";
          for (const auto& w : result.projections)
            tsv << w.word << '\t' << format_double(w.semantic) << '\t' << format_double(w.phonetic) << '\n';
          const auto path = config.output_dir / "subspace" / lang / (scale.name + ".tsv");
          write_text(path, tsv.str());
          written.push_back(path);
        }
      }
    }
  }
  for (const auto& [k, v] : payload["inputs"].items())
    if (v.is_string()) manifest_inputs[k] = v.get<std::string>();
    else
      for (const auto& [k2, v2] : v.items()) manifest_inputs[k + "." + k2] = v2.get<std::string>();

  const auto path = config.output_dir / "subspace.json";
  write_text(path, dump_payload(payload));
  written.push_back(path);
  const auto md = config.output_dir / "subspace.md";
  write_text(md, payload["results"].empty() ? std::string("No subspace results.\n") : render_subspace_table(payload));
  written.push_back(md);
  update_manifest(config, started, written, manifest_inputs);
  return payload;
}

// ------------------------------------------------------------------ interpret

std::vector<Json> run_interpret(const RunConfig& config) {
  validate(config);
  const auto started = utc_timestamp();
  const auto& p = config.params;
  std::vector<Json> payloads;
  std::vector<fs::path> written;

  for (const auto& lang : config.languages) {
    const auto dir = config.output_dir / lang;
    const auto model_path = dir / "cca_model.json";
    const auto global_path = dir / "global.json";
    if (!fs::exists(model_path) || !fs::exists(global_path))
      throw InputError("no fitted CCA artifacts for '" + lang + "'; run analyze-global with cca enabled first");
    const auto model_json = read_json(model_path);
    const auto global = read_json(global_path);
    const auto model = cca_model_from_json(model_json.at("model"));
    const auto features = model_json.at("phonetic_features").get<std::vector<std::string>>();
    const auto& cca = global.at("results").at("cca");

    Json payload = {{"language", lang}, {"config_hash", config_hash(config)}, {"components", Json::array()}};
    std::vector<Index> significant;
    if (cca.is_array())
      for (std::size_t c = 0; c < cca.size(); ++c)
        if (cca[c].at("p_value").get<double>() < 0.05) significant.push_back(static_cast<Index>(c));

    if (significant.empty()) {
      payload["note"] = "no component reached p < 0.05";
    } else {
      const auto& in = inputs_for(config, lang);
      if (in.lexicon.empty() || in.vectors.empty())
        throw InputError("interpretation for '" + lang + "' needs a lexicon and a vector file");
      const auto lexicon = load_lexicon(in.lexicon, lang);
      std::vector<std::string> vocab;
      for (const auto& lx : lexicon.entries) vocab.push_back(lx.word);
      const auto vectors = load_semantic_embeddings(in.vectors, vocab).matrix;
      if (vectors.dims() != model.weights_semantic.rows())
        throw InputError("vector file dimension differs from the fitted CCA model for '" + lang + "'");
      const PoleOptions options{p.percentile, p.threshold, p.neighbors, p.zipf_cutoff, p.pole_direction};
      for (Index c : significant) {
        auto report = build_pole_report(model, c, features, vectors, lexicon, options);
        const auto r = alignment_from_json(cca[static_cast<std::size_t>(c)]);
        report.rho = r.value;
        report.p_value = r.p_value;
        payload["components"].push_back(to_json(report));
      }
    }
    const auto json_path = dir / "poles.json";
    write_text(json_path, dump_payload(payload));
    const auto md_path = dir / "poles.md";
    write_text(md_path, render_pole_table(payload));
    written.push_back(json_path);
    written.push_back(md_path);
    payloads.push_back(std::move(payload));
  }
  update_manifest(config, started, written, {});
  return payloads;
}

// ------------------------------------------------------------------ report

void run_report(const RunConfig& config, const std::vector<ErrorRow>& error_rows) {
  validate(config);
  const auto started = utc_timestamp();
  std::vector<fs::path> written;

  std::vector<Json> globals;
  std::string poles;
  for (const auto& lang : config.languages) {
    const auto g = config.output_dir / lang / "global.json";
    if (fs::exists(g)) globals.push_back(read_json(g));
    const auto pj = config.output_dir / lang / "poles.json";
    if (fs::exists(pj)) poles += render_pole_table(read_json(pj)) + "\n";
  }
  const auto global_md = config.output_dir / "global.md";
  write_text(global_md, render_global_table(globals));
  written.push_back(global_md);

  const auto sj = config.output_dir / "subspace.json";
  if (fs::exists(sj)) {
    const auto payload = read_json(sj);
    const auto md = config.output_dir / "subspace.md";
    write_text(md, payload.at("results").empty() ? std::string("No subspace results.\n") : render_subspace_table(payload));
    written.push_back(md);
  }
  if (!poles.empty()) {
    const auto md = config.output_dir / "poles.md";
    write_text(md, poles);
    written.push_back(md);
  }
  if (!error_rows.empty()) {
    const auto md = config.output_dir / "segmentation_errors.md";
    write_text(md, render_error_rate_table(error_rows));
    written.push_back(md);
  }
  update_manifest(config, started, written, {});
}

// ------------------------------------------------------------------ embed

void run_embed(const RunConfig& config, const std::string& language, const fs::path& out_dir, bool tsv) {
  if (config.feature_table.empty()) throw InputError("no feature table configured");
  const auto table = load_feature_table(config.feature_table);
  const auto prep = prepare_language(config, language, table);
  fs::create_directories(out_dir);
  write_similarity_binary(out_dir / (language + ".phonetic"), prep.phonetic_sim);
  write_similarity_binary(out_dir / (language + ".semantic"), prep.semantic_sim);
  std::ostringstream emb;
  write_semantic_embeddings(emb, prep.phonetic);
  write_text(out_dir / (language + ".phonetic.vec"), emb.str());
  std::ostringstream features;
  for (const auto& f : prep.phonetic.columns) features << f << '\n';
  write_text(out_dir / (language + ".phonetic.features"), features.str());
  std::ostringstream excluded;
  excluded << "id\treason\n";
  for (const auto& e : prep.excluded) excluded << e.id << '\t' << e.reason << '\n';
  write_text(out_dir / (language + ".excluded.tsv"), excluded.str());
  if (tsv) {
    std::ostringstream a, b;
    write_similarity_tsv(a, prep.phonetic_sim);
    write_similarity_tsv(b, prep.semantic_sim);
    write_text(out_dir / (language + ".phonetic.tsv"), a.str());
    write_text(out_dir / (language + ".semantic.tsv"), b.str());
  }
}

}  // namespace iconicity
