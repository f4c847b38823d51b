// iconicity: command-line front end.
//
// Exit codes: 0 success, 1 input error, 2 analysis error, 3 provider error.

#include "iconicity/digest.hpp"
#include "iconicity/pipeline.hpp"
#include "iconicity/provider.hpp"
#include "iconicity/scales.hpp"
#include "iconicity/segmentation.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace iconicity;
namespace fs = std::filesystem;

namespace {

// Flags shared by the config-driven verbs. Only flags actually given
// override the config file.
struct ConfigFlags {
  std::string config;
  std::vector<std::string> languages;
  std::string out;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string feature_table, scales;
  std::vector<std::string> lexicon, morphemes, vectors;  // LANG=PATH
  Parameters p;
  std::string normalization, cca_null, pole_direction;
  bool no_rsa = false, no_mi = false, no_knn = false, no_cca = false, no_subspace = false, no_scatter = false;
  std::map<std::string, CLI::Option*> opts;
};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
  auto& o = f.opts;
  o["config"] = app->add_option("--config", f.config, "Run config (JSON)");
  o["lang"] = app->add_option("--lang", f.languages, "Language code (repeatable)");
  o["out"] = app->add_option("--out", f.out, "Output directory");
  o["seed"] = app->add_option("--seed", f.seed, "Master seed");
  o["workers"] = app->add_option("--workers", f.workers, "Worker threads per permutation test");
  o["feature-table"] = app->add_option("--feature-table", f.feature_table, "Segment feature table (TSV)");
  o["scales"] = app->add_option("--scales", f.scales, "Scale exemplar config (JSON)");
  o["lexicon"] = app->add_option("--lexicon", f.lexicon, "LANG=PATH lexicon TSV");
  o["morphemes"] = app->add_option("--morphemes", f.morphemes, "LANG=PATH morpheme TSV");
  o["vectors"] = app->add_option("--vectors", f.vectors, "LANG=PATH semantic vector file");
  o["k"] = app->add_option("--k", f.p.k, "Nearest neighbours for kNN overlap");
  o["bins"] = app->add_option("--bins", f.p.bins, "Equal-width bins for MI");
  o["components"] = app->add_option("--components", f.p.n_components, "Canonical variate pairs");
  o["shuffles"] = app->add_option("--shuffles", f.p.shuffles, "Shuffles per global test");
  o["null-points"] = app->add_option("--null-points", f.p.null_points, "Null sample size per global test");
  o["subspace-shuffles"] = app->add_option("--subspace-shuffles", f.p.subspace_shuffles);
  o["subspace-null-points"] = app->add_option("--subspace-null-points", f.p.subspace_null_points);
  o["percentile"] = app->add_option("--percentile", f.p.percentile, "Pole loading percentile");
  o["threshold"] = app->add_option("--threshold", f.p.threshold, "Pole loading floor");
  o["zipf-cutoff"] = app->add_option("--zipf-cutoff", f.p.zipf_cutoff, "Pole neighbour zipf cutoff (strict)");
  o["neighbors"] = app->add_option("--neighbors", f.p.neighbors, "Pole neighbour count");
  o["top-words"] = app->add_option("--top-words", f.p.top_words, "Lexicon words sent for segmentation");
  o["subspace-pool"] = app->add_option("--subspace-pool", f.p.subspace_pool, "Words selected near a semantic line");
  o["subspace-candidates"] =
      app->add_option("--subspace-candidates", f.p.subspace_candidates, "Top-N lexicon candidates (0 = all)");
  o["ridge"] = app->add_option("--ridge", f.p.ridge, "CCA covariance ridge");
  o["normalization"] = app->add_option("--normalization", f.normalization, "z_score | min_max");
  o["cca-null"] = app->add_option("--cca-null", f.cca_null, "refit | scores");
  o["pole-direction"] = app->add_option("--pole-direction", f.pole_direction, "weights | loadings");
  o["no-rsa"] = app->add_flag("--no-rsa", f.no_rsa);
  o["no-mi"] = app->add_flag("--no-mi", f.no_mi);
  o["no-knn"] = app->add_flag("--no-knn", f.no_knn);
  o["no-cca"] = app->add_flag("--no-cca", f.no_cca);
  o["no-subspace"] = app->add_flag("--no-subspace", f.no_subspace);
  o["no-scatter"] = app->add_flag("--no-scatter", f.no_scatter);
}

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* flag) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
    throw InputError(std::string(flag) + " expects LANG=PATH, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

RunConfig build_config(const ConfigFlags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
  const auto given = [&](const char* name) { return f.opts.at(name)->count() > 0; };
  if (given("lang")) c.languages = f.languages;
  if (given("out")) c.output_dir = f.out;
  if (given("seed")) c.seed = f.seed;
  if (given("workers")) c.workers = f.workers;
  if (given("feature-table")) c.feature_table = f.feature_table;
  if (given("scales")) c.scales = f.scales;
  for (const auto& s : f.lexicon) {
    auto [lang, path] = split_assignment(s, "--lexicon");
    c.inputs[lang].lexicon = path;
  }
  for (const auto& s : f.morphemes) {
    auto [lang, path] = split_assignment(s, "--morphemes");
    c.inputs[lang].morphemes = path;
  }
  for (const auto& s : f.vectors) {
    auto [lang, path] = split_assignment(s, "--vectors");
    c.inputs[lang].vectors = path;
  }
  auto& p = c.params;
  if (given("k")) p.k = f.p.k;
  if (given("bins")) p.bins = f.p.bins;
  if (given("components")) p.n_components = f.p.n_components;
  if (given("shuffles")) p.shuffles = f.p.shuffles;
  if (given("null-points")) p.null_points = f.p.null_points;
  if (given("subspace-shuffles")) p.subspace_shuffles = f.p.subspace_shuffles;
  if (given("subspace-null-points")) p.subspace_null_points = f.p.subspace_null_points;
  if (given("percentile")) p.percentile = f.p.percentile;
  if (given("threshold")) p.threshold = f.p.threshold;
  if (given("zipf-cutoff")) p.zipf_cutoff = f.p.zipf_cutoff;
  if (given("neighbors")) p.neighbors = f.p.neighbors;
  if (given("top-words")) p.top_words = f.p.top_words;
  if (given("subspace-pool")) p.subspace_pool = f.p.subspace_pool;
  if (given("subspace-candidates")) p.subspace_candidates = f.p.subspace_candidates;
  if (given("ridge")) p.ridge = f.p.ridge;
  // Enumerations go through the config parser for one validation path.
  Json enums = Json::object();
  if (given("normalization")) enums["normalization"] = f.normalization;
  if (given("cca-null")) enums["cca_null"] = f.cca_null;
  if (given("pole-direction")) enums["pole_direction"] = f.pole_direction;
  if (!enums.empty()) {
    const auto parsed = run_config_from_json({{"parameters", enums}}).params;
    p.normalization = given("normalization") ? parsed.normalization : p.normalization;
    p.cca_null = given("cca-null") ? parsed.cca_null : p.cca_null;
    p.pole_direction = given("pole-direction") ? parsed.pole_direction : p.pole_direction;
  }
  if (f.no_rsa) c.analyses.rsa = false;
  if (f.no_mi) c.analyses.mi = false;
  if (f.no_knn) c.analyses.knn = false;
  if (f.no_cca) c.analyses.cca = false;
  if (f.no_subspace) c.analyses.subspace = false;
  if (f.no_scatter) p.scatter = false;
  validate(c);
  return c;
}

void print_global(const std::vector<Json>& payloads) {
  for (const auto& p : payloads) {
    std::cout << p.at("language").get<std::string>() << ": " << p.at("n_morphemes").get<std::size_t>()
              << " morphemes";
    for (const char* key : {"rsa", "mi", "knn_overlap"}) {
      const auto& r = p.at("results").at(key);
      if (!r.is_null())
        std::cout << "  " << key << "=" << format_cell(r.at("value").get<double>(), r.at("p_value").get<double>());
    }
    const auto& cca = p.at("results").at("cca");
    if (cca.is_array())
      for (std::size_t c = 0; c < cca.size(); ++c)
        std::cout << "  cv" << c + 1 << "="
                  << format_cell(cca[c].at("value").get<double>(), cca[c].at("p_value").get<double>());
    std::cout << '\n';
  }
}

// ---------------------------------------------------------------- ingest

struct IngestFlags {
  std::string lang, lexicon, morphemes, feature_table, vectors, scales, out;
};

int run_ingest(const IngestFlags& f) {
  std::cout << "language " << f.lang << '\n';
  Lexicon lexicon;
  if (!f.lexicon.empty()) {
    lexicon = load_lexicon(f.lexicon, f.lang);
    std::size_t untranscribed = 0;
    for (const auto& lx : lexicon.entries) untranscribed += !lx.transcribable();
    std::cout << "lexicon: " << lexicon.size() << " lexemes, " << untranscribed << " without IPA, "
              << lexicon.warnings.size() << " warnings\n";
    for (const auto& w : lexicon.warnings) std::cerr << "warning: " << w << '\n';
  }
  MorphemeSet morphemes;
  if (!f.morphemes.empty()) {
    morphemes = load_morphemes(f.morphemes);
    if (!f.lexicon.empty()) validate_morpheme_sources(morphemes, lexicon);
    std::cout << "morphemes: " << morphemes.size() << '\n';
  }
  SegmentFeatureTable table;
  if (!f.feature_table.empty()) {
    table = load_feature_table(f.feature_table);
    std::cout << "feature table: " << table.segment_count() << " segments x " << table.feature_count()
              << " features\n";
  }
  if (!f.scales.empty() || !f.feature_table.empty()) {
    const auto path = f.scales.empty() ? default_scales_path() : fs::path(f.scales);
    const auto scales = load_scales(path);
    std::size_t missing = 0;
    for (const auto& s : scales) {
      if (!s.semantic.count(f.lang)) {
        std::cerr << "scale '" << s.name << "' has no exemplars for " << f.lang << '\n';
        ++missing;
      }
      if (!f.feature_table.empty())
        for (const auto* list : {&s.phonetic_pos, &s.phonetic_neg})
          for (const auto& seg : *list)
            if (!table.contains(seg)) {
              std::cerr << "scale '" << s.name << "': segment '" << seg << "' not in the feature table\n";
              ++missing;
            }
    }
    std::cout << "scales: " << scales.size() << " (" << missing << " problems)\n";
    if (missing) throw InputError("scale config does not resolve for " + f.lang);
  }
  if (!f.vectors.empty()) {
    std::vector<std::string> vocab;
    for (const auto& lx : lexicon.entries) vocab.push_back(lx.word);
    for (const auto& m : morphemes.morphemes) vocab.push_back(m.form);
    if (vocab.empty()) throw InputError("--vectors needs --lexicon or --morphemes to define a vocabulary");
    const auto load = load_semantic_embeddings(f.vectors, vocab);
    std::cout << "vectors: " << load.matrix.size() << " found, " << load.missing.size() << " missing, dim "
              << load.matrix.dims() << '\n';
  }
  if (!f.out.empty()) {
    fs::create_directories(f.out);
    if (!f.lexicon.empty()) {
      std::ofstream o(fs::path(f.out) / "lexicon.tsv", std::ios::binary);
      write_lexicon(o, lexicon);
    }
    if (!f.morphemes.empty()) {
      std::ofstream o(fs::path(f.out) / "morphemes.tsv", std::ios::binary);
      write_morphemes(o, morphemes);
    }
  }
  return 0;
}

// ---------------------------------------------------------------- segment

struct SegmentFlags {
  std::string lang, lexicon, out, provider_url, model = "default", api_key_env, replay, audit, cache;
  std::size_t batch_size = 1, in_flight = 4, top_words = 5000, sample = 150;
  double threshold = 1.4;
  bool no_filter = false, allow_empty_form = false;
  std::string sheet;
  std::uint64_t seed = 0;
};

int run_segment(const SegmentFlags& f) {
  const auto lexicon = top_n(load_lexicon(f.lexicon, f.lang), f.top_words);
  std::unique_ptr<Provider> provider;
  if (!f.replay.empty()) {
    provider = std::make_unique<ReplayProvider>(f.replay);
  } else if (!f.provider_url.empty()) {
    HttpProviderOptions o;
    o.url = f.provider_url;
    o.model = f.model;
    if (!f.api_key_env.empty())
      if (const char* key = std::getenv(f.api_key_env.c_str())) o.api_key = key;
    provider = std::make_unique<HttpProvider>(o, f.audit.empty() ? nullptr : std::make_shared<AuditLog>(f.audit));
  } else {
    throw InputError("segment needs --provider-url or --replay");
  }

  std::vector<Segmentation> cached;
  if (!f.cache.empty() && fs::exists(f.cache)) cached = load_segmentation_cache(f.cache);
  SegmentOptions o;
  o.language = f.lang;
  o.model = f.model;
  o.batch_size = f.batch_size;
  o.in_flight = f.in_flight;
  o.filter = !f.no_filter;
  o.threshold = f.threshold;
  o.parse.allow_empty_form = f.allow_empty_form;
  const auto run = segment_lexicon(lexicon, *provider, o, cached);

  if (!f.cache.empty()) {
    std::unordered_map<std::string, bool> known;
    for (const auto& s : cached) known[s.word] = true;
    std::vector<Segmentation> fresh;
    for (const auto* list : {&run.kept, &run.dropped})
      for (const auto& s : *list)
        if (!known.count(s.word)) fresh.push_back(s);
    append_segmentation_cache(f.cache, fresh);
  }
  {
    if (fs::path(f.out).has_parent_path()) fs::create_directories(fs::path(f.out).parent_path());
    std::ofstream out(f.out, std::ios::binary);
    if (!out) throw InputError("cannot write " + f.out);
    write_morphemes(out, run.morphemes);
  }
  std::cout << f.lang << ": " << run.kept.size() << " segmented, " << run.dropped.size()
            << " dropped by perplexity, " << run.failures.size() << " unparseable, " << run.morphemes.size()
            << " morphemes\n";
  for (const auto& d : run.dropped) std::cerr << "dropped " << d.word << " perplexity " << *d.perplexity << '\n';
  for (const auto& e : run.failures) std::cerr << "failed " << e.word << ": " << e.reason << '\n';

  if (!f.sheet.empty()) {
    const auto sample = sample_for_verification(run.morphemes, f.sample, f.seed);
    std::ofstream out(f.sheet, std::ios::binary);
    if (!out) throw InputError("cannot write " + f.sheet);
    write_verification_sheet(out, sample);
    if (sample.short_set)
      std::cerr << "verification sample holds all " << sample.morphemes.size() << " morphemes (fewer than "
                << f.sample << ")\n";
  }
  return 0;
}

std::vector<ErrorRow> parse_error_rows(const std::vector<std::string>& specs) {
  std::vector<ErrorRow> rows;
  for (const auto& s : specs) {
    auto [lang, frac] = split_assignment(s, "--errors");
    const auto slash = frac.find('/');
    if (slash == std::string::npos) throw InputError("--errors expects LANG=E/N, got '" + s + "'");
    try {
      rows.push_back({lang, std::stoul(frac.substr(0, slash)), std::stoul(frac.substr(slash + 1))});
    } catch (const std::logic_error&) {
      throw InputError("--errors expects LANG=E/N, got '" + s + "'");
    }
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sound-meaning alignment analyses over morpheme and word embeddings"};
  app.require_subcommand(1);

  IngestFlags ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate and normalize input files");
  ingest_cmd->add_option("--lang", ingest.lang)->required();
  ingest_cmd->add_option("--lexicon", ingest.lexicon);
  ingest_cmd->add_option("--morphemes", ingest.morphemes);
  ingest_cmd->add_option("--feature-table", ingest.feature_table);
  ingest_cmd->add_option("--vectors", ingest.vectors);
  ingest_cmd->add_option("--scales", ingest.scales);
  ingest_cmd->add_option("--out", ingest.out, "Write NFC-normalized copies here");

  SegmentFlags seg;
  auto* seg_cmd = app.add_subcommand("segment", "Segment lemmas into morphemes through a provider");
  seg_cmd->add_option("--lang", seg.lang)->required();
  seg_cmd->add_option("--lexicon", seg.lexicon)->required();
  seg_cmd->add_option("--out", seg.out, "Morpheme TSV")->required();
  seg_cmd->add_option("--provider-url", seg.provider_url);
  seg_cmd->add_option("--model", seg.model);
  seg_cmd->add_option("--api-key-env", seg.api_key_env, "Environment variable holding the API key");
  seg_cmd->add_option("--replay", seg.replay, "Serve responses from an audit log");
  seg_cmd->add_option("--audit", seg.audit, "Append exchanges to this log");
  seg_cmd->add_option("--cache", seg.cache, "Segmentation cache (JSONL)");
  seg_cmd->add_option("--batch-size", seg.batch_size);
  seg_cmd->add_option("--in-flight", seg.in_flight);
  seg_cmd->add_option("--top-words", seg.top_words);
  seg_cmd->add_option("--threshold", seg.threshold, "Perplexity cutoff (strictly above is dropped)");
  seg_cmd->add_flag("--no-filter", seg.no_filter);
  seg_cmd->add_flag("--allow-empty-form", seg.allow_empty_form);
  seg_cmd->add_option("--sheet", seg.sheet, "Verification sheet TSV");
  seg_cmd->add_option("--sample", seg.sample);
  seg_cmd->add_option("--seed", seg.seed);

  ConfigFlags embed_flags, global_flags, subspace_flags, interpret_flags, report_flags;
  std::string embed_dir;
  bool embed_tsv = false;
  auto* embed_cmd = app.add_subcommand("embed", "Build phonetic and semantic similarity matrices");
  add_config_flags(embed_cmd, embed_flags);
  embed_cmd->add_option("--matrices", embed_dir, "Directory for matrices")->required();
  embed_cmd->add_flag("--tsv", embed_tsv, "Also write TSV matrices");

  auto* global_cmd = app.add_subcommand("analyze-global", "RSA, MI, kNN overlap and CCA per language");
  add_config_flags(global_cmd, global_flags);
  auto* subspace_cmd = app.add_subcommand("analyze-subspace", "Scale subspace projections");
  add_config_flags(subspace_cmd, subspace_flags);
  auto* interpret_cmd = app.add_subcommand("interpret", "Pole tables for significant canonical variates");
  add_config_flags(interpret_cmd, interpret_flags);
  auto* report_cmd = app.add_subcommand("report", "Render markdown from stored results");
  add_config_flags(report_cmd, report_flags);
  std::vector<std::string> error_specs;
  report_cmd->add_option("--errors", error_specs, "LANG=E/N verified segmentation errors (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ingest_cmd) return run_ingest(ingest);
    if (*seg_cmd) return run_segment(seg);
    if (*embed_cmd) {
      const auto c = build_config(embed_flags);
      for (const auto& lang : c.languages) run_embed(c, lang, embed_dir, embed_tsv);
      return 0;
    }
    if (*global_cmd) {
      print_global(run_global(build_config(global_flags)));
      return 0;
    }
    if (*subspace_cmd) {
      const auto payload = run_subspace(build_config(subspace_flags));
      for (const auto& r : payload.at("results"))
        std::cout << r.at("language").get<std::string>() << ' ' << r.at("scale").get<std::string>() << ": "
                  << format_cell(r.at("rho").get<double>(), r.at("p_value").get<double>()) << " (n="
                  << r.at("n_words").get<std::size_t>() << ")\n";
      return 0;
    }
    if (*interpret_cmd) {
      for (const auto& p : run_interpret(build_config(interpret_flags)))
        std::cout << p.at("language").get<std::string>() << ": " << p.at("components").size()
                  << " pole tables\n";
      return 0;
    }
    if (*report_cmd) {
      run_report(build_config(report_flags), parse_error_rows(error_specs));
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const AnalysisError& e) {
    std::cerr << "analysis error: " << e.what() << '\n';
    return 2;
  } catch (const ProviderError& e) {
    std::cerr << "provider error: " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "analysis error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
