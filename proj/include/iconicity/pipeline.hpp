#pragma once

#include "iconicity/cca.hpp"
#include "iconicity/phono_embed.hpp"
#include "iconicity/report.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace iconicity {

inline constexpr const char* kToolVersion = "0.3.0";

struct LanguageInputs {
  std::filesystem::path lexicon;
  std::filesystem::path morphemes;
  std::filesystem::path vectors;
};

struct Parameters {
  Index k = 10;
  int bins = 20;
  Index n_components = 5;
  std::size_t shuffles = 1000;
  std::size_t null_points = 500;
  std::size_t subspace_shuffles = 5000;
  std::size_t subspace_null_points = 5000;
  double percentile = 75.0;
  double threshold = 0.05;
  double zipf_cutoff = 4.5;
  Index neighbors = 10;
  std::size_t top_words = 5000;
  std::size_t subspace_pool = 10000;
  std::size_t subspace_candidates = 0;  // 0 = whole lexicon
  double ridge = 1e-8;
  Normalization normalization = Normalization::z_score;
  CcaNull cca_null = CcaNull::refit;
  PoleDirection pole_direction = PoleDirection::weights;
  bool scatter = true;
};

struct Analyses {
  bool rsa = true;
  bool mi = true;
  bool knn = true;
  bool cca = true;
  bool subspace = true;
};

struct RunConfig {
  std::vector<std::string> languages;
  std::map<std::string, LanguageInputs> inputs;
  std::filesystem::path feature_table;
  std::filesystem::path scales;  // empty = shipped default
  std::filesystem::path output_dir = "results";
  Analyses analyses;
  Parameters params;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Relative paths resolve against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Json run_config_to_json(const RunConfig& config);

/// Throws InputError naming the first out-of-bounds parameter.
void validate(const RunConfig& config);

/// Parameters, toggles, seed and languages; excludes paths, output location
/// and worker count, which never change results.
Json result_config_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

/// Master seed fanned out per analysis and language.
std::uint64_t analysis_seed(const RunConfig& config, std::string_view analysis, std::string_view language,
                            std::string_view extra = {});

/// Aligned phonetic and semantic data for one language's morphemes.
struct PreparedLanguage {
  std::string language;
  std::size_t n_input = 0;
  EmbeddingMatrix phonetic;          // normalized, kept features
  EmbeddingMatrix semantic;          // raw vectors
  ColumnTransform semantic_transform;
  SimilarityMatrix phonetic_sim;
  SimilarityMatrix semantic_sim;
  std::vector<ExcludedItem> excluded;
  std::map<std::string, std::size_t> unknown_characters;
  std::map<std::string, std::string> digests;  // input name -> sha256
};

PreparedLanguage prepare_language(const RunConfig& config, const std::string& language,
                                  const SegmentFeatureTable& table);

/// Writes results/<lang>/global.json and cca_model.json per language, then
/// global.md. Returns the payloads.
std::vector<Json> run_global(const RunConfig& config);

/// Writes results/subspace.json, subspace.md and scatter TSVs.
Json run_subspace(const RunConfig& config);

/// Writes results/<lang>/poles.json and poles.md from the stored CCA model.
std::vector<Json> run_interpret(const RunConfig& config);

/// Re-renders all markdown from stored payloads and refreshes the manifest.
void run_report(const RunConfig& config, const std::vector<ErrorRow>& error_rows = {});

/// Writes similarity matrices and embeddings for one language into `out_dir`.
void run_embed(const RunConfig& config, const std::string& language, const std::filesystem::path& out_dir,
               bool tsv = false);

}  // namespace iconicity
