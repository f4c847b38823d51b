#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace iconicity {

struct SemanticPoles {
  std::vector<std::string> pos;
  std::vector<std::string> neg;
  friend bool operator==(const SemanticPoles&, const SemanticPoles&) = default;
};

/// One hypothesized sound-meaning scale: phonetic exemplar segments plus
/// per-language semantic exemplar words for each pole.
struct ScaleConfig {
  std::string name;
  std::vector<std::string> phonetic_pos;
  std::vector<std::string> phonetic_neg;
  std::map<std::string, SemanticPoles> semantic;  // keyed by language code

  friend bool operator==(const ScaleConfig&, const ScaleConfig&) = default;
};

/// Throws InputError on empty exemplar lists or pos/neg overlap.
void validate_scale(const ScaleConfig& scale);

std::vector<ScaleConfig> parse_scales(std::istream& in);
std::vector<ScaleConfig> load_scales(const std::filesystem::path& path);
void write_scales(std::ostream& out, const std::vector<ScaleConfig>& scales);

/// Location of the shipped exemplar config.
std::filesystem::path default_scales_path();

}  // namespace iconicity
