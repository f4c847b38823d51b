#include "iconicity/scales.hpp"

#include "iconicity/types.hpp"
#include "iconicity/unicode.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace iconicity {
namespace {

using nlohmann::ordered_json;

void check_disjoint(const std::vector<std::string>& a, const std::vector<std::string>& b,
                    const std::string& what) {
  for (const auto& x : a)
    if (std::find(b.begin(), b.end(), x) != b.end())
      throw InputError(what + ": '" + x + "' appears in both poles");
}

std::vector<std::string> string_list(const ordered_json& node, const std::string& what) {
  if (!node.is_array()) throw InputError(what + " must be a list");
  std::vector<std::string> out;
  for (const auto& item : node) {
    if (!item.is_string()) throw InputError(what + " must contain strings");
    out.push_back(nfc(item.get<std::string>()));
  }
  return out;
}

}  // namespace

void validate_scale(const ScaleConfig& scale) {
  const auto ctx = "scale '" + scale.name + "'";
  if (scale.name.empty()) throw InputError("scale without a name");
  if (scale.phonetic_pos.empty() || scale.phonetic_neg.empty())
    throw InputError(ctx + ": phonetic exemplar lists must be non-empty");
  check_disjoint(scale.phonetic_pos, scale.phonetic_neg, ctx + " phonetic");
  for (const auto& [lang, poles] : scale.semantic) {
    if (poles.pos.empty() || poles.neg.empty())
      throw InputError(ctx + " language " + lang + ": semantic exemplar lists must be non-empty");
    check_disjoint(poles.pos, poles.neg, ctx + " semantic " + lang);
  }
}

std::vector<ScaleConfig> parse_scales(std::istream& in) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const ordered_json::exception& e) {
    throw InputError(std::string("scale config: ") + e.what());
  }
  if (!doc.contains("scales") || !doc["scales"].is_array())
    throw InputError("scale config: top-level 'scales' list missing");

  std::vector<ScaleConfig> scales;
  for (const auto& node : doc["scales"]) {
    ScaleConfig s;
    s.name = node.value("name", "");
    const auto ctx = "scale '" + s.name + "'";
    if (!node.contains("phonetic")) throw InputError(ctx + ": missing 'phonetic'");
    s.phonetic_pos = string_list(node["phonetic"].value("pos", ordered_json::array()), ctx + " phonetic.pos");
    s.phonetic_neg = string_list(node["phonetic"].value("neg", ordered_json::array()), ctx + " phonetic.neg");
    if (node.contains("semantic")) {
      for (const auto& [lang, poles] : node["semantic"].items()) {
        SemanticPoles p;
        p.pos = string_list(poles.value("pos", ordered_json::array()), ctx + " semantic." + lang + ".pos");
        p.neg = string_list(poles.value("neg", ordered_json::array()), ctx + " semantic." + lang + ".neg");
        s.semantic.emplace(lang, std::move(p));
      }
    }
    validate_scale(s);
    scales.push_back(std::move(s));
  }
  return scales;
}

std::vector<ScaleConfig> load_scales(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return parse_scales(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_scales(std::ostream& out, const std::vector<ScaleConfig>& scales) {
  ordered_json doc;
  doc["scales"] = ordered_json::array();
  for (const auto& s : scales) {
    ordered_json node;
    node["name"] = s.name;
    node["phonetic"]["pos"] = s.phonetic_pos;
    node["phonetic"]["neg"] = s.phonetic_neg;
    node["semantic"] = ordered_json::object();
    for (const auto& [lang, poles] : s.semantic) {
      node["semantic"][lang]["pos"] = poles.pos;
      node["semantic"][lang]["neg"] = poles.neg;
    }
    doc["scales"].push_back(std::move(node));
  }
  out << doc.dump(2) << '\n';
}

std::filesystem::path default_scales_path() {
  return std::filesystem::path(ICONICITY_DATA_DIR) / "scales.json";
}

}  // namespace iconicity
