#pragma once

#include "iconicity/cca.hpp"
#include "iconicity/permutation.hpp"
#include "iconicity/segmentation.hpp"
#include "iconicity/subspace.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace iconicity {

using Json = nlohmann::ordered_json;

Json to_json(const NullSummary& s);
Json to_json(const AlignmentResult& r);
AlignmentResult alignment_from_json(const Json& j);

Json to_json(const ScaleResult& r);  // projections omitted; they go to scatter files
Json to_json(const PoleReport& r);

Json cca_model_to_json(const CcaModel& model);
CcaModel cca_model_from_json(const Json& j);

/// Three decimals with significance stars, e.g. "0.376***". Negative zero
/// prints as "0.000".
std::string format_cell(double value, double p_value);
std::string format_fixed(double value, int decimals = 3);

// Markdown renderers. Every number shown is read from the given payloads.

/// One row per language from `global.json` payloads: n morphemes, RSA, MI,
/// kNN overlap and CV1..CVk, blank where an analysis was disabled.
std::string render_global_table(const std::vector<Json>& payloads);

/// Languages by scales from a `subspace.json` payload, then word counts.
std::string render_subspace_table(const Json& payload);

/// Pole tables from a `poles.json` payload, interpretation columns blank.
std::string render_pole_table(const Json& payload);

struct ErrorRow {
  std::string language;
  std::size_t errors = 0;
  std::size_t n = 0;
};

std::string render_error_rate_table(const std::vector<ErrorRow>& rows);

/// Canonical JSON text written for payload files: two-space indent, trailing newline.
std::string dump_payload(const Json& j);

}  // namespace iconicity
