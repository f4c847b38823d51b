#include "iconicity/pipeline.hpp"
#include "iconicity/provider.hpp"

#include "fixture.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace iconicity;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("iconicity_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fixture::Paths small_fixture(const std::string& name, fixture::Options o = {}) {
  o.shuffles = 200;
  o.null_points = 200;
  o.subspace_shuffles = 500;
  o.subspace_null_points = 500;
  return fixture::write(scratch(name), o);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_cells(const std::string& row) {
  std::vector<std::string> cells;
  std::stringstream ss(row);
  std::string cell;
  while (std::getline(ss, cell, '|')) {
    const auto b = cell.find_first_not_of(' ');
    if (b == std::string::npos) continue;
    cells.push_back(cell.substr(b, cell.find_last_not_of(' ') - b + 1));
  }
  return cells;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ICONICITY_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_THROW(run_config_from_json(Json{{"languages", {"en"}}, {"sead", 3}}), InputError);
  EXPECT_THROW(run_config_from_json(Json{{"parameters", {{"kk", 3}}}}), InputError);
  EXPECT_THROW(run_config_from_json(Json{{"parameters", {{"k", "ten"}}}}), InputError);
  EXPECT_THROW(run_config_from_json(Json{{"parameters", {{"normalization", "rank"}}}}), InputError);
}

TEST(Config, RelativePathsResolveAgainstConfigDirectory) {
  const auto paths = small_fixture("paths");
  const auto c = load_run_config(paths.config);
  EXPECT_EQ(c.feature_table, paths.features);
  EXPECT_EQ(c.inputs.at("xa").lexicon, paths.lexicon);
  EXPECT_EQ(c.output_dir, paths.dir / "results");
  EXPECT_EQ(c.params.shuffles, 200u);
  const auto back = run_config_from_json(run_config_to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, ValidateBounds) {
  RunConfig c;
  EXPECT_THROW(validate(c), InputError);
  c.languages = {"en"};
  validate(c);
  auto bad = c;
  bad.params.null_points = bad.params.shuffles + 1;
  EXPECT_THROW(validate(bad), InputError);
  bad = c;
  bad.params.percentile = 101;
  EXPECT_THROW(validate(bad), InputError);
  bad = c;
  bad.languages = {"en", "en"};
  EXPECT_THROW(validate(bad), InputError);
  bad = c;
  bad.params.bins = 1;
  EXPECT_THROW(validate(bad), InputError);
}

TEST(Config, HashIgnoresPathsAndWorkers) {
  RunConfig a;
  a.languages = {"en"};
  auto b = a;
  b.output_dir = "elsewhere";
  b.workers = 8;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Seeds, AnalysisSeedsAreDistinct) {
  RunConfig c;
  EXPECT_NE(analysis_seed(c, "rsa", "en"), analysis_seed(c, "rsa", "es"));
  EXPECT_NE(analysis_seed(c, "rsa", "en"), analysis_seed(c, "mi", "en"));
  EXPECT_NE(analysis_seed(c, "subspace", "en", "size"), analysis_seed(c, "subspace", "en", "sharpness"));
  c.seed = 1;
  EXPECT_NE(analysis_seed(c, "rsa", "en"), analysis_seed(RunConfig{}, "rsa", "en"));
}

TEST(Format, Cells) {
  EXPECT_EQ(format_cell(0.3764, 0.0001), "0.376***");
  EXPECT_EQ(format_cell(0.3765, 0.02), "0.377*");  // nearest of the printed decimal
  EXPECT_EQ(format_cell(-0.0001, 0.5), "0.000");
  EXPECT_EQ(format_cell(-0.25, 0.005), "-0.250**");
  EXPECT_EQ(format_fixed(1.0 / 3.0, 2), "0.33");
}

TEST(Global, AllTogglesOffProducesEmptyGrid) {
  const auto paths = small_fixture("off");
  auto c = load_run_config(paths.config);
  c.analyses = {false, false, false, false, false};
  EXPECT_TRUE(run_global(c).empty());
  const auto md = slurp(c.output_dir / "global.md");
  EXPECT_EQ(md.find("| xa"), std::string::npos) << md;
  EXPECT_FALSE(fs::exists(c.output_dir / "xa" / "global.json"));
}

TEST(Global, PlantedFixtureIsDetectedAndMarkdownMatchesPayload) {
  const auto paths = small_fixture("planted");
  auto c = load_run_config(paths.config);
  const auto payloads = run_global(c);
  ASSERT_EQ(payloads.size(), 1u);
  const auto& r = payloads[0].at("results");
  EXPECT_LT(r.at("knn_overlap").at("p_value").get<double>(), 0.05);
  EXPECT_GT(r.at("cca")[0].at("value").get<double>(), 0.8);
  EXPECT_LT(r.at("cca")[0].at("p_value").get<double>(), 0.01);

  // Every number in the table is the payload value at three decimals.
  std::stringstream md(slurp(c.output_dir / "global.md"));
  std::string header, rule, row;
  std::getline(md, header);
  std::getline(md, rule);
  std::getline(md, row);
  const auto cells = split_cells(row);
  const auto cell = [](const Json& a) { return format_cell(a.at("value"), a.at("p_value")); };
  ASSERT_GE(cells.size(), 6u);
  EXPECT_EQ(cells[0], "xa");
  EXPECT_EQ(cells[1], std::to_string(payloads[0].at("n_morphemes").get<std::size_t>()));
  EXPECT_EQ(cells[2], cell(r.at("rsa")));
  EXPECT_EQ(cells[3], cell(r.at("mi")));
  EXPECT_EQ(cells[4], cell(r.at("knn_overlap")));
  for (std::size_t k = 0; k < r.at("cca").size(); ++k) EXPECT_EQ(cells[5 + k], cell(r.at("cca")[k]));

  // Stored payload equals the returned one.
  EXPECT_EQ(Json::parse(slurp(c.output_dir / "xa" / "global.json")), payloads[0]);

  const auto poles = run_interpret(c);
  ASSERT_EQ(poles.size(), 1u);
  EXPECT_GE(poles[0].at("components").size(), 1u);
  EXPECT_EQ(poles[0].at("components")[0].at("component"), 1);
  EXPECT_TRUE(fs::exists(c.output_dir / "xa" / "poles.md"));
}

TEST(Global, PermutedControlInterpretsToEmptyReport) {
  fixture::Options o;
  o.permute_semantic = true;
  o.seed = 3;
  const auto paths = small_fixture("permuted", o);
  auto c = load_run_config(paths.config);
  c.analyses = {false, false, false, true, false};
  c.params.n_components = 1;
  const auto payloads = run_global(c);
  if (payloads[0].at("results").at("cca")[0].at("p_value").get<double>() < 0.05) GTEST_SKIP() << "chance hit";
  const auto poles = run_interpret(c);
  EXPECT_TRUE(poles[0].at("components").empty());
  EXPECT_TRUE(poles[0].contains("note"));
}

TEST(Interpret, NeedsStoredModel) {
  const auto paths = small_fixture("nomodel");
  EXPECT_THROW(run_interpret(load_run_config(paths.config)), InputError);
}

TEST(Subspace, MissingExemplarFailsBeforeShuffling) {
  const auto paths = small_fixture("exemplar");
  auto scales = Json::parse(slurp(paths.scales));
  scales["scales"][0]["semantic"]["xa"]["pos"].push_back("enormous");
  std::ofstream(paths.scales) << scales.dump(2);
  try {
    run_subspace(load_run_config(paths.config));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("enormous"), std::string::npos) << e.what();
  }
}

TEST(Subspace, PlantedScaleAndTableMatchPayload) {
  const auto paths = small_fixture("subspace");
  const auto payload = run_subspace(load_run_config(paths.config));
  const auto& results = payload.at("results");
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[0].at("scale"), "size");
  EXPECT_GT(results[0].at("rho").get<double>(), 0.9);
  EXPECT_DOUBLE_EQ(results[0].at("p_value").get<double>(), 1.0 / 501.0);
  const auto md = slurp(paths.dir / "results" / "subspace.md");
  EXPECT_NE(md.find(format_cell(results[0].at("rho"), results[0].at("p_value"))), std::string::npos);
  EXPECT_TRUE(fs::exists(paths.dir / "results" / "subspace" / "xa" / "size.tsv"));
}

TEST(Cli, ExitCodes) {
  const auto paths = small_fixture("cli");
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("analyze-global --config /nonexistent/config.json"), 1);
  EXPECT_EQ(run_cli("analyze-global --config " + paths.config.string() + " --k 0"), 1);
  EXPECT_EQ(run_cli("interpret --config " + paths.config.string()), 1);

  // Two morphemes cannot support any analysis.
  std::ofstream(paths.morphemes) << "form\ttranscription\tlanguage\tsources\n"
                                    "m0000\tpa\txa\tw0000\nm0001\tpi\txa\tw0001\n";
  EXPECT_EQ(run_cli("analyze-global --config " + paths.config.string()), 2);

  const auto lex = paths.dir / "en.tsv";
  std::ofstream(lex) << "word\tlemma\tzipf\tipa\nrunning\trunning\t5\trʌnɪŋ\n";
  EXPECT_EQ(run_cli("segment --lang en --lexicon " + lex.string() + " --out " + (paths.dir / "m.tsv").string() +
                    " --provider-url http://127.0.0.1:1/v1/complete"),
            3);
}

TEST(Cli, SegmentFromReplay) {
  const auto dir = scratch("replay");
  const auto lex = dir / "en.tsv";
  std::ofstream(lex) << "word\tlemma\tzipf\tipa\nrunning\trunning\t5\trʌnɪŋ\nruns\trunning\t4\trʌnz\n";
  const auto audit = dir / "audit.jsonl";
  {
    AuditLog log(audit);
    const std::vector<WordInput> batch{{"running", "rʌnɪŋ"}};
    const auto prompt = build_prompt("en", batch);
    log.record({"default", prompt.system, prompt.user, true}, {"(run,rʌn),(ning,ɪŋ)", std::vector<double>{-0.1}});
  }
  const auto out = dir / "morphemes.tsv";
  ASSERT_EQ(run_cli("segment --lang en --lexicon " + lex.string() + " --out " + out.string() + " --replay " +
                    audit.string()),
            0);
  const auto set = load_morphemes(out);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.morphemes[0].form, "run");
  EXPECT_EQ(set.morphemes[0].transcription, "rʌn");
  EXPECT_EQ(set.morphemes[0].sources, (std::vector<std::string>{"running", "runs"}));
}
