// make_fixture: writes a synthetic language with planted sound-meaning
// structure, ready for `iconicity analyze-global --config DIR/config.json`.

#include "fixture.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic fixture language"};
  std::string dir;
  fixture::Options o;
  app.add_option("dir", dir, "Output directory")->required();
  app.add_option("--language", o.language);
  app.add_option("--morphemes", o.n_morphemes);
  app.add_option("--words", o.n_words);
  app.add_option("--dims", o.semantic_dims);
  app.add_option("--noise", o.noise);
  app.add_option("--seed", o.seed);
  app.add_flag("--permuted", o.permute_semantic, "Shuffle morpheme vectors (control)");
  app.add_option("--shuffles", o.shuffles);
  app.add_option("--null-points", o.null_points);
  CLI11_PARSE(app, argc, argv);
  try {
    const auto p = fixture::write(dir, o);
    std::cout << p.config.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
