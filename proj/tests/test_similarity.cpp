#include <catch2/catch.hpp>

#include <cmath>
#include <filesystem>

#include "dropeval/grid.hpp"
#include "dropeval/raster.hpp"
#include "dropeval/similarity.hpp"

using namespace dropeval;

namespace {

// Draws a glyph as a block level: one b11 per stroke cell, bottom-anchored
// on the default grid, then renders it through the capture path.
RasterImage glyph_capture(char letter, int offset_x = 2, int offset_y = 0) {
  std::vector<PlacedBlock> blocks;
  const auto& rows = kGlyphStrokes[letter_index(letter)];
  int id = 0;
  for (int r = 0; r < kGlyphRows; ++r) {
    for (int c = 0; c < kGlyphCols; ++c) {
      if (rows[r][c] != '#') continue;
      blocks.push_back(PlacedBlock{id++, BlockType::b11, offset_x + c,
                                   offset_y + (kGlyphRows - 1 - r)});
    }
  }
  const LevelLayout layout = LevelLayout::from_blocks(GridConfig{20, 16}, blocks);
  return render(layout);
}

}  // namespace

TEST_CASE("normalize_to_cell tight-crops and centers") {
  Bitmap bm{8, 8, std::vector<std::uint8_t>(64, 0)};
  bm.bits[3 * 8 + 4] = 1;  // single ink pixel anywhere
  const Bitmap cell = normalize_to_cell(bm);
  CHECK(cell.width == kTemplateCell);
  CHECK(cell.height == kTemplateCell);
  CHECK(cell.ink_count() == static_cast<std::size_t>(kTemplateCell) * kTemplateCell);

  Bitmap blank{8, 8, std::vector<std::uint8_t>(64, 0)};
  CHECK(normalize_to_cell(blank).ink_count() == 0);
}

TEST_CASE("dice overlap basics") {
  const TemplateSet set = TemplateSet::builtin();
  SECTION("a template against itself scores 1") {
    for (int i = 0; i < kLetterCount; ++i)
      CHECK(dice_overlap(set.glyph(i), set.glyph(i)) == Approx(1.0));
  }
  SECTION("disjoint ink scores 0") {
    Bitmap a{4, 1, {1, 1, 0, 0}};
    Bitmap b{4, 1, {0, 0, 1, 1}};
    CHECK(dice_overlap(a, b) == 0.0);
  }
  SECTION("half-overlapping equal-area sets score 0.5") {
    Bitmap a{3, 1, {1, 1, 0}};
    Bitmap b{3, 1, {0, 1, 1}};
    CHECK(dice_overlap(a, b) == Approx(0.5));
  }
}

TEST_CASE("softmax properties") {
  SECTION("equal scores give the uniform distribution") {
    std::array<double, kLetterCount> z{};
    z.fill(0.7);
    const auto p = softmax(z, 0.1);
    for (const double v : p) CHECK(v == Approx(1.0 / 26));
  }
  SECTION("one-hot at low temperature concentrates") {
    std::array<double, kLetterCount> z{};
    z[0] = 1.0;
    const auto p = softmax(z, 0.1);
    CHECK(p[0] == Approx(std::exp(10.0) / (std::exp(10.0) + 25.0)).epsilon(1e-9));
    CHECK(p[0] > 0.998);
  }
  SECTION("sums to one for arbitrary scores") {
    std::array<double, kLetterCount> z{};
    for (int i = 0; i < kLetterCount; ++i) z[i] = std::sin(i * 1.7) * 3.0;
    const auto p = softmax(z, 0.4);
    double sum = 0.0;
    for (const double v : p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == Approx(1.0).epsilon(1e-12));
  }
  SECTION("raising one score raises its probability") {
    std::array<double, kLetterCount> z{};
    const double before = softmax(z, 0.5)[3];
    z[3] = 0.2;
    CHECK(softmax(z, 0.5)[3] > before);
  }
  SECTION("temperature must be positive") {
    std::array<double, kLetterCount> z{};
    CHECK_THROWS_AS(softmax(z, 0.0), std::invalid_argument);
  }
}

TEST_CASE("template classifier self-recognition over all 26 letters") {
  TemplateClassifier backend;
  for (int i = 0; i < kLetterCount; ++i) {
    const char letter = kLetters[i];
    const SimilarityResult result = classify(glyph_capture(letter), backend);
    INFO("letter " << letter << " classified as " << result.argmax());
    CHECK(result.argmax() == letter);
  }
}

TEST_CASE("blank images classify to the uniform distribution") {
  TemplateClassifier backend;
  const SimilarityResult result = classify(render(LevelLayout({20, 16})), backend);
  for (const double p : result.probs) CHECK(p == Approx(1.0 / 26));
  CHECK(similarity_score(result, 'Q') == Approx(1.0 / 26));
}

TEST_CASE("classify output is a probability distribution") {
  TemplateClassifier backend;
  const SimilarityResult result = classify(glyph_capture('W'), backend);
  double sum = 0.0;
  for (const double p : result.probs) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    sum += p;
  }
  CHECK(sum == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("similarity_score picks the target letter's mass") {
  SimilarityResult r;
  r.probs.fill(0.03);
  r.probs[letter_index('U')] = 0.25;
  CHECK(similarity_score(r, 'U') == Approx(0.25));
  CHECK(similarity_score(r, 'A') == Approx(0.03));
  CHECK_THROWS_AS(similarity_score(r, 'u'), std::invalid_argument);
}

TEST_CASE("translation by whole cells leaves template scores unchanged") {
  const TemplateSet set = TemplateSet::builtin();
  // A 5-cell shift lands on an integer pixel offset (5 * 41.2 = 206), so
  // the cropped ink pattern is identical by construction.
  const auto base = template_scores(glyph_capture('H', 2, 0), set);
  const auto shifted = template_scores(glyph_capture('H', 7, 5), set);
  for (int i = 0; i < kLetterCount; ++i) CHECK(shifted[i] == base[i]);

  SECTION("single-cell shifts stay within a pixel-rounding whisker") {
    const auto nudged = template_scores(glyph_capture('H', 3, 1), set);
    for (int i = 0; i < kLetterCount; ++i) CHECK(nudged[i] == Approx(base[i]).margin(0.02));
  }
}

TEST_CASE("shipped template fixtures match the built-in glyph set") {
  const std::filesystem::path dir =
      std::filesystem::path(DROPEVAL_SOURCE_DIR) / "assets" / "templates";
  const TemplateSet fixtures = TemplateSet::load_dir(dir);
  const TemplateSet builtin = TemplateSet::builtin();
  for (int i = 0; i < kLetterCount; ++i) {
    INFO("letter " << kLetters[i]);
    CHECK(fixtures.glyph(i).bits == builtin.glyph(i).bits);
  }
}
