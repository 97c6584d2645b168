#pragma once

// Letter similarity: a capture image is reduced to a 26-way probability
// distribution over A-Z, and the similarity score is the probability mass
// on the target letter.
//
// The built-in backend tight-crops the ink region, rescales it into a 64x64
// cell, scores Dice overlap against the reference glyph templates, and
// applies a softmax. Blank images yield the uniform distribution. External
// model backends plug in through the ClassifierBackend interface.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dropeval/glyphs.hpp"
#include "dropeval/png.hpp"
#include "dropeval/raster.hpp"

namespace dropeval {

inline constexpr std::string_view kLetters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
inline constexpr int kLetterCount = 26;
inline constexpr int kTemplateCell = 64;
inline constexpr double kDefaultTemperature = 0.1;

inline int letter_index(char letter) {
  if (letter < 'A' || letter > 'Z') throw std::invalid_argument("target must be A-Z");
  return letter - 'A';
}

/// Bilevel ink bitmap; bits[y*width+x] == 1 means ink.
struct Bitmap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  std::size_t ink_count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
  }
};

/// Ink mask of a grayscale image; pixels below mid-gray count as ink.
inline Bitmap ink_mask(const png::GrayImage& img) {
  Bitmap bm{img.width, img.height, std::vector<std::uint8_t>(img.pixels.size(), 0)};
  for (std::size_t i = 0; i < img.pixels.size(); ++i) bm.bits[i] = img.pixels[i] < 128 ? 1 : 0;
  return bm;
}

inline Bitmap ink_mask(const RasterImage& img) { return ink_mask(img.to_gray()); }

/// Crops to the bounding box of the ink. Empty bitmaps crop to empty.
inline Bitmap tight_crop(const Bitmap& bm) {
  int min_x = bm.width, min_y = bm.height, max_x = -1, max_y = -1;
  for (int y = 0; y < bm.height; ++y)
    for (int x = 0; x < bm.width; ++x)
      if (bm.at(x, y)) {
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
      }
  if (max_x < 0) return Bitmap{0, 0, {}};
  const int w = max_x - min_x + 1, h = max_y - min_y + 1;
  Bitmap out{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.bits[static_cast<std::size_t>(y) * w + x] = bm.at(min_x + x, min_y + y) ? 1 : 0;
  return out;
}

/// Scales into a cell x cell square preserving aspect ratio (nearest
/// sampling) and centers the result.
inline Bitmap normalize_to_cell(const Bitmap& bm, int cell = kTemplateCell) {
  Bitmap out{cell, cell, std::vector<std::uint8_t>(static_cast<std::size_t>(cell) * cell, 0)};
  const Bitmap crop = tight_crop(bm);
  if (crop.width == 0 || crop.height == 0) return out;

  const double scale = std::min(static_cast<double>(cell) / crop.width,
                                static_cast<double>(cell) / crop.height);
  const int tw = std::max(1, static_cast<int>(std::lround(crop.width * scale)));
  const int th = std::max(1, static_cast<int>(std::lround(crop.height * scale)));
  const int off_x = (cell - tw) / 2;
  const int off_y = (cell - th) / 2;
  for (int y = 0; y < th; ++y) {
    const int sy = std::min(crop.height - 1, static_cast<int>((y + 0.5) * crop.height / th));
    for (int x = 0; x < tw; ++x) {
      const int sx = std::min(crop.width - 1, static_cast<int>((x + 0.5) * crop.width / tw));
      out.bits[static_cast<std::size_t>(off_y + y) * cell + (off_x + x)] = crop.at(sx, sy) ? 1 : 0;
    }
  }
  return out;
}

/// 26 reference glyph bitmaps, each normalized to the 64x64 cell.
class TemplateSet {
 public:
  static TemplateSet builtin() {
    TemplateSet set;
    for (int i = 0; i < kLetterCount; ++i) {
      Bitmap raw{kGlyphCols, kGlyphRows,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(kGlyphCols) * kGlyphRows, 0)};
      for (int y = 0; y < kGlyphRows; ++y)
        for (int x = 0; x < kGlyphCols; ++x)
          raw.bits[static_cast<std::size_t>(y) * kGlyphCols + x] =
              kGlyphStrokes[i][y][x] == '#' ? 1 : 0;
      set.glyphs_[i] = normalize_to_cell(raw);
      if (set.glyphs_[i].ink_count() == 0) throw std::runtime_error("empty glyph template");
    }
    return set;
  }

  /// Loads A.png .. Z.png from a directory; each image passes through the
  /// same crop-and-center normalization as the built-in glyphs.
  static TemplateSet load_dir(const std::filesystem::path& dir) {
    TemplateSet set;
    for (int i = 0; i < kLetterCount; ++i) {
      const std::filesystem::path file = dir / (std::string(1, kLetters[i]) + ".png");
      set.glyphs_[i] = normalize_to_cell(ink_mask(png::read_gray8(file)));
      if (set.glyphs_[i].ink_count() == 0)
        throw std::runtime_error("template has no ink: " + file.string());
    }
    return set;
  }

  const Bitmap& glyph(int index) const { return glyphs_.at(index); }
  const Bitmap& glyph(char letter) const { return glyphs_.at(letter_index(letter)); }

 private:
  std::array<Bitmap, kLetterCount> glyphs_;
};

/// Dice overlap of two equal-size ink sets: 2|A∩B| / (|A|+|B|), in [0,1].
inline double dice_overlap(const Bitmap& a, const Bitmap& b) {
  std::size_t inter = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) inter += a.bits[i] & b.bits[i];
  const std::size_t denom = a.ink_count() + b.ink_count();
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(inter) / static_cast<double>(denom);
}

/// Per-letter Dice scores of an image against the template set. The image
/// must contain ink; blank images take the uniform fallback upstream.
inline std::array<double, kLetterCount> template_scores(const RasterImage& image,
                                                        const TemplateSet& templates) {
  const Bitmap normalized = normalize_to_cell(ink_mask(image));
  if (normalized.ink_count() == 0) throw std::invalid_argument("image has no ink");
  std::array<double, kLetterCount> scores{};
  for (int i = 0; i < kLetterCount; ++i)
    scores[i] = dice_overlap(normalized, templates.glyph(i));
  return scores;
}

/// softmax with temperature: p_j = exp(z_j/tau) / sum_m exp(z_m/tau).
inline std::array<double, kLetterCount> softmax(const std::array<double, kLetterCount>& z,
                                                double temperature = kDefaultTemperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  const double z_max = *std::max_element(z.begin(), z.end());
  std::array<double, kLetterCount> p{};
  double sum = 0.0;
  for (int i = 0; i < kLetterCount; ++i) {
    p[i] = std::exp((z[i] - z_max) / temperature);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

struct SimilarityResult {
  std::array<double, kLetterCount> probs{};
  std::string model_id;

  char argmax() const {
    return kLetters[std::distance(probs.begin(), std::max_element(probs.begin(), probs.end()))];
  }
};

inline SimilarityResult uniform_distribution(std::string model_id) {
  SimilarityResult r;
  r.probs.fill(1.0 / kLetterCount);
  r.model_id = std::move(model_id);
  return r;
}

class BackendUnavailableError : public std::runtime_error {
 public:
  explicit BackendUnavailableError(const std::string& what)
      : std::runtime_error("classifier backend unavailable: " + what) {}
};

class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  virtual SimilarityResult classify(const RasterImage& image) = 0;
  virtual std::string id() const = 0;
};

/// Deterministic offline backend: Dice template scores through a softmax.
class TemplateClassifier final : public ClassifierBackend {
 public:
  explicit TemplateClassifier(TemplateSet templates = TemplateSet::builtin(),
                              double temperature = kDefaultTemperature)
      : templates_(std::move(templates)), temperature_(temperature) {
    if (!(temperature_ > 0.0)) throw std::invalid_argument("temperature must be positive");
  }

  SimilarityResult classify(const RasterImage& image) override {
    const Bitmap mask = ink_mask(image);
    if (mask.ink_count() == 0) return uniform_distribution(id());
    SimilarityResult r;
    r.probs = softmax(template_scores(image, templates_), temperature_);
    r.model_id = id();
    return r;
  }

  std::string id() const override { return "template-dice"; }

 private:
  TemplateSet templates_;
  double temperature_;
};

/// Full classification step; result always sums to 1.
inline SimilarityResult classify(const RasterImage& image, ClassifierBackend& backend) {
  SimilarityResult r = backend.classify(image);
  double sum = 0.0;
  for (double p : r.probs) {
    if (p < 0.0) throw BackendUnavailableError("negative probability from " + backend.id());
    sum += p;
  }
  if (sum <= 0.0) throw BackendUnavailableError("zero-mass distribution from " + backend.id());
  for (double& p : r.probs) p /= sum;
  return r;
}

inline double similarity_score(const SimilarityResult& result, char target) {
  return result.probs[static_cast<std::size_t>(letter_index(target))];
}

}  // namespace dropeval
