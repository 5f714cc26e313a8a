#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "symgen/attributes.hpp"
#include "symgen/font_catalog.hpp"
#include "symgen/raster.hpp"
#include "symgen/rng.hpp"

namespace symgen {

/// Interleaved RGB, H rows by 3W columns.
using ImageF = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Image8 = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A drawn distractor shape.
struct Occluder {
  char32_t shape = U'●';
  double scale = 0.0;
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();
  Color color = Color::Zero();
  double overlap = 0.0;  ///< fraction of symbol pixels covered
};

namespace dist {
/// Integer uniform on [lo, hi].
struct UniformInt {
  int lo, hi;
};
}  // namespace dist

/// Fixed count, Bernoulli(p) for zero-or-one, or uniform integer range.
using CountDist = std::variant<int, dist::Bernoulli, dist::UniformInt>;
int draw(const CountDist& d, Rng& rng);

struct OccluderSpec {
  std::vector<char32_t> shapes{U'●', U'■', U'▲'};
  CountDist count = 0;
  ScalarDist scale = dist::Uniform{0.5, 0.8};
  PairDist translation = dist::UniformBox{-1.0, 1.0};
  PatternDist color = dist::RandomSolid{0.0};
};

struct RenderedSample {
  Image8 image;  ///< H x 3W
  Mask8 mask;    ///< H x W glyph coverage before occlusion
  SymbolAttributes attributes;
  std::vector<Occluder> occluders;
};

/// Float-domain render result, before quantization.
struct RenderedFloat {
  ImageF image;
  Plane coverage;
  Mask8 mask;
  std::vector<Occluder> occluders;
};

/// Top-left pixel position of a box of `box_size` (w, h) in a frame of
/// `frame_size` (w, h). |t| <= 1 keeps the box inside; larger values crop.
Eigen::Vector2d translation_to_pixels(const Eigen::Vector2d& t, const Eigen::Vector2d& box_size,
                                      const Eigen::Vector2d& frame_size);

/// Pattern colour at point (x, y); pixel centres sit at half-integers.
Color pattern_color(const PatternSpec& p, double x, double y, int height, int width);
void fill_pattern(ImageF& image, const PatternSpec& p, int height, int width);

/// Palette shared by the two camouflage layers of one image.
std::vector<Color> camouflage_palette(std::uint64_t palette_seed, int size);

/// Paints camouflage strokes into `image` weighted by `region` coverage.
/// Stroke colours cycle through the palette; `rng` is not consumed (the
/// pattern is fully determined by `spec`) but kept for substream symmetry.
void fill_camouflage(ImageF& image, const Plane& region, const CamouflagePattern& spec, Rng& rng);

/// Alpha-composites `color` over `image` with per-pixel weight `coverage`.
void composite(ImageF& image, const Plane& coverage, const Color& color);
void composite(ImageF& image, const Plane& coverage, const PatternSpec& pattern);

/// 8-bit quantization: round(clamp(v, 0, 1) * 255).
Image8 quantize(const ImageF& image);

/// Count of mask pixels >= 128.
std::size_t symbol_pixels(const Mask8& mask);

class Renderer {
 public:
  explicit Renderer(const FontCatalog& catalog);

  /// Glyph outline in pixel space (y down) placed per attrs.
  Outline place_glyph(const SymbolAttributes& attrs) const;

  /// Full render; `occluders` may be null. Occluder draws come from `rng`.
  RenderedFloat render_float(const SymbolAttributes& attrs, const OccluderSpec* occluders,
                             Rng& rng) const;
  RenderedSample render(const SymbolAttributes& attrs, const OccluderSpec* occluders,
                        Rng& rng) const;

  /// Draws occluders onto `image` and returns them with their overlap with `mask`.
  std::vector<Occluder> draw_occluders(ImageF& image, const Mask8& mask, const OccluderSpec& spec,
                                       Rng& rng) const;

  /// Pixel-space outline of an occluder shape, placed like a glyph.
  Outline occluder_outline(char32_t shape, double scale, const Eigen::Vector2d& t, int height,
                           int width) const;

  const FontCatalog& catalog() const { return catalog_; }

 private:
  const FontCatalog& catalog_;
};

/// Scale + rotate a font-unit outline (y up) into pixel space (y down) so
/// that its larger pre-rotation side measures `size_px`, then place it with
/// `translation`. Rotation is counter-clockwise on screen.
Outline place_outline(const Outline& font_units, const Box2d& bbox, double size_px,
                      double rotation, const Eigen::Vector2d& translation, int height, int width);

}  // namespace symgen
