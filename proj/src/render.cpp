#include "symgen/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "symgen/errors.hpp"

namespace symgen {
namespace {

Color lerp_stops(const std::vector<Color>& stops, double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double seg = t * static_cast<double>(stops.size() - 1);
  const std::size_t i = std::min(stops.size() - 2, static_cast<std::size_t>(seg));
  const float f = static_cast<float>(seg - static_cast<double>(i));
  return stops[i] * (1.0f - f) + stops[i + 1] * f;
}

Color gradient_color(const GradientPattern& g, double x, double y, int height, int width) {
  if (g.stops.empty()) return Color::Zero();
  if (g.stops.size() == 1) return g.stops.front();
  if (g.mode == GradientPattern::Mode::kLinear) {
    const double dx = std::cos(g.angle), dy = std::sin(g.angle);
    // Normalize the projection over the frame corners.
    double lo = std::min({0.0, width * dx, height * dy, width * dx + height * dy});
    double hi = std::max({0.0, width * dx, height * dy, width * dx + height * dy});
    const double p = x * dx + y * dy;
    return lerp_stops(g.stops, hi > lo ? (p - lo) / (hi - lo) : 0.0);
  }
  const double cx = g.center.x() * width, cy = g.center.y() * height;
  const double r = g.radius * std::hypot(static_cast<double>(width), static_cast<double>(height));
  return lerp_stops(g.stops, r > 0 ? std::hypot(x - cx, y - cy) / r : 0.0);
}

struct CamoFrame {
  std::vector<Color> palette;
  double nx, ny, start, stroke;
  std::int64_t count;
};

CamoFrame camo_frame(const CamouflagePattern& c, int height, int width) {
  CamoFrame f;
  f.palette = camouflage_palette(c.palette_seed, c.palette_size);
  // Strokes run along `orientation`; s is the coordinate across them.
  f.nx = -std::sin(c.orientation);
  f.ny = std::cos(c.orientation);
  f.stroke = std::max(1e-6, c.line_width * std::min(height, width));
  f.count = std::max(1, c.line_count);
  // Strokes lie edge to edge, centred on the frame and shifted by `phase`.
  const double centre = 0.5 * width * f.nx + 0.5 * height * f.ny;
  f.start = centre - 0.5 * static_cast<double>(f.count) * f.stroke + c.phase * f.stroke;
  return f;
}

// Colour of stroke k = floor((s - start) / stroke) at point (x, y), cycling
// through the palette; points beyond the outermost strokes show palette[0].
const Color& camo_point(const CamoFrame& f, double x, double y) {
  const double s = (x * f.nx + y * f.ny - f.start) / f.stroke;
  const auto k = static_cast<std::int64_t>(std::floor(s));
  if (k < 0 || k >= f.count) return f.palette[0];
  return f.palette[static_cast<std::size_t>(k % static_cast<std::int64_t>(f.palette.size()))];
}

// Point-sampled at the pixel centre so every pixel shows exactly one palette
// colour whatever the stroke orientation.
Color camo_pixel(const CamoFrame& f, int px, int py) { return camo_point(f, px + 0.5, py + 0.5); }

Outline fallback_shape(char32_t shape) {
  Outline o;
  if (shape == U'■') {
    Contour<double> c(2, 4);
    c << 0, 1, 1, 0,
         0, 0, 1, 1;
    o.contours.push_back(c);
  } else if (shape == U'▲') {
    Contour<double> c(2, 3);
    c << 0, 1, 0.5,
         0, 0, std::sqrt(3.0) / 2;
    o.contours.push_back(c);
  } else {
    constexpr int kSegments = 96;
    Contour<double> c(2, kSegments);
    for (int i = 0; i < kSegments; ++i) {
      const double a = 2 * std::numbers::pi * i / kSegments;
      c(0, i) = std::cos(a);
      c(1, i) = std::sin(a);
    }
    o.contours.push_back(c);
  }
  return o;
}

}  // namespace

int draw(const CountDist& d, Rng& rng) {
  if (const auto* n = std::get_if<int>(&d)) return *n;
  if (const auto* b = std::get_if<dist::Bernoulli>(&d)) return rng.bernoulli(b->p) ? 1 : 0;
  const auto& u = std::get<dist::UniformInt>(d);
  return static_cast<int>(rng.between(u.lo, u.hi));
}

Eigen::Vector2d translation_to_pixels(const Eigen::Vector2d& t, const Eigen::Vector2d& box_size,
                                      const Eigen::Vector2d& frame_size) {
  return ((frame_size - box_size) / 2.0).cwiseProduct(Eigen::Vector2d::Ones() + t);
}

std::vector<Color> camouflage_palette(std::uint64_t palette_seed, int size) {
  Rng rng(palette_seed);
  std::vector<Color> palette;
  palette.reserve(static_cast<std::size_t>(std::max(1, size)));
  for (int i = 0; i < std::max(1, size); ++i) palette.push_back(random_hsv_color(rng, 0.0));
  return palette;
}

Color pattern_color(const PatternSpec& p, double x, double y, int height, int width) {
  if (const auto* s = std::get_if<SolidPattern>(&p)) return s->color;
  if (const auto* g = std::get_if<GradientPattern>(&p)) return gradient_color(*g, x, y, height, width);
  const auto f = camo_frame(std::get<CamouflagePattern>(p), height, width);
  return camo_point(f, x, y);
}

void fill_pattern(ImageF& image, const PatternSpec& p, int height, int width) {
  image.resize(height, 3 * width);
  if (const auto* c = std::get_if<CamouflagePattern>(&p)) {
    const auto f = camo_frame(*c, height, width);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) image.block<1, 3>(y, 3 * x) = camo_pixel(f, x, y).transpose().array();
    return;
  }
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      image.block<1, 3>(y, 3 * x) = pattern_color(p, x + 0.5, y + 0.5, height, width).transpose().array();
}

void fill_camouflage(ImageF& image, const Plane& region, const CamouflagePattern& spec, Rng&) {
  const int h = static_cast<int>(region.rows()), w = static_cast<int>(region.cols());
  if (h == 0 || w == 0 || (region <= 0.0f).all()) return;
  const auto f = camo_frame(spec, h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float a = region(y, x);
      if (a <= 0.0f) continue;
      auto px = image.block<1, 3>(y, 3 * x);
      px = px * (1.0f - a) + camo_pixel(f, x, y).transpose().array() * a;
    }
  }
}

void composite(ImageF& image, const Plane& coverage, const Color& color) {
  for (Eigen::Index y = 0; y < coverage.rows(); ++y) {
    for (Eigen::Index x = 0; x < coverage.cols(); ++x) {
      const float a = coverage(y, x);
      if (a <= 0.0f) continue;
      auto px = image.block<1, 3>(y, 3 * x);
      px = px * (1.0f - a) + color.transpose().array() * a;
    }
  }
}

void composite(ImageF& image, const Plane& coverage, const PatternSpec& pattern) {
  if (const auto* c = std::get_if<CamouflagePattern>(&pattern)) {
    Rng unused(0);
    fill_camouflage(image, coverage, *c, unused);
    return;
  }
  const int h = static_cast<int>(coverage.rows()), w = static_cast<int>(coverage.cols());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float a = coverage(y, x);
      if (a <= 0.0f) continue;
      auto px = image.block<1, 3>(y, 3 * x);
      px = px * (1.0f - a) + pattern_color(pattern, x + 0.5, y + 0.5, h, w).transpose().array() * a;
    }
  }
}

Image8 quantize(const ImageF& image) {
  return (image.cwiseMax(0.0f).cwiseMin(1.0f) * 255.0f + 0.5f).floor().cast<std::uint8_t>();
}

std::size_t symbol_pixels(const Mask8& mask) { return static_cast<std::size_t>((mask >= 128).count()); }

Outline place_outline(const Outline& font_units, const Box2d& bbox, double size_px,
                      double rotation, const Eigen::Vector2d& translation, int height, int width) {
  const double side = std::max(bbox.width(), bbox.height());
  if (!(side > 0)) throw FontError("degenerate glyph bounding box");
  const double k = size_px / side;
  Affine2<double> t = Affine2<double>::Identity();
  t.scale(Eigen::Vector2d(k, -k));
  t.rotate(rotation);
  t.translate(-bbox.center());
  Outline placed = font_units.transformed(t);
  const Box2d box = placed.bbox();
  const Eigen::Vector2d size(box.width(), box.height());
  const Eigen::Vector2d top_left =
      translation_to_pixels(translation, size, Eigen::Vector2d(width, height));
  Affine2<double> shift = Affine2<double>::Identity();
  shift.translate(top_left - box.min);
  return placed.transformed(shift);
}

Renderer::Renderer(const FontCatalog& catalog) : catalog_(catalog) {}

Outline Renderer::place_glyph(const SymbolAttributes& a) const {
  if (!(a.scale > 0) || !std::isfinite(a.scale)) throw ConfigError("scale must be > 0");
  const auto g = catalog_.glyph_outline(catalog_.font(a.font), a.character, a.bold, a.italic);
  return place_outline(g.outline, g.bbox, a.scale * std::min(a.height, a.width), a.rotation,
                       a.translation, a.height, a.width);
}

Outline Renderer::occluder_outline(char32_t shape, double scale, const Eigen::Vector2d& t,
                                   int height, int width) const {
  Outline o;
  if (const FontRecord* f = catalog_.font_with_glyph(shape)) {
    o = catalog_.glyph_outline(*f, shape, false, false).outline;
  } else {
    o = fallback_shape(shape);
  }
  return place_outline(o, o.bbox(), scale * std::min(height, width), 0.0, t, height, width);
}

std::vector<Occluder> Renderer::draw_occluders(ImageF& image, const Mask8& mask,
                                               const OccluderSpec& spec, Rng& rng) const {
  std::vector<Occluder> out;
  const int n = draw(spec.count, rng);
  if (n <= 0 || spec.shapes.empty()) return out;
  const int h = static_cast<int>(mask.rows()), w = static_cast<int>(mask.cols());
  const auto symbol = (mask >= 128);
  const double total = static_cast<double>(symbol.count());
  for (int i = 0; i < n; ++i) {
    Occluder o;
    o.shape = spec.shapes[rng.below(spec.shapes.size())];
    o.scale = draw(spec.scale, rng);
    o.translation = draw(spec.translation, rng);
    Rng color_rng = rng.fork(static_cast<std::uint64_t>(i));
    const PatternDist& cd = spec.color;
    PatternSpec color;
    if (const auto* s = std::get_if<SolidPattern>(&cd)) {
      color = *s;
    } else if (const auto* r = std::get_if<dist::RandomSolid>(&cd)) {
      color = SolidPattern{random_hsv_color(color_rng, r->value_min)};
    } else {
      throw ConfigError("occluder colour must be a solid pattern");
    }
    o.color = std::get<SolidPattern>(color).color;
    const Plane cov = rasterize(occluder_outline(o.shape, o.scale, o.translation, h, w), h, w);
    composite(image, cov, o.color);
    o.overlap = total > 0 ? static_cast<double>((symbol && (cov >= 0.5f)).count()) / total : 0.0;
    out.push_back(o);
  }
  return out;
}

RenderedFloat Renderer::render_float(const SymbolAttributes& a, const OccluderSpec* occluders,
                                     Rng& rng) const {
  if (a.height < 1 || a.width < 1) throw ConfigError("resolution must be positive");
  RenderedFloat r;
  fill_pattern(r.image, a.background, a.height, a.width);
  if (a.render_glyph) {
    r.coverage = rasterize(place_glyph(a), a.height, a.width);
    composite(r.image, r.coverage, a.foreground);
  } else {
    if (!(a.scale > 0)) throw ConfigError("scale must be > 0");
    r.coverage = Plane::Zero(a.height, a.width);
  }
  r.mask = to_mask8(r.coverage);
  if (occluders) r.occluders = draw_occluders(r.image, r.mask, *occluders, rng);
  return r;
}

RenderedSample Renderer::render(const SymbolAttributes& a, const OccluderSpec* occluders,
                                Rng& rng) const {
  auto f = render_float(a, occluders, rng);
  RenderedSample s;
  s.image = quantize(f.image);
  s.mask = std::move(f.mask);
  s.attributes = a;
  s.occluders = std::move(f.occluders);
  return s;
}

}  // namespace symgen
