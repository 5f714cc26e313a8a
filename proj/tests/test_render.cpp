#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "symgen/corruptions.hpp"
#include "symgen/errors.hpp"
#include "symgen/render.hpp"

using namespace symgen;
using Eigen::Vector2d;

namespace {

SymbolAttributes plain(char32_t c = U'a', int size = 32) {
  SymbolAttributes a;
  a.character = c;
  a.font = "DejaVu Sans Book";
  a.scale = 0.6;
  a.height = a.width = size;
  a.foreground = SolidPattern{Color::Zero()};
  a.background = SolidPattern{Color::Ones()};
  return a;
}

RenderedSample render(const SymbolAttributes& a, const OccluderSpec* occ = nullptr) {
  static const Renderer r(test::catalog());
  Rng rng(1, 0, Slot::kOccluders);
  return r.render(a, occ, rng);
}

Vector2d mask_centroid(const Mask8& m) {
  double sx = 0, sy = 0, w = 0;
  for (int y = 0; y < m.rows(); ++y)
    for (int x = 0; x < m.cols(); ++x) {
      sx += m(y, x) * (x + 0.5);
      sy += m(y, x) * (y + 0.5);
      w += m(y, x);
    }
  return {sx / w, sy / w};
}

double mean_gray(const Image8& img, const Mask8& m, bool inside) {
  double s = 0;
  int n = 0;
  for (int y = 0; y < m.rows(); ++y)
    for (int x = 0; x < m.cols(); ++x) {
      if ((m(y, x) == 255) != inside || (!inside && m(y, x) != 0)) continue;
      s += (img(y, 3 * x) + img(y, 3 * x + 1) + img(y, 3 * x + 2)) / 3.0;
      ++n;
    }
  return n ? s / n : 0.0;
}

}  // namespace

TEST_CASE("translation_to_pixels") {
  const Vector2d box(20, 20), frame(32, 32);
  CHECK(translation_to_pixels({0, 0}, box, frame).isApprox(Vector2d(6, 6)));
  const auto flush = translation_to_pixels({1, 1}, box, frame);
  CHECK((flush + box).isApprox(frame));
  const auto over = translation_to_pixels({2, 0}, box, frame);
  CHECK(over.x() + box.x() - frame.x() == doctest::Approx(6.0));
  CHECK(translation_to_pixels({-1, -1}, box, frame).isZero());
}

TEST_CASE("8x8 black on white is readable") {
  const auto s = render(plain(U'a', 8));
  CHECK(s.mask.cast<int>().sum() > 0);
  CHECK(s.image.rows() == 8);
  CHECK(s.image.cols() == 24);
  CHECK(mean_gray(s.image, s.mask, false) - mean_gray(s.image, s.mask, true) > 128);
}

TEST_CASE("centred glyph has centred bounding box") {
  for (char32_t c : {U'o', U'x', U'H'}) {
    auto a = plain(c);
    a.rotation = 0.4;
    const auto s = render(a);
    Box2d b;
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x)
        if (s.mask(y, x) >= 128) b.extend({x + 0.5, y + 0.5});
    CHECK(std::abs(b.center().x() - 16) <= 1.0);
    CHECK(std::abs(b.center().y() - 16) <= 1.0);
  }
  // Symmetric glyph: the coverage centroid itself is central.
  const auto o = render(plain(U'o'));
  const auto c = mask_centroid(o.mask);
  CHECK((c - Vector2d(16, 16)).norm() <= 1.0);
}

TEST_CASE("cropping reduces coverage") {
  auto a = plain(U'a');
  const auto centred = symbol_pixels(render(a).mask);
  a.translation = {2, 0};
  const auto cropped = symbol_pixels(render(a).mask);
  CHECK(cropped < centred);
  CHECK(cropped > 0);
}

// Thresholded at zero: the support of the mask. Sharp tips covering under
// half a pixel drop out at 128, so that threshold can undershoot by >1 px.
// Placements stay in frame: once cropped, the visible part's box is not the
// outline box clipped to the frame. Scale <= 0.7 keeps the rotated box of any
// glyph within 0.7 * sqrt(2) of the frame side.
TEST_CASE("mask bbox matches transformed outline bbox") {
  const Renderer r(test::catalog());
  Rng rng(3, 0, Slot::kScale);
  for (int i = 0; i < 50; ++i) {
    auto a = plain(U"abgkqwxyz"[i % 9]);
    a.scale = rng.uniform(0.3, 0.7);
    a.rotation = rng.uniform(-1, 1);
    a.translation = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto outline = r.place_glyph(a);
    const auto ob = outline.bbox();
    CHECK(ob.min.minCoeff() >= -1e-9);
    CHECK(ob.max.maxCoeff() <= 32 + 1e-9);
    Box2d mb;
    Rng occ(0);
    const auto s = r.render(a, nullptr, occ);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x)
        if (s.mask(y, x) > 0) {
          mb.extend({double(x), double(y)});
          mb.extend({x + 1.0, y + 1.0});
        }
    REQUIRE(!mb.empty());
    CHECK((mb.min - ob.min).cwiseAbs().maxCoeff() <= 1.0);
    CHECK((mb.max - ob.max).cwiseAbs().maxCoeff() <= 1.0);
  }
}

TEST_CASE("rotation symmetry and scale monotonicity") {
  auto mass = [](const Mask8& m) { return m.cast<double>().sum() / 255.0; };
  for (char32_t c : {U'a', U'k', U'R'}) {
    auto a = plain(c);
    a.rotation = 0.5;
    const auto pos = render(a).mask;
    a.rotation = -0.5;
    const auto neg = render(a).mask;
    CHECK(std::abs(mass(pos) - mass(neg)) <= 0.05 * std::max(mass(pos), mass(neg)));

    auto big = plain(c, 64);
    big.rotation = 0.5;
    const double p64 = symbol_pixels(render(big).mask);
    big.rotation = -0.5;
    const double n64 = symbol_pixels(render(big).mask);
    CHECK(std::abs(p64 - n64) <= 0.05 * std::max(p64, n64));

    a.rotation = 0.2;
    std::size_t prev = 0;
    for (double s = 0.2; s <= 0.9; s += 0.05) {
      a.scale = s;
      const auto n = symbol_pixels(render(a).mask);
      CHECK(n >= prev);
      prev = n;
    }
  }
}

TEST_CASE("bold covers at least as much as regular") {
  for (char32_t c : {U'a', U'e', U'l'}) {
    auto a = plain(c);
    const auto regular = render(a).mask.cast<int>().sum();
    a.bold = true;
    CHECK(render(a).mask.cast<int>().sum() >= regular);
  }
}

TEST_CASE("render is deterministic") {
  auto a = plain();
  a.foreground = GradientPattern{GradientPattern::Mode::kRadial, {Color(1, 0, 0), Color(0, 0, 1)}};
  a.background = CamouflagePattern{9, 4, 0.3};
  OccluderSpec occ;
  occ.count = 2;
  const auto x = render(a, &occ), y = render(a, &occ);
  CHECK((x.image == y.image).all());
  CHECK((x.mask == y.mask).all());
  CHECK(x.occluders.size() == 2);
}

TEST_CASE("errors") {
  auto a = plain();
  a.scale = 0;
  CHECK_THROWS_AS(render(a), Error);
  a = plain(U'가');
  CHECK_THROWS_AS(render(a), FontError);
}

TEST_CASE("occluders") {
  const Renderer r(test::catalog());
  const auto a = plain(U'o');
  Rng rng(0, 0, Slot::kOccluders);
  const auto base = r.render_float(a, nullptr, rng);

  SUBCASE("count 0 leaves the image unchanged") {
    OccluderSpec spec;
    auto img = base.image;
    Rng g(4, 0, Slot::kOccluders);
    CHECK(r.draw_occluders(img, base.mask, spec, g).empty());
    CHECK((img == base.image).all());
  }
  SUBCASE("a containing occluder covers everything") {
    OccluderSpec spec;
    spec.shapes = {U'■'};
    spec.count = 1;
    spec.scale = 1.6;
    spec.translation = Vector2d(Vector2d::Zero());
    auto img = base.image;
    Rng g(4, 0, Slot::kOccluders);
    const auto occ = r.draw_occluders(img, base.mask, spec, g);
    REQUIRE(occ.size() == 1);
    CHECK(occ[0].overlap == doctest::Approx(1.0));
    CHECK(occ[0].shape == U'■');
  }
  SUBCASE("mask is pre-occlusion coverage") {
    OccluderSpec spec = occlusion_spec(1.0);
    Rng g(4, 0, Slot::kOccluders);
    const auto s = r.render_float(a, &spec, g);
    CHECK((s.mask == base.mask).all());
    CHECK(s.occluders.size() == 1);
  }
}

TEST_CASE("camouflage with a single-colour palette is uniform") {
  auto a = plain();
  a.foreground = CamouflagePattern{5, 1, 0.2};
  a.background = CamouflagePattern{5, 1, 1.5};
  const auto s = render(a);
  CHECK(symbol_pixels(s.mask) > 0);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 96; ++x) CHECK(s.image(y, x) == s.image(0, x % 3));
}

TEST_CASE("fill_camouflage on an empty region is a no-op") {
  ImageF img = ImageF::Constant(8, 24, 0.5f);
  Plane region = Plane::Zero(8, 8);
  Rng rng(1);
  fill_camouflage(img, region, CamouflagePattern{}, rng);
  CHECK((img == 0.5f).all());
}

TEST_CASE("quantize rounds and clamps") {
  ImageF img(1, 3);
  img << -0.5f, 0.5f, 2.0f;
  const auto q = quantize(img);
  CHECK(q(0, 0) == 0);
  CHECK(q(0, 1) == 128);
  CHECK(q(0, 2) == 255);
}

TEST_CASE("gradient stops interpolate across the frame") {
  GradientPattern g{GradientPattern::Mode::kLinear, {Color::Zero(), Color::Ones()}, 0.0};
  const auto left = pattern_color(g, 0.5, 16, 32, 32), right = pattern_color(g, 31.5, 16, 32, 32);
  CHECK(left.x() < 0.05f);
  CHECK(right.x() > 0.95f);
}
