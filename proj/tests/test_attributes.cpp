#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "support.hpp"
#include "symgen/attributes.hpp"
#include "symgen/errors.hpp"

using namespace symgen;

namespace {

const AttributeSampler& english() {
  static const AttributeSampler s = AttributeSampler::defaults(test::catalog().alphabet("english"));
  return s;
}

bool same(const SymbolAttributes& a, const SymbolAttributes& b) {
  return attributes_to_json(a) == attributes_to_json(b);
}

}  // namespace

TEST_CASE("sampling is deterministic and seed-sensitive") {
  const auto& s = english();
  CHECK(same(s.sample(42, 7), s.sample(42, 7)));
  CHECK(!same(s.sample(42, 7), s.sample(43, 7)));
  CHECK(!same(s.sample(42, 7), s.sample(42, 8)));
}

TEST_CASE("records do not depend on evaluation order") {
  const auto& s = english();
  std::vector<std::uint64_t> order(1000);
  std::iota(order.begin(), order.end(), 0);
  std::vector<nlohmann::json> seq;
  for (auto i : order) seq.push_back(attributes_to_json(s.sample(5, i)));
  Rng rng(99);
  std::shuffle(order.begin(), order.end(), rng);
  for (auto i : order) CHECK(attributes_to_json(s.sample(5, i)) == seq[i]);
}

TEST_CASE("default sampler over 10k draws") {
  const auto& s = english();
  std::map<char32_t, int> chars;
  int bold = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto a = s.sample(1, i);
    ++chars[a.character];
    bold += a.bold;
    CHECK(a.scale >= DefaultRanges::kScaleMin);
    CHECK(a.scale <= DefaultRanges::kScaleMax);
    CHECK(std::abs(a.rotation) <= DefaultRanges::kRotationLimit);
    CHECK(a.translation.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(std::holds_alternative<GradientPattern>(a.foreground));
    const auto& fonts = s.alphabets()[0].fonts;
    CHECK(std::binary_search(fonts.begin(), fonts.end(), a.font));
    CHECK(a.label == a.character - U'a');
  }
  CHECK(chars.size() == 26);
  // Expected count n/26 = 385 with sigma ~ 19.2; 4 sigma below.
  for (const auto& [c, k] : chars) CHECK(k >= 385 - 77);
  CHECK(std::abs(bold / double(n) - DefaultRanges::kBoldP) <= 0.02);
}

TEST_CASE("overrides") {
  const auto& base = english();
  SUBCASE("constant scale") {
    const auto s = base.override("scale", ScalarDist{0.5});
    for (int i = 0; i < 100; ++i) CHECK(s.sample(3, i).scale == 0.5);
  }
  SUBCASE("wide translation") {
    const auto s = base.override("translation", PairDist{dist::UniformBox{-2, 2}});
    int outside = 0;
    for (int i = 0; i < 200; ++i) {
      const auto t = s.sample(3, i).translation;
      outside += t.cwiseAbs().maxCoeff() > 1.0;
      CHECK(t.cwiseAbs().maxCoeff() <= 2.0);
    }
    CHECK(outside > 0);
  }
  SUBCASE("constant rotation") {
    const auto s = base.override("rotation", ScalarDist{0.0});
    for (int i = 0; i < 100; ++i) CHECK(s.sample(3, i).rotation == 0.0);
  }
  SUBCASE("original is unchanged") {
    const auto s = base.override("scale", ScalarDist{0.5});
    CHECK(base.sample(3, 0).scale != 0.5);
    (void)s;
  }
  SUBCASE("other attributes are untouched") {
    const auto s = base.override("scale", ScalarDist{dist::Uniform{0.2, 0.3}});
    for (int i = 0; i < 100; ++i) {
      auto a = s.sample(8, i), b = base.sample(8, i);
      b.scale = a.scale;
      CHECK(same(a, b));
    }
  }
  SUBCASE("joint hook equals the independent override") {
    const auto hooked = base.with_joint_hook([](SymbolAttributes& a, Rng&) { a.scale = 0.5; });
    const auto direct = base.override("scale", ScalarDist{0.5});
    for (int i = 0; i < 100; ++i) CHECK(same(hooked.sample(2, i), direct.sample(2, i)));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(base.override("colour", ScalarDist{0.5}), ConfigError);
    CHECK_THROWS_AS(base.override("scale", ScalarDist{-0.5}), ConfigError);
    CHECK_THROWS_AS(base.override("scale", BoolDist{true}), ConfigError);
    CHECK_THROWS_AS(base.override("scale", ScalarDist{dist::Uniform{-1, 1}}), ConfigError);
    CHECK_THROWS_AS(base.override("bold", BoolDist{dist::Bernoulli{1.5}}), ConfigError);
    CHECK_THROWS_AS(base.override("char", CharDist{U'ж'}), ConfigError);
    CHECK_THROWS_AS(base.override("font", FontDist{std::string("No Such Font")}), ConfigError);
  }
}

TEST_CASE("generator errors carry the index") {
  const auto s = english().override("scale", ScalarDist{std::function<double(Rng&)>(
                                                 [](Rng&) -> double { throw std::runtime_error("boom"); })});
  CHECK(s.has_generators());
  CHECK(s.describe()["scale"]["dist"] == "generator");
  try {
    s.sample(1, 17);
    FAIL("expected SampleError");
  } catch (const SampleError& e) {
    CHECK(e.index() == 17);
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
  }
}

TEST_CASE("distribution json") {
  const auto d = distribution_from_json("scale", {{"dist", "log_uniform"}, {"lo", 0.5}, {"hi", 0.7}});
  const auto s = english().override("scale", d);
  for (int i = 0; i < 50; ++i) {
    const double v = s.sample(0, i).scale;
    CHECK(v >= 0.5);
    CHECK(v <= 0.7);
  }
  CHECK(s.describe()["scale"] == nlohmann::json({{"dist", "log_uniform"}, {"lo", 0.5}, {"hi", 0.7}}));
  CHECK_THROWS_AS(distribution_from_json("scale", {{"dist", "zipf"}}), ConfigError);
  CHECK_THROWS_AS(distribution_from_json("scale", {{"dist", "generator"}}), ConfigError);
  CHECK_NOTHROW(distribution_from_json("translation", {{"dist", "uniform"}, {"lo", -2}, {"hi", 2}}));
  CHECK_NOTHROW(distribution_from_json("background", "camouflage"));
}

TEST_CASE("attribute records round-trip") {
  for (int i = 0; i < 20; ++i) {
    const auto a = english().sample(4, i);
    const auto j = attributes_to_json(a);
    CHECK(attributes_to_json(attributes_from_json(j)) == j);
  }
  SymbolAttributes c;
  c.background = CamouflagePattern{123456789012345ULL, 4, 1.2, 0.05, 40, 0.25};
  CHECK(attributes_to_json(attributes_from_json(attributes_to_json(c))) == attributes_to_json(c));
}

TEST_CASE("hsv corners") {
  CHECK(hsv_to_rgb(0, 1, 1).isApprox(Color(1, 0, 0)));
  CHECK(hsv_to_rgb(1.0 / 3, 1, 1).isApprox(Color(0, 1, 0)));
  CHECK(hsv_to_rgb(0.5, 0, 0.5).isApprox(Color::Constant(0.5f)));
}
