#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "symgen/errors.hpp"
#include "symgen/scene.hpp"

using namespace symgen;

namespace {

const Renderer& renderer() {
  static const Renderer r(test::catalog());
  return r;
}

SceneComposer composer(SceneSpec spec = {}) {
  return SceneComposer(renderer(), test::catalog().alphabet("english"), spec);
}

bool brute_force_overlap(const SceneSample& s) {
  std::vector<Mask8> dense;
  for (const auto& m : s.instances) dense.push_back(m.dense(s.height(), s.width()));
  for (std::size_t i = 0; i < dense.size(); ++i)
    for (std::size_t j = i + 1; j < dense.size(); ++j)
      if (((dense[i] >= 128) && (dense[j] >= 128)).any()) return true;
  return false;
}

SymbolAttributes letter(char32_t c, double scale) {
  SymbolAttributes a;
  a.character = c;
  a.font = "DejaVu Sans Book";
  a.scale = scale;
  a.foreground = SolidPattern{Color::Ones()};
  return a;
}

}  // namespace

TEST_CASE("scene invariants") {
  const auto c = composer();
  for (int i = 0; i < 40; ++i) {
    const auto s = c.compose(3, i);
    const auto n = static_cast<int>(s.instances.size());
    CHECK(n >= 3);
    CHECK(n <= 10);
    CHECK(s.labels.size() == s.instances.size());
    CHECK(s.points.size() == s.instances.size());
    CHECK(s.target_count == std::count(s.codepoints.begin(), s.codepoints.end(), U'a'));
    CHECK(s.overlap_flag == brute_force_overlap(s));
    for (int k = 0; k < n; ++k) {
      const auto& m = s.instances[k];
      CHECK(m.at(s.points[k].x(), s.points[k].y()) >= 128);
      CHECK(s.attributes[k].scale == 0.1);
    }
    CHECK(s.image.rows() == 128);
    CHECK(s.image.cols() == 3 * 128);
  }
}

TEST_CASE("composition is deterministic") {
  const auto c = composer();
  const auto a = c.compose(9, 4), b = c.compose(9, 4);
  CHECK((a.image == b.image).all());
  CHECK((a.union_mask() == b.union_mask()).all());
}

TEST_CASE("crowded scenes") {
  SceneSpec spec;
  spec.count = {30, 50};
  const auto c = composer(spec);
  for (int i = 0; i < 5; ++i) {
    const auto s = c.compose(1, i);
    CHECK(s.instances.size() >= 30);
    CHECK(s.instances.size() <= 50);
  }
}

TEST_CASE("point annotation is the snapped centroid") {
  InstanceMask m;
  m.x0 = 10;
  m.y0 = 20;
  m.patch = Mask8::Zero(5, 5);
  m.patch.row(2).setConstant(255);
  CHECK(point_annotation(m) == Eigen::Vector2i(12, 22));
  // Ring: the centroid is a hole, so the annotation snaps onto the ring.
  m.patch.setConstant(255);
  m.patch.block(1, 1, 3, 3).setZero();
  const auto p = point_annotation(m);
  CHECK(m.at(p.x(), p.y()) == 255);
  CHECK(std::abs(p.x() - 12) + std::abs(p.y() - 22) <= 2);
}

TEST_CASE("coincident symbols overlap") {
  const auto c = composer();
  const auto s = c.compose_fixed({letter(U'o', 0.2), letter(U'o', 0.2)}, {{64, 64}, {64, 64}},
                                 SolidPattern{Color::Zero()});
  CHECK(s.overlap_flag);
  CHECK(masks_overlap(s.instances[0], s.instances[1]));
  // The top instance owns every shared pixel.
  const auto ids = s.instance_ids();
  CHECK((ids != 1).all());
  CHECK((ids == 2).any());

  const auto apart = c.compose_fixed({letter(U'o', 0.1), letter(U'o', 0.1)}, {{20, 20}, {100, 100}},
                                     SolidPattern{Color::Zero()});
  CHECK(!apart.overlap_flag);
  CHECK(apart.target_count == 0);

  const auto [clean, overlapping] = split_by_overlap({s, apart, s});
  CHECK(clean == std::vector<std::size_t>{1});
  CHECK(overlapping == std::vector<std::size_t>{0, 2});
}

TEST_CASE("singleton scenes never overlap") {
  SceneSpec spec;
  spec.count = {1, 1};
  const auto c = composer(spec);
  std::vector<SceneSample> scenes;
  for (int i = 0; i < 10; ++i) scenes.push_back(c.compose(2, i));
  CHECK(split_by_overlap(scenes).second.empty());
}

TEST_CASE("overlap policies") {
  SceneSpec spec;
  spec.scale = 0.15;
  spec.overlap = OverlapPolicy::kReject;
  const auto reject = composer(spec);
  for (int i = 0; i < 10; ++i) CHECK(!reject.compose(5, i).overlap_flag);

  spec.overlap = OverlapPolicy::kRequire;
  const auto require = composer(spec);
  for (int i = 0; i < 10; ++i) CHECK(require.compose(5, i).overlap_flag);

  spec.count = {30, 50};
  spec.overlap = OverlapPolicy::kReject;
  spec.max_retries = 50;
  const auto impossible = composer(spec);
  try {
    impossible.compose(5, 0);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("reject-overlapping") != std::string::npos);
  }
}

TEST_CASE("spec validation and json") {
  SceneSpec spec;
  spec.count = {0, 3};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.count = {3, 10};
  spec.p_target = 1.2;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.p_target = 0.7;
  spec.scale = dist::LogNormal{0.1, 0.5};
  spec.overlap = OverlapPolicy::kRequire;
  CHECK(SceneSpec::from_json(spec.to_json()).to_json() == spec.to_json());
  CHECK(overlap_policy_from_string("allow") == OverlapPolicy::kAllow);
  CHECK_THROWS_AS(overlap_policy_from_string("sometimes"), ConfigError);
}
