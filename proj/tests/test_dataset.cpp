#include <doctest.h>

#include <fstream>

#include "support.hpp"
#include "symgen/dataset.hpp"
#include "symgen/errors.hpp"
#include "symgen/recipes.hpp"

using namespace symgen;
namespace fs = std::filesystem;

namespace {

DatasetContainer make(const std::string& recipe, std::size_t n, std::uint64_t seed,
                      std::size_t workers = 1) {
  GenerateOptions opt;
  opt.workers = workers;
  opt.font_dir = test::font_dir();
  opt.blacklist = test::blacklist();
  return generate_dataset(builtin_recipe(recipe), test::catalog(), n, seed, opt);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("built-in recipes") {
  for (const auto& name : builtin_recipe_names()) {
    const auto r = builtin_recipe(name);
    CHECK(r.name == name);
    CHECK(RecipeConfig::from_json(r.to_json()).to_json() == r.to_json());
    if (name == "korean-1k") {
      CHECK(r.max_symbols == 1000u);
      continue;  // needs Hangul fonts
    }
    const auto alphabets = resolve_alphabets(r, test::catalog());
    CHECK(!alphabets.empty());
    CHECK_NOTHROW(make_sampler(r, test::catalog()));
  }
  CHECK_THROWS_AS(builtin_recipe("nope"), UnknownRecipeError);
  CHECK_THROWS_AS(RecipeConfig::from_json({{"colour", 1}}), ConfigError);
  const auto m = builtin_recipe("default").merged({{"resolution", {64, 48}}, {"n_samples", 5}});
  CHECK(m.height == 64);
  CHECK(m.width == 48);
  CHECK(m.n_samples == 5u);
}

TEST_CASE("recipe settings reach the samples") {
  const auto lv = make_sampler(builtin_recipe("less-variations"), test::catalog());
  const auto solid = make_sampler(builtin_recipe("solid"), test::catalog());
  for (int i = 0; i < 200; ++i) {
    const auto a = lv.sample(1, i);
    CHECK(!a.bold);
    CHECK(!a.italic);
    CHECK(a.scale >= 0.55);
    CHECK(a.scale <= 0.75);
    const auto b = solid.sample(1, i);
    CHECK(b.bold);
    CHECK(std::get<SolidPattern>(b.foreground).color == Color::Ones());
    CHECK(std::get<SolidPattern>(b.background).color == Color::Zero());
  }
}

TEST_CASE("generation basics") {
  const auto c = make("default", 50, 3);
  CHECK_NOTHROW(c.validate());
  CHECK(c.n == 50);
  CHECK(c.images.size() == 50u * 32 * 32 * 3);
  CHECK(c.masks.size() == 50u * 32 * 32);
  CHECK(c.labels.at("clean").size() == 50);
  CHECK(c.splits.at("default").train.size() == 30);
  CHECK(c.manifest["master_seed"] == 3);
  CHECK(c.manifest["recipe"] == "default");
  CHECK(c.manifest.contains("created"));
  CHECK(c.attribute(0)["index"] == 0);

  const auto one = make("default", 1, 3);
  CHECK(one.splits.at("default").train.size() == 1);
  CHECK(one.splits.at("default").valid.empty());
  CHECK(one.splits.at("default").test.empty());
}

TEST_CASE("worker count does not change output") {
  const auto a = make("default", 120, 9, 1), b = make("camouflage", 1, 9, 1);
  const auto c = make("default", 120, 9, 4);
  CHECK(a.equal_payload(c));
  CHECK(!a.equal_payload(b));
}

TEST_CASE("corruptions leave other fields untouched") {
  const auto clean = make("default", 100, 5);
  const auto noisy = make("al-label-noise", 100, 5);
  CHECK(clean.images == noisy.images);
  CHECK(clean.masks == noisy.masks);
  CHECK(clean.labels.at("clean") == noisy.labels.at("clean"));
  CHECK(noisy.labels.count("noisy"));
  CHECK(noisy.attribute(0).contains("corruption"));

  auto r = builtin_recipe("al-missing");
  r.corruption.missing_p = 1.0;
  const auto gone = generate_dataset(r, test::catalog(), 20, 5);
  CHECK(std::all_of(gone.masks.begin(), gone.masks.end(), [](auto v) { return v == 0; }));
  CHECK(gone.labels.at("clean").size() == 20);
  r.corruption.missing_p = 0.0;
  const auto kept = generate_dataset(r, test::catalog(), 20, 5);
  for (std::size_t i = 0; i < 20; ++i) CHECK(symbol_pixels(kept.mask_array(i)) > 0);
}

TEST_CASE("failures name the lowest failing index") {
  const auto base = make_sampler(builtin_recipe("default"), test::catalog());
  const auto bad = base.override("scale", ScalarDist{std::function<double(Rng&)>([](Rng& r) {
    if (r.uniform() < 0.05) throw std::runtime_error("bad draw");
    return 0.5;
  })});
  std::size_t first = 0;
  for (;; ++first) {
    try {
      bad.sample(1, first);
    } catch (const SampleError&) {
      break;
    }
  }
  GenerateOptions opt;
  opt.workers = 4;
  try {
    generate_dataset(bad, builtin_recipe("default"), test::catalog(), first + 200, 1, opt);
    FAIL("expected SampleError");
  } catch (const SampleError& e) {
    CHECK(e.index() == first);
  }
}

TEST_CASE("round trip both formats") {
  const auto dir = test::scratch("roundtrip");
  auto single = make("al-occluded", 40, 2);
  single.splits["extra"] = split_iid(40, {0.5, 0.25, 0.25}, 3);
  const auto scenes = make("counting-fixed", 6, 2);
  CHECK(scenes.is_scene());
  CHECK_NOTHROW(scenes.validate());
  for (const DatasetContainer* c : {static_cast<const DatasetContainer*>(&single), &scenes}) {
    for (const char* ext : {".h5", ".npz"}) {
      const auto p = dir / (std::string(c->is_scene() ? "scene" : "single") + ext);
      write_dataset(*c, p);
      CHECK(fs::exists(fs::path(p.string() + ".manifest.json")));
      const auto back = read_dataset(p);
      CHECK(back.equal_payload(*c));
      CHECK(back.manifest == c->manifest);
      CHECK(back.splits == c->splits);
      // Writing again gives the same bytes.
      const auto q = dir / (std::string("again") + ext);
      write_dataset(back, q);
      CHECK(slurp(p) == slurp(q));
    }
  }
}

TEST_CASE("io errors") {
  const auto dir = test::scratch("ioerr");
  const auto c = make("default", 5, 1);
  CHECK_THROWS_AS(write_dataset(c, dir / "x.h5", Format::kNpz), IoError);
  CHECK_THROWS_AS(write_dataset(c, dir / "x.csv"), IoError);
  CHECK_THROWS_AS(write_dataset(c, dir / "missing" / "x.h5"), IoError);
  CHECK_THROWS_AS(read_dataset(dir / "absent.npz"), IoError);
  std::ofstream(dir / "junk.npz") << "PK junk";
  CHECK_THROWS_AS(read_dataset(dir / "junk.npz"), FormatError);
  std::ofstream(dir / "junk.h5") << "junk";
  CHECK_THROWS_AS(read_dataset(dir / "junk.h5"), FormatError);
}

TEST_CASE("regeneration from the manifest") {
  const auto c = make("al-pixel-noise", 30, 11, 2);
  const auto r = regenerate(c.manifest, test::catalog(), 3);
  for (const char* f : {"images", "masks", "attributes", "labels/clean", "labels/noisy"})
    CHECK(r.payload_hash(f) == c.payload_hash(f));
  CHECK(r.equal_payload(c));
}

TEST_CASE("preview grid") {
  const auto c = make("default", 6, 1);
  const auto g = preview_grid(c, 2, 3);
  CHECK(g.rows() == 2 * 33 + 1);
  CHECK(g.cols() == 3 * (3 * 33 + 1));
  const auto one = preview_grid(c, 1, 1);
  CHECK(one.rows() == 34);
  CHECK(one(0, 0) == 255);
  CHECK_THROWS_AS(preview_grid(c, 3, 3), ConfigError);
}

TEST_CASE("attribute accessors") {
  const auto c = make("default", 20, 1);
  CHECK(numeric_attribute(c, "scale").size() == 20);
  CHECK(categorical_attribute(c, "font").size() == 20);
  CHECK_THROWS_AS(numeric_attribute(c, "colour"), ConfigError);
  const auto report = inspect(c);
  CHECK(report["n"] == 20);
}
