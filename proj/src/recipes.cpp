#include "symgen/recipes.hpp"

#include <algorithm>
#include <set>

namespace symgen {
namespace {

const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys{
      "name",    "languages",  "all_languages", "max_symbols", "max_fonts", "resolution", "texture",
      "overrides", "corruption", "scene",       "n_samples",   "seed",      "format"};
  return keys;
}

}  // namespace

nlohmann::json RecipeConfig::to_json() const {
  nlohmann::json j{{"name", name},
                   {"languages", languages},
                   {"all_languages", all_languages},
                   {"max_symbols", max_symbols ? nlohmann::json(*max_symbols) : nlohmann::json()},
                   {"max_fonts", max_fonts ? nlohmann::json(*max_fonts) : nlohmann::json()},
                   {"resolution", {height, width}},
                   {"texture", texture},
                   {"overrides", overrides},
                   {"corruption", corruption.to_json()},
                   {"scene", scene ? scene->to_json() : nlohmann::json()},
                   {"n_samples", n_samples},
                   {"seed", seed ? nlohmann::json(*seed) : nlohmann::json()},
                   {"format", format}};
  return j;
}

RecipeConfig RecipeConfig::merged(const nlohmann::json& j) const {
  if (!j.is_object()) throw ConfigError("recipe config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!config_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
  RecipeConfig r = *this;
  try {
    if (j.contains("name")) r.name = j["name"].get<std::string>();
    if (j.contains("languages")) r.languages = j["languages"].get<std::vector<std::string>>();
    if (j.contains("all_languages")) r.all_languages = j["all_languages"].get<bool>();
    auto opt_size = [&](const char* key, std::optional<std::size_t>& out) {
      if (!j.contains(key)) return;
      out = j[key].is_null() ? std::nullopt : std::optional<std::size_t>(j[key].get<std::size_t>());
    };
    opt_size("max_symbols", r.max_symbols);
    opt_size("max_fonts", r.max_fonts);
    if (j.contains("resolution")) {
      r.height = j["resolution"].at(0).get<int>();
      r.width = j["resolution"].at(1).get<int>();
    }
    if (j.contains("texture")) r.texture = j["texture"].get<std::string>();
    if (j.contains("overrides")) {
      for (const auto& [k, v] : j["overrides"].items()) r.overrides[k] = v;
    }
    if (j.contains("corruption")) {
      nlohmann::json c = r.corruption.to_json();
      for (const auto& [k, v] : j["corruption"].items()) c[k] = v;
      r.corruption = CorruptionSpec::from_json(c);
    }
    if (j.contains("scene")) {
      if (j["scene"].is_null()) {
        r.scene.reset();
      } else {
        nlohmann::json s = r.scene ? r.scene->to_json() : SceneSpec{}.to_json();
        for (const auto& [k, v] : j["scene"].items()) s[k] = v;
        r.scene = SceneSpec::from_json(s);
      }
    }
    if (j.contains("n_samples")) r.n_samples = j["n_samples"].get<std::size_t>();
    if (j.contains("seed"))
      r.seed = j["seed"].is_null() ? std::nullopt : std::optional<std::uint64_t>(j["seed"].get<std::uint64_t>());
    if (j.contains("format")) r.format = j["format"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid recipe config: ") + e.what());
  }
  if (r.texture != "shades" && r.texture != "solid" && r.texture != "camouflage")
    throw ConfigError("texture must be shades, solid or camouflage");
  if (r.format != "hdf5" && r.format != "npz") throw ConfigError("format must be hdf5 or npz");
  if (r.height < 8 || r.width < 8) throw ConfigError("resolution must be at least 8x8");
  for (const auto& [k, v] : r.overrides.items()) (void)distribution_from_json(k, v);
  return r;
}

RecipeConfig RecipeConfig::from_json(const nlohmann::json& j) { return RecipeConfig{}.merged(j); }

const std::vector<std::string>& builtin_recipe_names() {
  static const std::vector<std::string> names{
      "default",         "camouflage",     "korean-1k",        "less-variations",  "solid",
      "shades",          "al-no-noise",    "al-label-noise",   "al-pixel-noise",   "al-missing",
      "al-cropped",      "al-occluded",    "counting-fixed",   "counting-variable", "counting-crowded",
      "fewshot-multilingual"};
  return names;
}

RecipeConfig builtin_recipe(std::string_view name) {
  RecipeConfig r;
  r.name = std::string(name);
  const auto log_uniform = [](double lo, double hi) {
    return nlohmann::json{{"dist", "log_uniform"}, {"lo", lo}, {"hi", hi}};
  };
  if (name == "default" || name == "al-no-noise") {
  } else if (name == "camouflage") {
    r.texture = "camouflage";
  } else if (name == "korean-1k") {
    r.languages = {"korean"};
    r.max_symbols = 1000;
  } else if (name == "less-variations") {
    r.overrides = {{"bold", false},
                   {"italic", false},
                   {"scale", log_uniform(0.55, 0.75)},
                   {"rotation", {{"dist", "normal"}, {"mean", 0.0}, {"sigma", 0.1}}}};
  } else if (name == "solid" || name == "shades") {
    r.texture = name == "solid" ? "solid" : "shades";
    r.overrides = {{"bold", true}, {"scale", log_uniform(0.65, 0.75)}};
  } else if (name == "al-label-noise") {
    r.corruption.label_noise_p = 0.1;
  } else if (name == "al-pixel-noise") {
    r.corruption.pixel_noise_p = 0.5;
    r.corruption.pixel_noise_sigma = 0.7;
  } else if (name == "al-missing") {
    r.corruption.missing_p = 0.1;
  } else if (name == "al-cropped") {
    r.overrides = {{"translation", {{"dist", "uniform"}, {"lo", -2.0}, {"hi", 2.0}}}};
  } else if (name == "al-occluded") {
    r.corruption.occlusion_p = 0.2;
  } else if (name == "counting-fixed" || name == "counting-variable" || name == "counting-crowded") {
    SceneSpec s;
    if (name == "counting-variable") s.scale = dist::LogNormal{0.1, 0.5};
    if (name == "counting-crowded") s.count = {30, 50};
    r.scene = s;
    r.height = s.height;
    r.width = s.width;
  } else if (name == "fewshot-multilingual") {
    r.all_languages = true;
    r.languages.clear();
    r.max_symbols = 200;
    r.max_fonts = 200;
  } else {
    std::string known;
    for (const auto& n : builtin_recipe_names()) known += (known.empty() ? "" : ", ") + n;
    throw UnknownRecipeError("unknown recipe '" + std::string(name) + "' (known: " + known + ")");
  }
  return r;
}

std::vector<Alphabet> resolve_alphabets(const RecipeConfig& recipe, const FontCatalog& catalog) {
  const std::vector<std::string> langs = recipe.all_languages ? catalog.languages() : recipe.languages;
  if (langs.empty()) throw FontError("no language has enough fonts in " + catalog.root().string());
  std::vector<Alphabet> out;
  for (const auto& l : langs) out.push_back(catalog.alphabet(l, recipe.max_symbols, recipe.max_fonts));
  return out;
}

AttributeSampler make_sampler(const RecipeConfig& recipe, std::vector<Alphabet> alphabets) {
  AttributeSampler s(std::move(alphabets), recipe.height, recipe.width);
  if (recipe.texture == "solid") {
    s = s.override("foreground", PatternDist{SolidPattern{Color::Ones()}})
            .override("background", PatternDist{SolidPattern{Color::Zero()}});
  } else if (recipe.texture == "camouflage") {
    s = s.override("foreground", PatternDist{dist::Camouflage{}}).override("background", PatternDist{dist::Camouflage{}});
  }
  for (const auto& name : attribute_names()) {
    if (recipe.overrides.contains(name)) s = s.override(name, distribution_from_json(name, recipe.overrides[name]));
  }
  for (const auto& [k, v] : recipe.overrides.items()) {
    if (std::find(attribute_names().begin(), attribute_names().end(), k) == attribute_names().end())
      throw ConfigError("unknown attribute '" + k + "'");
  }
  return s;
}

AttributeSampler make_sampler(const RecipeConfig& recipe, const FontCatalog& catalog) {
  return make_sampler(recipe, resolve_alphabets(recipe, catalog));
}

}  // namespace symgen
