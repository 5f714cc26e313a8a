#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "symgen/attributes.hpp"
#include "symgen/corruptions.hpp"
#include "symgen/errors.hpp"
#include "symgen/font_catalog.hpp"
#include "symgen/scene.hpp"

namespace symgen {

class UnknownRecipeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Fully resolved generator configuration. Serialized into every manifest.
struct RecipeConfig {
  std::string name = "default";
  std::vector<std::string> languages{"english"};
  bool all_languages = false;  ///< every language passing the font threshold
  std::optional<std::size_t> max_symbols;
  std::optional<std::size_t> max_fonts;
  int height = 32;
  int width = 32;
  std::string texture = "shades";  ///< shades | solid | camouflage
  nlohmann::json overrides = nlohmann::json::object();  ///< attribute -> distribution
  CorruptionSpec corruption;
  std::optional<SceneSpec> scene;  ///< set for counting recipes
  std::size_t n_samples = 1000;
  std::optional<std::uint64_t> seed;
  std::string format = "hdf5";  ///< hdf5 | npz

  nlohmann::json to_json() const;
  /// Unknown keys are rejected. Missing keys keep the defaults above.
  static RecipeConfig from_json(const nlohmann::json& j);
  /// Applies the keys present in `j` on top of *this.
  RecipeConfig merged(const nlohmann::json& j) const;
};

const std::vector<std::string>& builtin_recipe_names();
/// Throws UnknownRecipeError.
RecipeConfig builtin_recipe(std::string_view name);

/// Alphabets the recipe samples from, resolved against `catalog`.
std::vector<Alphabet> resolve_alphabets(const RecipeConfig& recipe, const FontCatalog& catalog);
AttributeSampler make_sampler(const RecipeConfig& recipe, const FontCatalog& catalog);
AttributeSampler make_sampler(const RecipeConfig& recipe, std::vector<Alphabet> alphabets);

}  // namespace symgen
