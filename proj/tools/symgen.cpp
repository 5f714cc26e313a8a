#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "symgen/dataset.hpp"
#include "symgen/errors.hpp"
#include "symgen/recipes.hpp"
#include "symgen/render.hpp"

namespace fs = std::filesystem;
using namespace symgen;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kFonts = 3, kIo = 4, kCorrupt = 5 };

struct FontArgs {
  std::string font_dir;
  std::string blacklist;
  bool no_blacklist = false;
};

void add_font_args(CLI::App* cmd, FontArgs& f) {
  cmd->add_option("--font-dir", f.font_dir, "Font directory (default: $SYNB_FONT_DIR)");
  cmd->add_option("--blacklist", f.blacklist, "Font blacklist file (default: bundled list)");
  cmd->add_flag("--no-blacklist", f.no_blacklist, "Use every parseable font");
}

fs::path resolve_font_dir(const FontArgs& f) {
  if (!f.font_dir.empty()) return f.font_dir;
  if (const char* env = std::getenv("SYNB_FONT_DIR"); env && *env) return env;
  throw FontError("no font directory: pass --font-dir or set SYNB_FONT_DIR");
}

fs::path resolve_blacklist(const FontArgs& f) {
  if (f.no_blacklist) return {};
  if (!f.blacklist.empty()) return f.blacklist;
  const fs::path bundled = fs::path(SYMGEN_DATA_DIR) / "blacklist.txt";
  return fs::exists(bundled) ? bundled : fs::path();
}

FontCatalog load_catalog(const FontArgs& f) {
  auto cat = FontCatalog::load(resolve_font_dir(f), resolve_blacklist(f));
  for (const auto& w : cat.warnings()) std::cerr << "warning: " << w << "\n";
  return cat;
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

void print_summary(const DatasetContainer& c, const fs::path& out) {
  const auto& m = c.manifest;
  std::cout << "recipe      " << m.value("recipe", "") << "\n"
            << "samples     " << c.n << "\n"
            << "seed        " << m.value("master_seed", std::uint64_t{0}) << "\n"
            << "resolution  " << c.height << "x" << c.width << "\n";
  std::size_t classes = 0;
  for (const auto& a : m["sampler"]["alphabets"]) {
    classes += a["symbols"].get<std::size_t>();
    std::cout << "alphabet    " << a["language"].get<std::string>() << ": " << a["symbols"] << " symbols, "
              << a["fonts"] << " fonts\n";
  }
  std::cout << "classes     " << classes << "\n";
  for (const auto& [name, s] : c.splits)
    std::cout << "split       " << name << ": " << s.train.size() << "/" << s.valid.size() << "/" << s.test.size()
              << "\n";
  std::cout << "images      " << hex(c.payload_hash("images")) << "\n"
            << "masks       " << hex(c.payload_hash("masks")) << "\n"
            << "attributes  " << hex(c.payload_hash("attributes")) << "\n";
  if (!out.empty()) std::cout << "written     " << out.string() << "\n";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procedural symbol-image dataset generator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kGeneratorVersion);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a dataset from a recipe");
  std::string recipe_name, config_path, out_path, format;
  std::optional<std::size_t> n_samples;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  bool quiet = false;
  FontArgs gen_fonts;
  gen->add_option("--recipe", recipe_name, "Built-in recipe name");
  gen->add_option("--config", config_path, "JSON recipe file; flags override its values");
  gen->add_option("--n", n_samples, "Number of samples");
  gen->add_option("--seed", seed, "Master seed (required)");
  gen->add_option("--out", out_path, "Output file (.h5, .hdf5 or .npz)")->required();
  gen->add_option("--format", format, "hdf5 or npz (default: from extension)");
  gen->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  gen->add_flag("--quiet", quiet, "No progress output");
  add_font_args(gen, gen_fonts);

  // split
  auto* split = app.add_subcommand("split", "Add a named partition to a dataset");
  std::string split_path, strategy = "iid", attr, attrs, split_name, split_out, ratios_arg = "0.6,0.2,0.2";
  std::uint64_t split_seed = 0;
  double lo_pct = 0.2, hi_pct = 0.2;
  int grid = 5;
  split->add_option("dataset", split_path, "Dataset file")->required();
  split->add_option("--strategy", strategy, "iid | stratified | stratified-discrete | compositional")
      ->check(CLI::IsMember({"iid", "stratified", "stratified-discrete", "compositional"}));
  split->add_option("--attr", attr, "Attribute for stratified splits");
  split->add_option("--attrs", attrs, "Two comma-separated attributes for compositional splits");
  split->add_option("--name", split_name, "Split name (default: derived from strategy and attributes)");
  split->add_option("--seed", split_seed, "Seed for shuffled strategies");
  split->add_option("--ratios", ratios_arg, "train,valid,test fractions");
  split->add_option("--lo", lo_pct, "Stratified: fraction of lowest values sent to valid");
  split->add_option("--hi", hi_pct, "Stratified: fraction of highest values sent to test");
  split->add_option("--grid", grid, "Compositional: quantile cells per attribute");
  split->add_option("--out", split_out, "Write to this file instead of in place");

  // inspect
  auto* insp = app.add_subcommand("inspect", "Report dataset contents");
  std::string inspect_path;
  insp->add_option("dataset", inspect_path, "Dataset file")->required();

  // preview
  auto* prev = app.add_subcommand("preview", "Write a PNG grid of the first samples");
  std::string preview_path, preview_out;
  int rows = 8, cols = 8;
  prev->add_option("dataset", preview_path, "Dataset file")->required();
  prev->add_option("--rows", rows, "Grid rows");
  prev->add_option("--cols", cols, "Grid columns");
  prev->add_option("--out", preview_out, "PNG path")->required();

  // validate
  auto* val = app.add_subcommand("validate", "Check container invariants");
  std::string validate_path;
  bool regen = false;
  std::size_t val_workers = 1;
  FontArgs val_fonts;
  val->add_option("dataset", validate_path, "Dataset file")->required();
  val->add_flag("--regenerate", regen, "Regenerate from the manifest and compare payloads");
  val->add_option("--workers", val_workers, "Worker threads for regeneration")->check(CLI::PositiveNumber);
  add_font_args(val, val_fonts);

  // fonts
  auto* fonts = app.add_subcommand("fonts", "Print the font catalog as JSON");
  FontArgs cat_fonts;
  add_font_args(fonts, cat_fonts);

  // recipes
  auto* recipes = app.add_subcommand("recipes", "List built-in recipes");

  // dump
  auto* dump = app.add_subcommand("dump", "Render one sample to PNG + JSON");
  std::string dump_recipe = "default", dump_config, dump_prefix;
  std::uint64_t dump_seed = 0;
  std::size_t dump_index = 0;
  FontArgs dump_fonts;
  dump->add_option("--recipe", dump_recipe, "Built-in recipe name");
  dump->add_option("--config", dump_config, "JSON recipe file");
  dump->add_option("--seed", dump_seed, "Master seed")->required();
  dump->add_option("--index", dump_index, "Sample index");
  dump->add_option("--out", dump_prefix, "Output prefix (writes .png, .mask.png, .json)")->required();
  add_font_args(dump, dump_fonts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      RecipeConfig recipe;
      if (!config_path.empty()) {
        const auto j = read_json_file(config_path);
        recipe = recipe_name.empty() ? builtin_recipe(j.value("name", "default")).merged(j)
                                     : builtin_recipe(recipe_name).merged(j);
      } else {
        recipe = builtin_recipe(recipe_name.empty() ? "default" : recipe_name);
      }
      if (!recipe_name.empty()) recipe.name = recipe_name;
      if (n_samples) recipe.n_samples = *n_samples;
      if (seed) recipe.seed = *seed;
      if (!recipe.seed) throw ConfigError("a seed is required (--seed or \"seed\" in the config)");
      const Format fmt = format.empty() ? format_from_path(out_path)
                         : format == "hdf5" ? Format::kHdf5
                         : format == "npz"  ? Format::kNpz
                                            : throw ConfigError("format must be hdf5 or npz");
      if (format_from_path(out_path) != fmt)
        throw IoError("extension of '" + out_path + "' does not match format " + std::string(to_string(fmt)));
      recipe.format = std::string(to_string(fmt));

      const auto catalog = load_catalog(gen_fonts);
      GenerateOptions opt;
      opt.workers = workers;
      opt.font_dir = resolve_font_dir(gen_fonts);
      opt.blacklist = resolve_blacklist(gen_fonts);
      if (!quiet) opt.progress = [](std::size_t d, std::size_t n) { std::cerr << "\r" << d << "/" << n << std::flush; };
      const auto c = generate_dataset(recipe, catalog, recipe.n_samples, *recipe.seed, opt);
      if (!quiet) std::cerr << "\n";
      write_dataset(c, out_path, fmt);
      print_summary(c, out_path);
    } else if (*split) {
      auto c = read_dataset(split_path);
      PartitionResult p;
      std::string name = split_name;
      if (strategy == "iid") {
        const auto r = split_list(ratios_arg);
        if (r.size() != 3) throw ConfigError("--ratios needs three values");
        p = split_iid(c.n, {std::stod(r[0]), std::stod(r[1]), std::stod(r[2])}, split_seed);
        if (name.empty()) name = "iid";
      } else if (strategy == "stratified") {
        if (attr.empty()) throw ConfigError("--attr is required for stratified splits");
        p = split_stratified_continuous(numeric_attribute(c, attr), lo_pct, hi_pct);
        p.attributes = {attr};
        if (name.empty()) name = "stratified-" + attr;
      } else if (strategy == "stratified-discrete") {
        if (attr.empty()) throw ConfigError("--attr is required for stratified splits");
        const auto r = split_list(ratios_arg);
        if (r.size() != 3) throw ConfigError("--ratios needs three values");
        p = split_stratified_discrete(categorical_attribute(c, attr),
                                      {std::stod(r[0]), std::stod(r[1]), std::stod(r[2])}, split_seed);
        p.attributes = {attr};
        if (name.empty()) name = "stratified-" + attr;
      } else {
        const auto names = split_list(attrs);
        if (names.size() != 2) throw ConfigError("--attrs needs two comma-separated attributes");
        const auto a = numeric_attribute(c, names[0]), b = numeric_attribute(c, names[1]);
        p = split_compositional(a, b, grid);
        p.attributes = names;
        if (name.empty()) name = "compositional-" + names[0] + "-" + names[1];
        for (std::size_t k = 0; k < 2; ++k) {
          const auto& v = k == 0 ? a : b;
          std::cout << "ks " << names[k] << " train/test " << ks_statistic(gather(v, p.train), gather(v, p.test))
                    << " train/valid " << ks_statistic(gather(v, p.train), gather(v, p.valid)) << "\n";
        }
      }
      if (name == "default") throw ConfigError("the default split cannot be replaced");
      c.splits[name] = p;
      const fs::path out = split_out.empty() ? fs::path(split_path) : fs::path(split_out);
      write_dataset(c, out);
      std::cout << "split " << name << ": train " << p.train.size() << " valid " << p.valid.size() << " test "
                << p.test.size() << "\n";
    } else if (*insp) {
      const auto c = read_dataset(inspect_path);
      std::cout << inspect(c).dump(2) << "\n";
    } else if (*prev) {
      const auto c = read_dataset(preview_path);
      const auto grid_img = preview_grid(c, rows, cols);
      write_png(preview_out, grid_img, 3);
      std::cout << preview_out << " " << grid_img.rows() << "x" << grid_img.cols() / 3 << "\n";
    } else if (*val) {
      const auto c = read_dataset(validate_path);
      std::cout << "container ok: " << c.n << " samples\n";
      if (regen) {
        FontArgs fa = val_fonts;
        if (fa.font_dir.empty() && c.manifest.contains("fonts")) fa.font_dir = c.manifest["fonts"].value("dir", "");
        if (fa.blacklist.empty() && c.manifest.contains("fonts")) {
          fa.blacklist = c.manifest["fonts"].value("blacklist", "");
          fa.no_blacklist = fa.blacklist.empty();
        }
        const auto catalog = load_catalog(fa);
        auto again = regenerate(c.manifest, catalog, val_workers);
        again.splits = c.splits;
        bool same = true;
        for (const char* field : {"images", "masks", "attributes"}) {
          const bool eq = again.payload_hash(field) == c.payload_hash(field);
          same = same && eq;
          std::cout << field << " " << (eq ? "match" : "DIFFER") << "\n";
        }
        same = same && again.labels == c.labels && again.instance_ids == c.instance_ids &&
               again.instance_masks == c.instance_masks;
        if (!same) {
          std::cout << "regeneration differs\n";
          return kFailure;
        }
        std::cout << "regeneration reproduces all payloads\n";
      }
    } else if (*fonts) {
      const auto catalog = load_catalog(cat_fonts);
      std::cout << catalog.summary().dump(2) << "\n";
    } else if (*recipes) {
      for (const auto& n : builtin_recipe_names()) std::cout << n << "\t" << builtin_recipe(n).to_json().dump() << "\n";
    } else if (*dump) {
      RecipeConfig recipe = builtin_recipe(dump_recipe);
      if (!dump_config.empty()) recipe = recipe.merged(read_json_file(dump_config));
      const auto catalog = load_catalog(dump_fonts);
      const auto c = generate_dataset(recipe, catalog, dump_index + 1, dump_seed, {});
      write_png(dump_prefix + ".png", c.image_array(dump_index), 3);
      write_png(dump_prefix + ".mask.png", c.mask_array(dump_index), 1);
      std::ofstream(dump_prefix + ".json") << c.attribute(dump_index).dump(2) << "\n";
      std::cout << dump_prefix << ".png\n";
    }
  } catch (const UnknownRecipeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const FontError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFonts;
  } catch (const FontParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFonts;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCorrupt;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
