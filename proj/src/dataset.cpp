#include "symgen/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "symgen/corruptions.hpp"
#include "symgen/errors.hpp"
#include "symgen/scene.hpp"

namespace symgen {
namespace {

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h = 0xCBF29CE484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

template <typename T>
std::uint64_t hash_vector(const std::vector<T>& v) {
  return fnv1a(v.data(), v.size() * sizeof(T));
}

nlohmann::json manifest_without_timestamp(nlohmann::json m) {
  if (m.is_object()) m.erase("created");
  return m;
}

struct SingleResult {
  std::string record;
  std::int64_t clean = 0, noisy = 0;
};

struct SceneResult {
  std::string record;
  std::vector<InstanceMask> instances;
  std::int64_t count = 0, overlap = 0;
};

std::uint64_t font_fingerprint(const FontCatalog& catalog) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& f : catalog.fonts()) {
    h = fnv1a(f.id.data(), f.id.size(), h);
    const char sep = f.blacklisted ? '\x01' : '\x00';
    h = fnv1a(&sep, 1, h);
  }
  return h;
}

// Runs fn(i) for i in [0, n) on `workers` threads. Indices are claimed in
// increasing order; after a failure only lower indices are still processed,
// so the reported index is the lowest failing one for any worker count.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, const Fn& fn,
                  const std::function<void(std::size_t, std::size_t)>& progress) {
  std::atomic<std::size_t> next{0}, done{0};
  std::atomic<std::size_t> first_failure{std::numeric_limits<std::size_t>::max()};
  std::mutex mu;
  std::optional<SampleError> error;
  auto body = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || i > first_failure.load()) return;
      try {
        fn(i);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        if (i < first_failure.load()) {
          first_failure = i;
          const auto* se = dynamic_cast<const SampleError*>(&e);
          error.emplace(se ? *se : SampleError(i, e.what()));
        }
        continue;
      }
      const std::size_t d = done.fetch_add(1) + 1;
      if (progress && (d % 1000 == 0 || d == n)) {
        std::lock_guard lock(mu);
        progress(d, n);
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (error) throw *error;
}

void attach_default_split(DatasetContainer& c, std::uint64_t seed) {
  if (c.n >= 3) {
    c.splits["default"] = split_iid(c.n, kDefaultRatios, seed);
  } else {
    PartitionResult p;
    p.strategy = "iid";
    p.params = {{"ratios", kDefaultRatios}, {"seed", seed}};
    for (std::size_t i = 0; i < c.n; ++i) p.train.push_back(static_cast<std::int64_t>(i));
    c.splits["default"] = p;
  }
}

}  // namespace

Image8 DatasetContainer::image_array(std::size_t i) const {
  Image8 out(height, 3 * width);
  std::copy_n(image(i), image_bytes(), out.data());
  return out;
}

Mask8 DatasetContainer::mask_array(std::size_t i) const {
  Mask8 out(height, width);
  std::copy_n(mask(i), mask_bytes(), out.data());
  return out;
}

void DatasetContainer::validate() const {
  if (height <= 0 || width <= 0) throw FormatError("invalid resolution");
  if (images.size() != n * image_bytes()) throw FormatError("images array does not match N x H x W x 3");
  if (masks.size() != n * mask_bytes()) throw FormatError("masks array does not match N x H x W");
  if (attributes.size() != n) throw FormatError("attribute count does not match N");
  for (const auto& [name, v] : labels)
    if (v.size() != n) throw FormatError("label array '" + name + "' does not match N");
  for (const auto& [name, s] : splits) {
    try {
      check_partition(s, n);
    } catch (const FormatError& e) {
      throw FormatError("split '" + name + "': " + e.what());
    }
  }
  if (!instance_ids.empty() && instance_ids.size() != n * mask_bytes())
    throw FormatError("instance_ids does not match N x H x W");
  if (!instance_masks.empty()) {
    const auto& im = instance_masks;
    if (im.offsets.size() != n + 1 || im.offsets.front() != 0 ||
        static_cast<std::size_t>(im.offsets.back()) != im.instance_count())
      throw FormatError("instance mask offsets are inconsistent");
    if (im.boxes.size() % 4 != 0 || im.pixel_offsets.size() != im.instance_count() + 1 ||
        static_cast<std::size_t>(im.pixel_offsets.back()) != im.data.size())
      throw FormatError("instance mask pixel offsets are inconsistent");
    for (std::size_t k = 0; k < im.instance_count(); ++k) {
      const auto w = im.boxes[4 * k + 2], h = im.boxes[4 * k + 3];
      if (im.pixel_offsets[k + 1] - im.pixel_offsets[k] != static_cast<std::int64_t>(w) * h)
        throw FormatError("instance mask patch size mismatch");
    }
  }
}

bool DatasetContainer::equal_payload(const DatasetContainer& o) const {
  return n == o.n && height == o.height && width == o.width && images == o.images && masks == o.masks &&
         attributes == o.attributes && labels == o.labels && splits == o.splits &&
         instance_ids == o.instance_ids && instance_masks == o.instance_masks &&
         manifest_without_timestamp(manifest) == manifest_without_timestamp(o.manifest);
}

std::uint64_t DatasetContainer::payload_hash(std::string_view field) const {
  if (field == "images") return hash_vector(images);
  if (field == "masks") return hash_vector(masks);
  if (field == "instance_ids") return hash_vector(instance_ids);
  if (field == "attributes") {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const auto& a : attributes) h = fnv1a(a.data(), a.size() + 1, h);
    return h;
  }
  if (field.starts_with("labels/")) {
    const auto it = labels.find(std::string(field.substr(7)));
    if (it == labels.end()) throw ConfigError("no label array '" + std::string(field) + "'");
    return hash_vector(it->second);
  }
  throw ConfigError("unknown payload field '" + std::string(field) + "'");
}

DatasetContainer generate_dataset(const RecipeConfig& recipe, const FontCatalog& catalog,
                                  std::size_t n_samples, std::uint64_t master_seed,
                                  const GenerateOptions& options) {
  const auto alphabets = resolve_alphabets(recipe, catalog);
  return generate_dataset(make_sampler(recipe, alphabets), recipe, catalog, n_samples, master_seed, options);
}

DatasetContainer generate_dataset(const AttributeSampler& sampler, const RecipeConfig& recipe,
                                  const FontCatalog& catalog, std::size_t n_samples,
                                  std::uint64_t master_seed, const GenerateOptions& options) {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  recipe.corruption.validate();
  const Renderer renderer(catalog);

  DatasetContainer c;
  c.n = n_samples;
  c.height = recipe.scene ? recipe.scene->height : sampler.height();
  c.width = recipe.scene ? recipe.scene->width : sampler.width();
  c.images.assign(n_samples * c.image_bytes(), 0);
  c.masks.assign(n_samples * c.mask_bytes(), 0);
  c.attributes.assign(n_samples, {});

  RecipeConfig resolved = recipe;
  resolved.n_samples = n_samples;
  resolved.seed = master_seed;
  c.manifest = {{"generator", kGeneratorName},
                {"version", kGeneratorVersion},
                {"format_version", kFormatVersion},
                {"master_seed", master_seed},
                {"recipe", recipe.name},
                {"n_samples", n_samples},
                {"config", resolved.to_json()},
                {"sampler", sampler.describe()},
                {"portable", !sampler.has_generators()},
                {"fonts",
                 {{"dir", options.font_dir.empty() ? catalog.root().generic_string() : options.font_dir.generic_string()},
                  {"blacklist", options.blacklist.generic_string()},
                  {"count", catalog.size()},
                  {"eligible", catalog.size() - catalog.blacklisted_count()},
                  {"fingerprint", font_fingerprint(catalog)}}},
                {"created", utc_timestamp()}};

  if (recipe.scene) {
    if (recipe.corruption.any()) throw ConfigError("corruptions are not supported for scene recipes");
    const SceneComposer composer(renderer, sampler.alphabets().front(), *recipe.scene);
    std::vector<SceneResult> results(n_samples);
    c.instance_ids.assign(n_samples * c.mask_bytes(), 0);
    parallel_for(
        n_samples, options.workers,
        [&](std::size_t i) {
          try {
            SceneSample s = composer.compose(master_seed, i);
            std::copy_n(s.image.data(), c.image_bytes(), c.images.begin() + static_cast<std::ptrdiff_t>(i * c.image_bytes()));
            const Mask8 u = s.union_mask();
            std::copy_n(u.data(), c.mask_bytes(), c.masks.begin() + static_cast<std::ptrdiff_t>(i * c.mask_bytes()));
            const auto ids = s.instance_ids();
            std::copy_n(ids.data(), c.mask_bytes(), c.instance_ids.begin() + static_cast<std::ptrdiff_t>(i * c.mask_bytes()));
            nlohmann::json symbols = nlohmann::json::array();
            for (std::size_t k = 0; k < s.attributes.size(); ++k) {
              auto a = attributes_to_json(s.attributes[k]);
              a.erase("translation");
              a.erase("background");
              a["center"] = {s.centers[k].x(), s.centers[k].y()};
              a["point"] = {s.points[k].x(), s.points[k].y()};
              symbols.push_back(std::move(a));
            }
            nlohmann::json rec{{"index", i},
                               {"recipe", recipe.name},
                               {"version", kGeneratorVersion},
                               {"scene", true},
                               {"resolution", {c.height, c.width}},
                               {"target", to_utf8(recipe.scene->target)},
                               {"target_count", s.target_count},
                               {"overlap", s.overlap_flag},
                               {"background", pattern_to_json(s.background)},
                               {"symbols", symbols}};
            results[i].record = rec.dump();
            results[i].instances = std::move(s.instances);
            results[i].count = s.target_count;
            results[i].overlap = s.overlap_flag ? 1 : 0;
          } catch (const SampleError&) {
            throw;
          } catch (const std::exception& e) {
            throw SampleError(i, e.what());
          }
        },
        options.progress);
    auto& im = c.instance_masks;
    im.offsets.push_back(0);
    im.pixel_offsets.push_back(0);
    auto& count = c.labels["count"];
    auto& overlap = c.labels["overlap"];
    for (std::size_t i = 0; i < n_samples; ++i) {
      auto& r = results[i];
      c.attributes[i] = std::move(r.record);
      count.push_back(r.count);
      overlap.push_back(r.overlap);
      for (const auto& m : r.instances) {
        im.boxes.insert(im.boxes.end(), {m.x0, m.y0, m.width(), m.height()});
        im.data.insert(im.data.end(), m.patch.data(), m.patch.data() + m.patch.size());
        im.pixel_offsets.push_back(static_cast<std::int64_t>(im.data.size()));
      }
      im.offsets.push_back(static_cast<std::int64_t>(im.instance_count()));
      r = SceneResult{};
    }
  } else {
    const auto n_classes = static_cast<std::int64_t>(sampler.num_classes());
    const auto& cs = recipe.corruption;
    const std::optional<OccluderSpec> occ =
        cs.occlusion_p > 0 ? std::optional<OccluderSpec>(occlusion_spec(cs.occlusion_p)) : std::nullopt;
    auto& clean = c.labels["clean"];
    auto& noisy = c.labels["noisy"];
    clean.assign(n_samples, 0);
    noisy.assign(n_samples, 0);
    parallel_for(
        n_samples, options.workers,
        [&](std::size_t i) {
          try {
            SymbolAttributes a = sampler.sample(master_seed, i);
            Rng omit_rng(master_seed, i, Slot::kOmit);
            const bool omitted = cs.missing_p > 0 && omit_symbol(a, cs.missing_p, omit_rng);
            Rng occ_rng(master_seed, i, Slot::kOccluders);
            RenderedFloat r = renderer.render_float(a, occ ? &*occ : nullptr, occ_rng);
            Rng px_rng(master_seed, i, Slot::kPixelNoise);
            const bool noised = cs.pixel_noise_p > 0 && corrupt_pixels(r.image, cs.pixel_noise_p, cs.pixel_noise_sigma, px_rng);
            NoisyLabel nl{a.label, false};
            if (cs.label_noise_p > 0) {
              Rng label_rng(master_seed, i, Slot::kLabelNoise);
              nl = corrupt_label(a.label, n_classes, cs.label_noise_p, label_rng);
            }
            const Image8 img = quantize(r.image);
            std::copy_n(img.data(), c.image_bytes(), c.images.begin() + static_cast<std::ptrdiff_t>(i * c.image_bytes()));
            std::copy_n(r.mask.data(), c.mask_bytes(), c.masks.begin() + static_cast<std::ptrdiff_t>(i * c.mask_bytes()));
            clean[i] = a.label;
            noisy[i] = nl.label;

            auto rec = attributes_to_json(a);
            rec["index"] = i;
            rec["recipe"] = recipe.name;
            rec["version"] = kGeneratorVersion;
            if (cs.any()) {
              nlohmann::json occluders = nlohmann::json::array();
              for (const auto& o : r.occluders)
                occluders.push_back({{"shape", to_utf8(o.shape)},
                                     {"scale", o.scale},
                                     {"translation", {o.translation.x(), o.translation.y()}},
                                     {"color", {o.color.x(), o.color.y(), o.color.z()}},
                                     {"overlap", o.overlap}});
              rec["corruption"] = {{"label_resampled", nl.resampled},
                                   {"noisy_label", nl.label},
                                   {"pixel_noise", noised},
                                   {"omitted", omitted},
                                   {"occluders", occluders}};
            }
            c.attributes[i] = rec.dump();
          } catch (const SampleError&) {
            throw;
          } catch (const std::exception& e) {
            throw SampleError(i, e.what());
          }
        },
        options.progress);
  }
  attach_default_split(c, master_seed);
  return c;
}

DatasetContainer regenerate(const nlohmann::json& manifest, const FontCatalog& catalog, std::size_t workers) {
  if (!manifest.contains("config") || !manifest.contains("master_seed") || !manifest.contains("n_samples"))
    throw FormatError("manifest lacks config, master_seed or n_samples");
  if (!manifest.value("portable", true))
    throw ConfigError("dataset was generated with caller-supplied functions and cannot be regenerated");
  const auto recipe = RecipeConfig::from_json(manifest["config"]);
  GenerateOptions opt;
  opt.workers = workers;
  if (manifest.contains("fonts")) {
    opt.font_dir = manifest["fonts"].value("dir", std::string());
    opt.blacklist = manifest["fonts"].value("blacklist", std::string());
  }
  return generate_dataset(recipe, catalog, manifest["n_samples"].get<std::size_t>(),
                          manifest["master_seed"].get<std::uint64_t>(), opt);
}

Format format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".h5" || ext == ".hdf5") return Format::kHdf5;
  if (ext == ".npz") return Format::kNpz;
  throw IoError("cannot infer dataset format from '" + path.string() + "' (use .h5, .hdf5 or .npz)");
}

std::string_view to_string(Format f) { return f == Format::kHdf5 ? "hdf5" : "npz"; }

void write_dataset(const DatasetContainer& c, const std::filesystem::path& path, Format format) {
  if (format_from_path(path) != format)
    throw IoError("extension of '" + path.string() + "' does not match format " + std::string(to_string(format)));
  c.validate();
  if (format == Format::kHdf5) write_hdf5(c, path);
  else write_npz(c, path);
  std::filesystem::path sidecar = path;
  sidecar += ".manifest.json";
  std::FILE* f = std::fopen(sidecar.c_str(), "wb");
  if (!f) throw IoError("cannot write " + sidecar.string());
  const std::string text = c.manifest.dump(2) + "\n";
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !ok) throw IoError("cannot write " + sidecar.string());
}

void write_dataset(const DatasetContainer& c, const std::filesystem::path& path) {
  write_dataset(c, path, format_from_path(path));
}

DatasetContainer read_dataset(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  DatasetContainer c = format_from_path(path) == Format::kHdf5 ? read_hdf5(path) : read_npz(path);
  c.validate();
  return c;
}

Image8 preview_grid(const DatasetContainer& c, int rows, int cols) {
  if (c.n == 0) throw ConfigError("cannot preview an empty dataset");
  if (rows < 1 || cols < 1) throw ConfigError("preview grid needs rows, cols >= 1");
  if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) > c.n)
    throw ConfigError("preview grid larger than the dataset");
  const int h = c.height, w = c.width;
  Image8 grid = Image8::Constant(rows * (h + 1) + 1, 3 * (cols * (w + 1) + 1), 255);
  for (int r = 0; r < rows; ++r)
    for (int k = 0; k < cols; ++k) {
      const std::size_t i = static_cast<std::size_t>(r) * cols + k;
      grid.block(1 + r * (h + 1), 3 * (1 + k * (w + 1)), h, 3 * w) = c.image_array(i);
    }
  return grid;
}

namespace {

nlohmann::json summarize(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  double sum = 0, sq = 0, lo = v.front(), hi = v.front();
  for (double x : v) sum += x, sq += x * x, lo = std::min(lo, x), hi = std::max(hi, x);
  const double n = static_cast<double>(v.size());
  const double mean = sum / n;
  return {{"mean", mean}, {"std", std::sqrt(std::max(0.0, sq / n - mean * mean))}, {"min", lo}, {"max", hi}};
}

}  // namespace

std::vector<double> numeric_attribute(const DatasetContainer& c, std::string_view name) {
  std::vector<double> out;
  out.reserve(c.n);
  for (std::size_t i = 0; i < c.n; ++i) {
    const auto j = c.attribute(i);
    if (name == "count" && j.contains("target_count")) {
      out.push_back(j["target_count"].get<double>());
      continue;
    }
    if (j.value("scene", false)) throw ConfigError("attribute '" + std::string(name) + "' is per-symbol in scene datasets");
    if (name == "translation_x" || name == "translation_y") {
      out.push_back(j.at("translation").at(name == "translation_x" ? 0 : 1).get<double>());
    } else if (name == "scale" || name == "rotation" || name == "label") {
      out.push_back(j.at(std::string(name)).get<double>());
    } else if (name == "bold" || name == "italic") {
      out.push_back(j.at(std::string(name)).get<bool>() ? 1.0 : 0.0);
    } else {
      throw ConfigError("unknown numeric attribute '" + std::string(name) + "'");
    }
  }
  return out;
}

std::vector<std::string> categorical_attribute(const DatasetContainer& c, std::string_view name) {
  static const std::set<std::string, std::less<>> allowed{"char", "font", "language", "bold", "italic", "label"};
  if (!allowed.count(name)) throw ConfigError("unknown categorical attribute '" + std::string(name) + "'");
  std::vector<std::string> out;
  out.reserve(c.n);
  for (std::size_t i = 0; i < c.n; ++i) {
    const auto j = c.attribute(i);
    if (j.value("scene", false)) throw ConfigError("attribute '" + std::string(name) + "' is per-symbol in scene datasets");
    const auto& v = j.at(std::string(name));
    out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  }
  return out;
}

nlohmann::json inspect(const DatasetContainer& c) {
  nlohmann::json r;
  r["n"] = c.n;
  r["resolution"] = {c.height, c.width};
  r["kind"] = c.is_scene() ? "scene" : "single";
  r["recipe"] = c.manifest.value("recipe", "");
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [name, v] : c.labels) labels[name] = std::set<std::int64_t>(v.begin(), v.end()).size();
  r["label_cardinality"] = labels;
  std::size_t classes = 0;
  if (c.manifest.contains("sampler"))
    for (const auto& a : c.manifest["sampler"].value("alphabets", nlohmann::json::array()))
      classes += a.value("symbols", std::size_t{0});
  r["classes"] = classes;
  nlohmann::json splits = nlohmann::json::object();
  for (const auto& [name, s] : c.splits)
    splits[name] = {{"strategy", s.strategy}, {"train", s.train.size()}, {"valid", s.valid.size()}, {"test", s.test.size()}};
  r["splits"] = splits;

  std::size_t empty = 0;
  for (std::size_t i = 0; i < c.n; ++i)
    empty += std::all_of(c.mask(i), c.mask(i) + c.mask_bytes(), [](std::uint8_t v) { return v == 0; });
  r["empty_mask_fraction"] = c.n ? static_cast<double>(empty) / c.n : 0.0;

  if (c.is_scene()) {
    std::vector<double> counts, totals;
    std::size_t overlapping = 0;
    for (std::size_t i = 0; i < c.n; ++i) {
      const auto j = c.attribute(i);
      counts.push_back(j.value("target_count", 0.0));
      totals.push_back(static_cast<double>(j.at("symbols").size()));
      overlapping += j.value("overlap", false);
    }
    r["attributes"] = {{"target_count", summarize(counts)}, {"symbols", summarize(totals)}};
    r["overlap_fraction"] = c.n ? static_cast<double>(overlapping) / c.n : 0.0;
  } else {
    nlohmann::json attrs = nlohmann::json::object();
    for (const char* name : {"scale", "rotation", "translation_x", "translation_y", "bold", "italic"})
      attrs[name] = summarize(numeric_attribute(c, name));
    for (const char* name : {"char", "font", "language"}) {
      const auto v = categorical_attribute(c, name);
      attrs[name] = {{"distinct", std::set<std::string>(v.begin(), v.end()).size()}};
    }
    r["attributes"] = attrs;
    std::size_t resampled = 0, noised = 0, occluded = 0, omitted = 0, corrupt = 0;
    for (std::size_t i = 0; i < c.n; ++i) {
      const auto j = c.attribute(i);
      if (!j.contains("corruption")) continue;
      ++corrupt;
      const auto& k = j["corruption"];
      resampled += k.value("label_resampled", false);
      noised += k.value("pixel_noise", false);
      omitted += k.value("omitted", false);
      occluded += !k.value("occluders", nlohmann::json::array()).empty();
    }
    if (corrupt) {
      const double n = static_cast<double>(c.n);
      r["corruption"] = {{"label_resampled_fraction", resampled / n},
                         {"pixel_noise_fraction", noised / n},
                         {"omitted_fraction", omitted / n},
                         {"occluded_fraction", occluded / n}};
    }
  }
  r["manifest"] = c.manifest;
  return r;
}

}  // namespace symgen
