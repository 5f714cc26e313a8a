#include <hdf5.h>

#include <cstring>
#include <string>
#include <vector>

#include "symgen/dataset.hpp"
#include "symgen/errors.hpp"

namespace symgen {
namespace {

class Handle {
 public:
  using Closer = herr_t (*)(hid_t);
  Handle(hid_t id, Closer close) : id_(id), close_(close) {}
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : id_(o.id_), close_(o.close_) { o.id_ = -1; }
  ~Handle() {
    if (id_ >= 0) close_(id_);
  }
  operator hid_t() const { return id_; }
  bool valid() const { return id_ >= 0; }

 private:
  hid_t id_;
  Closer close_;
};

void quiet() { H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr); }

[[noreturn]] void fail_write(const std::string& what) { throw IoError("HDF5 write failed: " + what); }
[[noreturn]] void fail_read(const std::string& what) { throw FormatError("HDF5 read failed: " + what); }

Handle group_props() {
  Handle p(H5Pcreate(H5P_GROUP_CREATE), H5Pclose);
  H5Pset_obj_track_times(p, false);
  return p;
}

hid_t make_group(hid_t loc, const std::string& name) {
  Handle gcpl = group_props();
  const hid_t g = H5Gcreate2(loc, name.c_str(), H5P_DEFAULT, gcpl, H5P_DEFAULT);
  if (g < 0) fail_write("group " + name);
  return g;
}

void write_raw(hid_t loc, const std::string& name, hid_t type, const std::vector<hsize_t>& dims, const void* data) {
  Handle space(H5Screate_simple(static_cast<int>(dims.size()), dims.data(), nullptr), H5Sclose);
  Handle dcpl(H5Pcreate(H5P_DATASET_CREATE), H5Pclose);
  H5Pset_obj_track_times(dcpl, false);
  H5Pset_layout(dcpl, H5D_CONTIGUOUS);
  Handle ds(H5Dcreate2(loc, name.c_str(), type, space, H5P_DEFAULT, dcpl, H5P_DEFAULT), H5Dclose);
  if (!ds.valid()) fail_write("dataset " + name);
  hsize_t total = 1;
  for (auto d : dims) total *= d;
  if (total > 0 && H5Dwrite(ds, type, H5S_ALL, H5S_ALL, H5P_DEFAULT, data) < 0) fail_write("dataset " + name);
}

template <typename T>
hid_t native();
template <> hid_t native<std::uint8_t>() { return H5T_NATIVE_UINT8; }
template <> hid_t native<std::uint16_t>() { return H5T_NATIVE_UINT16; }
template <> hid_t native<std::int32_t>() { return H5T_NATIVE_INT32; }
template <> hid_t native<std::int64_t>() { return H5T_NATIVE_INT64; }

// Little-endian file types regardless of host.
template <typename T>
hid_t file_type();
template <> hid_t file_type<std::uint8_t>() { return H5T_STD_U8LE; }
template <> hid_t file_type<std::uint16_t>() { return H5T_STD_U16LE; }
template <> hid_t file_type<std::int32_t>() { return H5T_STD_I32LE; }
template <> hid_t file_type<std::int64_t>() { return H5T_STD_I64LE; }

template <typename T>
void write_vec(hid_t loc, const std::string& name, const std::vector<T>& v, std::vector<hsize_t> dims = {}) {
  if (dims.empty()) dims = {static_cast<hsize_t>(v.size())};
  Handle space(H5Screate_simple(static_cast<int>(dims.size()), dims.data(), nullptr), H5Sclose);
  Handle dcpl(H5Pcreate(H5P_DATASET_CREATE), H5Pclose);
  H5Pset_obj_track_times(dcpl, false);
  H5Pset_layout(dcpl, H5D_CONTIGUOUS);
  Handle ds(H5Dcreate2(loc, name.c_str(), file_type<T>(), space, H5P_DEFAULT, dcpl, H5P_DEFAULT), H5Dclose);
  if (!ds.valid()) fail_write("dataset " + name);
  if (!v.empty() && H5Dwrite(ds, native<T>(), H5S_ALL, H5S_ALL, H5P_DEFAULT, v.data()) < 0)
    fail_write("dataset " + name);
}

Handle utf8_type() {
  Handle t(H5Tcopy(H5T_C_S1), H5Tclose);
  H5Tset_size(t, H5T_VARIABLE);
  H5Tset_cset(t, H5T_CSET_UTF8);
  return t;
}

void write_strings(hid_t loc, const std::string& name, const std::vector<std::string>& v) {
  std::vector<const char*> ptrs;
  ptrs.reserve(v.size());
  for (const auto& s : v) ptrs.push_back(s.c_str());
  Handle t = utf8_type();
  write_raw(loc, name, t, {static_cast<hsize_t>(v.size())}, ptrs.data());
}

void write_string_attr(hid_t loc, const std::string& name, const std::string& value) {
  Handle t = utf8_type();
  Handle space(H5Screate(H5S_SCALAR), H5Sclose);
  Handle a(H5Acreate2(loc, name.c_str(), t, space, H5P_DEFAULT, H5P_DEFAULT), H5Aclose);
  if (!a.valid()) fail_write("attribute " + name);
  const char* p = value.c_str();
  if (H5Awrite(a, t, &p) < 0) fail_write("attribute " + name);
}

bool exists(hid_t loc, const std::string& name) { return H5Lexists(loc, name.c_str(), H5P_DEFAULT) > 0; }

std::vector<hsize_t> dims_of(hid_t ds) {
  Handle space(H5Dget_space(ds), H5Sclose);
  const int rank = H5Sget_simple_extent_ndims(space);
  if (rank < 0) fail_read("dataspace");
  std::vector<hsize_t> dims(static_cast<std::size_t>(rank));
  H5Sget_simple_extent_dims(space, dims.data(), nullptr);
  return dims;
}

template <typename T>
std::vector<T> read_vec(hid_t loc, const std::string& name, std::vector<hsize_t>* dims_out = nullptr) {
  Handle ds(H5Dopen2(loc, name.c_str(), H5P_DEFAULT), H5Dclose);
  if (!ds.valid()) fail_read("missing dataset " + name);
  const auto dims = dims_of(ds);
  hsize_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<T> v(total);
  if (total > 0 && H5Dread(ds, native<T>(), H5S_ALL, H5S_ALL, H5P_DEFAULT, v.data()) < 0)
    fail_read("dataset " + name);
  if (dims_out) *dims_out = dims;
  return v;
}

std::vector<std::string> read_strings(hid_t loc, const std::string& name) {
  Handle ds(H5Dopen2(loc, name.c_str(), H5P_DEFAULT), H5Dclose);
  if (!ds.valid()) fail_read("missing dataset " + name);
  const auto dims = dims_of(ds);
  if (dims.size() != 1) fail_read(name + " must be one-dimensional");
  std::vector<char*> ptrs(dims[0], nullptr);
  Handle t = utf8_type();
  std::vector<std::string> out;
  if (dims[0] == 0) return out;
  if (H5Dread(ds, t, H5S_ALL, H5S_ALL, H5P_DEFAULT, ptrs.data()) < 0) fail_read("dataset " + name);
  out.reserve(ptrs.size());
  for (char* p : ptrs) out.emplace_back(p ? p : "");
  Handle space(H5Dget_space(ds), H5Sclose);
  H5Dvlen_reclaim(t, space, H5P_DEFAULT, ptrs.data());
  return out;
}

std::string read_string_attr(hid_t loc, const std::string& name) {
  Handle a(H5Aopen(loc, name.c_str(), H5P_DEFAULT), H5Aclose);
  if (!a.valid()) fail_read("missing attribute " + name);
  Handle t = utf8_type();
  char* p = nullptr;
  if (H5Aread(a, t, &p) < 0) fail_read("attribute " + name);
  std::string s = p ? p : "";
  H5free_memory(p);
  return s;
}

std::vector<std::string> children(hid_t group) {
  std::vector<std::string> names;
  H5Literate(
      group, H5_INDEX_NAME, H5_ITER_INC, nullptr,
      [](hid_t, const char* name, const H5L_info_t*, void* data) -> herr_t {
        static_cast<std::vector<std::string>*>(data)->emplace_back(name);
        return 0;
      },
      &names);
  return names;
}

nlohmann::json split_meta(const PartitionResult& p) {
  return {{"strategy", p.strategy}, {"params", p.params}, {"attributes", p.attributes}};
}

void apply_meta(PartitionResult& p, const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  p.strategy = j.value("strategy", "");
  p.params = j.value("params", nlohmann::json::object());
  p.attributes = j.value("attributes", std::vector<std::string>{});
}

}  // namespace

void write_hdf5(const DatasetContainer& c, const std::filesystem::path& path) {
  quiet();
  Handle fcpl(H5Pcreate(H5P_FILE_CREATE), H5Pclose);
  Handle file(H5Fcreate(path.c_str(), H5F_ACC_TRUNC, fcpl, H5P_DEFAULT), H5Fclose);
  if (!file.valid()) throw IoError("cannot create " + path.string());
  {
    Handle root(H5Gopen2(file, "/", H5P_DEFAULT), H5Gclose);
    write_string_attr(root, "manifest", c.manifest.dump());
  }
  const auto n = static_cast<hsize_t>(c.n), h = static_cast<hsize_t>(c.height), w = static_cast<hsize_t>(c.width);
  write_vec(file, "images", c.images, {n, h, w, 3});
  write_vec(file, "masks", c.masks, {n, h, w});
  write_strings(file, "attributes", c.attributes);
  {
    Handle labels(make_group(file, "labels"), H5Gclose);
    for (const auto& [name, v] : c.labels) write_vec(labels, name, v);
  }
  {
    Handle splits(make_group(file, "splits"), H5Gclose);
    for (const auto& [name, s] : c.splits) {
      if (name == "default") {
        write_vec(splits, "train", s.train);
        write_vec(splits, "valid", s.valid);
        write_vec(splits, "test", s.test);
        write_string_attr(splits, "default", split_meta(s).dump());
      } else {
        Handle g(make_group(splits, name), H5Gclose);
        write_vec(g, "train", s.train);
        write_vec(g, "valid", s.valid);
        write_vec(g, "test", s.test);
        write_string_attr(g, "meta", split_meta(s).dump());
      }
    }
  }
  if (c.is_scene()) {
    write_vec(file, "instance_ids", c.instance_ids, {n, h, w});
    Handle g(make_group(file, "instance_masks"), H5Gclose);
    const auto& im = c.instance_masks;
    write_vec(g, "offsets", im.offsets);
    write_vec(g, "boxes", im.boxes, {static_cast<hsize_t>(im.instance_count()), 4});
    write_vec(g, "pixel_offsets", im.pixel_offsets);
    write_vec(g, "data", im.data);
  }
  if (H5Fflush(file, H5F_SCOPE_GLOBAL) < 0) throw IoError("cannot flush " + path.string());
}

DatasetContainer read_hdf5(const std::filesystem::path& path) {
  quiet();
  if (H5Fis_hdf5(path.c_str()) <= 0) throw FormatError("not an HDF5 file: " + path.string());
  Handle file(H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose);
  if (!file.valid()) throw IoError("cannot open " + path.string());
  DatasetContainer c;
  try {
    Handle root(H5Gopen2(file, "/", H5P_DEFAULT), H5Gclose);
    c.manifest = nlohmann::json::parse(read_string_attr(root, "manifest"));
  } catch (const nlohmann::json::exception& e) {
    fail_read(std::string("manifest: ") + e.what());
  }
  std::vector<hsize_t> dims;
  c.images = read_vec<std::uint8_t>(file, "images", &dims);
  if (dims.size() != 4 || dims[3] != 3) fail_read("/images must be N x H x W x 3");
  c.n = dims[0];
  c.height = static_cast<int>(dims[1]);
  c.width = static_cast<int>(dims[2]);
  c.masks = read_vec<std::uint8_t>(file, "masks");
  c.attributes = read_strings(file, "attributes");
  if (exists(file, "labels")) {
    Handle g(H5Gopen2(file, "labels", H5P_DEFAULT), H5Gclose);
    for (const auto& name : children(g)) c.labels[name] = read_vec<std::int64_t>(g, name);
  }
  if (exists(file, "splits")) {
    Handle g(H5Gopen2(file, "splits", H5P_DEFAULT), H5Gclose);
    for (const auto& name : children(g)) {
      if (name == "train" || name == "valid" || name == "test") continue;
      Handle sg(H5Gopen2(g, name.c_str(), H5P_DEFAULT), H5Gclose);
      if (!sg.valid()) fail_read("split group " + name);
      PartitionResult p;
      p.train = read_vec<std::int64_t>(sg, "train");
      p.valid = read_vec<std::int64_t>(sg, "valid");
      p.test = read_vec<std::int64_t>(sg, "test");
      if (H5Aexists(sg, "meta") > 0) apply_meta(p, read_string_attr(sg, "meta"));
      c.splits[name] = std::move(p);
    }
    if (exists(g, "train")) {
      PartitionResult p;
      p.train = read_vec<std::int64_t>(g, "train");
      p.valid = read_vec<std::int64_t>(g, "valid");
      p.test = read_vec<std::int64_t>(g, "test");
      if (H5Aexists(g, "default") > 0) apply_meta(p, read_string_attr(g, "default"));
      c.splits["default"] = std::move(p);
    }
  }
  if (exists(file, "instance_ids")) {
    c.instance_ids = read_vec<std::uint16_t>(file, "instance_ids");
    Handle g(H5Gopen2(file, "instance_masks", H5P_DEFAULT), H5Gclose);
    if (!g.valid()) fail_read("missing /instance_masks");
    c.instance_masks.offsets = read_vec<std::int64_t>(g, "offsets");
    c.instance_masks.boxes = read_vec<std::int32_t>(g, "boxes");
    c.instance_masks.pixel_offsets = read_vec<std::int64_t>(g, "pixel_offsets");
    c.instance_masks.data = read_vec<std::uint8_t>(g, "data");
  }
  return c;
}

}  // namespace symgen
