#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "symgen/dataset.hpp"
#include "symgen/errors.hpp"

namespace symgen {
namespace {

// MS-DOS date of 1980-01-01, time 00:00: fixed so archives are reproducible.
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;

struct Entry {
  std::string name;
  std::uint32_t crc = 0;
  std::uint32_t size = 0;
  std::uint32_t offset = 0;
};

void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>(v >> 8));
}
void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::string shape_str(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) s += std::to_string(shape[i]) + (shape.size() == 1 || i + 1 < shape.size() ? ", " : "");
  if (shape.size() == 1) s.pop_back();
  return s + ")";
}

std::string npy_header(const std::string& descr, const std::vector<std::size_t>& shape) {
  std::string dict = "{'descr': '" + descr + "', 'fortran_order': False, 'shape': " + shape_str(shape) + ", }";
  const std::size_t base = 10 + dict.size() + 1;
  dict.append((64 - base % 64) % 64, ' ');
  dict.push_back('\n');
  std::string h("\x93NUMPY\x01\x00", 8);
  put16(h, static_cast<std::uint16_t>(dict.size()));
  return h + dict;
}

class ZipWriter {
 public:
  explicit ZipWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot create " + path.string());
  }

  void add(const std::string& name, const std::string& header, const void* data, std::size_t size) {
    const std::size_t total = header.size() + size;
    if (total > 0xFFFFFFFFull || pos_ > 0xFFFFFFFFull) throw IoError("npz entry exceeds 4 GiB: " + name);
    Entry e;
    e.name = name;
    e.size = static_cast<std::uint32_t>(total);
    e.offset = static_cast<std::uint32_t>(pos_);
    uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(header.data()), static_cast<uInt>(header.size()));
    const auto* p = static_cast<const Bytef*>(data);
    for (std::size_t done = 0; done < size;) {
      const std::size_t chunk = std::min<std::size_t>(size - done, 1u << 30);
      crc = crc32(crc, p + done, static_cast<uInt>(chunk));
      done += chunk;
    }
    e.crc = static_cast<std::uint32_t>(crc);
    std::string local;
    put32(local, 0x04034b50);
    put16(local, 20);
    put16(local, 0);
    put16(local, 0);
    put16(local, 0);
    put16(local, kDosDate);
    put32(local, e.crc);
    put32(local, e.size);
    put32(local, e.size);
    put16(local, static_cast<std::uint16_t>(name.size()));
    put16(local, 0);
    local += name;
    write(local.data(), local.size());
    write(header.data(), header.size());
    write(data, size);
    entries_.push_back(std::move(e));
  }

  void finish() {
    const std::uint64_t cd_start = pos_;
    std::string cd;
    for (const auto& e : entries_) {
      put32(cd, 0x02014b50);
      put16(cd, 20);
      put16(cd, 20);
      put16(cd, 0);
      put16(cd, 0);
      put16(cd, 0);
      put16(cd, kDosDate);
      put32(cd, e.crc);
      put32(cd, e.size);
      put32(cd, e.size);
      put16(cd, static_cast<std::uint16_t>(e.name.size()));
      put16(cd, 0);
      put16(cd, 0);
      put16(cd, 0);
      put16(cd, 0);
      put32(cd, 0);
      put32(cd, e.offset);
      cd += e.name;
    }
    write(cd.data(), cd.size());
    std::string end;
    put32(end, 0x06054b50);
    put16(end, 0);
    put16(end, 0);
    put16(end, static_cast<std::uint16_t>(entries_.size()));
    put16(end, static_cast<std::uint16_t>(entries_.size()));
    put32(end, static_cast<std::uint32_t>(cd.size()));
    put32(end, static_cast<std::uint32_t>(cd_start));
    put16(end, 0);
    write(end.data(), end.size());
    out_.close();
    if (!out_) throw IoError("cannot write " + path_.string());
  }

 private:
  void write(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw IoError("cannot write " + path_.string());
    pos_ += n;
  }

  std::filesystem::path path_;
  std::ofstream out_;
  std::uint64_t pos_ = 0;
  std::vector<Entry> entries_;
};

template <typename T>
const char* descr();
template <> const char* descr<std::uint8_t>() { return "|u1"; }
template <> const char* descr<std::uint16_t>() { return "<u2"; }
template <> const char* descr<std::int32_t>() { return "<i4"; }
template <> const char* descr<std::int64_t>() { return "<i8"; }

template <typename T>
void add_array(ZipWriter& z, const std::string& key, const std::vector<T>& v, std::vector<std::size_t> shape = {}) {
  if (shape.empty()) shape = {v.size()};
  z.add(key + ".npy", npy_header(descr<T>(), shape), v.data(), v.size() * sizeof(T));
}

void add_strings(ZipWriter& z, const std::string& key, const std::vector<std::string>& v) {
  std::size_t width = 1;
  for (const auto& s : v) width = std::max(width, s.size());
  std::vector<char> buf(v.size() * width, '\0');
  for (std::size_t i = 0; i < v.size(); ++i) std::memcpy(buf.data() + i * width, v[i].data(), v[i].size());
  z.add(key + ".npy", npy_header("|S" + std::to_string(width), {v.size()}), buf.data(), buf.size());
}

void add_scalar_string(ZipWriter& z, const std::string& key, const std::string& s) {
  const std::size_t width = std::max<std::size_t>(1, s.size());
  std::string buf = s;
  buf.resize(width, '\0');
  z.add(key + ".npy", npy_header("|S" + std::to_string(width), {}), buf.data(), buf.size());
}

// ---------------------------------------------------------------------------
// Reading

std::uint16_t get16(const std::string& s, std::size_t at) {
  if (at + 2 > s.size()) throw FormatError("truncated npz archive");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[at]) | (static_cast<unsigned char>(s[at + 1]) << 8));
}
std::uint32_t get32(const std::string& s, std::size_t at) {
  return static_cast<std::uint32_t>(get16(s, at)) | (static_cast<std::uint32_t>(get16(s, at + 2)) << 16);
}

std::string inflate_raw(const char* data, std::size_t csize, std::size_t usize) {
  std::string out(usize, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw FormatError("zlib init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data));
  zs.avail_in = static_cast<uInt>(csize);
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(usize);
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw FormatError("corrupt deflate stream in npz");
  return out;
}

std::map<std::string, std::string> read_zip(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 22) throw FormatError("not a zip archive: " + path.string());
  std::size_t eocd = std::string::npos;
  for (std::size_t i = buf.size() - 22 + 1; i-- > 0 && buf.size() - i <= 22 + 0xFFFF;) {
    if (get32(buf, i) == 0x06054b50) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) throw FormatError("not a zip archive: " + path.string());
  const std::size_t count = get16(buf, eocd + 10);
  std::size_t at = get32(buf, eocd + 16);
  std::map<std::string, std::string> files;
  for (std::size_t k = 0; k < count; ++k) {
    if (get32(buf, at) != 0x02014b50) throw FormatError("corrupt zip central directory");
    const std::uint16_t method = get16(buf, at + 10);
    const std::uint32_t crc = get32(buf, at + 16);
    const std::uint32_t csize = get32(buf, at + 20), usize = get32(buf, at + 24);
    const std::uint16_t nlen = get16(buf, at + 28), xlen = get16(buf, at + 30), clen = get16(buf, at + 32);
    const std::uint32_t local = get32(buf, at + 42);
    if (at + 46 + nlen > buf.size()) throw FormatError("truncated npz archive");
    std::string name = buf.substr(at + 46, nlen);
    at += 46 + nlen + xlen + clen;
    if (get32(buf, local) != 0x04034b50) throw FormatError("corrupt zip local header");
    const std::size_t data = local + 30 + get16(buf, local + 26) + get16(buf, local + 28);
    if (data + csize > buf.size()) throw FormatError("truncated npz entry " + name);
    std::string content;
    if (method == 0) content = buf.substr(data, csize);
    else if (method == 8) content = inflate_raw(buf.data() + data, csize, usize);
    else throw FormatError("unsupported zip compression in " + name);
    if (crc32(0L, reinterpret_cast<const Bytef*>(content.data()), static_cast<uInt>(content.size())) != crc)
      throw FormatError("CRC mismatch in npz entry " + name);
    files[name] = std::move(content);
  }
  return files;
}

struct NpyArray {
  std::string descr;
  std::vector<std::size_t> shape;
  std::string data;
  std::size_t count() const {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }
};

NpyArray parse_npy(const std::string& name, const std::string& raw) {
  if (raw.size() < 10 || raw.compare(0, 6, "\x93NUMPY") != 0) throw FormatError(name + " is not an .npy array");
  const int major = static_cast<unsigned char>(raw[6]);
  std::size_t hlen, start;
  if (major == 1) {
    hlen = get16(raw, 8);
    start = 10;
  } else {
    hlen = get32(raw, 8);
    start = 12;
  }
  if (start + hlen > raw.size()) throw FormatError(name + ": truncated header");
  const std::string header = raw.substr(start, hlen);
  NpyArray a;
  auto field = [&](const std::string& key) {
    const auto k = header.find("'" + key + "'");
    if (k == std::string::npos) throw FormatError(name + ": header lacks " + key);
    return header.find(':', k) + 1;
  };
  std::size_t d = header.find('\'', field("descr"));
  a.descr = header.substr(d + 1, header.find('\'', d + 1) - d - 1);
  const std::size_t f = field("fortran_order");
  if (header.compare(header.find_first_not_of(' ', f), 5, "False") != 0)
    throw FormatError(name + ": Fortran-ordered arrays are not supported");
  const std::size_t s0 = header.find('(', field("shape")), s1 = header.find(')', s0);
  std::string dims = header.substr(s0 + 1, s1 - s0 - 1);
  std::size_t pos = 0;
  while (pos < dims.size()) {
    const auto comma = dims.find(',', pos);
    std::string tok = dims.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    tok.erase(std::remove(tok.begin(), tok.end(), ' '), tok.end());
    if (!tok.empty()) a.shape.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  a.data = raw.substr(start + hlen);
  return a;
}

template <typename T>
std::vector<T> as_vector(const std::string& name, const NpyArray& a) {
  std::string want = descr<T>();
  if (a.descr != want && !(sizeof(T) == 1 && (a.descr == "<u1" || a.descr == "u1")))
    throw FormatError(name + ": expected dtype " + want + ", found " + a.descr);
  if (a.data.size() != a.count() * sizeof(T)) throw FormatError(name + ": payload size mismatch");
  std::vector<T> v(a.count());
  if (!v.empty()) std::memcpy(v.data(), a.data.data(), a.data.size());
  return v;
}

std::vector<std::string> as_strings(const std::string& name, const NpyArray& a) {
  if (a.descr.size() < 3 || a.descr.compare(0, 2, "|S") != 0) throw FormatError(name + ": expected byte strings");
  const std::size_t width = std::stoull(a.descr.substr(2));
  if (a.data.size() != a.count() * width) throw FormatError(name + ": payload size mismatch");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < a.count(); ++i) {
    std::string s = a.data.substr(i * width, width);
    s.erase(std::find(s.begin(), s.end(), '\0'), s.end());
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

void write_npz(const DatasetContainer& c, const std::filesystem::path& path) {
  ZipWriter z(path);
  const std::size_t n = c.n, h = static_cast<std::size_t>(c.height), w = static_cast<std::size_t>(c.width);
  add_scalar_string(z, "manifest", c.manifest.dump());
  add_array(z, "images", c.images, {n, h, w, 3});
  add_array(z, "masks", c.masks, {n, h, w});
  add_strings(z, "attributes", c.attributes);
  for (const auto& [name, v] : c.labels) add_array(z, "labels/" + name, v);
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [name, s] : c.splits) {
    const std::string prefix = name == "default" ? "splits/" : "splits/" + name + "/";
    add_array(z, prefix + "train", s.train);
    add_array(z, prefix + "valid", s.valid);
    add_array(z, prefix + "test", s.test);
    meta[name] = {{"strategy", s.strategy}, {"params", s.params}, {"attributes", s.attributes}};
  }
  add_scalar_string(z, "splits/meta", meta.dump());
  if (c.is_scene()) {
    const auto& im = c.instance_masks;
    add_array(z, "instance_ids", c.instance_ids, {n, h, w});
    add_array(z, "instance_masks/offsets", im.offsets);
    add_array(z, "instance_masks/boxes", im.boxes, {im.instance_count(), 4});
    add_array(z, "instance_masks/pixel_offsets", im.pixel_offsets);
    add_array(z, "instance_masks/data", im.data);
  }
  z.finish();
}

DatasetContainer read_npz(const std::filesystem::path& path) {
  const auto files = read_zip(path);
  auto get = [&](const std::string& key) {
    const auto it = files.find(key + ".npy");
    if (it == files.end()) throw FormatError("npz lacks '" + key + "'");
    return parse_npy(key, it->second);
  };
  DatasetContainer c;
  try {
    c.manifest = nlohmann::json::parse(as_strings("manifest", get("manifest")).at(0));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("npz manifest: ") + e.what());
  }
  const auto images = get("images");
  if (images.shape.size() != 4 || images.shape[3] != 3) throw FormatError("images must be N x H x W x 3");
  c.n = images.shape[0];
  c.height = static_cast<int>(images.shape[1]);
  c.width = static_cast<int>(images.shape[2]);
  c.images = as_vector<std::uint8_t>("images", images);
  c.masks = as_vector<std::uint8_t>("masks", get("masks"));
  c.attributes = as_strings("attributes", get("attributes"));
  nlohmann::json meta = nlohmann::json::object();
  if (files.count("splits/meta.npy")) meta = nlohmann::json::parse(as_strings("splits/meta", get("splits/meta")).at(0));
  for (const auto& [file, _] : files) {
    if (file.size() < 4 || file.compare(file.size() - 4, 4, ".npy") != 0) continue;
    const std::string key = file.substr(0, file.size() - 4);
    if (key.starts_with("labels/")) c.labels[key.substr(7)] = as_vector<std::int64_t>(key, get(key));
  }
  for (const auto& [name, m] : meta.items()) {
    const std::string prefix = name == "default" ? "splits/" : "splits/" + name + "/";
    PartitionResult p;
    p.train = as_vector<std::int64_t>(prefix + "train", get(prefix + "train"));
    p.valid = as_vector<std::int64_t>(prefix + "valid", get(prefix + "valid"));
    p.test = as_vector<std::int64_t>(prefix + "test", get(prefix + "test"));
    p.strategy = m.value("strategy", "");
    p.params = m.value("params", nlohmann::json::object());
    p.attributes = m.value("attributes", std::vector<std::string>{});
    c.splits[name] = std::move(p);
  }
  if (files.count("instance_ids.npy")) {
    c.instance_ids = as_vector<std::uint16_t>("instance_ids", get("instance_ids"));
    c.instance_masks.offsets = as_vector<std::int64_t>("offsets", get("instance_masks/offsets"));
    c.instance_masks.boxes = as_vector<std::int32_t>("boxes", get("instance_masks/boxes"));
    c.instance_masks.pixel_offsets = as_vector<std::int64_t>("pixel_offsets", get("instance_masks/pixel_offsets"));
    c.instance_masks.data = as_vector<std::uint8_t>("data", get("instance_masks/data"));
  }
  return c;
}

}  // namespace symgen
