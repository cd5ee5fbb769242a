// Copyright 2026 The ephyspack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ephyspack/container.h"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstring>
#include <limits>
#include <mutex>
#include <utility>

#include "ephyspack/crc32c.h"
#include "ephyspack/isotime.h"

static_assert(std::endian::native == std::endian::little,
              "the container encoder assumes a little-endian host");

namespace ephyspack {
namespace {

constexpr char kTagObjects[4] = {'O', 'B', 'J', 'T'};
constexpr char kTagAttrs[4] = {'A', 'T', 'T', 'R'};
constexpr char kTagChunks[4] = {'C', 'H', 'N', 'K'};
constexpr char kTagFooterEnd[4] = {'F', 'O', 'O', 'T'};
constexpr std::size_t kSuperblockFixed = 42;  // up to and including the u16 length
constexpr std::size_t kChunkCacheCapacity = 512;

enum class AttrTag : std::uint8_t {
  kString = 1,
  kF64 = 2,
  kI64 = 3,
  kU64 = 4,
  kBool = 5,
  kF64Seq = 6,
  kStringSeq = 7,
};

// Raised by ByteReader when a buffer is exhausted or a value is malformed.
struct DecodeError {
  std::string what;
};

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<std::byte>(v)); }
  void u16(std::uint16_t v) { raw(&v, sizeof v); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::byte*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void str16(std::string_view s) {
    u16(static_cast<std::uint16_t>(s.size()));
    raw(s.data(), s.size());
  }
  void str32(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void patch_u64(std::size_t at, std::uint64_t v) { std::memcpy(buf_.data() + at, &v, 8); }
  std::size_t size() const { return buf_.size(); }
  std::vector<std::byte>& bytes() { return buf_; }
  std::span<const std::byte> span_from(std::size_t at) const {
    return std::span(buf_).subspan(at);
  }

 private:
  std::vector<std::byte> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> data) : data_(data) {}

  std::uint8_t u8() { return pod<std::uint8_t>(); }
  std::uint16_t u16() { return pod<std::uint16_t>(); }
  std::uint32_t u32() { return pod<std::uint32_t>(); }
  std::uint64_t u64() { return pod<std::uint64_t>(); }
  double f64() { return pod<double>(); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    if (!is_valid_utf8(s)) throw DecodeError{"invalid UTF-8 string"};
    return s;
  }
  std::string str16() { return str(u16()); }
  std::string str32() { return str(u32()); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void need(std::size_t n) const {
    if (n > remaining()) throw DecodeError{"unexpected end of data"};
  }

  std::span<const std::byte> data_;
  std::size_t pos_ = 0;
};

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

std::string errno_text() { return std::strerror(errno); }

void pwrite_all(int fd, std::span<const std::byte> data, std::uint64_t offset) {
  std::size_t done = 0;
  while (done < data.size()) {
    ssize_t n = ::pwrite(fd, data.data() + done, data.size() - done,
                         static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::kIoFailure, "write failed: " + errno_text());
    }
    done += static_cast<std::size_t>(n);
  }
}

// Returns the number of bytes read (short only at end of file).
std::size_t pread_some(int fd, std::span<std::byte> out, std::uint64_t offset) {
  std::size_t done = 0;
  while (done < out.size()) {
    ssize_t n = ::pread(fd, out.data() + done, out.size() - done,
                        static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::kIoFailure, "read failed: " + errno_text());
    }
    if (n == 0) break;
    done += static_cast<std::size_t>(n);
  }
  return done;
}

void sync_fd(int fd) {
  if (::fdatasync(fd) != 0) {
    throw Error(Errc::kIoFailure, "fdatasync failed: " + errno_text());
  }
}

std::string coord_text(const Extent& coord) {
  std::string s = "[";
  for (std::size_t i = 0; i < coord.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(coord[i]);
  }
  return s + "]";
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return a / b + (a % b != 0); }

bool mul_overflows(std::uint64_t a, std::uint64_t b, std::uint64_t limit) {
  return a != 0 && b > limit / a;
}

std::size_t encoded_attr_size(std::string_view key, const AttrValue& value) {
  std::size_t n = 2 + key.size() + 1;
  struct Visitor {
    std::size_t operator()(const std::string& s) const { return 4 + s.size(); }
    std::size_t operator()(double) const { return 8; }
    std::size_t operator()(std::int64_t) const { return 8; }
    std::size_t operator()(std::uint64_t) const { return 8; }
    std::size_t operator()(bool) const { return 1; }
    std::size_t operator()(const std::vector<double>& v) const { return 4 + 8 * v.size(); }
    std::size_t operator()(const std::vector<std::string>& v) const {
      std::size_t t = 4;
      for (const auto& s : v) t += 4 + s.size();
      return t;
    }
  };
  return n + std::visit(Visitor{}, value);
}

std::size_t encoded_attrs_size(const AttrMap& attrs) {
  std::size_t n = 0;
  for (const auto& [k, v] : attrs) n += encoded_attr_size(k, v);
  return n;
}

void encode_attr(ByteWriter& w, const std::string& key, const AttrValue& value) {
  w.str16(key);
  struct Visitor {
    ByteWriter& w;
    void operator()(const std::string& s) const {
      w.u8(static_cast<std::uint8_t>(AttrTag::kString));
      w.str32(s);
    }
    void operator()(double d) const {
      w.u8(static_cast<std::uint8_t>(AttrTag::kF64));
      w.f64(d);
    }
    void operator()(std::int64_t i) const {
      w.u8(static_cast<std::uint8_t>(AttrTag::kI64));
      w.u64(static_cast<std::uint64_t>(i));
    }
    void operator()(std::uint64_t u) const {
      w.u8(static_cast<std::uint8_t>(AttrTag::kU64));
      w.u64(u);
    }
    void operator()(bool b) const {
      w.u8(static_cast<std::uint8_t>(AttrTag::kBool));
      w.u8(b ? 1 : 0);
    }
    void operator()(const std::vector<double>& v) const {
      w.u8(static_cast<std::uint8_t>(AttrTag::kF64Seq));
      w.u32(static_cast<std::uint32_t>(v.size()));
      for (double d : v) w.f64(d);
    }
    void operator()(const std::vector<std::string>& v) const {
      w.u8(static_cast<std::uint8_t>(AttrTag::kStringSeq));
      w.u32(static_cast<std::uint32_t>(v.size()));
      for (const auto& s : v) w.str32(s);
    }
  };
  std::visit(Visitor{w}, value);
}

AttrValue decode_attr_value(ByteReader& r) {
  auto tag = r.u8();
  switch (static_cast<AttrTag>(tag)) {
    case AttrTag::kString:
      return r.str32();
    case AttrTag::kF64:
      return r.f64();
    case AttrTag::kI64:
      return static_cast<std::int64_t>(r.u64());
    case AttrTag::kU64:
      return r.u64();
    case AttrTag::kBool: {
      auto b = r.u8();
      if (b > 1) throw DecodeError{"bad bool attribute"};
      return b == 1;
    }
    case AttrTag::kF64Seq: {
      auto n = r.u32();
      if (n > kMaxAttrSequence) throw DecodeError{"attribute sequence too long"};
      std::vector<double> v(n);
      for (auto& d : v) d = r.f64();
      return v;
    }
    case AttrTag::kStringSeq: {
      auto n = r.u32();
      if (n > kMaxAttrSequence) throw DecodeError{"attribute sequence too long"};
      std::vector<std::string> v(n);
      for (auto& s : v) s = r.str32();
      return v;
    }
  }
  throw DecodeError{"unknown attribute tag " + std::to_string(tag)};
}

void check_attr_value(const AttrValue& value) {
  if (const auto* s = std::get_if<std::string>(&value); s && !is_valid_utf8(*s)) {
    throw Error(Errc::kInvalidValue, "attribute string is not valid UTF-8");
  }
  if (const auto* v = std::get_if<std::vector<double>>(&value); v && v->size() > kMaxAttrSequence) {
    throw Error(Errc::kInvalidValue, "attribute sequence exceeds 64 elements");
  }
  if (const auto* v = std::get_if<std::vector<std::string>>(&value)) {
    if (v->size() > kMaxAttrSequence) {
      throw Error(Errc::kInvalidValue, "attribute sequence exceeds 64 elements");
    }
    for (const auto& s : *v) {
      if (!is_valid_utf8(s)) throw Error(Errc::kInvalidValue, "attribute string is not valid UTF-8");
    }
  }
}

struct ChunkKey {
  ChunkStream stream = ChunkStream::kData;
  Extent coord;
  auto operator<=>(const ChunkKey&) const = default;
};

struct ChunkLoc {
  std::uint64_t file_offset = 0;
  std::uint64_t stored_length = 0;
  std::uint32_t crc = 0;
};

struct Object {
  ObjectId id = 0;
  ObjectId parent = 0;
  ObjectKind kind = ObjectKind::kGroup;
  std::string name;
  AttrMap attrs;
  std::map<std::string, ObjectId, std::less<>> children;
  DatasetInfo ds;
  std::map<ChunkKey, ChunkLoc> chunks;
};

// Decoded contents of one chunk box.
struct Chunk {
  Extent start;
  Extent count;
  std::vector<std::byte> bytes;       // numeric datasets
  std::vector<std::string> strings;   // utf8 datasets
};

std::size_t record_header_size(std::size_t rank, bool utf8) {
  return 8 + 1 + 8 * rank + (utf8 ? 1 : 0) + 1 + 8;
}

// Calls fn(src_index, dst_index, run) for every contiguous run of elements in
// the intersection [lo, hi) of two row-major boxes.
template <typename Fn>
void for_each_run(const Extent& src_start, const Extent& src_count,
                  const Extent& dst_start, const Extent& dst_count,
                  const Extent& lo, const Extent& hi, Fn&& fn) {
  const std::size_t rank = lo.size();
  if (rank == 0) {
    fn(0, 0, 1);
    return;
  }
  for (std::size_t d = 0; d < rank; ++d) {
    if (lo[d] >= hi[d]) return;
  }
  Extent src_stride(rank, 1);
  Extent dst_stride(rank, 1);
  for (std::size_t d = rank - 1; d-- > 0;) {
    src_stride[d] = src_stride[d + 1] * src_count[d + 1];
    dst_stride[d] = dst_stride[d + 1] * dst_count[d + 1];
  }
  const std::uint64_t run = hi[rank - 1] - lo[rank - 1];
  Extent idx = lo;
  while (true) {
    std::uint64_t s = 0;
    std::uint64_t t = 0;
    for (std::size_t d = 0; d < rank; ++d) {
      s += (idx[d] - src_start[d]) * src_stride[d];
      t += (idx[d] - dst_start[d]) * dst_stride[d];
    }
    fn(s, t, run);
    if (rank == 1) return;
    std::size_t d = rank - 1;
    while (d-- > 0) {
      if (++idx[d] < hi[d]) break;
      idx[d] = lo[d];
      if (d == 0) return;
    }
  }
}

// Enumerates chunk coordinates overlapping [offset, offset + extent).
template <typename Fn>
void for_each_chunk_in(const DatasetInfo& ds, const Extent& offset,
                       const Extent& extent, Fn&& fn) {
  const std::size_t rank = ds.rank();
  if (product(extent) == 0) return;
  Extent first(rank);
  Extent last(rank);
  for (std::size_t d = 0; d < rank; ++d) {
    first[d] = offset[d] / ds.chunk_shape[d];
    last[d] = (offset[d] + extent[d] - 1) / ds.chunk_shape[d];
  }
  Extent c = first;
  while (true) {
    fn(c);
    if (rank == 0) return;
    std::size_t d = rank;
    while (d-- > 0) {
      if (++c[d] <= last[d]) break;
      c[d] = first[d];
      if (d == 0) return;
    }
  }
}

std::vector<std::byte> encode_superblock(const Superblock& sb) {
  ByteWriter w;
  w.raw(kMagic, sizeof kMagic);
  w.u16(sb.version.major);
  w.u16(sb.version.minor);
  w.u32(0);
  w.raw(sb.file_uuid.bytes.data(), 16);
  w.u64(sb.footer_offset);
  w.str16(sb.created_time);
  w.u32(crc32c(w.span_from(0)));
  return std::move(w.bytes());
}

template <typename T>
std::span<const std::byte> as_byte_span(const std::vector<T>& v) {
  return std::as_bytes(std::span(v));
}

}  // namespace

Extent DatasetInfo::chunk_grid() const {
  Extent grid(shape.size());
  for (std::size_t d = 0; d < shape.size(); ++d) grid[d] = ceil_div(shape[d], chunk_shape[d]);
  return grid;
}

std::string_view object_kind_name(ObjectKind kind) {
  return kind == ObjectKind::kGroup ? "group" : "dataset";
}

bool is_valid_name(std::string_view name) {
  return !name.empty() && name.size() <= 0xFFFF &&
         name.find('/') == std::string_view::npos && is_valid_utf8(name);
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  if (!path.empty() && path.front() == '/') path.remove_prefix(1);
  if (path.empty()) return parts;
  std::size_t start = 0;
  while (true) {
    auto pos = path.find('/', start);
    parts.emplace_back(path.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string join_path(std::string_view parent, std::string_view child) {
  std::string out(parent);
  if (out.empty() || out.back() != '/') out.push_back('/');
  out.append(child);
  return out;
}

// ---------------------------------------------------------------------------

class Container::Impl {
 public:
  std::filesystem::path path;
  Fd fd;
  bool writable = false;
  bool was_writable = false;
  Superblock sb;
  std::map<ObjectId, Object> objects;
  ObjectId next_id = 1;
  std::uint64_t end_offset = 0;
  std::optional<std::filesystem::path> lock_path;

  bool tx_active = false;
  ObjectId tx_next_id = 0;
  std::map<ObjectId, Object> tx_saved;

  mutable std::mutex cache_mu;
  mutable std::map<std::pair<ObjectId, Extent>, std::shared_ptr<const Chunk>> cache;

  ~Impl() { release_lock(); }

  void acquire_lock() {
    auto lp = path;
    lp += ".lock";
    int lfd = ::open(lp.c_str(), O_CREAT | O_EXCL | O_WRONLY | O_CLOEXEC, 0644);
    if (lfd < 0) {
      if (errno == EEXIST) {
        throw Error(Errc::kLocked, "another writer holds " + lp.string());
      }
      throw Error(Errc::kIoFailure, "cannot create lock " + lp.string() + ": " + errno_text());
    }
    std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(lfd, pid.data(), pid.size());
    ::close(lfd);
    lock_path = lp;
  }

  void release_lock() {
    if (lock_path) {
      ::unlink(lock_path->c_str());
      lock_path.reset();
    }
  }

  const Object& obj(ObjectId id) const {
    auto it = objects.find(id);
    if (it == objects.end()) {
      throw Error(Errc::kNoSuchObject, "no object with id " + std::to_string(id));
    }
    return it->second;
  }

  // Mutable access that records the prior state inside a transaction.
  Object& mut(ObjectId id) {
    auto it = objects.find(id);
    if (it == objects.end()) {
      throw Error(Errc::kNoSuchObject, "no object with id " + std::to_string(id));
    }
    if (tx_active && id < tx_next_id && !tx_saved.contains(id)) {
      tx_saved.emplace(id, it->second);
    }
    return it->second;
  }

  const Object& dataset(ObjectId id) const {
    const Object& o = obj(id);
    if (o.kind != ObjectKind::kDataset) {
      throw Error(Errc::kNotADataset, "object is a group", path_of(id));
    }
    return o;
  }

  void require_writable() const {
    if (!writable) throw Error(Errc::kReadOnlyHandle, "handle is read-only", path.string());
  }

  std::string path_of(ObjectId id) const {
    if (id == kRootId) return "/";
    std::vector<const std::string*> parts;
    ObjectId cur = id;
    while (cur != kRootId) {
      const Object& o = obj(cur);
      parts.push_back(&o.name);
      cur = o.parent;
    }
    std::string out;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
      out.push_back('/');
      out += **it;
    }
    return out;
  }

  std::uint64_t file_size() const {
    struct stat st{};
    if (::fstat(fd.get(), &st) != 0) {
      throw Error(Errc::kIoFailure, "fstat failed: " + errno_text());
    }
    return static_cast<std::uint64_t>(st.st_size);
  }

  Chunk zero_chunk(const DatasetInfo& ds, const Extent& coord) const {
    Chunk c;
    c.start.resize(ds.rank());
    c.count.resize(ds.rank());
    for (std::size_t d = 0; d < ds.rank(); ++d) {
      c.start[d] = coord[d] * ds.chunk_shape[d];
      c.count[d] = std::min(ds.chunk_shape[d], ds.shape[d] - c.start[d]);
    }
    std::uint64_t n = product(c.count);
    if (ds.dtype == DType::kUtf8) {
      c.strings.resize(n);
    } else {
      c.bytes.assign(n * dtype_size(ds.dtype), std::byte{0});
    }
    return c;
  }

  // Reads and verifies one record; returns its payload.
  std::vector<std::byte> load_record(const Object& o, ChunkStream stream,
                                     const Extent& coord, const ChunkLoc& loc) const {
    auto fail = [&](const std::string& why) -> Error {
      return Error(Errc::kChunkChecksumMismatch,
                   "chunk " + coord_text(coord) + " of " + path_of(o.id) + ": " + why,
                   path_of(o.id));
    };
    const bool utf8 = o.ds.dtype == DType::kUtf8;
    const std::size_t header = record_header_size(o.ds.rank(), utf8);
    if (loc.stored_length < header + 4) throw fail("record too short");
    std::vector<std::byte> rec(loc.stored_length);
    if (pread_some(fd.get(), rec, loc.file_offset) != rec.size()) {
      throw fail("record truncated");
    }
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, rec.data() + rec.size() - 4, 4);
    std::uint32_t actual = crc32c(std::span(rec).first(rec.size() - 4));
    if (actual != stored_crc || actual != loc.crc) throw fail("checksum mismatch");
    try {
      ByteReader r{std::span<const std::byte>(rec).first(header)};
      if (r.u64() != o.id) throw fail("object id mismatch");
      if (r.u8() != o.ds.rank()) throw fail("coordinate count mismatch");
      for (std::size_t d = 0; d < o.ds.rank(); ++d) {
        if (r.u64() != coord[d]) throw fail("coordinate mismatch");
      }
      if (utf8 && r.u8() != static_cast<std::uint8_t>(stream)) throw fail("stream tag mismatch");
      if (r.u8() != 0) throw fail("unsupported codec");
      if (r.u64() != loc.stored_length - header - 4) throw fail("payload length mismatch");
    } catch (const DecodeError& e) {
      throw fail(e.what);
    }
    return std::vector<std::byte>(rec.begin() + static_cast<std::ptrdiff_t>(header),
                                  rec.end() - 4);
  }

  Chunk load_chunk(const Object& o, const Extent& coord) const {
    Chunk c = zero_chunk(o.ds, coord);
    auto fail = [&](const std::string& why) -> Error {
      return Error(Errc::kChunkChecksumMismatch,
                   "chunk " + coord_text(coord) + " of " + path_of(o.id) + ": " + why,
                   path_of(o.id));
    };
    const std::uint64_t n = product(c.count);
    if (o.ds.dtype != DType::kUtf8) {
      auto it = o.chunks.find(ChunkKey{ChunkStream::kData, coord});
      if (it == o.chunks.end()) return c;
      auto payload = load_record(o, ChunkStream::kData, coord, it->second);
      if (payload.size() != c.bytes.size()) throw fail("payload size does not match chunk extent");
      c.bytes = std::move(payload);
      return c;
    }
    auto off_it = o.chunks.find(ChunkKey{kStringOffsets, coord});
    auto str_it = o.chunks.find(ChunkKey{ChunkStream::kStringBytes, coord});
    if (off_it == o.chunks.end() && str_it == o.chunks.end()) return c;
    if (off_it == o.chunks.end() || str_it == o.chunks.end()) throw fail("missing string stream");
    auto offsets_raw = load_record(o, kStringOffsets, coord, off_it->second);
    auto bytes = load_record(o, ChunkStream::kStringBytes, coord, str_it->second);
    if (offsets_raw.size() != (n + 1) * 8) throw fail("offsets stream has wrong length");
    std::vector<std::uint64_t> offs(n + 1);
    std::memcpy(offs.data(), offsets_raw.data(), offsets_raw.size());
    if (offs[0] != 0 || offs[n] != bytes.size()) throw fail("offsets do not span payload");
    for (std::uint64_t i = 0; i < n; ++i) {
      if (offs[i + 1] < offs[i]) throw fail("offsets not monotonic");
      std::string s(reinterpret_cast<const char*>(bytes.data() + offs[i]), offs[i + 1] - offs[i]);
      if (!is_valid_utf8(s)) throw fail("invalid UTF-8 element");
      c.strings[i] = std::move(s);
    }
    return c;
  }

  std::shared_ptr<const Chunk> chunk(const Object& o, const Extent& coord) const {
    auto key = std::make_pair(o.id, coord);
    {
      std::lock_guard<std::mutex> lock(cache_mu);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    auto loaded = std::make_shared<const Chunk>(load_chunk(o, coord));
    std::lock_guard<std::mutex> lock(cache_mu);
    if (cache.size() >= kChunkCacheCapacity) cache.clear();
    cache.emplace(key, loaded);
    return loaded;
  }

  ChunkLoc append_record(const Object& o, ChunkStream stream, const Extent& coord,
                         std::span<const std::byte> payload) {
    ByteWriter w;
    w.u64(o.id);
    w.u8(static_cast<std::uint8_t>(coord.size()));
    for (auto c : coord) w.u64(c);
    if (o.ds.dtype == DType::kUtf8) w.u8(static_cast<std::uint8_t>(stream));
    w.u8(0);  // codec: raw
    w.u64(payload.size());
    w.raw(payload.data(), payload.size());
    std::uint32_t crc = crc32c(w.span_from(0));
    w.u32(crc);
    ChunkLoc loc{end_offset, w.size(), crc};
    pwrite_all(fd.get(), w.bytes(), end_offset);
    end_offset += w.size();
    return loc;
  }

  void store_chunk(ObjectId id, const Extent& coord, const Chunk& c) {
    Object& o = mut(id);
    if (o.ds.dtype != DType::kUtf8) {
      o.chunks[ChunkKey{ChunkStream::kData, coord}] =
          append_record(o, ChunkStream::kData, coord, c.bytes);
    } else {
      std::vector<std::uint64_t> offs;
      offs.reserve(c.strings.size() + 1);
      offs.push_back(0);
      std::vector<std::byte> bytes;
      for (const auto& s : c.strings) {
        const auto* b = reinterpret_cast<const std::byte*>(s.data());
        bytes.insert(bytes.end(), b, b + s.size());
        offs.push_back(bytes.size());
      }
      o.chunks[ChunkKey{kStringOffsets, coord}] =
          append_record(o, kStringOffsets, coord, as_byte_span(offs));
      o.chunks[ChunkKey{ChunkStream::kStringBytes, coord}] =
          append_record(o, ChunkStream::kStringBytes, coord, bytes);
    }
    std::lock_guard<std::mutex> lock(cache_mu);
    cache.erase(std::make_pair(id, coord));
  }

  void check_region(const Object& o, const Extent& offset, const Extent& extent) const {
    if (offset.size() != o.ds.rank() || extent.size() != o.ds.rank()) {
      throw Error(Errc::kRankMismatch, "region rank does not match dataset rank " +
                  std::to_string(o.ds.rank()), path_of(o.id));
    }
    for (std::size_t d = 0; d < o.ds.rank(); ++d) {
      if (offset[d] > o.ds.shape[d] || extent[d] > o.ds.shape[d] - offset[d]) {
        throw Error(Errc::kOutOfBounds,
                    "region offset " + coord_text(offset) + " extent " + coord_text(extent) +
                    " exceeds shape " + coord_text(o.ds.shape), path_of(o.id));
      }
    }
  }

  // ---- footer -----------------------------------------------------------

  std::vector<std::byte> encode_footer() const {
    ByteWriter w;
    auto section = [&w](const char (&tag)[4], auto&& body) {
      std::size_t start = w.size();
      w.raw(tag, 4);
      std::size_t len_at = w.size();
      w.u64(0);
      std::size_t body_start = w.size();
      body(w);
      w.patch_u64(len_at, w.size() - body_start);
      w.u32(crc32c(w.span_from(start)));
    };
    section(kTagObjects, [this](ByteWriter& b) {
      b.u64(objects.size() - 1);
      for (const auto& [id, o] : objects) {
        if (id == kRootId) continue;
        b.u64(id);
        b.u8(static_cast<std::uint8_t>(o.kind));
        b.u64(o.parent);
        b.str16(o.name);
        if (o.kind == ObjectKind::kDataset) {
          b.u8(static_cast<std::uint8_t>(o.ds.dtype));
          b.u8(static_cast<std::uint8_t>(o.ds.rank()));
          for (auto e : o.ds.shape) b.u64(e);
          for (auto e : o.ds.chunk_shape) b.u64(e);
        }
      }
    });
    section(kTagAttrs, [this](ByteWriter& b) {
      std::uint64_t n = 0;
      for (const auto& [id, o] : objects) n += !o.attrs.empty();
      b.u64(n);
      for (const auto& [id, o] : objects) {
        if (o.attrs.empty()) continue;
        b.u64(id);
        b.u32(static_cast<std::uint32_t>(o.attrs.size()));
        for (const auto& [k, v] : o.attrs) encode_attr(b, k, v);
      }
    });
    section(kTagChunks, [this](ByteWriter& b) {
      std::uint64_t n = 0;
      for (const auto& [id, o] : objects) n += o.chunks.size();
      b.u64(n);
      for (const auto& [id, o] : objects) {
        for (const auto& [key, loc] : o.chunks) {
          b.u64(id);
          b.u8(static_cast<std::uint8_t>(key.stream));
          b.u8(static_cast<std::uint8_t>(key.coord.size()));
          for (auto c : key.coord) b.u64(c);
          b.u64(loc.file_offset);
          b.u64(loc.stored_length);
          b.u32(loc.crc);
        }
      }
    });
    w.raw(kTagFooterEnd, 4);
    w.u32(crc32c(w.span_from(0)));
    return std::move(w.bytes());
  }

  void parse_superblock() {
    const std::uint64_t size = file_size();
    std::vector<std::byte> head(static_cast<std::size_t>(std::min<std::uint64_t>(size, kSuperblockFixed)));
    pread_some(fd.get(), head, 0);
    if (head.size() < sizeof kMagic) throw Error(Errc::kTruncatedFile, "file shorter than magic", path.string());
    if (std::memcmp(head.data(), kMagic, sizeof kMagic) != 0) {
      throw Error(Errc::kBadMagic, "not an ephyspack container", path.string());
    }
    if (head.size() < kSuperblockFixed) throw Error(Errc::kTruncatedFile, "superblock truncated", path.string());
    ByteReader r(head);
    r.str(8);
    sb.version.major = r.u16();
    sb.version.minor = r.u16();
    if (sb.version.major != kFormatVersion.major) {
      throw Error(Errc::kUnsupportedVersion,
                  "format major version " + std::to_string(sb.version.major) +
                  " (this reader supports " + std::to_string(kFormatVersion.major) + ")",
                  path.string());
    }
    std::uint16_t len;
    std::memcpy(&len, head.data() + kSuperblockCreatedTimeOffset, 2);
    sb.size = kSuperblockFixed + len + 4;
    if (size < sb.size) throw Error(Errc::kTruncatedFile, "superblock truncated", path.string());
    std::vector<std::byte> full(sb.size);
    pread_some(fd.get(), full, 0);
    std::uint32_t stored;
    std::memcpy(&stored, full.data() + sb.size - 4, 4);
    if (crc32c(std::span(full).first(sb.size - 4)) != stored) {
      throw Error(Errc::kCorruptSuperblock, "superblock checksum mismatch", path.string());
    }
    std::memcpy(sb.file_uuid.bytes.data(), full.data() + kSuperblockUuidOffset, 16);
    std::memcpy(&sb.footer_offset, full.data() + kSuperblockFooterOffsetOffset, 8);
    sb.created_time.assign(reinterpret_cast<const char*>(full.data() + kSuperblockCreatedTimeOffset + 2), len);
    if (!sb.file_uuid.is_valid_v4()) {
      throw Error(Errc::kCorruptSuperblock, "file UUID is nil or not version 4", path.string());
    }
    if (!is_valid_utf8(sb.created_time)) {
      throw Error(Errc::kCorruptSuperblock, "created_time is not UTF-8", path.string());
    }
    if (sb.footer_offset == 0) {
      throw Error(Errc::kTruncatedFile, "container was never finalized", path.string());
    }
    if (sb.footer_offset < sb.size) {
      throw Error(Errc::kCorruptFooter, "footer offset inside superblock", path.string());
    }
    if (sb.footer_offset >= size) {
      throw Error(Errc::kTruncatedFile, "footer offset beyond end of file", path.string());
    }
  }

  void parse_footer() {
    const std::uint64_t size = file_size();
    std::vector<std::byte> buf(size - sb.footer_offset);
    pread_some(fd.get(), buf, sb.footer_offset);
    std::size_t pos = 0;
    // footer_offset is patched only after the footer is on disk, so a short
    // or inconsistent footer in a finalized file is damage, not a torn write.
    auto truncated = [&](const char* what) {
      return Error(Errc::kCorruptFooter, std::string("footer ends early in ") + what, path.string());
    };
    auto corrupt = [&](const std::string& what) {
      return Error(Errc::kCorruptFooter, what, path.string());
    };
    std::vector<std::span<const std::byte>> bodies;
    for (const auto* tag : {kTagObjects, kTagAttrs, kTagChunks}) {
      if (buf.size() - pos < 12) throw truncated("section header");
      if (std::memcmp(buf.data() + pos, tag, 4) != 0) {
        throw corrupt("expected footer section " + std::string(tag, 4));
      }
      std::uint64_t len;
      std::memcpy(&len, buf.data() + pos + 4, 8);
      if (len > buf.size() - pos - 12 || buf.size() - pos - 12 - len < 4) {
        throw truncated("section body");
      }
      std::uint32_t stored;
      std::memcpy(&stored, buf.data() + pos + 12 + len, 4);
      if (crc32c(std::span(buf).subspan(pos, 12 + len)) != stored) {
        throw corrupt("checksum mismatch in footer section " + std::string(tag, 4));
      }
      bodies.push_back(std::span<const std::byte>(buf).subspan(pos + 12, len));
      pos += 12 + len + 4;
    }
    if (buf.size() - pos < 8) throw truncated("terminator");
    if (std::memcmp(buf.data() + pos, kTagFooterEnd, 4) != 0) throw corrupt("missing footer terminator");
    std::uint32_t stored;
    std::memcpy(&stored, buf.data() + pos + 4, 4);
    if (crc32c(std::span(buf).first(pos + 4)) != stored) throw corrupt("footer checksum mismatch");
    try {
      decode_objects(bodies[0]);
      decode_attrs(bodies[1]);
      decode_chunks(bodies[2]);
    } catch (const DecodeError& e) {
      throw corrupt("malformed footer: " + e.what);
    }
  }

  void decode_objects(std::span<const std::byte> body) {
    ByteReader r(body);
    std::uint64_t n = r.u64();
    if (n > body.size()) throw DecodeError{"object count out of range"};
    objects.clear();
    objects.emplace(kRootId, Object{});
    ObjectId last = kRootId;
    for (std::uint64_t i = 0; i < n; ++i) {
      Object o;
      o.id = r.u64();
      if (o.id <= last) throw DecodeError{"object ids not strictly increasing"};
      last = o.id;
      auto kind = r.u8();
      if (kind != 1 && kind != 2) throw DecodeError{"bad object kind"};
      o.kind = static_cast<ObjectKind>(kind);
      o.parent = r.u64();
      o.name = r.str16();
      if (!is_valid_name(o.name)) throw DecodeError{"invalid object name"};
      auto pit = objects.find(o.parent);
      if (pit == objects.end() || pit->second.kind != ObjectKind::kGroup) {
        throw DecodeError{"object " + o.name + " has no valid parent group"};
      }
      if (!pit->second.children.emplace(o.name, o.id).second) {
        throw DecodeError{"duplicate sibling name " + o.name};
      }
      if (o.kind == ObjectKind::kDataset) {
        auto dt = r.u8();
        if (!is_valid_dtype(dt)) throw DecodeError{"bad dtype"};
        o.ds.dtype = static_cast<DType>(dt);
        auto rank = r.u8();
        if (rank > kMaxRank) throw DecodeError{"rank too high"};
        if (o.ds.dtype == DType::kUtf8 && rank != 1) throw DecodeError{"utf8 dataset rank != 1"};
        o.ds.shape.resize(rank);
        o.ds.chunk_shape.resize(rank);
        std::uint64_t total = 1;
        for (auto& e : o.ds.shape) {
          e = r.u64();
          if (mul_overflows(total, e, std::uint64_t{1} << 62)) throw DecodeError{"shape too large"};
          total *= e;
        }
        for (auto& e : o.ds.chunk_shape) {
          e = r.u64();
          if (e == 0) throw DecodeError{"zero chunk extent"};
        }
      }
      objects.emplace(o.id, std::move(o));
    }
    if (!r.done()) throw DecodeError{"trailing bytes in object table"};
    next_id = last + 1;
  }

  void decode_attrs(std::span<const std::byte> body) {
    ByteReader r(body);
    std::uint64_t n = r.u64();
    if (n > objects.size()) throw DecodeError{"attribute table count out of range"};
    ObjectId last = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      ObjectId id = r.u64();
      if (i > 0 && id <= last) throw DecodeError{"attribute table not sorted"};
      last = id;
      auto it = objects.find(id);
      if (it == objects.end()) throw DecodeError{"attributes for unknown object"};
      std::uint32_t count = r.u32();
      if (count == 0) throw DecodeError{"empty attribute entry"};
      for (std::uint32_t k = 0; k < count; ++k) {
        std::string key = r.str16();
        if (key.empty()) throw DecodeError{"empty attribute key"};
        AttrValue v = decode_attr_value(r);
        if (!it->second.attrs.emplace(std::move(key), std::move(v)).second) {
          throw DecodeError{"duplicate attribute key"};
        }
      }
      if (encoded_attrs_size(it->second.attrs) > kAttrBudgetBytes) {
        throw DecodeError{"attribute budget exceeded"};
      }
    }
    if (!r.done()) throw DecodeError{"trailing bytes in attribute table"};
  }

  void decode_chunks(std::span<const std::byte> body) {
    ByteReader r(body);
    std::uint64_t n = r.u64();
    if (n > body.size()) throw DecodeError{"chunk count out of range"};
    for (std::uint64_t i = 0; i < n; ++i) {
      ObjectId id = r.u64();
      auto it = objects.find(id);
      if (it == objects.end() || it->second.kind != ObjectKind::kDataset) {
        throw DecodeError{"chunk for unknown dataset"};
      }
      Object& o = it->second;
      auto stream = r.u8();
      if (stream > 1 || (stream == 1 && o.ds.dtype != DType::kUtf8)) throw DecodeError{"bad stream tag"};
      auto ncoords = r.u8();
      if (ncoords != o.ds.rank()) throw DecodeError{"chunk coordinate rank mismatch"};
      ChunkKey key{static_cast<ChunkStream>(stream), Extent(ncoords)};
      Extent grid = o.ds.chunk_grid();
      for (std::size_t d = 0; d < ncoords; ++d) {
        key.coord[d] = r.u64();
        if (key.coord[d] >= grid[d]) throw DecodeError{"chunk coordinate outside grid"};
      }
      ChunkLoc loc;
      loc.file_offset = r.u64();
      loc.stored_length = r.u64();
      loc.crc = r.u32();
      std::size_t header = record_header_size(o.ds.rank(), o.ds.dtype == DType::kUtf8);
      if (loc.file_offset < sb.size || loc.stored_length < header + 4 ||
          loc.stored_length > sb.footer_offset - loc.file_offset) {
        throw DecodeError{"chunk record outside data region"};
      }
      if (!o.chunks.emplace(key, loc).second) throw DecodeError{"duplicate chunk entry"};
    }
    if (!r.done()) throw DecodeError{"trailing bytes in chunk index"};
    for (const auto& [id, o] : objects) {
      if (o.ds.dtype != DType::kUtf8 || o.kind != ObjectKind::kDataset) continue;
      for (const auto& [key, loc] : o.chunks) {
        ChunkStream other = key.stream == kStringOffsets ? ChunkStream::kStringBytes : kStringOffsets;
        if (!o.chunks.contains(ChunkKey{other, key.coord})) {
          throw DecodeError{"string dataset chunk missing a stream"};
        }
      }
    }
  }

  ChunkRecordRef make_ref(const Object& o, const ChunkKey& key, const ChunkLoc& loc) const {
    ChunkRecordRef ref;
    ref.object_id = o.id;
    ref.stream = key.stream;
    ref.coord = key.coord;
    ref.file_offset = loc.file_offset;
    ref.stored_length = loc.stored_length;
    ref.crc = loc.crc;
    std::size_t header = record_header_size(o.ds.rank(), o.ds.dtype == DType::kUtf8);
    ref.payload_offset = loc.file_offset + header;
    ref.payload_length = loc.stored_length - header - 4;
    return ref;
  }
};

// ---------------------------------------------------------------------------

Container::Container(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Container::Container(Container&&) noexcept = default;
Container& Container::operator=(Container&&) noexcept = default;
Container::~Container() = default;

Container Container::create(const std::filesystem::path& path,
                            const std::map<std::string, std::string>& identification,
                            const CreateOptions& options) {
  for (const auto& [k, v] : identification) {
    if (k.empty() || !is_valid_utf8(k) || !is_valid_utf8(v)) {
      throw Error(Errc::kInvalidValue, "identification keys must be non-empty UTF-8");
    }
  }
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    throw Error(Errc::kPathExists, "refusing to overwrite " + path.string(), path.string());
  }
  auto impl = std::make_unique<Impl>();
  impl->path = path;
  impl->acquire_lock();
  int fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_RDWR | O_CLOEXEC, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      throw Error(Errc::kPathExists, "refusing to overwrite " + path.string(), path.string());
    }
    throw Error(Errc::kIoFailure, "cannot create " + path.string() + ": " + errno_text(),
                path.string());
  }
  impl->fd = Fd(fd);
  impl->sb.version = kFormatVersion;
  impl->sb.file_uuid = options.file_uuid.value_or(Uuid::random_v4());
  if (!impl->sb.file_uuid.is_valid_v4()) {
    throw Error(Errc::kInvalidValue, "file UUID must be a non-nil version 4 UUID");
  }
  impl->sb.created_time = options.created_time.value_or(IsoTime::now_utc().to_string());
  if (impl->sb.created_time.size() > 0xFFFF || !is_valid_utf8(impl->sb.created_time)) {
    throw Error(Errc::kInvalidValue, "created_time must be short UTF-8");
  }
  auto bytes = encode_superblock(impl->sb);
  impl->sb.size = bytes.size();
  pwrite_all(impl->fd.get(), bytes, 0);
  impl->end_offset = bytes.size();
  impl->objects.emplace(kRootId, Object{});
  Object& root = impl->objects.at(kRootId);
  for (const auto& [k, v] : identification) root.attrs.emplace("id." + k, v);
  if (encoded_attrs_size(root.attrs) > kAttrBudgetBytes) {
    throw Error(Errc::kAttributeBudgetExceeded, "identification map exceeds 64 KiB");
  }
  impl->writable = true;
  impl->was_writable = true;
  return Container(std::move(impl));
}

Container Container::open(const std::filesystem::path& path, OpenMode mode) {
  auto impl = std::make_unique<Impl>();
  impl->path = path;
  int flags = (mode == OpenMode::kAppend ? O_RDWR : O_RDONLY) | O_CLOEXEC;
  int fd = ::open(path.c_str(), flags);
  if (fd < 0) {
    throw Error(Errc::kIoFailure, "cannot open " + path.string() + ": " + errno_text(),
                path.string());
  }
  impl->fd = Fd(fd);
  impl->parse_superblock();
  impl->parse_footer();
  if (mode == OpenMode::kAppend) {
    impl->acquire_lock();
    impl->writable = true;
    impl->was_writable = true;
    impl->end_offset = impl->file_size();
  }
  return Container(std::move(impl));
}

const std::filesystem::path& Container::path() const { return impl_->path; }
const Superblock& Container::superblock() const { return impl_->sb; }
bool Container::writable() const { return impl_->writable; }

ObjectId Container::create_group(ObjectId parent, std::string_view name) {
  impl_->require_writable();
  if (!is_valid_name(name)) {
    throw Error(Errc::kInvalidName, "invalid object name '" + std::string(name) + "'");
  }
  const Object& p = impl_->obj(parent);
  if (p.kind != ObjectKind::kGroup) {
    throw Error(Errc::kNotAGroup, "parent is a dataset", impl_->path_of(parent));
  }
  if (p.children.contains(name)) {
    throw Error(Errc::kDuplicateName, "'" + std::string(name) + "' already exists",
                join_path(impl_->path_of(parent), name));
  }
  Object o;
  o.id = impl_->next_id++;
  o.parent = parent;
  o.kind = ObjectKind::kGroup;
  o.name = std::string(name);
  impl_->mut(parent).children.emplace(o.name, o.id);
  ObjectId id = o.id;
  impl_->objects.emplace(id, std::move(o));
  return id;
}

ObjectId Container::create_dataset(ObjectId parent, std::string_view name, DType dtype,
                                   const Extent& shape, const Extent& chunk_shape) {
  impl_->require_writable();
  if (!is_valid_name(name)) {
    throw Error(Errc::kInvalidName, "invalid object name '" + std::string(name) + "'");
  }
  if (shape.size() > kMaxRank) {
    throw Error(Errc::kRankTooHigh, "rank " + std::to_string(shape.size()) + " exceeds 8");
  }
  if (shape.size() != chunk_shape.size()) {
    throw Error(Errc::kRankMismatch, "chunk rank differs from shape rank");
  }
  for (auto c : chunk_shape) {
    if (c == 0) throw Error(Errc::kZeroChunkExtent, "chunk extents must be >= 1");
  }
  if (!is_valid_dtype(static_cast<std::uint8_t>(dtype))) {
    throw Error(Errc::kInvalidValue, "unknown dtype");
  }
  if (dtype == DType::kUtf8 && shape.size() != 1) {
    throw Error(Errc::kRankMismatch, "utf8 datasets must have rank 1");
  }
  std::uint64_t total = 1;
  for (auto e : shape) {
    if (mul_overflows(total, e, std::uint64_t{1} << 62)) {
      throw Error(Errc::kInvalidValue, "dataset shape too large");
    }
    total *= e;
  }
  const Object& p = impl_->obj(parent);
  if (p.kind != ObjectKind::kGroup) {
    throw Error(Errc::kNotAGroup, "parent is a dataset", impl_->path_of(parent));
  }
  if (p.children.contains(name)) {
    throw Error(Errc::kDuplicateName, "'" + std::string(name) + "' already exists",
                join_path(impl_->path_of(parent), name));
  }
  Object o;
  o.id = impl_->next_id++;
  o.parent = parent;
  o.kind = ObjectKind::kDataset;
  o.name = std::string(name);
  o.ds = DatasetInfo{dtype, shape, chunk_shape};
  impl_->mut(parent).children.emplace(o.name, o.id);
  ObjectId id = o.id;
  impl_->objects.emplace(id, std::move(o));
  return id;
}

void Container::write_slab(ObjectId dataset, const Extent& offset, const ArrayData& data,
                           const Extent& extent) {
  impl_->require_writable();
  const Object& o = impl_->dataset(dataset);
  if (dtype_of(data) != o.ds.dtype) {
    throw Error(Errc::kDtypeMismatch,
                std::string("data is ") + std::string(dtype_name(dtype_of(data))) +
                ", dataset is " + std::string(dtype_name(o.ds.dtype)), impl_->path_of(dataset));
  }
  if (offset.size() != o.ds.rank() || extent.size() != o.ds.rank()) {
    throw Error(Errc::kRankMismatch, "region rank does not match dataset rank",
                impl_->path_of(dataset));
  }
  if (element_count(data) != product(extent)) {
    throw Error(Errc::kLengthMismatch,
                std::to_string(element_count(data)) + " elements for a region of " +
                std::to_string(product(extent)), impl_->path_of(dataset));
  }
  impl_->check_region(o, offset, extent);
  if (const auto* strings = std::get_if<std::vector<std::string>>(&data)) {
    for (const auto& s : *strings) {
      if (!is_valid_utf8(s)) throw Error(Errc::kInvalidValue, "string is not valid UTF-8");
    }
  }
  const DatasetInfo ds = o.ds;
  const std::size_t esize = dtype_size(ds.dtype);
  std::span<const std::byte> src_bytes;
  if (ds.dtype != DType::kUtf8) {
    src_bytes = std::visit(
        [](const auto& v) -> std::span<const std::byte> {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, std::vector<std::string>>) {
            return {};
          } else {
            return std::as_bytes(std::span(v));
          }
        },
        data);
  }
  for_each_chunk_in(ds, offset, extent, [&](const Extent& coord) {
    Chunk c = impl_->zero_chunk(ds, coord);
    Extent lo(ds.rank());
    Extent hi(ds.rank());
    bool covers = true;
    for (std::size_t d = 0; d < ds.rank(); ++d) {
      lo[d] = std::max(offset[d], c.start[d]);
      hi[d] = std::min(offset[d] + extent[d], c.start[d] + c.count[d]);
      covers = covers && lo[d] == c.start[d] && hi[d] == c.start[d] + c.count[d];
    }
    if (!covers) c = *impl_->chunk(impl_->obj(dataset), coord);
    if (ds.dtype == DType::kUtf8) {
      const auto& strings = std::get<std::vector<std::string>>(data);
      for_each_run(offset, extent, c.start, c.count, lo, hi,
                   [&](std::uint64_t s, std::uint64_t t, std::uint64_t run) {
                     for (std::uint64_t k = 0; k < run; ++k) c.strings[t + k] = strings[s + k];
                   });
    } else {
      for_each_run(offset, extent, c.start, c.count, lo, hi,
                   [&](std::uint64_t s, std::uint64_t t, std::uint64_t run) {
                     std::memcpy(c.bytes.data() + t * esize, src_bytes.data() + s * esize,
                                 run * esize);
                   });
    }
    impl_->store_chunk(dataset, coord, c);
  });
}

void Container::write_all(ObjectId dataset, const ArrayData& data) {
  const auto& ds = impl_->dataset(dataset).ds;
  write_slab(dataset, Extent(ds.rank(), 0), data, ds.shape);
}

ArrayData Container::read_slab(ObjectId dataset, const Extent& offset,
                               const Extent& extent) const {
  const Object& o = impl_->dataset(dataset);
  impl_->check_region(o, offset, extent);
  const DatasetInfo& ds = o.ds;
  ArrayData out = make_array(ds.dtype, product(extent));
  const std::size_t esize = dtype_size(ds.dtype);
  std::byte* dst = nullptr;
  if (ds.dtype != DType::kUtf8) {
    dst = std::visit(
        [](auto& v) -> std::byte* {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, std::vector<std::string>>) {
            return nullptr;
          } else {
            return reinterpret_cast<std::byte*>(v.data());
          }
        },
        out);
  }
  for_each_chunk_in(ds, offset, extent, [&](const Extent& coord) {
    auto c = impl_->chunk(o, coord);
    Extent lo(ds.rank());
    Extent hi(ds.rank());
    for (std::size_t d = 0; d < ds.rank(); ++d) {
      lo[d] = std::max(offset[d], c->start[d]);
      hi[d] = std::min(offset[d] + extent[d], c->start[d] + c->count[d]);
    }
    if (ds.dtype == DType::kUtf8) {
      auto& strings = std::get<std::vector<std::string>>(out);
      for_each_run(c->start, c->count, offset, extent, lo, hi,
                   [&](std::uint64_t s, std::uint64_t t, std::uint64_t run) {
                     for (std::uint64_t k = 0; k < run; ++k) strings[t + k] = c->strings[s + k];
                   });
    } else {
      for_each_run(c->start, c->count, offset, extent, lo, hi,
                   [&](std::uint64_t s, std::uint64_t t, std::uint64_t run) {
                     std::memcpy(dst + t * esize, c->bytes.data() + s * esize, run * esize);
                   });
    }
  });
  return out;
}

ArrayData Container::read_all(ObjectId dataset) const {
  const auto& ds = impl_->dataset(dataset).ds;
  return read_slab(dataset, Extent(ds.rank(), 0), ds.shape);
}

void Container::set_attribute(ObjectId object, std::string_view key, AttrValue value) {
  impl_->require_writable();
  if (key.empty() || key.size() > 0xFFFF || !is_valid_utf8(key)) {
    throw Error(Errc::kInvalidName, "attribute keys must be non-empty UTF-8");
  }
  check_attr_value(value);
  const Object& current = impl_->obj(object);
  AttrMap next = current.attrs;
  next.insert_or_assign(std::string(key), std::move(value));
  if (encoded_attrs_size(next) > kAttrBudgetBytes) {
    throw Error(Errc::kAttributeBudgetExceeded,
                "attributes of " + impl_->path_of(object) + " would exceed 64 KiB",
                impl_->path_of(object));
  }
  impl_->mut(object).attrs = std::move(next);
}

AttrValue Container::get_attribute(ObjectId object, std::string_view key) const {
  const Object& o = impl_->obj(object);
  auto it = o.attrs.find(std::string(key));
  if (it == o.attrs.end()) {
    throw Error(Errc::kNoSuchKey, "no attribute '" + std::string(key) + "'", impl_->path_of(object));
  }
  return it->second;
}

std::optional<AttrValue> Container::find_attribute(ObjectId object, std::string_view key) const {
  const Object& o = impl_->obj(object);
  auto it = o.attrs.find(std::string(key));
  if (it == o.attrs.end()) return std::nullopt;
  return it->second;
}

const AttrMap& Container::attributes(ObjectId object) const { return impl_->obj(object).attrs; }

std::vector<ChildEntry> Container::list_children(ObjectId group) const {
  const Object& o = impl_->obj(group);
  if (o.kind != ObjectKind::kGroup) {
    throw Error(Errc::kNotAGroup, "object is a dataset", impl_->path_of(group));
  }
  std::vector<ChildEntry> out;
  out.reserve(o.children.size());
  for (const auto& [name, id] : o.children) out.push_back({name, id, impl_->obj(id).kind});
  return out;
}

std::optional<ObjectId> Container::find_child(ObjectId group, std::string_view name) const {
  const Object& o = impl_->obj(group);
  if (o.kind != ObjectKind::kGroup) return std::nullopt;
  auto it = o.children.find(name);
  if (it == o.children.end()) return std::nullopt;
  return it->second;
}

bool Container::exists(ObjectId object) const { return impl_->objects.contains(object); }
ObjectKind Container::kind(ObjectId object) const { return impl_->obj(object).kind; }
ObjectId Container::parent(ObjectId object) const { return impl_->obj(object).parent; }
const std::string& Container::name(ObjectId object) const { return impl_->obj(object).name; }
const DatasetInfo& Container::dataset_info(ObjectId dataset) const {
  return impl_->dataset(dataset).ds;
}

std::string Container::path_of(ObjectId object) const { return impl_->path_of(object); }

std::optional<ObjectId> Container::try_resolve(std::string_view path) const {
  ObjectId cur = kRootId;
  if (path.empty()) return std::nullopt;
  for (const auto& part : split_path(path)) {
    auto next = find_child(cur, part);
    if (!next) return std::nullopt;
    cur = *next;
  }
  return cur;
}

ObjectId Container::resolve(std::string_view path) const {
  auto id = try_resolve(path);
  if (!id) throw Error(Errc::kNoSuchObject, "no object at " + std::string(path), std::string(path));
  return *id;
}

std::vector<ObjectId> Container::object_ids() const {
  std::vector<ObjectId> ids;
  ids.reserve(impl_->objects.size());
  for (const auto& [id, o] : impl_->objects) {
    if (id != kRootId) ids.push_back(id);
  }
  return ids;
}

std::vector<ChunkRecordRef> Container::chunk_records() const {
  std::vector<ChunkRecordRef> out;
  for (const auto& [id, o] : impl_->objects) {
    for (const auto& [key, loc] : o.chunks) out.push_back(impl_->make_ref(o, key, loc));
  }
  return out;
}

std::vector<ChunkRecordRef> Container::chunk_records(ObjectId dataset) const {
  const Object& o = impl_->dataset(dataset);
  std::vector<ChunkRecordRef> out;
  for (const auto& [key, loc] : o.chunks) out.push_back(impl_->make_ref(o, key, loc));
  return out;
}

void Container::verify_chunk(const ChunkRecordRef& record) const {
  const Object& o = impl_->dataset(record.object_id);
  auto it = o.chunks.find(ChunkKey{record.stream, record.coord});
  if (it == o.chunks.end()) {
    throw Error(Errc::kNoSuchObject, "no chunk " + coord_text(record.coord), path_of(o.id));
  }
  // Decoding the whole chunk also cross-checks the two string streams.
  impl_->load_chunk(o, record.coord);
}

void Container::finalize() {
  if (!impl_->writable) {
    if (impl_->was_writable) return;
    throw Error(Errc::kReadOnlyHandle, "handle was opened read-only", impl_->path.string());
  }
  if (impl_->tx_active) {
    throw Error(Errc::kInvalidArgument, "cannot finalize inside a transaction");
  }
  auto footer = impl_->encode_footer();
  const std::uint64_t footer_offset = impl_->end_offset;
  pwrite_all(impl_->fd.get(), footer, footer_offset);
  sync_fd(impl_->fd.get());
  impl_->end_offset += footer.size();
  impl_->sb.footer_offset = footer_offset;
  auto sb = encode_superblock(impl_->sb);
  pwrite_all(impl_->fd.get(), sb, 0);
  sync_fd(impl_->fd.get());
  impl_->writable = false;
  impl_->release_lock();
}

void Container::begin_transaction() {
  impl_->require_writable();
  if (impl_->tx_active) throw Error(Errc::kInvalidArgument, "transaction already active");
  impl_->tx_active = true;
  impl_->tx_next_id = impl_->next_id;
  impl_->tx_saved.clear();
}

void Container::commit() {
  impl_->tx_active = false;
  impl_->tx_saved.clear();
}

void Container::rollback() {
  if (!impl_->tx_active) return;
  auto& objs = impl_->objects;
  objs.erase(objs.lower_bound(impl_->tx_next_id), objs.end());
  for (auto& [id, saved] : impl_->tx_saved) objs[id] = std::move(saved);
  impl_->next_id = impl_->tx_next_id;
  impl_->tx_active = false;
  impl_->tx_saved.clear();
  std::lock_guard<std::mutex> lock(impl_->cache_mu);
  impl_->cache.clear();
}

bool Container::in_transaction() const { return impl_->tx_active; }

}  // namespace ephyspack
