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

#ifndef EPHYSPACK_CONTAINER_H_
#define EPHYSPACK_CONTAINER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ephyspack/error.h"
#include "ephyspack/types.h"
#include "ephyspack/uuid.h"

namespace ephyspack {

// Single-file container: a tree of groups and chunked datasets with typed
// attributes on every object. Files are written append-only by one writer;
// finalize() appends the footer index and patches the superblock.
//
// On-disk layout (all integers little-endian):
//
//   superblock   magic "EPHYPK1\n" | major u16 | minor u16 | reserved u32 |
//                uuid[16] | footer_offset u64 | created_time (u16 len, utf8) |
//                crc32c u32
//   chunks       object_id u64 | ncoords u8 | coords u64 x ncoords |
//                [stream u8, utf8 datasets only] | codec u8 | payload_len u64 |
//                payload | crc32c u32 (over the whole record before it)
//   footer       sections "OBJT", "ATTR", "CHNK", each
//                tag[4] | length u64 | body | crc32c u32,
//                then "FOOT" | crc32c u32 (over the footer up to "FOOT")

struct FormatVersion {
  std::uint16_t major = 1;
  std::uint16_t minor = 0;
  friend bool operator==(const FormatVersion&, const FormatVersion&) = default;
};

inline constexpr FormatVersion kFormatVersion{1, 0};
inline constexpr char kMagic[8] = {'E', 'P', 'H', 'Y', 'P', 'K', '1', '\n'};

enum class OpenMode { kReadOnly, kAppend };

enum class ObjectKind : std::uint8_t { kGroup = 1, kDataset = 2 };

std::string_view object_kind_name(ObjectKind kind);

struct Superblock {
  FormatVersion version;
  Uuid file_uuid;
  std::uint64_t footer_offset = 0;
  std::string created_time;
  // Encoded size in bytes, including the trailing checksum.
  std::uint64_t size = 0;
};

// Byte offsets of the fixed superblock fields.
inline constexpr std::size_t kSuperblockVersionOffset = 8;
inline constexpr std::size_t kSuperblockUuidOffset = 16;
inline constexpr std::size_t kSuperblockFooterOffsetOffset = 32;
inline constexpr std::size_t kSuperblockCreatedTimeOffset = 40;

struct CreateOptions {
  // Overrides for reproducible output; defaults are a random v4 UUID and the
  // current UTC time.
  std::optional<Uuid> file_uuid;
  std::optional<std::string> created_time;
};

struct ChildEntry {
  std::string name;
  ObjectId id = 0;
  ObjectKind kind = ObjectKind::kGroup;
  friend bool operator==(const ChildEntry&, const ChildEntry&) = default;
};

struct DatasetInfo {
  DType dtype = DType::kF64;
  Extent shape;
  Extent chunk_shape;

  std::size_t rank() const { return shape.size(); }
  // Number of chunks along each dimension (ceiling division).
  Extent chunk_grid() const;
  friend bool operator==(const DatasetInfo&, const DatasetInfo&) = default;
};

// Stream tags of chunk records. Numeric datasets only use kData.
enum class ChunkStream : std::uint8_t { kData = 0, kStringBytes = 1 };
inline constexpr ChunkStream kStringOffsets = ChunkStream::kData;

// Footer index entry for one materialized chunk record.
struct ChunkRecordRef {
  ObjectId object_id = 0;
  ChunkStream stream = ChunkStream::kData;
  Extent coord;
  std::uint64_t file_offset = 0;
  std::uint64_t stored_length = 0;
  std::uint32_t crc = 0;
  // Byte range of the payload inside the file.
  std::uint64_t payload_offset = 0;
  std::uint64_t payload_length = 0;
};

class Container {
 public:
  // Creates a new file; fails with kPathExists rather than overwriting. The
  // identification map lands on the root group as "id.<key>" attributes.
  static Container create(const std::filesystem::path& path,
                          const std::map<std::string, std::string>& identification,
                          const CreateOptions& options = {});
  static Container open(const std::filesystem::path& path,
                        OpenMode mode = OpenMode::kReadOnly);

  Container(Container&&) noexcept;
  Container& operator=(Container&&) noexcept;
  Container(const Container&) = delete;
  Container& operator=(const Container&) = delete;
  // Releases the writer lock. Does not finalize: unfinalized writes are lost.
  ~Container();

  const std::filesystem::path& path() const;
  const Superblock& superblock() const;
  bool writable() const;

  ObjectId create_group(ObjectId parent, std::string_view name);
  ObjectId create_dataset(ObjectId parent, std::string_view name, DType dtype,
                          const Extent& shape, const Extent& chunk_shape);

  void write_slab(ObjectId dataset, const Extent& offset,
                  const ArrayData& data, const Extent& extent);
  // Whole-dataset write; data must hold product(shape) elements.
  void write_all(ObjectId dataset, const ArrayData& data);

  // Row-major elements of the region. Unwritten elements read as zero (or
  // empty strings). Every touched chunk is checksum-verified.
  ArrayData read_slab(ObjectId dataset, const Extent& offset,
                      const Extent& extent) const;
  ArrayData read_all(ObjectId dataset) const;

  template <typename T>
  std::vector<T> read_all_as(ObjectId dataset) const {
    ArrayData data = read_all(dataset);
    if (auto* typed = std::get_if<std::vector<T>>(&data)) return std::move(*typed);
    throw Error(Errc::kDtypeMismatch, "dataset has dtype " +
                std::string(dtype_name(dtype_of(data))), path_of(dataset));
  }

  void set_attribute(ObjectId object, std::string_view key, AttrValue value);
  AttrValue get_attribute(ObjectId object, std::string_view key) const;
  std::optional<AttrValue> find_attribute(ObjectId object,
                                          std::string_view key) const;
  const AttrMap& attributes(ObjectId object) const;

  // Children sorted by name (byte-lexicographic).
  std::vector<ChildEntry> list_children(ObjectId group) const;
  std::optional<ObjectId> find_child(ObjectId group, std::string_view name) const;

  bool exists(ObjectId object) const;
  ObjectKind kind(ObjectId object) const;
  ObjectId parent(ObjectId object) const;
  const std::string& name(ObjectId object) const;
  const DatasetInfo& dataset_info(ObjectId dataset) const;

  // Slash-joined path from the root, e.g. "/data/raw"; "/" is the root.
  std::string path_of(ObjectId object) const;
  std::optional<ObjectId> try_resolve(std::string_view path) const;
  ObjectId resolve(std::string_view path) const;

  // Every object id except the root, in creation order.
  std::vector<ObjectId> object_ids() const;

  // Footer index, sorted by (object, stream, coordinate).
  std::vector<ChunkRecordRef> chunk_records() const;
  std::vector<ChunkRecordRef> chunk_records(ObjectId dataset) const;
  // Re-reads the record from disk; throws kChunkChecksumMismatch on any
  // mismatch with the index or the stored checksum.
  void verify_chunk(const ChunkRecordRef& record) const;

  // Writes the footer and patches the superblock. Idempotent; afterwards
  // the handle is read-only.
  void finalize();

  // All-or-nothing grouping of mutations. rollback() restores the in-memory
  // index to the state at begin_transaction(); bytes already appended stay
  // in the file but are unreachable.
  void begin_transaction();
  void commit();
  void rollback();
  bool in_transaction() const;

 private:
  class Impl;
  explicit Container(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

// RAII transaction: rolls back unless commit() was called.
class Transaction {
 public:
  explicit Transaction(Container& container) : container_(&container) {
    container_->begin_transaction();
  }
  ~Transaction() {
    if (container_ != nullptr) container_->rollback();
  }
  Transaction(const Transaction&) = delete;
  Transaction& operator=(const Transaction&) = delete;

  void commit() {
    container_->commit();
    container_ = nullptr;
  }

 private:
  Container* container_;
};

// Splits "/a/b" into {"a","b"}; leading slash optional.
std::vector<std::string> split_path(std::string_view path);
std::string join_path(std::string_view parent, std::string_view child);
bool is_valid_name(std::string_view name);

}  // namespace ephyspack

#endif  // EPHYSPACK_CONTAINER_H_
