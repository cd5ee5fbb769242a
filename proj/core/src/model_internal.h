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

#ifndef EPHYSPACK_SRC_MODEL_INTERNAL_H_
#define EPHYSPACK_SRC_MODEL_INTERNAL_H_

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ephyspack/container.h"
#include "ephyspack/model.h"

namespace ephyspack::detail {

inline bool finite(double v) { return std::isfinite(v); }

std::string fmt(double v);
std::string fmt(std::uint64_t v);

// Chunk shape targeting about 64 KiB per chunk, split along the first axis.
Extent default_chunk_shape(DType dtype, const Extent& shape);

ObjectId put_dataset(Container& c, ObjectId parent, std::string_view name, const ArrayData& data,
                     const Extent& shape);
ObjectId put_tensor(Container& c, ObjectId parent, std::string_view name, const Tensor& t);

template <typename T>
ObjectId put_vector(Container& c, ObjectId parent, std::string_view name, const std::vector<T>& v) {
  return put_dataset(c, parent, name, ArrayData(v), Extent{v.size()});
}

ObjectId require_group_path(Container& c, std::string_view path);
ObjectId group_for_new_entity(Container& c, std::string_view name, std::string_view kind_name);

// Runs fn inside a transaction; on any exception the container is restored.
template <typename Fn>
auto transactional(Container& c, Fn&& fn) -> decltype(fn()) {
  Transaction tx(c);
  if constexpr (std::is_void_v<decltype(fn())>) {
    fn();
    tx.commit();
  } else {
    auto result = fn();
    tx.commit();
    return result;
  }
}

// ---- tolerant reading -------------------------------------------------------

ObjectId require_object(ReadContext& ctx, std::string_view path, std::string_view code);
std::optional<ObjectId> child(ReadContext& ctx, ObjectId parent, std::string_view name);
std::optional<ObjectId> child_group(ReadContext& ctx, ObjectId parent, std::string_view name);
ObjectId require_child_group(ReadContext& ctx, ObjectId parent, std::string_view name);

template <typename T>
std::optional<T> opt_attr(ReadContext& ctx, ObjectId id, std::string_view key) {
  auto v = ctx.c.find_attribute(id, key);
  if (!v) return std::nullopt;
  if (auto* typed = std::get_if<T>(&*v)) return std::move(*typed);
  ctx.out.fatal("L004", ctx.c.path_of(id),
                "attribute '" + std::string(key) + "' has type " + std::string(attr_type_name(*v)));
}

template <typename T>
T req_attr(ReadContext& ctx, ObjectId id, std::string_view key) {
  auto v = opt_attr<T>(ctx, id, key);
  if (!v) {
    ctx.out.fatal("L004", ctx.c.path_of(id), "missing attribute '" + std::string(key) + "'");
  }
  return std::move(*v);
}

// Dataset check: rank < 0 accepts any rank; dtype predicate filters.
std::optional<Tensor> opt_dataset(ReadContext& ctx, ObjectId parent, std::string_view name,
                                  const std::function<bool(DType)>& dtype_ok, int rank);
Tensor req_dataset(ReadContext& ctx, ObjectId parent, std::string_view name,
                   const std::function<bool(DType)>& dtype_ok, int rank);

template <typename T>
std::optional<std::vector<T>> opt_vector(ReadContext& ctx, ObjectId parent,
                                         std::string_view name) {
  auto t = opt_dataset(ctx, parent, name, [](DType d) { return d == DTypeOf<T>::value; }, 1);
  if (!t) return std::nullopt;
  return std::get<std::vector<T>>(std::move(t->data));
}

template <typename T>
std::vector<T> req_vector(ReadContext& ctx, ObjectId parent, std::string_view name) {
  auto t = req_dataset(ctx, parent, name, [](DType d) { return d == DTypeOf<T>::value; }, 1);
  return std::get<std::vector<T>>(std::move(t.data));
}

template <typename T>
std::optional<Ragged<T>> opt_ragged(ReadContext& ctx, ObjectId parent, std::string_view offsets,
                                    std::string_view values) {
  auto o = opt_vector<std::uint64_t>(ctx, parent, offsets);
  if (!o) return std::nullopt;
  Ragged<T> r;
  r.offsets = std::move(*o);
  r.values = req_vector<T>(ctx, parent, values);
  return r;
}

// Entity group at path whose entity_kind must equal kind.
ObjectId open_entity(ReadContext& ctx, std::string_view path, EntityKind kind);

inline bool any_numeric(DType d) { return is_numeric(d); }
inline bool is_f64(DType d) { return d == DType::kF64; }

// Detail map helpers.
AttrMap detail_index(std::uint64_t index);

// Validation of an offsets array against the number of rows and payload.
// Returns an empty string when valid, else a description.
std::string offsets_problem(const std::vector<std::uint64_t>& offsets, std::uint64_t rows,
                            std::uint64_t total);

// Prefix-based attribute map splitting ("meta.", "param.", ...).
AttrMap strip_prefix(const AttrMap& attrs, std::string_view prefix);

}  // namespace ephyspack::detail

#endif  // EPHYSPACK_SRC_MODEL_INTERNAL_H_
