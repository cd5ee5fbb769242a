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

#include "ephyspack/isotime.h"
#include "model_internal.h"

namespace ephyspack {

using namespace detail;

GlobalMetadata make_global_metadata(const Container& c, std::string session_start) {
  GlobalMetadata meta;
  meta.format_version = c.superblock().version;
  meta.file_uuid = c.superblock().file_uuid.to_string();
  for (const auto& [k, v] : strip_prefix(c.attributes(kRootId), "id.")) {
    if (auto* s = std::get_if<std::string>(&v)) meta.identification.emplace(k, *s);
  }
  meta.session_start = std::move(session_start);
  return meta;
}

void write_global_metadata(Container& c, const GlobalMetadata& meta) {
  Reporter out(Reporter::Mode::kWriter);
  auto uuid = Uuid::parse(meta.file_uuid);
  if (!uuid) out.report("G002", "/global", "file_uuid '" + meta.file_uuid + "' is not a UUID");
  if (!(*uuid == c.superblock().file_uuid)) {
    out.report("G003", "/global", "file_uuid differs from the superblock UUID " +
                                      c.superblock().file_uuid.to_string());
  }
  if (!(meta.format_version == c.superblock().version)) {
    out.report("G004", "/global", "format version differs from the superblock");
  }
  if (!is_iso8601_with_offset(meta.session_start)) {
    out.report("G005", "/global",
               "session_start '" + meta.session_start + "' is not ISO 8601 with a zone offset");
  }
  transactional(c, [&] {
    ObjectId g = c.create_group(kRootId, kGlobalGroup);
    c.set_attribute(g, "format_major", std::uint64_t{meta.format_version.major});
    c.set_attribute(g, "format_minor", std::uint64_t{meta.format_version.minor});
    c.set_attribute(g, "file_uuid", uuid->to_string());
    c.set_attribute(g, "session_start", meta.session_start);
    for (const auto& [k, v] : meta.identification) c.set_attribute(kRootId, "id." + k, v);
    ensure_layout(c);
  });
}

GlobalMetadata read_global_metadata(ReadContext& ctx) {
  const Container& c = ctx.c;
  auto g = c.find_child(kRootId, kGlobalGroup);
  if (!g || c.kind(*g) != ObjectKind::kGroup) ctx.out.fatal("G001", "/global", "missing /global group");
  GlobalMetadata meta;
  auto major = opt_attr<std::uint64_t>(ctx, *g, "format_major");
  auto minor = opt_attr<std::uint64_t>(ctx, *g, "format_minor");
  if (!major || !minor) {
    ctx.out.report("G004", "/global", "format_major/format_minor attributes missing");
  } else {
    meta.format_version = {static_cast<std::uint16_t>(*major), static_cast<std::uint16_t>(*minor)};
    if (*major != c.superblock().version.major || *minor != c.superblock().version.minor) {
      ctx.out.report("G004", "/global",
                     "format version " + std::to_string(*major) + "." + std::to_string(*minor) +
                         " differs from superblock " +
                         std::to_string(c.superblock().version.major) + "." +
                         std::to_string(c.superblock().version.minor));
    }
  }
  auto uuid_text = c.find_attribute(*g, "file_uuid");
  const std::string* uuid_str = uuid_text ? std::get_if<std::string>(&*uuid_text) : nullptr;
  std::optional<Uuid> uuid = uuid_str ? Uuid::parse(*uuid_str) : std::nullopt;
  if (!uuid) {
    ctx.out.report("G002", "/global", "file_uuid attribute is missing or not a UUID string");
  } else {
    meta.file_uuid = uuid->to_string();
    if (!(*uuid == c.superblock().file_uuid)) {
      ctx.out.report("G003", "/global",
                     "file_uuid " + meta.file_uuid + " differs from superblock " +
                         c.superblock().file_uuid.to_string());
    }
  }
  auto start = c.find_attribute(*g, "session_start");
  const std::string* start_str = start ? std::get_if<std::string>(&*start) : nullptr;
  if (!start_str || !is_iso8601_with_offset(*start_str)) {
    ctx.out.report("G005", "/global", "session_start is missing or lacks a zone offset");
  } else {
    meta.session_start = *start_str;
  }
  for (const auto& [k, v] : strip_prefix(c.attributes(kRootId), "id.")) {
    if (auto* s = std::get_if<std::string>(&v)) {
      meta.identification.emplace(k, *s);
    } else {
      ctx.out.report("G006", "/", "identification attribute 'id." + k + "' is not a string");
    }
  }
  return meta;
}

GlobalMetadata read_global_metadata(const Container& c) {
  Reporter out(Reporter::Mode::kReader);
  ReadContext ctx{c, out};
  return read_global_metadata(ctx);
}

}  // namespace ephyspack
