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

#ifndef EPHYSPACK_INGEST_H_
#define EPHYSPACK_INGEST_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ephyspack/types.h"
#include "ephyspack/uuid.h"
#include "ephyspack/validate.h"

namespace ephyspack {

// ---- import ---------------------------------------------------------------

// One manifest line. kind is an entity kind name, "Global" or "Source".
// mapping values name CSV columns by header or by 0-based position; a JSON
// array maps several columns.
struct ManifestEntry {
  std::string kind;
  std::string name;
  std::filesystem::path file;  // resolved against the manifest directory
  bool header = true;
  std::map<std::string, std::vector<std::string>> mapping;
  AttrMap params;
  std::size_t line = 0;
};

struct ImportManifest {
  std::vector<ManifestEntry> entries;
  std::string file = "<memory>";  // used in error locations
};

// Throws ParseError on malformed JSON lines, ManifestError on unknown keys.
ImportManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {},
                              std::string_view file = "<memory>");
ImportManifest read_manifest(const std::filesystem::path& path);

struct ImportOptions {
  std::optional<Uuid> file_uuid;
  std::optional<std::string> created_time;
};

// Writes out_path through the model writers, finalizes it and returns the
// full validation report. The output file is removed when import fails.
ValidationReport import_manifest(const ImportManifest& manifest, const std::filesystem::path& out_path,
                                 const ImportOptions& options = {});

// ---- synthetic sessions ---------------------------------------------------

enum class AssignmentMode { kExclusive, kMulti, kProbabilistic };

std::string_view assignment_mode_label(AssignmentMode mode);
std::optional<AssignmentMode> parse_assignment_mode(std::string_view text);

struct GenSpec {
  std::uint64_t seed = 1;
  std::uint32_t n_channels = 4;
  std::uint32_t n_units = 3;
  double duration_s = 2.0;
  double rate_hz = 1000.0;
  bool with_image_stack = true;
  bool with_irregular = true;
  AssignmentMode assignment_mode = AssignmentMode::kExclusive;
};

struct GenOptions {
  // Fixed created_time for byte-identical output; defaults to now.
  std::optional<std::string> created_time;
};

struct GenManifest {
  std::vector<std::string> entities;     // payload entity paths, sorted
  std::vector<std::string> sources;      // source ids, sorted
  std::vector<std::string> derivations;  // rel ids
  std::vector<std::string> groupings;    // group ids
};

// Throws InvalidArgument for non-positive duration or rate, zero channels or
// sizes that would not fit in memory.
void check_gen_spec(const GenSpec& spec);
GenManifest generate_session(const GenSpec& spec, const std::filesystem::path& out_path,
                             const GenOptions& options = {});

// ---- mutation corpus ------------------------------------------------------

struct MutationInfo {
  std::string id;
  std::string rule;  // code the mutation must trigger
  std::string description;
};

// Sorted by id; every catalog rule has at least one entry.
const std::vector<MutationInfo>& mutation_catalog();

// Copies in_path to out_path with one injected fault. Throws UnknownMutation
// or MutationNotApplicable when the input lacks the target.
void mutate_for_test(const std::filesystem::path& in_path, std::string_view mutation_id,
                     const std::filesystem::path& out_path);

}  // namespace ephyspack

#endif  // EPHYSPACK_INGEST_H_
