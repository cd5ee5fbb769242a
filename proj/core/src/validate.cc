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

#include "ephyspack/validate.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "ephyspack/model.h"

namespace ephyspack {
namespace {

std::string_view open_failure_code(Errc code) {
  switch (code) {
    case Errc::kBadMagic:
      return "C001";
    case Errc::kUnsupportedVersion:
      return "C002";
    case Errc::kTruncatedFile:
      return "C004";
    case Errc::kCorruptSuperblock:
      return "C006";
    default:
      return "C003";
  }
}

// Runs one entity check, turning abandonment and container failures into
// findings.
template <typename Fn>
void guarded(Reporter& out, const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const EntityAbandoned&) {
  } catch (const Error& e) {
    if (e.code() == Errc::kChunkChecksumMismatch) {
      out.report("C005", e.path().empty() ? path : e.path(), e.what());
    } else {
      out.report("L005", path, e.what());
    }
  }
}

void check_layout(const Container& c, Reporter& out) {
  static const std::set<std::string, std::less<>> kRoot = {
      std::string(kGlobalGroup), std::string(kSourcesGroup), std::string(kDataGroup),
      std::string(kRelationsGroup), std::string(kExtGroup)};
  for (const auto& child : c.list_children(kRootId)) {
    if (!kRoot.contains(child.name)) {
      out.report("L002", "/" + child.name, "unexpected top-level object");
    } else if (child.kind != ObjectKind::kGroup) {
      out.report(child.name == kGlobalGroup ? "G001" : "L002", "/" + child.name,
                 "expected a group, found a dataset");
    }
  }
  for (auto name : {kSourcesGroup, kDataGroup, kRelationsGroup}) {
    if (!c.find_child(kRootId, name)) {
      out.report("L001", "/" + std::string(name), "required group is missing");
    }
  }
  if (auto rel = c.find_child(kRootId, kRelationsGroup); rel && c.kind(*rel) == ObjectKind::kGroup) {
    for (auto name : {kDerivedGroup, kGroupsGroup}) {
      if (!c.find_child(*rel, name)) {
        out.report("L001", "/relations/" + std::string(name), "required group is missing");
      }
    }
    for (const auto& child : c.list_children(*rel)) {
      if ((child.name != kDerivedGroup && child.name != kGroupsGroup) ||
          child.kind != ObjectKind::kGroup) {
        out.report("L002", "/relations/" + child.name, "unexpected object under /relations");
      }
    }
  }
  for (auto where : {"/sources", "/data", "/relations/derived", "/relations/groups"}) {
    auto id = c.try_resolve(where);
    if (!id || c.kind(*id) != ObjectKind::kGroup) continue;
    for (const auto& child : c.list_children(*id)) {
      if (child.kind != ObjectKind::kGroup) {
        out.report("L002", join_path(where, child.name), "expected a group, found a dataset");
      }
    }
  }
}

// All model-level checks. payload = false touches attributes and shapes only.
void check_model(const Container& c, bool payload, Reporter& out) {
  ReadContext ctx{c, out, payload};
  const ModelIndex index = build_index(c);
  guarded(out, "/global", [&] { read_global_metadata(ctx); });
  guarded(out, "/", [&] { check_layout(c, out); });

  for (const auto& [id, kind] : index.sources) {
    const std::string path = source_path(id);
    guarded(out, path, [&] { check_source(read_source(ctx, id), index, path, out); });
  }

  for (const auto& [path, rec] : index.entities) {
    guarded(out, path, [&] {
      if (!rec.kind) {
        out.report("L003", path, "entity_kind is missing or unknown");
        return;
      }
      switch (*rec.kind) {
        case EntityKind::kTimeSeries:
          check_time_series(read_time_series(ctx, path), index, path, out);
          break;
        case EntityKind::kSignalEvents:
          check_signal_events(read_signal_events(ctx, path), index, path, out);
          break;
        case EntityKind::kImageStack:
          check_image_stack(read_image_stack(ctx, path), index, path, out);
          break;
        case EntityKind::kExperimentalEvents:
          check_experimental_events(read_experimental_events(ctx, path), path, out);
          break;
        case EntityKind::kGenericArray:
          check_generic_array(read_generic_array(ctx, path), index, path, out);
          break;
      }
    });
  }
  if (index.entities.empty()) out.report("L006", "/data", "file holds no payload entities");

  std::vector<StoredDerivation> rels;
  if (auto derived = c.try_resolve("/relations/derived");
      derived && c.kind(*derived) == ObjectKind::kGroup) {
    for (const auto& entry : c.list_children(*derived)) {
      if (entry.kind != ObjectKind::kGroup) continue;
      const std::string path = "/relations/derived/" + entry.name;
      guarded(out, path, [&] {
        auto sd = read_derivation(ctx, entry.name);
        check_derivation(sd.rel, index, path, out);
        rels.push_back(std::move(sd));
      });
    }
  }
  if (payload) check_derivation_graph(rels, out);
  if (auto groups = c.try_resolve("/relations/groups");
      groups && c.kind(*groups) == ObjectKind::kGroup) {
    for (const auto& entry : c.list_children(*groups)) {
      if (entry.kind != ObjectKind::kGroup) continue;
      const std::string path = "/relations/groups/" + entry.name;
      guarded(out, path, [&] { check_grouping(read_grouping(ctx, entry.name), index, path, out); });
    }
  }
}

void verify_chunks(const Container& c, unsigned threads, Reporter& out) {
  const auto records = c.chunk_records();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(records.size(), 1));
  std::vector<std::optional<std::string>> failures(records.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      try {
        c.verify_chunk(records[i]);
      } catch (const Error& e) {
        failures[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (failures[i]) {
      std::string coord;
      for (auto v : records[i].coord) coord += (coord.empty() ? "" : ",") + std::to_string(v);
      out.report("C005", c.path_of(records[i].object_id), *failures[i],
                 AttrMap{{"coord", "[" + coord + "]"}});
    }
  }
}

ValidationReport finish(std::vector<Violation> violations, ValidationLevel level) {
  ValidationReport report;
  std::set<std::pair<std::string, std::string>> seen;
  for (auto& v : violations) {
    const RuleInfo* rule = find_rule(v.code);
    if (level == ValidationLevel::kFast && !rule->fast) continue;
    if (!seen.emplace(v.path, v.code).second) continue;
    report.findings.push_back(
        {rule->severity, std::move(v.code), std::move(v.path), std::move(v.message), std::move(v.detail)});
  }
  std::stable_sort(report.findings.begin(), report.findings.end(),
                   [](const Finding& a, const Finding& b) {
                     return std::tie(a.path, a.code) < std::tie(b.path, b.code);
                   });
  for (const auto& f : report.findings) {
    switch (f.severity) {
      case Severity::kError:
        ++report.errors;
        break;
      case Severity::kWarning:
        ++report.warnings;
        break;
      case Severity::kInfo:
        ++report.infos;
        break;
    }
  }
  for (const auto& r : rule_catalog()) {
    report.checked_rules += level == ValidationLevel::kFull || r.fast;
  }
  return report;
}

}  // namespace

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(findings.begin(), findings.end(),
                     [&](const Finding& f) { return f.code == code; });
}

ValidationReport validate_container(const Container& c, const ValidateOptions& options) {
  // The metadata-only pass runs in both modes so that a payload failure in
  // Full mode cannot hide a finding Fast mode would report.
  Reporter shallow(Reporter::Mode::kCollect);
  check_model(c, false, shallow);
  std::vector<Violation> found;
  for (auto& v : shallow.take()) {
    if (find_rule(v.code)->fast) found.push_back(std::move(v));
  }
  if (options.level == ValidationLevel::kFull) {
    Reporter deep(Reporter::Mode::kCollect);
    check_model(c, true, deep);
    verify_chunks(c, options.threads, deep);
    for (auto& v : deep.take()) found.push_back(std::move(v));
  }
  return finish(std::move(found), options.level);
}

ValidationReport validate_file(const std::filesystem::path& path, const ValidateOptions& options) {
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe || std::filesystem::is_directory(path)) {
      throw Error(Errc::kIoFailure, "cannot read " + path.string(), path.string());
    }
  }
  std::optional<Container> c;
  try {
    c.emplace(Container::open(path));
  } catch (const Error& e) {
    if (e.code() == Errc::kIoFailure) throw;
    Reporter out(Reporter::Mode::kCollect);
    out.report(open_failure_code(e.code()), "/", e.what());
    return finish(out.take(), options.level);
  }
  return validate_container(*c, options);
}

std::string format_finding(const Finding& f) {
  return std::string(severity_name(f.severity)) + " " + f.code + " " + f.path + " — " + f.message;
}

}  // namespace ephyspack
