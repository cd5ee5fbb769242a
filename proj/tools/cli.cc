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

#include "cli.h"

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "CLI11.hpp"
#include "ephyspack/container.h"
#include "ephyspack/ingest.h"
#include "ephyspack/isotime.h"
#include "ephyspack/jsonl.h"
#include "ephyspack/model.h"
#include "ephyspack/query.h"
#include "ephyspack/rules.h"
#include "ephyspack/validate.h"
#include "json.hpp"

namespace ephyspack::cli {
namespace {

enum class Format { kText, kJsonl };

std::string num(double v) { return attr_to_string(AttrValue(v)); }

std::string join(const std::vector<std::string>& v, std::string_view sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::string dims_text(const Extent& e) {
  std::string out;
  for (std::size_t i = 0; i < e.size(); ++i) out += (i ? "x" : "") + std::to_string(e[i]);
  return out.empty() ? "-" : out;
}

std::string attrs_text(const AttrMap& a) {
  std::vector<std::string> parts;
  for (const auto& [k, v] : a) parts.push_back(k + "=" + attr_to_string(v));
  return join(parts, " ");
}

Extent parse_extent(const std::string& text, std::string_view flag) {
  Extent out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != item.size() || item.empty() || item[0] == '-') {
      throw CLI::ValidationError(std::string(flag), "expected comma-separated non-negative integers");
    }
    out.push_back(v);
  }
  return out;
}

class Printer {
 public:
  Printer(Streams s, Format f) : s_(s), f_(f) {}
  bool jsonl() const { return f_ == Format::kJsonl; }
  std::ostream& out() { return s_.out; }

  std::string time_text(std::optional<double> t, const std::optional<std::string>& session_start) const {
    if (!t) return "-";
    std::string text = num(*t) + " s";
    if (session_start) {
      if (auto iso = resolve_time(*session_start, *t)) text += " (" + *iso + ")";
    }
    return text;
  }

  std::string severity(Severity sev) const {
    std::string name(severity_name(sev));
    if (!s_.color) return name;
    const char* code = sev == Severity::kError ? "31" : sev == Severity::kWarning ? "33" : "36";
    return std::string("\x1b[") + code + "m" + name + "\x1b[0m";
  }

  void finding(const Finding& f) {
    if (jsonl()) {
      s_.out << to_json(f) << '\n';
      return;
    }
    s_.out << severity(f.severity) << ' ' << f.code << ' ' << f.path << " — " << f.message;
    if (!f.detail.empty()) s_.out << " [" << attrs_text(f.detail) << ']';
    s_.out << '\n';
  }

  int report(const ValidationReport& r) {
    for (const auto& f : r.findings) finding(f);
    if (!jsonl()) {
      s_.out << r.errors << " error(s), " << r.warnings << " warning(s), " << r.infos << " info(s); "
             << r.checked_rules << " rules checked\n";
    }
    return r.has_errors() ? kExitFindings : kExitOk;
  }

  void entry(const InventoryEntry& e, const std::optional<std::string>& session_start) {
    if (jsonl()) {
      s_.out << to_json(e, session_start) << '\n';
      return;
    }
    s_.out << e.path << '\t' << inventory_kind_name(e.kind) << '\t' << dims_text(e.dims) << "\tstart="
           << time_text(e.start_time, session_start) << "\tduration=" << (e.duration ? num(*e.duration) + " s" : "-")
           << '\n';
  }

  void record(const ProvenanceRecord& r) {
    if (jsonl()) {
      s_.out << to_json(r) << '\n';
      return;
    }
    s_.out << r.rel_id << "\t[" << join(r.rel.inputs) << "] -> [" << join(r.rel.outputs) << "]\tactivity=\""
           << r.rel.activity << "\"\tagents=[" << join(r.rel.agents) << "]\t" << r.rel.timestamp;
    if (!r.rel.params.empty()) s_.out << '\t' << attrs_text(r.rel.params);
    s_.out << '\n';
  }

 private:
  Streams s_;
  Format f_;
};

std::optional<std::string> session_start_of(const Container& c) {
  try {
    auto meta = read_global_metadata(c);
    if (IsoTime::parse(meta.session_start)) return meta.session_start;
  } catch (const Error&) {
  }
  return std::nullopt;
}

struct Options {
  std::string format = "text";
  std::string file;
  std::string path;
  std::string out;
  // info
  bool related = false;
  // ls
  std::string source;
  bool descendants = false;
  // validate
  bool fast = false;
  unsigned threads = 0;
  bool rules = false;
  // slice
  std::string offset;
  std::string extent;
  // prov
  bool up = false;
  bool down = false;
  std::string search;
  // create
  std::string session_start;
  std::vector<std::string> ids;
  // gen
  GenSpec gen;
  std::string mode = "exclusive";
  bool no_stack = false;
  bool no_irregular = false;
  std::string created_time;
  // mutate
  std::string mutation;
  bool list = false;
};

Format format_of(const Options& o) { return o.format == "jsonl" ? Format::kJsonl : Format::kText; }

int cmd_create(const Options& o, Streams s) {
  std::map<std::string, std::string> ids;
  for (const auto& kv : o.ids) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--id", "expected key=value");
    ids[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  Container c = Container::create(o.file, ids);
  const std::string start = o.session_start.empty() ? IsoTime::now_utc().to_string() : o.session_start;
  write_global_metadata(c, make_global_metadata(c, start));
  ensure_layout(c);
  c.finalize();
  s.err << "created " << o.file << '\n';
  return kExitOk;
}

int cmd_import(const Options& o, Streams s) {
  Printer p(s, format_of(o));
  return p.report(import_manifest(read_manifest(o.file), o.out));
}

int cmd_info(const Options& o, Streams s) {
  Printer p(s, format_of(o));
  const Container c = Container::open(o.file);
  const auto start = session_start_of(c);
  if (o.path.empty()) {
    const GlobalMetadata meta = read_global_metadata(c);
    if (p.jsonl()) {
      s.out << to_json(meta) << '\n';
      return kExitOk;
    }
    s.out << "format_version: " << meta.format_version.major << '.' << meta.format_version.minor << '\n'
          << "file_uuid: " << meta.file_uuid << '\n'
          << "created_time: " << c.superblock().created_time << '\n'
          << "session_start: " << meta.session_start << '\n';
    for (const auto& [k, v] : meta.identification) s.out << "id." << k << ": " << v << '\n';
    return kExitOk;
  }
  const EntityMetadata m = entity_metadata(c, o.path);
  if (p.jsonl()) {
    s.out << to_json(m, start) << '\n';
  } else {
    const auto& e = m.summary;
    s.out << "path: " << e.path << '\n'
          << "kind: " << inventory_kind_name(e.kind) << '\n'
          << "dims: " << dims_text(e.dims) << '\n'
          << "start_time: " << p.time_text(e.start_time, start) << '\n'
          << "duration: " << (e.duration ? num(*e.duration) + " s" : "-") << '\n'
          << "units: " << join(m.units) << '\n'
          << "sources: " << join(m.sources) << '\n'
          << "derivations: " << join(m.derivations) << '\n'
          << "groupings: " << join(m.groupings) << '\n';
    for (const auto& [k, v] : m.attributes) s.out << "attr " << k << " = " << attr_to_string(v) << '\n';
  }
  if (o.related) {
    for (const auto& r : related_entities(c, o.path)) {
      if (p.jsonl()) {
        s.out << to_json(r) << '\n';
      } else {
        s.out << "related " << r.path << ' ' << relation_kind_name(r.kind) << ' '
              << relation_direction_name(r.direction) << ' ' << r.via << '\n';
      }
    }
  }
  return kExitOk;
}

int cmd_ls(const Options& o, Streams s) {
  Printer p(s, format_of(o));
  const Container c = Container::open(o.file);
  if (!o.source.empty()) {
    for (const auto& path : entities_by_source(c, o.source, o.descendants)) {
      if (p.jsonl()) {
        s.out << nlohmann::json{{"path", path}}.dump() << '\n';
      } else {
        s.out << path << '\n';
      }
    }
    return kExitOk;
  }
  const auto start = session_start_of(c);
  for (const auto& e : inventory(c)) p.entry(e, start);
  return kExitOk;
}

int cmd_validate(const Options& o, Streams s) {
  Printer p(s, format_of(o));
  if (o.rules) {
    for (const auto& r : rule_catalog()) {
      if (p.jsonl()) {
        s.out << nlohmann::json{{"code", r.code},
                                {"severity", std::string(severity_name(r.severity))},
                                {"description", r.description},
                                {"clause", r.clause},
                                {"fast", r.fast}}
                     .dump()
              << '\n';
      } else {
        s.out << r.code << '\t' << severity_name(r.severity) << '\t' << r.description << "\t(" << r.clause
              << ")\n";
      }
    }
    return kExitOk;
  }
  if (o.file.empty()) throw CLI::RequiredError("FILE");
  ValidateOptions vo{o.fast ? ValidationLevel::kFast : ValidationLevel::kFull, o.threads};
  return p.report(validate_file(o.file, vo));
}

int cmd_slice(const Options& o, Streams s) {
  Printer p(s, format_of(o));
  const Container c = Container::open(o.file);
  const Extent dims = entity_metadata(c, o.path).summary.dims;
  Extent offset = parse_extent(o.offset, "--offset");
  Extent extent = parse_extent(o.extent, "--extent");
  if (offset.empty()) offset.assign(dims.size(), 0);
  if (extent.empty()) {
    for (std::size_t d = 0; d < dims.size() && d < offset.size(); ++d) {
      extent.push_back(offset[d] < dims[d] ? dims[d] - offset[d] : 0);
    }
  }
  const ArrayData data = read_region(c, o.path, offset, extent);
  if (p.jsonl()) {
    nlohmann::json j = {{"path", o.path}, {"offset", offset}, {"extent", extent}};
    j["values"] = nlohmann::json::parse(to_json(data));
    s.out << j.dump() << '\n';
    return kExitOk;
  }
  std::visit(
      [&](const auto& v) {
        for (const auto& x : v) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_floating_point_v<T>) {
            s.out << num(static_cast<double>(x)) << '\n';
          } else if constexpr (std::is_same_v<T, std::string>) {
            s.out << x << '\n';
          } else {
            s.out << +x << '\n';
          }
        }
      },
      data);
  return kExitOk;
}

int cmd_prov(const Options& o, Streams s) {
  Printer p(s, format_of(o));
  const Container c = Container::open(o.file);
  std::vector<ProvenanceRecord> records;
  if (!o.search.empty() || o.path.empty()) {
    if (!o.path.empty()) throw CLI::ValidationError("--search", "cannot be combined with PATH");
    records = search_provenance(c, o.search);
  } else {
    if (o.up && o.down) throw CLI::ValidationError("--up", "excludes --down");
    records = derivation_chain(c, o.path, o.down ? ChainDirection::kDescendants : ChainDirection::kAncestors);
  }
  for (const auto& r : records) p.record(r);
  return kExitOk;
}

int cmd_groups(const Options& o, Streams s) {
  Printer p(s, format_of(o));
  const Container c = Container::open(o.file);
  if (o.path.empty()) {
    for (const auto& g : list_groupings(c)) {
      if (p.jsonl()) {
        s.out << to_json(g) << '\n';
      } else {
        s.out << g.group_id << "\t\"" << g.label << "\"\t" << g.member_count << " member(s)\n";
      }
    }
    return kExitOk;
  }
  for (const auto& m : grouping_members(c, o.path)) {
    if (p.jsonl()) {
      s.out << to_json(m) << '\n';
    } else {
      s.out << m.path << '\t' << (m.entry ? inventory_kind_name(m.entry->kind) : "?") << '\t'
            << (m.overrides.empty() ? "-" : attrs_text(m.overrides)) << '\n';
    }
  }
  return kExitOk;
}

int cmd_gen(const Options& o, Streams s) {
  GenSpec spec = o.gen;
  spec.assignment_mode = *parse_assignment_mode(o.mode);
  spec.with_image_stack = !o.no_stack;
  spec.with_irregular = !o.no_irregular;
  GenOptions go;
  if (!o.created_time.empty()) go.created_time = o.created_time;
  const GenManifest m = generate_session(spec, o.out, go);
  for (const auto& e : m.entities) s.out << e << '\n';
  s.err << "wrote " << o.out << '\n';
  return kExitOk;
}

int cmd_mutate(const Options& o, Streams s) {
  if (o.list) {
    for (const auto& m : mutation_catalog()) s.out << m.id << '\t' << m.rule << '\t' << m.description << '\n';
    return kExitOk;
  }
  if (o.file.empty() || o.mutation.empty() || o.out.empty()) {
    throw CLI::ValidationError("mutate", "FILE, --id and --out are required");
  }
  mutate_for_test(o.file, o.mutation, o.out);
  s.err << "wrote " << o.out << '\n';
  return kExitOk;
}

int exit_for(Errc code) {
  switch (code) {
    case Errc::kNoSuchEntity:
    case Errc::kNoSuchSource:
    case Errc::kNoSuchGroup:
    case Errc::kNoSuchObject:
      return kExitFindings;
    default:
      return kExitUsage;
  }
}

}  // namespace

bool color_enabled_for_stdout() { return std::getenv("EPHYSPACK_NO_COLOR") == nullptr && isatty(STDOUT_FILENO); }

int run(const std::vector<std::string>& args, Streams streams) {
  CLI::App app{"Inspect, validate and generate ephyspack container files", "ephyspack"};
  app.require_subcommand(1, 1);
  Options o;
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "jsonl"}));
  };

  auto* create = app.add_subcommand("create", "Create an empty, valid container");
  create->add_option("FILE", o.file)->required();
  create->add_option("--session-start", o.session_start, "ISO 8601 time with offset (default: now)");
  create->add_option("--id", o.ids, "Identification entry key=value (repeatable)");

  auto* import = app.add_subcommand("import", "Import CSV data described by a JSONL manifest");
  import->add_option("MANIFEST", o.file)->required();
  import->add_option("--out", o.out)->required();
  add_format(import);

  auto* info = app.add_subcommand("info", "Global metadata, or metadata of one entity");
  info->add_option("FILE", o.file)->required();
  info->add_option("PATH", o.path);
  info->add_flag("--related", o.related, "Also list related entities");
  add_format(info);

  auto* ls = app.add_subcommand("ls", "Inventory of entities, sources and relationships");
  ls->add_option("FILE", o.file)->required();
  ls->add_option("--source", o.source, "Only entities recorded with this source");
  ls->add_flag("--descendants", o.descendants, "Include the source's subtree");
  add_format(ls);

  auto* validate = app.add_subcommand("validate", "Structural validation report");
  validate->add_option("FILE", o.file);
  validate->add_flag("--fast", o.fast, "Skip chunk payloads");
  validate->add_option("--threads", o.threads, "Checksum workers (0 = auto)");
  validate->add_flag("--rules", o.rules, "Print the rule catalog instead");
  add_format(validate);

  auto* slice = app.add_subcommand("slice", "Read a region of an entity's principal dataset");
  slice->add_option("FILE", o.file)->required();
  slice->add_option("PATH", o.path)->required();
  slice->add_option("--offset", o.offset, "Comma-separated start per dimension");
  slice->add_option("--extent", o.extent, "Comma-separated count per dimension");
  add_format(slice);

  auto* prov = app.add_subcommand("prov", "Derivation chains and provenance search");
  prov->add_option("FILE", o.file)->required();
  prov->add_option("PATH", o.path);
  prov->add_flag("--up", o.up, "Ancestors (default)");
  prov->add_flag("--down", o.down, "Descendants");
  prov->add_option("--search", o.search, "Case-insensitive substring");
  add_format(prov);

  auto* groups = app.add_subcommand("groups", "Groupings, or the members of one");
  groups->add_option("FILE", o.file)->required();
  groups->add_option("GROUP_ID", o.path);
  add_format(groups);

  auto* gen = app.add_subcommand("gen", "Generate a deterministic synthetic session");
  gen->add_option("--seed", o.gen.seed)->required();
  gen->add_option("--out", o.out)->required();
  gen->add_option("--channels", o.gen.n_channels);
  gen->add_option("--units", o.gen.n_units);
  gen->add_option("--duration", o.gen.duration_s, "Seconds");
  gen->add_option("--rate", o.gen.rate_hz, "Hz");
  gen->add_option("--mode", o.mode, "Unit assignment mode")
      ->check(CLI::IsMember({"exclusive", "multi", "probabilistic"}));
  gen->add_flag("--no-image-stack", o.no_stack);
  gen->add_flag("--no-irregular", o.no_irregular);
  gen->add_option("--created-time", o.created_time, "Fixed superblock created_time");

  auto* mutate = app.add_subcommand("mutate", "Inject one registered fault (test harness)");
  mutate->add_option("FILE", o.file);
  mutate->add_option("--id", o.mutation);
  mutate->add_option("--out", o.out);
  mutate->add_flag("--list", o.list, "List registered mutations");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (create->parsed()) return cmd_create(o, streams);
    if (import->parsed()) return cmd_import(o, streams);
    if (info->parsed()) return cmd_info(o, streams);
    if (ls->parsed()) return cmd_ls(o, streams);
    if (validate->parsed()) return cmd_validate(o, streams);
    if (slice->parsed()) return cmd_slice(o, streams);
    if (prov->parsed()) return cmd_prov(o, streams);
    if (groups->parsed()) return cmd_groups(o, streams);
    if (gen->parsed()) return cmd_gen(o, streams);
    if (mutate->parsed()) return cmd_mutate(o, streams);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, streams.out, streams.err);
    if (code == 0) return kExitOk;
    streams.err << app.help("", CLI::AppFormatMode::Normal);
    return kExitUsage;
  } catch (const Error& e) {
    streams.err << "error: " << e.what() << '\n';
    return exit_for(e.code());
  } catch (const std::exception& e) {
    streams.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace ephyspack::cli
