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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ephyspack/container.h"
#include "ephyspack/csv.h"
#include "ephyspack/ingest.h"
#include "ephyspack/isotime.h"
#include "ephyspack/model.h"
#include "ephyspack/rules.h"
#include "json.hpp"

namespace ephyspack {
namespace {

using json = nlohmann::json;

const std::set<std::string, std::less<>>& known_kinds() {
  static const std::set<std::string, std::less<>> kinds = {
      "Global", "Source", "TimeSeries", "SignalEvents", "ExperimentalEvents",
      "GenericArray", "DerivedFrom", "Grouping"};
  return kinds;
}

AttrValue attr_from_json(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) return v.get<double>();
  if (v.is_array()) {
    if (std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); })) {
      return v.get<std::vector<std::string>>();
    }
    if (std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
      return v.get<std::vector<double>>();
    }
  }
  throw Error(Errc::kManifestError, where + ": unsupported parameter value " + v.dump());
}

class Entry {
 public:
  explicit Entry(const ManifestEntry& e, std::string file) : e_(e), file_(std::move(file)) {}

  [[noreturn]] void missing(std::string_view field, std::string_view rule = {}) const {
    std::string msg = where() + ": " + e_.kind + " needs '" + std::string(field) + "'";
    if (const RuleInfo* r = rule.empty() ? nullptr : find_rule(rule)) msg += " (" + std::string(r->clause) + ")";
    throw Error(Errc::kManifestError, msg);
  }
  [[noreturn]] void bad(std::string_view field, std::string_view why) const {
    throw Error(Errc::kManifestError, where() + ": '" + std::string(field) + "' " + std::string(why));
  }
  std::string where() const { return file_ + ":" + std::to_string(e_.line); }

  const AttrValue* param(std::string_view key) const {
    auto it = e_.params.find(std::string(key));
    return it == e_.params.end() ? nullptr : &it->second;
  }
  std::optional<double> number(std::string_view key) const {
    const AttrValue* v = param(key);
    if (!v) return std::nullopt;
    if (auto* d = std::get_if<double>(v)) return *d;
    if (auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
    if (auto* u = std::get_if<std::uint64_t>(v)) return static_cast<double>(*u);
    bad(key, "must be a number");
  }
  std::optional<std::string> text(std::string_view key) const {
    const AttrValue* v = param(key);
    if (!v) return std::nullopt;
    if (auto* s = std::get_if<std::string>(v)) return *s;
    bad(key, "must be a string");
  }
  std::optional<std::vector<std::string>> texts(std::string_view key) const {
    const AttrValue* v = param(key);
    if (!v) return std::nullopt;
    if (auto* s = std::get_if<std::vector<std::string>>(v)) return *s;
    if (auto* s = std::get_if<std::string>(v)) return std::vector<std::string>{*s};
    if (auto* d = std::get_if<std::vector<double>>(v); d && d->empty()) return std::vector<std::string>{};
    bad(key, "must be a string list");
  }
  std::string req_text(std::string_view key, std::string_view rule = {}) const {
    auto v = text(key);
    if (!v) missing(key, rule);
    return *v;
  }
  std::vector<std::string> req_texts(std::string_view key, std::string_view rule = {}) const {
    auto v = texts(key);
    if (!v) missing(key, rule);
    return *v;
  }

  const std::vector<std::string>* mapping(std::string_view key) const {
    auto it = e_.mapping.find(std::string(key));
    return it == e_.mapping.end() ? nullptr : &it->second;
  }
  std::vector<std::string> req_mapping(std::string_view key, std::string_view rule = {}) const {
    const auto* m = mapping(key);
    if (!m || m->empty()) missing("mapping." + std::string(key), rule);
    return *m;
  }

  const CsvTable& table() const {
    if (!table_) {
      if (e_.file.empty()) missing("file");
      table_ = read_csv(e_.file, e_.header);
    }
    return *table_;
  }
  std::vector<double> column(std::string_view name) const {
    const CsvTable& t = table();
    const std::size_t col = t.column(name);
    std::vector<double> out(t.rows.size());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = t.number(r, col);
    return out;
  }

  const ManifestEntry& raw() const { return e_; }

 private:
  const ManifestEntry& e_;
  std::string file_;
  mutable std::optional<CsvTable> table_;
};

std::string entity_name(const Entry& e) {
  if (e.raw().name.empty()) e.missing("name");
  return e.raw().name;
}

void import_source(Container& c, const Entry& e) {
  SignalSource s;
  s.source_id = entity_name(e);
  const std::string kind = e.req_text("source_kind", "S001");
  auto parsed = parse_source_kind(kind);
  if (!parsed) e.bad("source_kind", "is not a known source kind");
  s.kind = *parsed;
  s.parent = e.text("parent");
  if (const AttrValue* p = e.param("position")) {
    auto* v = std::get_if<std::vector<double>>(p);
    if (!v || v->size() != 3) e.bad("position", "must be three numbers");
    s.position = std::array<double, 3>{(*v)[0], (*v)[1], (*v)[2]};
  }
  for (const auto& [k, v] : e.raw().params) {
    if (k != "source_kind" && k != "parent" && k != "position") s.static_meta[k] = v;
  }
  add_source(c, s);
}

void import_time_series(Container& c, const Entry& e) {
  TimeSeries ts;
  ts.name = entity_name(e);
  ts.label = e.text("label").value_or(ts.name);
  const auto cols = e.req_mapping("values", "T001");
  if (auto units = e.texts("units"); units && units->size() > 1) {
    ts.unit = *units;
  } else {
    ts.unit = e.req_text("unit", "T001");
  }
  ts.sources = e.req_texts("sources", "T007");
  std::vector<std::vector<double>> columns;
  for (const auto& name : cols) columns.push_back(e.column(name));
  const std::uint64_t n = columns.empty() ? 0 : columns[0].size();
  std::vector<double> values(n * columns.size());
  for (std::size_t ch = 0; ch < columns.size(); ++ch) {
    for (std::uint64_t r = 0; r < n; ++r) values[r * columns.size() + ch] = columns[ch][r];
  }
  ts.values = make_tensor<double>({n, columns.size()}, values);
  if (const auto* time = e.mapping("time"); time && !time->empty()) {
    auto t = e.column(time->front());
    ts.start_time = e.number("start_time").value_or(t.empty() ? 0.0 : t.front());
    ts.duration = e.number("duration").value_or(t.empty() ? 0.0 : t.back() - ts.start_time);
    ts.sampling = IrregularSampling{std::move(t)};
  } else {
    auto rate = e.number("rate_hz");
    if (!rate) e.missing("rate_hz or mapping.time", "T005");
    ts.start_time = e.number("start_time").value_or(0.0);
    ts.duration = e.number("duration").value_or(static_cast<double>(n) / *rate);
    ts.sampling = RegularSampling{*rate, {}};
  }
  write_time_series(c, ts);
}

void import_signal_events(Container& c, const Entry& e) {
  SignalEvents ev;
  ev.name = entity_name(e);
  ev.label = e.text("label").value_or(ev.name);
  ev.event_times = e.column(e.req_mapping("time", "E001").front());
  ev.source_channels = e.req_texts("sources", "E007");
  ev.detection_description = e.req_text("detection_description");
  ev.start_time = e.number("start_time").value_or(0.0);
  ev.duration = e.number("duration").value_or(
      ev.event_times.empty() ? 0.0 : ev.event_times.back() - ev.start_time);
  if (auto type = e.text("trigger_type")) {
    auto threshold = e.number("trigger_threshold");
    if (!threshold) e.missing("trigger_threshold", "E009");
    ev.trigger = Trigger{*type, *threshold, e.req_text("trigger_unit", "E009")};
  }
  write_signal_events(c, ev);
}

void import_experimental_events(Container& c, const Entry& e) {
  ExperimentalEvents ev;
  ev.name = entity_name(e);
  ev.label = e.text("label").value_or(ev.name);
  ev.description = e.req_text("description", "X005");
  ev.event_times = e.column(e.req_mapping("time", "X001").front());
  ev.monitor_start = e.number("monitor_start").value_or(ev.event_times.empty() ? 0.0 : ev.event_times.front());
  ev.monitor_end = e.number("monitor_end").value_or(ev.event_times.empty() ? 0.0 : ev.event_times.back());
  for (const auto& [key, cols] : e.raw().mapping) {
    if (key.rfind("property.", 0) != 0) continue;
    const std::string name = key.substr(9);
    if (cols.size() != 1) e.bad("mapping." + key, "must name exactly one column");
    const CsvTable& t = e.table();
    const std::size_t col = t.column(cols[0]);
    EventProperty p;
    std::vector<double> nums(t.rows.size());
    bool numeric = true;
    for (std::size_t r = 0; r < t.rows.size() && numeric; ++r) numeric = parse_f64(t.text(r, col), nums[r]);
    if (numeric) {
      p.values = std::move(nums);
    } else {
      std::vector<std::string> texts;
      for (std::size_t r = 0; r < t.rows.size(); ++r) texts.push_back(t.text(r, col));
      p.values = std::move(texts);
    }
    p.interpretation = e.req_text("interpretation." + name, "X005");
    p.unit = e.text("unit." + name);
    ev.properties[name] = std::move(p);
  }
  write_experimental_events(c, ev);
}

void import_generic_array(Container& c, const Entry& e) {
  GenericArray ga;
  ga.name = entity_name(e);
  ga.description = e.req_text("description", "A001");
  const auto cols = e.req_mapping("values");
  std::vector<std::vector<double>> columns;
  for (const auto& name : cols) columns.push_back(e.column(name));
  const std::uint64_t n = columns[0].size();
  std::vector<double> values(n * columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    for (std::uint64_t r = 0; r < n; ++r) values[r * columns.size() + k] = columns[k][r];
  }
  ga.data = make_tensor<double>({n, columns.size()}, values);
  const auto desc = e.req_texts("dim_descriptions", "A002");
  const auto units = e.texts("dim_units").value_or(std::vector<std::string>{});
  for (std::size_t d = 0; d < desc.size(); ++d) {
    DimDescription dd{desc[d], std::nullopt};
    if (d < units.size() && !units[d].empty()) dd.unit = units[d];
    ga.dims.push_back(std::move(dd));
  }
  ga.slice_headings[1] = cols;
  write_generic_array(c, ga);
}

void import_derivation(Container& c, const Entry& e) {
  DerivedFrom rel;
  rel.inputs = e.req_texts("inputs");
  rel.outputs = e.req_texts("outputs");
  rel.activity = e.req_text("activity", "R004");
  rel.agents = e.req_texts("agents", "R003");
  rel.timestamp = e.text("timestamp").value_or(IsoTime::now_utc().to_string());
  for (const auto& [k, v] : e.raw().params) {
    if (k.rfind("param.", 0) == 0) rel.params[k.substr(6)] = v;
  }
  add_derived_from(c, rel);
}

void import_grouping(Container& c, const Entry& e) {
  Grouping g;
  g.group_id = entity_name(e);
  g.label = e.text("label").value_or(g.group_id);
  g.members = e.req_texts("members", "R006");
  add_grouping(c, g);
}

void write_all_entries(Container& c, const std::vector<Entry>& entries) {
  for (const char* pass : {"Source", "payload", "DerivedFrom", "Grouping"}) {
    for (const auto& e : entries) {
      const std::string& kind = e.raw().kind;
      const bool payload = known_kinds().contains(kind) && kind != "Global" && kind != "Source" &&
                           kind != "DerivedFrom" && kind != "Grouping";
      if (std::string_view(pass) == "payload" ? !payload : kind != pass) continue;
      if (kind == "Source") {
        import_source(c, e);
      } else if (kind == "TimeSeries") {
        import_time_series(c, e);
      } else if (kind == "SignalEvents") {
        import_signal_events(c, e);
      } else if (kind == "ExperimentalEvents") {
        import_experimental_events(c, e);
      } else if (kind == "GenericArray") {
        import_generic_array(c, e);
      } else if (kind == "DerivedFrom") {
        import_derivation(c, e);
      } else if (kind == "Grouping") {
        import_grouping(c, e);
      } else {
        throw Error(Errc::kManifestError, e.where() + ": " + kind + " cannot be imported from text");
      }
    }
  }
}

}  // namespace

ImportManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                              std::string_view file) {
  ImportManifest m;
  m.file = std::string(file);
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = std::string(file) + ":" + std::to_string(lineno);
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(Errc::kParseError, where + ": not a JSON object");
    ManifestEntry e;
    e.line = lineno;
    for (const auto& [key, value] : j.items()) {
      if (key == "kind" && value.is_string()) {
        e.kind = value.get<std::string>();
      } else if (key == "name" && value.is_string()) {
        e.name = value.get<std::string>();
      } else if (key == "file" && value.is_string()) {
        std::filesystem::path p = value.get<std::string>();
        e.file = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
      } else if (key == "header" && value.is_boolean()) {
        e.header = value.get<bool>();
      } else if (key == "mapping" && value.is_object()) {
        for (const auto& [field, col] : value.items()) {
          std::vector<std::string> cols;
          for (const auto& c : col.is_array() ? col : json::array({col})) {
            if (c.is_string()) {
              cols.push_back(c.get<std::string>());
            } else if (c.is_number_unsigned()) {
              cols.push_back(std::to_string(c.get<std::uint64_t>()));
            } else {
              throw Error(Errc::kManifestError, where + ": mapping." + field + " must name columns");
            }
          }
          e.mapping[field] = std::move(cols);
        }
      } else if (key == "params" && value.is_object()) {
        for (const auto& [k, v] : value.items()) e.params[k] = attr_from_json(v, where);
      } else {
        throw Error(Errc::kManifestError, where + ": unexpected key '" + key + "'");
      }
    }
    if (!known_kinds().contains(e.kind)) {
      throw Error(Errc::kManifestError, where + ": unknown kind '" + e.kind + "'");
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

ImportManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoFailure, "cannot read " + path.string(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path(), path.string());
}

ValidationReport import_manifest(const ImportManifest& manifest, const std::filesystem::path& out_path,
                                 const ImportOptions& options) {
  std::vector<Entry> entries;
  const ManifestEntry* global = nullptr;
  for (const auto& e : manifest.entries) {
    entries.emplace_back(e, manifest.file);
    if (e.kind == "Global") global = &e;
  }
  if (global == nullptr) throw Error(Errc::kManifestError, manifest.file + ": a Global entry is required");
  const Entry g(*global, manifest.file);
  const std::string session_start = g.req_text("session_start", "G005");
  std::map<std::string, std::string> identification;
  for (const auto& [k, v] : global->params) {
    if (k != "session_start") identification[k] = attr_to_string(v);
  }
  CreateOptions create{options.file_uuid, options.created_time};
  bool created = false;
  try {
    {
      Container c = Container::create(out_path, identification, create);
      created = true;
      write_global_metadata(c, make_global_metadata(c, session_start));
      write_all_entries(c, entries);
      c.finalize();
    }
    return validate_file(out_path, {ValidationLevel::kFull, 1});
  } catch (...) {
    if (created) {
      std::error_code ec;
      std::filesystem::remove(out_path, ec);
    }
    throw;
  }
}

}  // namespace ephyspack
