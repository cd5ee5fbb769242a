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

#include "model_internal.h"

namespace ephyspack {

using namespace detail;

void check_experimental_events(const ExperimentalEvents& ev, const std::string& path,
                               Reporter& out) {
  if (!finite(ev.monitor_start) || !finite(ev.monitor_end) || ev.monitor_start > ev.monitor_end) {
    out.report("X003", path, "monitoring window [" + fmt(ev.monitor_start) + ", " +
                                 fmt(ev.monitor_end) + "] is invalid");
  }
  if (ev.description.empty()) out.report("X005", path, "event description is empty");
  const auto& t = ev.event_times;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!finite(t[k]) || (k > 0 && t[k] < t[k - 1])) {
      out.report("X001", path, "event times decrease at index " + std::to_string(k),
                 detail_index(k));
      break;
    }
  }
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < ev.monitor_start || t[k] > ev.monitor_end) {
      out.report("X002", path,
                 "event " + std::to_string(k) + " at " + fmt(t[k]) + " outside [" +
                     fmt(ev.monitor_start) + ", " + fmt(ev.monitor_end) + "]",
                 detail_index(k));
      break;
    }
  }
  for (const auto& [name, prop] : ev.properties) {
    const std::string where = path + "/props/" + name;
    std::size_t len = std::visit([](const auto& v) { return v.size(); }, prop.values);
    if (len != t.size()) {
      out.report("X004", where, "property '" + name + "' has " + std::to_string(len) +
                                    " values for " + std::to_string(t.size()) + " events");
    }
    if (prop.interpretation.empty()) {
      out.report("X005", where, "property '" + name + "' has no interpretation");
    }
  }
}

std::string write_experimental_events(Container& c, const ExperimentalEvents& ev) {
  const std::string path = entity_path(ev.name);
  for (const auto& [name, prop] : ev.properties) {
    if (!is_valid_name(name)) throw Error(Errc::kInvalidName, "invalid property name '" + name + "'", path);
    if (prop.unit && prop.unit->empty()) {
      throw Error(Errc::kMissingUnit, "property '" + name + "' has an empty unit", path);
    }
  }
  Reporter out(Reporter::Mode::kWriter);
  check_experimental_events(ev, path, out);
  return transactional(c, [&] {
    ObjectId id = group_for_new_entity(c, ev.name, entity_kind_name(EntityKind::kExperimentalEvents));
    c.set_attribute(id, "label", ev.label);
    c.set_attribute(id, "monitor_start", ev.monitor_start);
    c.set_attribute(id, "monitor_end", ev.monitor_end);
    c.set_attribute(id, "description", ev.description);
    put_vector(c, id, "event_times", ev.event_times);
    ObjectId props = c.create_group(id, "props");
    for (const auto& [name, prop] : ev.properties) {
      ObjectId p = c.create_group(props, name);
      std::visit([&](const auto& v) { put_vector(c, p, "values", v); }, prop.values);
      c.set_attribute(p, "interpretation", prop.interpretation);
      if (prop.unit) c.set_attribute(p, "unit", *prop.unit);
    }
    return path;
  });
}

ExperimentalEvents read_experimental_events(ReadContext& ctx, std::string_view path_view) {
  const std::string path(path_view);
  ObjectId id = open_entity(ctx, path, EntityKind::kExperimentalEvents);
  ExperimentalEvents ev;
  ev.name = split_path(path).back();
  ev.label = req_attr<std::string>(ctx, id, "label");
  ev.monitor_start = req_attr<double>(ctx, id, "monitor_start");
  ev.monitor_end = req_attr<double>(ctx, id, "monitor_end");
  ev.description = req_attr<std::string>(ctx, id, "description");
  Tensor times = req_dataset(ctx, id, "event_times", is_f64, 1);
  const std::uint64_t n = times.shape[0];
  ev.event_times = std::get<std::vector<double>>(std::move(times.data));
  ObjectId props = require_child_group(ctx, id, "props");
  for (const auto& entry : ctx.c.list_children(props)) {
    const std::string where = path + "/props/" + entry.name;
    if (entry.kind != ObjectKind::kGroup) ctx.out.fatal("L005", where, "property is not a group");
    EventProperty prop;
    Tensor values = req_dataset(
        ctx, entry.id, "values",
        [](DType d) { return d == DType::kF64 || d == DType::kUtf8; }, 1);
    if (values.shape[0] != n) {
      ctx.out.report("X004", where, "property has " + fmt(values.shape[0]) + " values for " +
                                        fmt(n) + " events");
    }
    if (auto* f = std::get_if<std::vector<double>>(&values.data)) {
      prop.values = std::move(*f);
    } else {
      prop.values = std::get<std::vector<std::string>>(std::move(values.data));
    }
    prop.interpretation = req_attr<std::string>(ctx, entry.id, "interpretation");
    prop.unit = opt_attr<std::string>(ctx, entry.id, "unit");
    ev.properties.emplace(entry.name, std::move(prop));
  }
  return ev;
}

ExperimentalEvents read_experimental_events(const Container& c, std::string_view path) {
  Reporter out(Reporter::Mode::kReader);
  ReadContext ctx{c, out};
  return read_experimental_events(ctx, path);
}

}  // namespace ephyspack
