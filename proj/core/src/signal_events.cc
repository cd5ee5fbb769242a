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
#include <cmath>
#include <set>

#include "model_internal.h"

namespace ephyspack {

using namespace detail;

namespace {

void check_trigger(const Trigger& t, const std::string& where, const std::string& path,
                   Reporter& out) {
  if (t.type.empty()) out.report("E009", path, where + " trigger type is empty");
  if (!finite(t.threshold)) out.report("E009", path, where + " trigger threshold is not finite");
  if (t.unit.empty()) out.report("E009", path, where + " trigger unit is empty");
}

void check_unit_id(std::int64_t unit, const PropertySet& ps, const ModelIndex& index,
                   const std::string& path, Reporter& out, std::size_t event) {
  auto it = ps.unit_sources.find(unit);
  if (it == ps.unit_sources.end()) {
    out.report("E005", path, "unit " + std::to_string(unit) + " of event " +
                                 std::to_string(event) + " has no source mapping",
               AttrMap{{"index", std::uint64_t{event}}, {"unit", std::int64_t{unit}}});
    return;
  }
  auto src = index.sources.find(it->second);
  if (src == index.sources.end() ||
      (src->second != SourceKind::kNeuron && src->second != SourceKind::kMua)) {
    out.report("E005", path, "unit " + std::to_string(unit) + " maps to '" + it->second +
                                 "', which is not a Neuron or MUA source",
               AttrMap{{"unit", std::int64_t{unit}}});
  }
}

void check_property_set(const PropertySet& ps, const SignalEvents& ev, const ModelIndex& index,
                        const std::string& path, Reporter& out) {
  const std::string where = path + "/props/" + ps.name;
  const std::uint64_t n = ev.event_times.size();
  if (ps.per_event_channels) {
    const auto& ch = *ps.per_event_channels;
    auto problem = offsets_problem(ch.offsets, n, ch.values.size());
    if (!problem.empty()) out.report("E003", where, "per-event channels: " + problem);
    for (const auto& s : ch.values) {
      if (!index.has_source(s)) {
        out.report("E006", where, "channel source '" + s + "' does not exist",
                   AttrMap{{"source", s}});
        break;
      }
    }
  }
  if (ps.waveforms) {
    const Waveforms& w = *ps.waveforms;
    if (w.payload.rank() != 2 || !is_numeric(w.payload.dtype())) {
      out.report("L005", where + "/waveforms/payload", "payload must be a numeric rows x C array");
    } else {
      auto problem = offsets_problem(w.offsets, n, w.payload.shape[0]);
      if (!problem.empty()) out.report("E003", where, "waveform offsets: " + problem);
    }
    if (!finite(w.rate_hz) || w.rate_hz <= 0) {
      out.report("E010", where, "waveform rate_hz " + fmt(w.rate_hz) + " is not positive");
    }
    if (w.unit.empty()) out.report("E010", where, "waveform unit is empty");
  }
  if (ps.units) {
    if (const auto* ex = std::get_if<ExclusiveUnits>(&*ps.units)) {
      if (ex->unit_of.size() != n) {
        out.report("E008", where, std::to_string(ex->unit_of.size()) + " unit assignments for " +
                                      fmt(n) + " events");
      }
      for (std::size_t k = 0; k < ex->unit_of.size(); ++k) {
        if (ex->unit_of[k] != -1) check_unit_id(ex->unit_of[k], ps, index, where, out, k);
      }
    } else if (const auto* mu = std::get_if<MultiUnits>(&*ps.units)) {
      auto problem = offsets_problem(mu->units.offsets, n, mu->units.values.size());
      if (!problem.empty()) out.report("E003", where, "unit offsets: " + problem);
      for (std::size_t k = 0; k < mu->units.values.size(); ++k) {
        check_unit_id(mu->units.values[k], ps, index, where, out, k);
      }
    } else {
      const auto& pr = std::get<ProbabilisticUnits>(*ps.units);
      const std::size_t u = pr.unit_ids.size();
      if (pr.probs.size() != n * u) {
        out.report("E008", where, "probability table has " + std::to_string(pr.probs.size()) +
                                      " entries, expected " + fmt(n) + " x " + std::to_string(u));
      } else {
        for (std::size_t k = 0; k < n; ++k) {
          double sum = 0;
          bool in_range = true;
          for (std::size_t j = 0; j < u; ++j) {
            double p = pr.probs[k * u + j];
            in_range = in_range && finite(p) && p >= 0 && p <= 1;
            sum += p;
          }
          if (!in_range || !(std::fabs(sum - 1.0) <= 1e-9)) {
            out.report("E004", where,
                       "probability row " + std::to_string(k) + " sums to " + fmt(sum),
                       AttrMap{{"index", std::uint64_t{k}}, {"sum", sum}});
            break;
          }
        }
      }
      for (auto id : pr.unit_ids) check_unit_id(id, ps, index, where, out, 0);
    }
  }
  for (const auto& [unit, source] : ps.unit_sources) {
    if (!index.has_source(source)) {
      out.report("E005", where, "unit " + std::to_string(unit) + " maps to missing source '" +
                                    source + "'");
    }
  }
  if (ps.features) {
    const Features& f = *ps.features;
    if (f.values.size() != n * f.headings.size()) {
      out.report("E011", where, std::to_string(f.headings.size()) + " feature headings do not fit " +
                                    std::to_string(f.values.size()) + " values for " + fmt(n) +
                                    " events");
    }
  }
}

}  // namespace

std::string_view assignment_mode_name(const UnitAssignment& units) {
  switch (units.index()) {
    case 0:
      return "exclusive";
    case 1:
      return "multi";
    default:
      return "probabilistic";
  }
}

void check_signal_events(const SignalEvents& ev, const ModelIndex& index, const std::string& path,
                         Reporter& out) {
  if (!finite(ev.start_time)) out.report("E013", path, "start_time is not finite");
  if (!finite(ev.duration) || ev.duration < 0) {
    out.report("E013", path, "duration " + fmt(ev.duration) + " is negative or not finite");
  }
  const auto& t = ev.event_times;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!finite(t[k]) || (k > 0 && t[k] < t[k - 1])) {
      out.report("E001", path, "event times decrease at index " + std::to_string(k),
                 detail_index(k));
      break;
    }
  }
  const double end = ev.start_time + ev.duration;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < ev.start_time || t[k] > end) {
      out.report("E002", path,
                 "event " + std::to_string(k) + " at " + fmt(t[k]) + " outside [" +
                     fmt(ev.start_time) + ", " + fmt(end) + "]",
                 detail_index(k));
      break;
    }
  }
  for (const auto& s : ev.source_channels) {
    if (!index.has_source(s)) {
      out.report("E006", path, "source channel '" + s + "' does not exist", AttrMap{{"source", s}});
    }
  }
  bool per_event = std::any_of(ev.property_sets.begin(), ev.property_sets.end(),
                               [](const PropertySet& p) { return p.per_event_channels.has_value(); });
  if (ev.source_channels.empty() && !per_event) {
    out.report("E007", path, "neither session-level nor per-event source channels are stored");
  }
  if (ev.templates) {
    const auto& tp = *ev.templates;
    if (tp.templates.rank() != 3 || tp.templates.dtype() != DType::kF64) {
      out.report("E012", path, "templates must be an f64 K x L x C array");
    }
    if (!finite(tp.rate_hz) || tp.rate_hz <= 0) out.report("E012", path, "template rate_hz is not positive");
    if (tp.unit.empty()) out.report("E012", path, "template unit is empty");
  }
  if (ev.trigger) check_trigger(*ev.trigger, "session", path, out);
  for (const auto& [channel, trig] : ev.channel_triggers) {
    if (!index.has_source(channel)) {
      out.report("E006", path, "trigger channel '" + channel + "' does not exist",
                 AttrMap{{"source", channel}});
    }
    check_trigger(trig, "channel '" + channel + "'", path, out);
  }
  for (const auto& ps : ev.property_sets) check_property_set(ps, ev, index, path, out);
}

const PropertySet& property_set(const SignalEvents& ev, std::string_view set_name) {
  for (const auto& ps : ev.property_sets) {
    if (ps.name == set_name) return ps;
  }
  throw Error(Errc::kNoSuchPropertySet, "no property set '" + std::string(set_name) + "'",
              entity_path(ev.name));
}

const Trigger* effective_trigger(const SignalEvents& ev, std::string_view channel) {
  auto it = ev.channel_triggers.find(std::string(channel));
  if (it != ev.channel_triggers.end()) return &it->second;
  return ev.trigger ? &*ev.trigger : nullptr;
}

WaveformView get_waveform(const SignalEvents& ev, std::string_view set_name,
                          std::uint64_t event_index) {
  const PropertySet& ps = property_set(ev, set_name);
  if (!ps.waveforms) {
    throw Error(Errc::kNoWaveforms, "property set '" + ps.name + "' has no waveforms",
                entity_path(ev.name));
  }
  const Waveforms& w = *ps.waveforms;
  if (event_index >= ev.event_times.size() || event_index + 1 >= w.offsets.size()) {
    throw Error(Errc::kIndexOutOfRange, "event index " + std::to_string(event_index) +
                " outside 0.." + std::to_string(ev.event_times.size()), entity_path(ev.name));
  }
  const std::uint64_t begin = w.offsets[event_index];
  const std::uint64_t end = w.offsets[event_index + 1];
  const std::uint64_t channels = w.payload.rank() == 2 ? w.payload.shape[1] : 0;
  WaveformView view;
  view.rate_hz = w.rate_hz;
  view.unit = w.unit;
  view.pre_trigger_samples = w.pre_trigger_samples;
  view.event_time = ev.event_times[event_index];
  view.samples.shape = {end - begin, channels};
  view.samples.data = std::visit(
      [&](const auto& v) -> ArrayData {
        using V = std::decay_t<decltype(v)>;
        if (end < begin || end * channels > v.size()) {
          throw Error(Errc::kBadOffsets, "waveform offsets exceed the payload");
        }
        return V(v.begin() + static_cast<std::ptrdiff_t>(begin * channels),
                 v.begin() + static_cast<std::ptrdiff_t>(end * channels));
      },
      w.payload.data);
  return view;
}

std::string write_signal_events(Container& c, const SignalEvents& ev) {
  const std::string path = entity_path(ev.name);
  std::set<std::string> names;
  for (const auto& ps : ev.property_sets) {
    if (!is_valid_name(ps.name)) {
      throw Error(Errc::kInvalidName, "invalid property set name '" + ps.name + "'", path);
    }
    if (!names.insert(ps.name).second) {
      throw Error(Errc::kDuplicatePropertySetName, "property set '" + ps.name + "' appears twice",
                  path);
    }
  }
  Reporter out(Reporter::Mode::kWriter);
  check_signal_events(ev, build_index(c), path, out);
  const std::uint64_t n = ev.event_times.size();
  return transactional(c, [&] {
    ObjectId id = group_for_new_entity(c, ev.name, entity_kind_name(EntityKind::kSignalEvents));
    c.set_attribute(id, "label", ev.label);
    c.set_attribute(id, "start_time", ev.start_time);
    c.set_attribute(id, "duration", ev.duration);
    c.set_attribute(id, "detection_description", ev.detection_description);
    if (ev.trigger) {
      c.set_attribute(id, "trigger.type", ev.trigger->type);
      c.set_attribute(id, "trigger.threshold", ev.trigger->threshold);
      c.set_attribute(id, "trigger.unit", ev.trigger->unit);
    }
    put_vector(c, id, "event_times", ev.event_times);
    put_vector(c, id, "source_channels", ev.source_channels);
    if (!ev.channel_triggers.empty()) {
      ObjectId tg = c.create_group(id, "triggers");
      std::vector<std::string> channel, type, unit;
      std::vector<double> threshold;
      for (const auto& [ch, t] : ev.channel_triggers) {
        channel.push_back(ch);
        type.push_back(t.type);
        threshold.push_back(t.threshold);
        unit.push_back(t.unit);
      }
      put_vector(c, tg, "channel", channel);
      put_vector(c, tg, "type", type);
      put_vector(c, tg, "threshold", threshold);
      put_vector(c, tg, "unit", unit);
    }
    if (ev.templates) {
      ObjectId tp = put_tensor(c, id, "templates", ev.templates->templates);
      c.set_attribute(tp, "unit", ev.templates->unit);
      c.set_attribute(tp, "rate_hz", ev.templates->rate_hz);
    }
    ObjectId props = c.create_group(id, "props");
    for (const auto& ps : ev.property_sets) {
      ObjectId g = c.create_group(props, ps.name);
      if (ps.per_event_channels) {
        put_vector(c, g, "channel_offsets", ps.per_event_channels->offsets);
        put_vector(c, g, "channels", ps.per_event_channels->values);
      }
      if (ps.waveforms) {
        ObjectId w = c.create_group(g, "waveforms");
        put_tensor(c, w, "payload", ps.waveforms->payload);
        put_vector(c, w, "offsets", ps.waveforms->offsets);
        c.set_attribute(w, "rate_hz", ps.waveforms->rate_hz);
        c.set_attribute(w, "unit", ps.waveforms->unit);
        c.set_attribute(w, "pre_trigger_samples", ps.waveforms->pre_trigger_samples);
      }
      if (ps.units) {
        ObjectId u = c.create_group(g, "units");
        c.set_attribute(u, "mode", std::string(assignment_mode_name(*ps.units)));
        if (const auto* ex = std::get_if<ExclusiveUnits>(&*ps.units)) {
          put_vector(c, u, "unit_of", ex->unit_of);
        } else if (const auto* mu = std::get_if<MultiUnits>(&*ps.units)) {
          put_vector(c, u, "offsets", mu->units.offsets);
          put_vector(c, u, "unit_ids", mu->units.values);
        } else {
          const auto& pr = std::get<ProbabilisticUnits>(*ps.units);
          put_vector(c, u, "unit_ids", pr.unit_ids);
          put_dataset(c, u, "probs", pr.probs, {n, pr.unit_ids.size()});
        }
      }
      if (!ps.unit_sources.empty()) {
        ObjectId us = c.create_group(g, "unit_sources");
        std::vector<std::int64_t> ids;
        std::vector<std::string> srcs;
        for (const auto& [unit, src] : ps.unit_sources) {
          ids.push_back(unit);
          srcs.push_back(src);
        }
        put_vector(c, us, "unit_id", ids);
        put_vector(c, us, "source_id", srcs);
      }
      if (ps.features) {
        ObjectId f = c.create_group(g, "features");
        put_dataset(c, f, "values", ps.features->values, {n, ps.features->headings.size()});
        put_vector(c, f, "headings", ps.features->headings);
      }
    }
    return path;
  });
}

SignalEvents read_signal_events(ReadContext& ctx, std::string_view path_view) {
  const std::string path(path_view);
  ObjectId id = open_entity(ctx, path, EntityKind::kSignalEvents);
  SignalEvents ev;
  ev.name = split_path(path).back();
  ev.label = req_attr<std::string>(ctx, id, "label");
  ev.start_time = req_attr<double>(ctx, id, "start_time");
  ev.duration = req_attr<double>(ctx, id, "duration");
  ev.detection_description = req_attr<std::string>(ctx, id, "detection_description");
  auto ttype = opt_attr<std::string>(ctx, id, "trigger.type");
  auto tthr = opt_attr<double>(ctx, id, "trigger.threshold");
  auto tunit = opt_attr<std::string>(ctx, id, "trigger.unit");
  if (ttype || tthr || tunit) {
    if (!ttype || !tthr || !tunit) ctx.out.fatal("L004", path, "incomplete session trigger");
    ev.trigger = Trigger{*ttype, *tthr, *tunit};
  }
  Tensor times = req_dataset(ctx, id, "event_times", is_f64, 1);
  const std::uint64_t n = times.shape[0];
  ev.event_times = std::get<std::vector<double>>(std::move(times.data));
  ev.source_channels = req_vector<std::string>(ctx, id, "source_channels");
  if (auto tg = child_group(ctx, id, "triggers")) {
    auto channel = req_vector<std::string>(ctx, *tg, "channel");
    auto type = req_vector<std::string>(ctx, *tg, "type");
    auto threshold = req_vector<double>(ctx, *tg, "threshold");
    auto unit = req_vector<std::string>(ctx, *tg, "unit");
    if (type.size() != channel.size() || threshold.size() != channel.size() ||
        unit.size() != channel.size()) {
      ctx.out.report("E009", path + "/triggers", "trigger table columns differ in length");
    }
    std::size_t rows = std::min({channel.size(), type.size(), threshold.size(), unit.size()});
    for (std::size_t k = 0; k < rows; ++k) {
      if (!ev.channel_triggers.emplace(channel[k], Trigger{type[k], threshold[k], unit[k]}).second) {
        ctx.out.report("E009", path + "/triggers", "channel '" + channel[k] + "' listed twice");
      }
    }
  }
  if (auto tp = opt_dataset(ctx, id, "templates", is_f64, 3)) {
    ObjectId tid = *ctx.c.find_child(id, "templates");
    SpikeTemplates st;
    st.templates = std::move(*tp);
    st.unit = req_attr<std::string>(ctx, tid, "unit");
    st.rate_hz = req_attr<double>(ctx, tid, "rate_hz");
    ev.templates = std::move(st);
  }
  ObjectId props = require_child_group(ctx, id, "props");
  for (const auto& entry : ctx.c.list_children(props)) {
    const std::string where = path + "/props/" + entry.name;
    if (entry.kind != ObjectKind::kGroup) ctx.out.fatal("L005", where, "property set is not a group");
    PropertySet ps;
    ps.name = entry.name;
    ps.per_event_channels = opt_ragged<std::string>(ctx, entry.id, "channel_offsets", "channels");
    if (auto w = child_group(ctx, entry.id, "waveforms")) {
      Waveforms wf;
      wf.payload = req_dataset(ctx, *w, "payload", any_numeric, 2);
      wf.offsets = req_vector<std::uint64_t>(ctx, *w, "offsets");
      wf.rate_hz = req_attr<double>(ctx, *w, "rate_hz");
      wf.unit = req_attr<std::string>(ctx, *w, "unit");
      wf.pre_trigger_samples = req_attr<std::uint64_t>(ctx, *w, "pre_trigger_samples");
      ps.waveforms = std::move(wf);
    }
    if (auto u = child_group(ctx, entry.id, "units")) {
      auto mode = req_attr<std::string>(ctx, *u, "mode");
      if (mode == "exclusive") {
        ps.units = ExclusiveUnits{req_vector<std::int64_t>(ctx, *u, "unit_of")};
      } else if (mode == "multi") {
        MultiUnits mu;
        mu.units.offsets = req_vector<std::uint64_t>(ctx, *u, "offsets");
        mu.units.values = req_vector<std::int64_t>(ctx, *u, "unit_ids");
        ps.units = std::move(mu);
      } else if (mode == "probabilistic") {
        ProbabilisticUnits pr;
        Tensor ids = req_dataset(ctx, *u, "unit_ids",
                                 [](DType d) { return d == DType::kI64; }, 1);
        Tensor probs = req_dataset(ctx, *u, "probs", is_f64, 2);
        if (probs.shape[0] != n || probs.shape[1] != ids.shape[0]) {
          ctx.out.report("E008", where, "probability table is " + fmt(probs.shape[0]) + " x " +
                                            fmt(probs.shape[1]) + ", expected " + fmt(n) + " x " +
                                            fmt(ids.shape[0]));
        }
        pr.unit_ids = std::get<std::vector<std::int64_t>>(std::move(ids.data));
        pr.probs = std::get<std::vector<double>>(std::move(probs.data));
        ps.units = std::move(pr);
      } else {
        ctx.out.fatal("L004", where + "/units", "unknown assignment mode '" + mode + "'");
      }
    }
    if (auto us = child_group(ctx, entry.id, "unit_sources")) {
      auto ids = req_vector<std::int64_t>(ctx, *us, "unit_id");
      auto srcs = req_vector<std::string>(ctx, *us, "source_id");
      if (ids.size() != srcs.size()) {
        ctx.out.report("E005", where + "/unit_sources", "unit source table columns differ in length");
      }
      for (std::size_t k = 0; k < std::min(ids.size(), srcs.size()); ++k) {
        ps.unit_sources.emplace(ids[k], srcs[k]);
      }
    }
    if (auto f = child_group(ctx, entry.id, "features")) {
      Features feat;
      Tensor values = req_dataset(ctx, *f, "values", is_f64, 2);
      Tensor headings = req_dataset(ctx, *f, "headings", [](DType d) { return d == DType::kUtf8; }, 1);
      if (values.shape[0] != n || values.shape[1] != headings.shape[0]) {
        ctx.out.report("E011", where, "feature table is " + fmt(values.shape[0]) + " x " +
                                          fmt(values.shape[1]) + " with " + fmt(headings.shape[0]) +
                                          " headings for " + fmt(n) + " events");
      }
      feat.values = std::get<std::vector<double>>(std::move(values.data));
      feat.headings = std::get<std::vector<std::string>>(std::move(headings.data));
      ps.features = std::move(feat);
    }
    ev.property_sets.push_back(std::move(ps));
  }
  return ev;
}

SignalEvents read_signal_events(const Container& c, std::string_view path) {
  Reporter out(Reporter::Mode::kReader);
  ReadContext ctx{c, out};
  return read_signal_events(ctx, path);
}

}  // namespace ephyspack
