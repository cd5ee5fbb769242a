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

#include "model_internal.h"

namespace ephyspack {

using namespace detail;

namespace {

std::uint64_t channel_count(const Tensor& values) {
  return values.rank() == 2 ? values.shape[1] : 0;
}

void check_window(double start, double duration, const std::string& code,
                  const std::string& path, Reporter& out) {
  if (!finite(start)) out.report(code, path, "start time is not finite");
  if (!finite(duration) || duration < 0) {
    out.report(code, path, "duration " + fmt(duration) + " is negative or not finite");
  }
}

void check_markers(const RegularSampling& s, double start, std::uint64_t n,
                   const std::string& path, Reporter& out) {
  SyncMarker prev{0, start};
  for (std::size_t k = 0; k < s.sync_markers.size(); ++k) {
    const SyncMarker& m = s.sync_markers[k];
    auto fail = [&](const std::string& why) {
      out.report("T006", path, "sync marker " + std::to_string(k) + ": " + why, detail_index(k));
    };
    if (!finite(m.true_time)) return fail("true_time is not finite");
    if (m.index >= n) return fail("index " + fmt(m.index) + " is beyond the sample count");
    if (k > 0 && m.index <= prev.index) return fail("index is not strictly increasing");
    if (k > 0 && !(m.true_time > prev.true_time)) {
      return fail("true_time is not strictly increasing");
    }
    if (m.true_time < start) return fail("true_time precedes the series start");
    if (m.index > prev.index) {
      // The marked sample may not come earlier than the sample before it.
      double before = prev.true_time + static_cast<double>(m.index - 1 - prev.index) / s.rate_hz;
      if (m.true_time < before) return fail("true_time moves the clock backwards");
    }
    prev = m;
  }
}

}  // namespace

double time_at_index(const RegularSampling& s, double start_time, std::uint64_t i) {
  SyncMarker base{0, start_time};
  auto it = std::upper_bound(s.sync_markers.begin(), s.sync_markers.end(), i,
                             [](std::uint64_t v, const SyncMarker& m) { return v < m.index; });
  if (it != s.sync_markers.begin()) base = *std::prev(it);
  // One rounding at the end; near t = 0 the anchor and offset cancel.
  const long double offset = static_cast<long double>(i - base.index) / static_cast<long double>(s.rate_hz);
  return static_cast<double>(static_cast<long double>(base.true_time) + offset);
}

double time_at_index(const TimeSeries& ts, std::uint64_t i) {
  const std::uint64_t n = ts.values.shape.empty() ? 0 : ts.values.shape[0];
  if (i >= n) {
    throw Error(Errc::kIndexOutOfRange,
                "index " + std::to_string(i) + " outside 0.." + std::to_string(n), entity_path(ts.name));
  }
  if (const auto* irr = std::get_if<IrregularSampling>(&ts.sampling)) {
    if (i >= irr->timestamps.size()) {
      throw Error(Errc::kIndexOutOfRange, "no timestamp for index " + std::to_string(i));
    }
    return irr->timestamps[i];
  }
  return time_at_index(std::get<RegularSampling>(ts.sampling), ts.start_time, i);
}

void check_time_series(const TimeSeries& ts, const ModelIndex& index, const std::string& path,
                       Reporter& out) {
  if (ts.values.rank() != 2 || !is_numeric(ts.values.dtype())) {
    out.report("L005", path + "/values", "values must be a numeric N x C array");
  }
  if (ts.label.empty()) out.report("T012", path, "label is empty");
  check_window(ts.start_time, ts.duration, "T011", path, out);
  const std::uint64_t n = ts.values.shape.empty() ? 0 : ts.values.shape[0];
  const std::uint64_t channels = channel_count(ts.values);
  if (const auto* u = std::get_if<std::string>(&ts.unit)) {
    if (u->empty()) out.report("T001", path, "unit is empty");
  } else {
    const auto& units = std::get<std::vector<std::string>>(ts.unit);
    if (units.size() != channels) {
      out.report("T010", path, std::to_string(units.size()) + " units for " +
                                   std::to_string(channels) + " channels");
    }
    for (std::size_t k = 0; k < units.size(); ++k) {
      if (units[k].empty()) {
        out.report("T001", path, "unit of channel " + std::to_string(k) + " is empty",
                   detail_index(k));
        break;
      }
    }
  }
  if (ts.sources.size() != channels) {
    out.report("T007", path, std::to_string(ts.sources.size()) + " sources for " +
                                 std::to_string(channels) + " channels");
  }
  for (const auto& s : ts.sources) {
    if (!index.has_source(s)) {
      out.report("T008", path, "source '" + s + "' does not exist", AttrMap{{"source", s}});
    }
  }
  if (const auto* reg = std::get_if<RegularSampling>(&ts.sampling)) {
    if (!finite(reg->rate_hz) || reg->rate_hz <= 0) {
      out.report("T005", path, "rate_hz " + fmt(reg->rate_hz) + " is not positive");
      return;
    }
    check_markers(*reg, ts.start_time, n, path, out);
    if (reg->sync_markers.empty() && finite(ts.duration)) {
      double expected = static_cast<double>(n) / reg->rate_hz;
      if (std::fabs(ts.duration - expected) > 1.0 / reg->rate_hz) {
        out.report("T009", path,
                   "duration " + fmt(ts.duration) + " s but " + fmt(n) + " samples at " +
                       fmt(reg->rate_hz) + " Hz span " + fmt(expected) + " s");
      }
    }
  } else {
    const auto& t = std::get<IrregularSampling>(ts.sampling).timestamps;
    if (t.size() != n) {
      out.report("T004", path, std::to_string(t.size()) + " timestamps for " + fmt(n) + " samples");
    }
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (!finite(t[k]) || (k > 0 && !(t[k] > t[k - 1]))) {
        out.report("T002", path, "timestamps not strictly increasing at index " + std::to_string(k),
                   detail_index(k));
        break;
      }
    }
    const double end = ts.start_time + ts.duration;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] < ts.start_time || t[k] > end) {
        out.report("T003", path,
                   "timestamp " + fmt(t[k]) + " outside [" + fmt(ts.start_time) + ", " + fmt(end) + "]",
                   detail_index(k));
        break;
      }
    }
  }
}

std::string write_time_series(Container& c, const TimeSeries& ts) {
  const std::string path = entity_path(ts.name);
  Reporter out(Reporter::Mode::kWriter);
  check_time_series(ts, build_index(c), path, out);
  return transactional(c, [&] {
    ObjectId id = group_for_new_entity(c, ts.name, entity_kind_name(EntityKind::kTimeSeries));
    c.set_attribute(id, "label", ts.label);
    c.set_attribute(id, "start_time", ts.start_time);
    c.set_attribute(id, "duration", ts.duration);
    if (const auto* u = std::get_if<std::string>(&ts.unit)) {
      c.set_attribute(id, "unit", *u);
    } else {
      put_vector(c, id, "units", std::get<std::vector<std::string>>(ts.unit));
    }
    put_tensor(c, id, "values", ts.values);
    put_vector(c, id, "sources", ts.sources);
    if (const auto* reg = std::get_if<RegularSampling>(&ts.sampling)) {
      c.set_attribute(id, "sampling", std::string("regular"));
      c.set_attribute(id, "rate_hz", reg->rate_hz);
      std::vector<std::uint64_t> idx;
      std::vector<double> times;
      for (const auto& m : reg->sync_markers) {
        idx.push_back(m.index);
        times.push_back(m.true_time);
      }
      put_vector(c, id, "sync_index", idx);
      put_vector(c, id, "sync_time", times);
    } else {
      c.set_attribute(id, "sampling", std::string("irregular"));
      put_vector(c, id, "timestamps", std::get<IrregularSampling>(ts.sampling).timestamps);
    }
    return path;
  });
}

TimeSeries read_time_series(ReadContext& ctx, std::string_view path) {
  ObjectId id = open_entity(ctx, path, EntityKind::kTimeSeries);
  TimeSeries ts;
  ts.name = split_path(path).back();
  ts.label = req_attr<std::string>(ctx, id, "label");
  ts.start_time = req_attr<double>(ctx, id, "start_time");
  ts.duration = req_attr<double>(ctx, id, "duration");
  ts.values = req_dataset(ctx, id, "values", any_numeric, 2);
  if (auto u = opt_attr<std::string>(ctx, id, "unit")) {
    ts.unit = *u;
  } else if (auto units = opt_vector<std::string>(ctx, id, "units")) {
    ts.unit = std::move(*units);
  } else {
    ctx.out.report("T001", std::string(path), "no unit attribute or units dataset");
    ts.unit = std::string();
  }
  ts.sources = req_vector<std::string>(ctx, id, "sources");
  auto sampling = req_attr<std::string>(ctx, id, "sampling");
  if (sampling == "regular") {
    RegularSampling reg;
    reg.rate_hz = req_attr<double>(ctx, id, "rate_hz");
    auto idx = req_vector<std::uint64_t>(ctx, id, "sync_index");
    auto times = req_vector<double>(ctx, id, "sync_time");
    if (idx.size() != times.size()) {
      ctx.out.report("T006", std::string(path), "sync_index and sync_time lengths differ");
    }
    for (std::size_t k = 0; k < std::min(idx.size(), times.size()); ++k) {
      reg.sync_markers.push_back({idx[k], times[k]});
    }
    ts.sampling = std::move(reg);
  } else if (sampling == "irregular") {
    Tensor t = req_dataset(ctx, id, "timestamps", is_f64, 1);
    if (t.shape[0] != ts.values.shape[0]) {
      ctx.out.report("T004", std::string(path),
                     fmt(t.shape[0]) + " timestamps for " + fmt(ts.values.shape[0]) + " samples");
    }
    ts.sampling = IrregularSampling{std::get<std::vector<double>>(std::move(t.data))};
  } else {
    ctx.out.fatal("L004", std::string(path), "sampling must be 'regular' or 'irregular'");
  }
  return ts;
}

TimeSeries read_time_series(const Container& c, std::string_view path) {
  Reporter out(Reporter::Mode::kReader);
  ReadContext ctx{c, out};
  return read_time_series(ctx, path);
}

}  // namespace ephyspack
