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

#include "support/fixtures.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "ephyspack/ingest.h"

namespace ephyspack::testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("ephyspack-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

CreateOptions fixed_create_options(std::uint64_t salt) {
  CreateOptions o;
  o.file_uuid = Uuid::from_bits_v4(0x0123456789abcdefULL ^ salt, 0xfedcba9876543210ULL + salt);
  o.created_time = kFixedCreated;
  return o;
}

Container make_session(const fs::path& path, std::uint64_t salt) {
  Container c = Container::create(path, {{"lab", "test bench"}, {"experimenter", "E"}},
                                  fixed_create_options(salt));
  write_global_metadata(c, make_global_metadata(c, kSessionStart));
  add_source(c, {"subj", SourceKind::kSubject, std::nullopt, {{"species", std::string("mouse")}},
                 std::nullopt, std::nullopt});
  add_source(c, {"region", SourceKind::kBrainRegion, "subj", {}, std::nullopt, std::nullopt});
  for (int u = 0; u < 4; ++u) {
    add_source(c, {"n" + std::to_string(u), SourceKind::kNeuron, "region", {}, std::nullopt,
                   std::nullopt});
  }
  add_source(c, {"mua", SourceKind::kMua, "region", {}, std::nullopt, std::nullopt});
  add_source(c, {"amp", SourceKind::kAmplifier, std::nullopt, {{"gain", 100.0}}, std::nullopt,
                 std::nullopt});
  add_source(c, {"tt", SourceKind::kElectrodeArray, "amp", {}, std::nullopt, std::nullopt});
  for (int k = 0; k < 4; ++k) {
    add_source(c, {kElectrodes[k], SourceKind::kElectrode, "tt", {},
                   std::array<double, 3>{1e-5 * k, 0.0, 1e-3}, std::nullopt});
  }
  RoiGeometry roi;
  roi.vertices = {{{0.0, 0.0}}, {{0.0, 3.0}}, {{3.0, 3.0}}};
  add_source(c, {"roi", SourceKind::kRoi, "region", {}, std::nullopt, roi});
  return c;
}

// ---- EntityFactory --------------------------------------------------------

double EntityFactory::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen_);
}

std::uint64_t EntityFactory::below(std::uint64_t n) {
  if (n == 0) return 0;
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_);
}

double EntityFactory::any_finite() {
  switch (below(8)) {
    case 0:
      return -0.0;
    case 1:
      return std::numeric_limits<double>::denorm_min() * static_cast<double>(1 + below(1000));
    case 2:
      return std::numeric_limits<double>::max() / static_cast<double>(1 + below(7));
    case 3: {
      // Random bit pattern, rejected until finite.
      for (;;) {
        double d = std::bit_cast<double>(gen_());
        if (std::isfinite(d)) return d;
      }
    }
    default:
      return uniform(-1e3, 1e3);
  }
}

std::string EntityFactory::text(std::size_t min_len, std::size_t max_len) {
  static const std::string kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789 _-.,";
  std::string s;
  const std::size_t n = min_len + below(max_len - min_len + 1);
  for (std::size_t i = 0; i < n; ++i) s.push_back(kAlphabet[below(kAlphabet.size())]);
  if (below(8) == 0 && !s.empty()) s += "\xc2\xb5";  // multi-byte code point
  return s;
}

AttrValue EntityFactory::attr() {
  switch (below(7)) {
    case 0:
      return text();
    case 1:
      return any_finite();
    case 2:
      return static_cast<std::int64_t>(gen_());
    case 3:
      return static_cast<std::uint64_t>(gen_());
    case 4:
      return below(2) == 1;
    case 5: {
      std::vector<double> v(below(6));
      for (double& d : v) d = any_finite();
      return v;
    }
    default: {
      std::vector<std::string> v(below(4));
      for (auto& s : v) s = text(0, 6);
      return v;
    }
  }
}

std::vector<double> EntityFactory::sorted_times(std::size_t n, double lo, double hi, bool strict) {
  std::vector<double> t(n);
  for (double& v : t) v = uniform(lo, hi);
  std::sort(t.begin(), t.end());
  if (strict) {
    for (std::size_t k = 1; k < n; ++k) {
      if (!(t[k] > t[k - 1])) t[k] = std::nextafter(t[k - 1], std::numeric_limits<double>::infinity());
    }
    if (!t.empty() && t.back() > hi) {
      // Rare: nudging crossed the bound; fall back to an even grid.
      for (std::size_t k = 0; k < n; ++k) t[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n);
    }
  } else if (n > 1 && below(4) == 0) {
    t[1] = t[0];  // repeated event time
  }
  return t;
}

Tensor EntityFactory::numeric_tensor(Extent shape) {
  const std::uint64_t n = product(shape);
  switch (below(6)) {
    case 0: {
      std::vector<float> v(n);
      for (float& x : v) x = static_cast<float>(uniform(-1e6, 1e6));
      if (n > 0 && below(2) == 0) v[0] = -0.0f;
      return make_tensor<float>(shape, v);
    }
    case 1: {
      std::vector<std::int16_t> v(n);
      for (auto& x : v) x = static_cast<std::int16_t>(gen_());
      return make_tensor<std::int16_t>(shape, v);
    }
    case 2: {
      std::vector<std::uint16_t> v(n);
      for (auto& x : v) x = static_cast<std::uint16_t>(gen_());
      return make_tensor<std::uint16_t>(shape, v);
    }
    case 3: {
      std::vector<std::int64_t> v(n);
      for (auto& x : v) x = static_cast<std::int64_t>(gen_());
      return make_tensor<std::int64_t>(shape, v);
    }
    case 4: {
      std::vector<std::uint8_t> v(n);
      for (auto& x : v) x = static_cast<std::uint8_t>(gen_());
      return make_tensor<std::uint8_t>(shape, v);
    }
    default: {
      std::vector<double> v(n);
      for (double& x : v) x = any_finite();
      return make_tensor<double>(shape, v);
    }
  }
}

TimeSeries EntityFactory::time_series(const std::string& name) {
  TimeSeries ts;
  ts.name = name;
  ts.label = text();
  const std::uint64_t n = 1 + below(40);
  const std::uint64_t ch = 1 + below(4);
  ts.values = numeric_tensor({n, ch});
  if (below(2) == 0) {
    ts.unit = text();
  } else {
    std::vector<std::string> units(ch);
    for (auto& u : units) u = text();
    ts.unit = units;
  }
  ts.start_time = uniform(-10, 100);
  for (std::uint64_t k = 0; k < ch; ++k) ts.sources.push_back(kElectrodes[below(kElectrodes.size())]);
  if (below(2) == 0) {
    const double rate = uniform(1, 40000);
    RegularSampling reg{rate, {}};
    std::uint64_t idx = 0;
    double t = ts.start_time;
    const std::uint64_t markers = below(4);
    for (std::uint64_t m = 0; m < markers && idx + 1 < n; ++m) {
      const std::uint64_t step = 1 + below(n - idx - 1);
      t += static_cast<double>(step) / rate + uniform(0, 5) / rate;
      idx += step;
      reg.sync_markers.push_back({idx, t});
    }
    ts.duration = (reg.sync_markers.empty() ? ts.start_time : reg.sync_markers.back().true_time) -
                  ts.start_time + static_cast<double>(n) / rate;
    ts.sampling = reg;
  } else {
    ts.duration = uniform(0.5, 50);
    ts.sampling = IrregularSampling{sorted_times(n, ts.start_time, ts.start_time + ts.duration, true)};
  }
  return ts;
}

SignalEvents EntityFactory::signal_events(const std::string& name) {
  SignalEvents ev;
  ev.name = name;
  ev.label = text();
  ev.start_time = uniform(0, 10);
  ev.duration = uniform(0, 20);
  const std::size_t n = below(24);
  ev.event_times = sorted_times(n, ev.start_time, ev.start_time + ev.duration, false);
  ev.detection_description = text(0, 30);
  const bool session_channels = below(3) != 0;
  if (session_channels) {
    for (const auto& e : kElectrodes) {
      if (below(2) == 0 || ev.source_channels.empty()) ev.source_channels.push_back(e);
    }
  }
  const std::uint64_t c = kElectrodes.size();
  if (below(2) == 0) {
    const std::uint64_t k = 1 + below(3), l = 1 + below(6);
    std::vector<double> tpl(k * l * c);
    for (double& v : tpl) v = any_finite();
    ev.templates = SpikeTemplates{make_tensor<double>({k, l, c}, tpl), text(), uniform(100, 50000)};
  }
  if (below(2) == 0) ev.trigger = Trigger{text(), any_finite(), text()};
  if (below(3) == 0) ev.channel_triggers[kElectrodes[below(c)]] = Trigger{text(), any_finite(), text()};
  const std::size_t sets = (session_channels ? 0 : 1) + below(3);
  for (std::size_t s = 0; s < sets; ++s) {
    PropertySet ps;
    ps.name = "set" + std::to_string(s);
    if (!session_channels && s == 0) {
      ps.per_event_channels.emplace();
    } else if (below(2) == 0) {
      ps.per_event_channels.emplace();
    }
    if (ps.per_event_channels) {
      for (std::size_t e = 0; e < n; ++e) {
        std::vector<std::string> row;
        for (std::uint64_t k = 0, m = below(3); k < m; ++k) row.push_back(kElectrodes[below(c)]);
        ps.per_event_channels->push_row(row);
      }
    }
    if (below(2) == 0) {
      Waveforms w;
      w.rate_hz = uniform(1000, 50000);
      w.unit = text();
      w.pre_trigger_samples = below(10);
      w.offsets.push_back(0);
      for (std::size_t e = 0; e < n; ++e) w.offsets.push_back(w.offsets.back() + below(6));
      std::vector<double> payload(w.offsets.back() * c);
      for (double& v : payload) v = any_finite();
      w.payload = make_tensor<double>({w.offsets.back(), c}, payload);
      ps.waveforms = std::move(w);
    }
    const std::uint64_t mode = below(4);
    if (mode > 0) {
      for (std::size_t u = 0; u < kUnitSources.size(); ++u) {
        ps.unit_sources[static_cast<std::int64_t>(u) + 1] = kUnitSources[u];
      }
      const auto units = static_cast<std::int64_t>(kUnitSources.size());
      if (mode == 1) {
        ExclusiveUnits ex;
        for (std::size_t e = 0; e < n; ++e) {
          ex.unit_of.push_back(below(5) == 0 ? -1 : 1 + static_cast<std::int64_t>(below(units)));
        }
        ps.units = ex;
      } else if (mode == 2) {
        MultiUnits mu;
        for (std::size_t e = 0; e < n; ++e) {
          std::vector<std::int64_t> row;
          for (std::uint64_t k = 0, m = below(3); k < m; ++k) row.push_back(1 + static_cast<std::int64_t>(below(units)));
          mu.units.push_row(row);
        }
        ps.units = mu;
      } else {
        ProbabilisticUnits pr;
        const std::uint64_t u = 1 + below(units);
        for (std::uint64_t j = 0; j < u; ++j) pr.unit_ids.push_back(static_cast<std::int64_t>(j) + 1);
        for (std::size_t e = 0; e < n; ++e) {
          std::vector<double> row(u);
          double total = 0;
          for (double& p : row) total += (p = uniform(0, 1));
          double sum = 0;
          for (std::uint64_t j = 0; j + 1 < u; ++j) sum += (row[j] /= total);
          row[u - 1] = std::max(0.0, 1.0 - sum);
          pr.probs.insert(pr.probs.end(), row.begin(), row.end());
        }
        ps.units = pr;
      }
    }
    if (below(2) == 0) {
      Features f;
      for (std::uint64_t k = 0, m = 1 + below(3); k < m; ++k) f.headings.push_back(text());
      f.values.resize(n * f.headings.size());
      for (double& v : f.values) v = any_finite();
      ps.features = std::move(f);
    }
    ev.property_sets.push_back(std::move(ps));
  }
  return ev;
}

ImageStack EntityFactory::image_stack(const std::string& name) {
  ImageStack st;
  st.name = name;
  st.label = text();
  st.start_time = uniform(0, 10);
  st.duration = uniform(1, 10);
  const std::size_t rank = 3 + below(2);
  std::vector<DimSemantic> dims{DimSemantic::kTime, DimSemantic::kY, DimSemantic::kX};
  if (rank == 4) dims.push_back(below(2) == 0 ? DimSemantic::kPlane : DimSemantic::kChannel);
  std::shuffle(dims.begin(), dims.end(), gen_);
  Extent shape;
  std::uint64_t frames = 0, h = 0, w = 0;
  for (DimSemantic d : dims) {
    const std::uint64_t e = 1 + below(5);
    shape.push_back(e);
    if (d == DimSemantic::kTime) frames = e;
    if (d == DimSemantic::kY) h = e;
    if (d == DimSemantic::kX) w = e;
  }
  st.dims = dims;
  st.pixels = numeric_tensor(shape);
  st.frame_times = sorted_times(frames, st.start_time, st.start_time + st.duration, true);
  st.pixel_unit = text();
  if (below(2) == 0) {
    st.geometry = RectangularGeometry{uniform(1e-7, 1e-5), uniform(1e-7, 1e-5), {any_finite(), any_finite()}};
  } else {
    ExplicitGeometry g;
    g.coords.resize(h * w * 2);
    for (double& v : g.coords) v = any_finite();
    st.geometry = g;
  }
  if (below(2) == 0) st.sources = {"roi"};
  return st;
}

ExperimentalEvents EntityFactory::experimental_events(const std::string& name) {
  ExperimentalEvents ev;
  ev.name = name;
  ev.label = text();
  ev.monitor_start = uniform(0, 10);
  ev.monitor_end = ev.monitor_start + (below(8) == 0 ? 0.0 : uniform(0, 100));
  ev.description = text();
  const std::size_t n = below(20);
  ev.event_times = sorted_times(n, ev.monitor_start, ev.monitor_end, false);
  if (n > 0 && below(4) == 0) ev.event_times.back() = ev.monitor_end;
  for (std::uint64_t k = 0, m = below(4); k < m; ++k) {
    EventProperty p;
    if (below(2) == 0) {
      std::vector<double> v(n);
      for (double& x : v) x = any_finite();
      p.values = v;
    } else {
      std::vector<std::string> v(n);
      for (auto& s : v) s = text(0, 8);
      p.values = v;
    }
    p.interpretation = text();
    if (below(2) == 0) p.unit = text();
    ev.properties["p" + std::to_string(k)] = std::move(p);
  }
  return ev;
}

GenericArray EntityFactory::generic_array(const std::string& name) {
  GenericArray ga;
  ga.name = name;
  ga.description = text();
  const std::size_t rank = 1 + below(3);
  Extent shape;
  for (std::size_t d = 0; d < rank; ++d) shape.push_back(1 + below(6));
  ga.data = numeric_tensor(shape);
  for (std::size_t d = 0; d < rank; ++d) {
    DimDescription dd{text(), std::nullopt};
    if (below(2) == 0) dd.unit = text();
    ga.dims.push_back(dd);
  }
  for (std::size_t d = 0; d < rank; ++d) {
    if (below(2) != 0) continue;
    std::vector<std::string> headings(shape[d]);
    for (auto& h : headings) h = text(0, 6);
    ga.slice_headings[d] = headings;
  }
  if (below(2) == 0) {
    ga.categories.emplace();
    for (std::uint64_t k = 0, m = below(4); k < m; ++k) {
      ga.categories->push_back({text(), below(3) == 0 ? 0.0 : uniform(0, 1e6)});
    }
  }
  if (below(2) == 0) ga.references.push_back({"/sources/" + kElectrodes[below(4)], text()});
  return ga;
}

SignalSource EntityFactory::source(const std::string& id, const std::vector<std::string>& existing) {
  SignalSource s;
  s.source_id = id;
  s.kind = static_cast<SourceKind>(below(8));
  if (!existing.empty() && below(3) != 0) s.parent = existing[below(existing.size())];
  for (std::uint64_t k = 0, m = below(4); k < m; ++k) s.static_meta["k" + std::to_string(k)] = attr();
  if (below(2) == 0) s.position = std::array<double, 3>{any_finite(), any_finite(), any_finite()};
  if (s.kind == SourceKind::kRoi && below(3) != 0) {
    RoiGeometry roi;
    const std::uint64_t v = 3 + below(4);
    for (std::uint64_t k = 0; k < v; ++k) roi.vertices.push_back({any_finite(), any_finite()});
    if (below(2) == 0) {
      const std::uint64_t t = 1 + below(5);
      roi.times = sorted_times(t, 0, 100, true);
      for (std::uint64_t f = 0; f < t; ++f) {
        std::vector<Point2> frame;
        for (std::uint64_t k = 0; k < v; ++k) frame.push_back({any_finite(), any_finite()});
        roi.track.push_back(frame);
      }
    }
    s.roi = roi;
  }
  return s;
}

// ---- comparisons ----------------------------------------------------------

bool bit_equal(const ArrayData& a, const ArrayData& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& va) {
        using V = std::decay_t<decltype(va)>;
        const auto& vb = std::get<V>(b);
        if (va.size() != vb.size()) return false;
        if constexpr (std::is_same_v<V, std::vector<std::string>>) {
          return va == vb;
        } else {
          return va.empty() ||
                 std::memcmp(va.data(), vb.data(), va.size() * sizeof(typename V::value_type)) == 0;
        }
      },
      a);
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return bit_equal(ArrayData(a), ArrayData(b));
}

// ---- mutation bases -------------------------------------------------------

std::vector<fs::path> mutation_bases(const TempDir& dir) {
  struct Base {
    const char* name;
    AssignmentMode mode;
    bool image;
  };
  const Base bases[] = {{"base-plain", AssignmentMode::kExclusive, false},
                        {"base-exclusive", AssignmentMode::kExclusive, true},
                        {"base-multi", AssignmentMode::kMulti, true},
                        {"base-prob", AssignmentMode::kProbabilistic, true}};
  std::vector<fs::path> out;
  for (const auto& b : bases) {
    GenSpec spec;
    spec.seed = 3;
    spec.assignment_mode = b.mode;
    spec.with_image_stack = b.image;
    out.push_back(dir.file(b.name));
    generate_session(spec, out.back(), {.created_time = kFixedCreated});
  }
  return out;
}

fs::path apply_mutation(const std::vector<fs::path>& bases, const std::string& id, const fs::path& out) {
  for (const auto& base : bases) {
    try {
      mutate_for_test(base, id, out);
      return base;
    } catch (const Error& e) {
      if (e.code() != Errc::kMutationNotApplicable) throw;
    }
  }
  throw Error(Errc::kMutationNotApplicable, "no base accepts " + id);
}

}  // namespace ephyspack::testing
