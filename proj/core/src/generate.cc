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

#include "ephyspack/container.h"
#include "ephyspack/ingest.h"
#include "ephyspack/isotime.h"
#include "ephyspack/model.h"
#include "ephyspack/rng.h"

namespace ephyspack {
namespace {

constexpr const char* kSessionStart = "2026-01-05T09:30:00Z";
constexpr const char* kDerivedAt = "2026-01-05T11:00:00Z";
constexpr std::uint64_t kPreTrigger = 8;
constexpr std::uint64_t kWaveLength = 24;
constexpr std::uint64_t kMaxSamples = std::uint64_t{1} << 26;

std::string electrode(std::uint32_t k) { return "tt1e" + std::to_string(k + 1); }
std::string neuron(std::uint32_t u) { return "n" + std::to_string(u + 1); }
std::int64_t unit_id(std::uint32_t u) { return static_cast<std::int64_t>(u) + 1; }

struct Spike {
  double time;
  std::uint32_t unit;
};

// Negative pulse of unit u on channel ch, sample j of the window.
double template_value(std::uint32_t u, std::uint32_t ch, std::uint32_t channels, std::uint64_t j) {
  const double amp = -(60.0 + 25.0 * u);
  const std::uint32_t home = u % channels;
  const double gain = ch == home ? 1.0 : 0.35;
  const double x = (static_cast<double>(j) - static_cast<double>(kPreTrigger)) / 2.0;
  return amp * gain * std::exp(-x * x);
}

void add_source_forest(Container& c, const GenSpec& spec, Rng& rng) {
  add_source(c, {"subj1", SourceKind::kSubject, std::nullopt,
                 {{"species", std::string("Rattus norvegicus")}, {"age_days", std::int64_t{90}}},
                 std::nullopt, std::nullopt});
  add_source(c, {"ca1", SourceKind::kBrainRegion, "subj1", {{"atlas", std::string("synthetic")}},
                 std::nullopt, std::nullopt});
  for (std::uint32_t u = 0; u < spec.n_units; ++u) {
    add_source(c, {neuron(u), SourceKind::kNeuron, "ca1", {}, std::nullopt, std::nullopt});
  }
  add_source(c, {"amp1", SourceKind::kAmplifier, std::nullopt,
                 {{"gain", 200.0}, {"model", std::string("synthetic headstage")}}, std::nullopt,
                 std::nullopt});
  add_source(c, {"tt1", SourceKind::kElectrodeArray, "amp1", {{"geometry", std::string("tetrode")}},
                 std::nullopt, std::nullopt});
  for (std::uint32_t k = 0; k < spec.n_channels; ++k) {
    std::array<double, 3> pos{1e-5 * (k % 2), 1e-5 * (k / 2 % 2), 1e-3 + 1e-6 * rng.uniform()};
    add_source(c, {electrode(k), SourceKind::kElectrode, "tt1",
                   {{"impedance_ohm", 1e6 * rng.uniform(0.5, 1.5)}}, pos, std::nullopt});
  }
}

std::vector<Spike> draw_spikes(const GenSpec& spec, double window, Rng& rng) {
  std::vector<Spike> spikes;
  for (std::uint32_t u = 0; u < spec.n_units; ++u) {
    const double rate = 5.0 + 3.0 * u;
    for (double t = rng.exponential(rate); t < window; t += rng.exponential(rate)) {
      spikes.push_back({t, u});
    }
  }
  std::stable_sort(spikes.begin(), spikes.end(),
                   [](const Spike& a, const Spike& b) { return a.time < b.time; });
  return spikes;
}

UnitAssignment assign_units(const GenSpec& spec, const std::vector<Spike>& spikes, Rng& rng) {
  switch (spec.assignment_mode) {
    case AssignmentMode::kExclusive: {
      ExclusiveUnits ex;
      for (const auto& s : spikes) ex.unit_of.push_back(rng.below(20) == 0 ? -1 : unit_id(s.unit));
      return ex;
    }
    case AssignmentMode::kMulti: {
      MultiUnits mu;
      for (const auto& s : spikes) {
        std::vector<std::int64_t> row{unit_id(s.unit)};
        if (spec.n_units > 1 && rng.below(5) == 0) {
          auto other = static_cast<std::uint32_t>((s.unit + 1 + rng.below(spec.n_units - 1)) % spec.n_units);
          row.push_back(unit_id(other));
          std::sort(row.begin(), row.end());
        }
        mu.units.push_row(row);
      }
      return mu;
    }
    case AssignmentMode::kProbabilistic: {
      ProbabilisticUnits pr;
      for (std::uint32_t u = 0; u < spec.n_units; ++u) pr.unit_ids.push_back(unit_id(u));
      for (const auto& s : spikes) {
        std::vector<double> w(spec.n_units);
        double total = 0;
        for (std::uint32_t u = 0; u < spec.n_units; ++u) {
          w[u] = rng.uniform() + (u == s.unit ? 4.0 : 0.0);
          total += w[u];
        }
        double sum = 0;
        for (double& p : w) {
          p /= total;
          sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-12) {
          throw Error(Errc::kInvalidValue, "generated probability row sums to " + std::to_string(sum));
        }
        pr.probs.insert(pr.probs.end(), w.begin(), w.end());
      }
      return pr;
    }
  }
  return ExclusiveUnits{};
}

}  // namespace

std::string_view assignment_mode_label(AssignmentMode mode) {
  switch (mode) {
    case AssignmentMode::kExclusive:
      return "exclusive";
    case AssignmentMode::kMulti:
      return "multi";
    case AssignmentMode::kProbabilistic:
      return "probabilistic";
  }
  return "?";
}

std::optional<AssignmentMode> parse_assignment_mode(std::string_view text) {
  for (auto m : {AssignmentMode::kExclusive, AssignmentMode::kMulti, AssignmentMode::kProbabilistic}) {
    if (assignment_mode_label(m) == text) return m;
  }
  return std::nullopt;
}

void check_gen_spec(const GenSpec& spec) {
  if (!std::isfinite(spec.duration_s) || spec.duration_s <= 0) {
    throw Error(Errc::kInvalidArgument, "duration_s must be positive");
  }
  if (!std::isfinite(spec.rate_hz) || spec.rate_hz <= 0) {
    throw Error(Errc::kInvalidArgument, "rate_hz must be positive");
  }
  if (spec.n_channels == 0) throw Error(Errc::kInvalidArgument, "n_channels must be at least 1");
  if (spec.n_channels > 256 || spec.n_units > 256) {
    throw Error(Errc::kInvalidArgument, "n_channels and n_units are limited to 256");
  }
  if (spec.duration_s * spec.rate_hz * spec.n_channels > static_cast<double>(kMaxSamples)) {
    throw Error(Errc::kInvalidArgument, "session would exceed " + std::to_string(kMaxSamples) + " samples");
  }
}

GenManifest generate_session(const GenSpec& spec, const std::filesystem::path& out_path,
                             const GenOptions& options) {
  check_gen_spec(spec);
  Rng rng(spec.seed);
  CreateOptions create;
  create.file_uuid = Uuid::from_bits_v4(rng.next(), rng.next());
  create.created_time = options.created_time ? *options.created_time : IsoTime::now_utc().to_string();
  Container c = Container::create(
      out_path, {{"lab", "synthetic"}, {"generator", "ephyspack gen"}, {"seed", std::to_string(spec.seed)}},
      create);
  write_global_metadata(c, make_global_metadata(c, kSessionStart));
  add_source_forest(c, spec, rng);

  GenManifest manifest;
  const std::uint32_t channels = spec.n_channels;
  const double rate = spec.rate_hz;
  const auto n = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(spec.duration_s * rate)));
  std::vector<std::string> electrodes;
  for (std::uint32_t k = 0; k < channels; ++k) electrodes.push_back(electrode(k));

  // Raw series: noise plus the unit templates at each spike. Spikes stay
  // inside the recorded window, which is rounded to whole samples.
  const std::vector<Spike> spikes = draw_spikes(spec, static_cast<double>(n) / rate, rng);
  std::vector<double> raw(n * channels);
  for (double& v : raw) v = 8.0 * rng.normal();
  for (const auto& s : spikes) {
    const auto at = static_cast<std::int64_t>(std::floor(s.time * rate)) - static_cast<std::int64_t>(kPreTrigger);
    for (std::uint64_t j = 0; j < kWaveLength; ++j) {
      const std::int64_t row = at + static_cast<std::int64_t>(j);
      if (row < 0 || row >= static_cast<std::int64_t>(n)) continue;
      for (std::uint32_t ch = 0; ch < channels; ++ch) {
        raw[static_cast<std::size_t>(row) * channels + ch] += template_value(s.unit, ch, channels, j);
      }
    }
  }
  TimeSeries series;
  series.name = "raw";
  series.label = "wideband extracellular voltage";
  series.values = make_tensor<double>({n, channels}, raw);
  series.unit = std::string("uV");
  series.start_time = 0.0;
  series.duration = static_cast<double>(n) / rate;
  RegularSampling reg{rate, {}};
  if (spec.duration_s >= 2.0) {
    // One marker half a sample late, as after a dropped-sample resync.
    const std::uint64_t m = n / 2;
    reg.sync_markers.push_back({m, static_cast<double>(m) / rate + 0.5 / rate});
  }
  series.sampling = reg;
  series.sources = electrodes;
  manifest.entities.push_back(write_time_series(c, series));

  if (spec.with_irregular) {
    const auto k = std::max<std::uint64_t>(2, static_cast<std::uint64_t>(spec.duration_s * 10));
    TimeSeries temp;
    temp.name = "temperature";
    temp.label = "body temperature";
    std::vector<double> ts(k), vals(k);
    const double step = spec.duration_s / static_cast<double>(k);
    for (std::uint64_t i = 0; i < k; ++i) {
      ts[i] = (static_cast<double>(i) + rng.uniform(0.1, 0.9)) * step;
      vals[i] = 37.0 + 0.2 * rng.normal();
    }
    temp.values = make_tensor<double>({k, 1}, vals);
    temp.unit = std::string("degC");
    temp.duration = spec.duration_s;
    temp.sampling = IrregularSampling{ts};
    temp.sources = {"subj1"};
    manifest.entities.push_back(write_time_series(c, temp));
  }

  SignalEvents ev;
  ev.name = "spikes";
  ev.label = "detected spikes";
  ev.duration = series.duration;
  ev.detection_description = "negative threshold crossing at -4 sd of the band-passed signal";
  ev.trigger = Trigger{"threshold", -40.0, "uV"};
  ev.channel_triggers[electrodes[0]] = Trigger{"threshold", -45.0, "uV"};
  ev.source_channels = electrodes;
  for (const auto& s : spikes) ev.event_times.push_back(s.time);
  if (spec.n_units > 0) {
    std::vector<double> tpl;
    for (std::uint32_t u = 0; u < spec.n_units; ++u) {
      for (std::uint64_t j = 0; j < kWaveLength; ++j) {
        for (std::uint32_t ch = 0; ch < channels; ++ch) tpl.push_back(template_value(u, ch, channels, j));
      }
    }
    ev.templates = SpikeTemplates{make_tensor<double>({spec.n_units, kWaveLength, channels}, tpl), "uV", rate};
  }
  if (!spikes.empty()) {
    PropertySet ps;
    ps.name = "sorting";
    Ragged<std::string> per_event;
    Waveforms wf;
    wf.rate_hz = rate;
    wf.unit = "uV";
    wf.pre_trigger_samples = kPreTrigger;
    wf.offsets.push_back(0);
    std::vector<double> payload;
    Features feat;
    feat.headings = {"amplitude", "width", "pc1"};
    for (const auto& s : spikes) {
      std::vector<std::string> row{electrodes[s.unit % channels]};
      if (channels > 1) row.push_back(electrodes[(s.unit + 1) % channels]);
      std::sort(row.begin(), row.end());
      per_event.push_row(row);
      const auto at = static_cast<std::int64_t>(std::floor(s.time * rate)) - static_cast<std::int64_t>(kPreTrigger);
      double amplitude = 0;
      for (std::uint64_t j = 0; j < kWaveLength; ++j) {
        const std::int64_t r = at + static_cast<std::int64_t>(j);
        for (std::uint32_t ch = 0; ch < channels; ++ch) {
          const double v = (r < 0 || r >= static_cast<std::int64_t>(n))
                               ? 0.0
                               : raw[static_cast<std::size_t>(r) * channels + ch];
          payload.push_back(v);
          if (ch == s.unit % channels) amplitude = std::min(amplitude, v);
        }
      }
      wf.offsets.push_back(wf.offsets.back() + kWaveLength);
      feat.values.insert(feat.values.end(), {amplitude, rng.uniform(0.2e-3, 0.6e-3), rng.normal()});
    }
    wf.payload = make_tensor<double>({spikes.size() * kWaveLength, channels}, payload);
    ps.per_event_channels = std::move(per_event);
    ps.waveforms = std::move(wf);
    ps.units = assign_units(spec, spikes, rng);
    for (std::uint32_t u = 0; u < spec.n_units; ++u) ps.unit_sources[unit_id(u)] = neuron(u);
    ps.features = std::move(feat);
    ev.property_sets.push_back(std::move(ps));
  }
  const std::string spikes_path = write_signal_events(c, ev);
  manifest.entities.push_back(spikes_path);
  manifest.derivations.push_back(add_derived_from(
      c, {{"/data/raw"}, {spikes_path},
          "threshold crossing -4 sd, seed " + std::to_string(spec.seed),
          {"ephyspack gen"},
          {{"threshold_sd", -4.0}, {"seed", spec.seed}, {"filter", std::string("bandpass 300-6000 Hz")}},
          kDerivedAt}));

  ExperimentalEvents stim;
  stim.name = "stimuli";
  stim.label = "light pulses";
  stim.monitor_end = spec.duration_s;
  stim.description = "optogenetic light pulses delivered through the implanted fiber";
  std::vector<double> intensity;
  std::vector<std::string> condition;
  for (double t = 0.1; t < spec.duration_s; t += 0.25) {
    stim.event_times.push_back(t);
    intensity.push_back(rng.uniform(1.0, 5.0));
    condition.push_back(rng.below(2) == 0 ? "A" : "B");
  }
  stim.properties["intensity"] = {intensity, "light power density at the fiber tip", "mW/mm^2"};
  stim.properties["condition"] = {condition, "stimulus condition label", std::nullopt};
  manifest.entities.push_back(write_experimental_events(c, stim));

  if (spec.with_image_stack) {
    const auto frames = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(spec.duration_s * 10));
    constexpr std::uint64_t kSide = 8;
    RoiGeometry roi;
    roi.vertices = {{{2.0, 2.0}}, {{2.0, 5.0}}, {{5.0, 5.0}}, {{5.0, 2.0}}};
    ImageStack st;
    st.name = "imaging";
    st.label = "calcium imaging";
    st.duration = spec.duration_s;
    std::vector<std::uint16_t> pixels(frames * kSide * kSide);
    for (auto& p : pixels) p = static_cast<std::uint16_t>(100 + rng.below(50));
    for (std::uint64_t f = 0; f < frames; ++f) {
      st.frame_times.push_back(static_cast<double>(f) / 10.0);
      roi.times.push_back(static_cast<double>(f) / 10.0);
      auto outline = roi.vertices;
      for (auto& v : outline) v[0] += 0.1 * static_cast<double>(f % 3);
      roi.track.push_back(outline);
    }
    add_source(c, {"roi1", SourceKind::kRoi, "ca1", {}, std::nullopt, roi});
    st.pixels = make_tensor<std::uint16_t>({frames, kSide, kSide}, pixels);
    st.dims = {DimSemantic::kTime, DimSemantic::kY, DimSemantic::kX};
    st.pixel_unit = "photon counts";
    st.geometry = RectangularGeometry{1e-6, 1e-6, {0.0, 0.0}};
    st.sources = {"roi1"};
    manifest.entities.push_back(write_image_stack(c, st));
  }

  constexpr std::uint64_t kBins = 10;
  std::vector<double> counts(kBins, 0.0);
  for (const auto& s : spikes) {
    auto b = static_cast<std::uint64_t>(s.time / spec.duration_s * kBins);
    counts[std::min(b, kBins - 1)] += 1.0;
  }
  GenericArray hist;
  hist.name = "spike_histogram";
  hist.description = "spike counts in equal time bins over the recording";
  hist.data = make_tensor<double>({kBins}, counts);
  hist.dims = {{"time bin", "s"}};
  hist.references = {{spikes_path, "histogram of"}};
  const std::string hist_path = write_generic_array(c, hist);
  manifest.entities.push_back(hist_path);
  manifest.derivations.push_back(add_derived_from(
      c, {{spikes_path}, {hist_path}, "binned spike counts", {"ephyspack gen"},
          {{"bins", std::uint64_t{kBins}}}, kDerivedAt}));

  std::sort(manifest.entities.begin(), manifest.entities.end());
  Grouping g;
  g.group_id = "session1";
  g.label = "recording session";
  g.members = manifest.entities;
  g.overrides["/data/stimuli"] = {{"trial_block", std::int64_t{1}}};
  add_grouping(c, g);
  manifest.groupings.push_back(g.group_id);

  manifest.sources = list_sources(c);
  c.finalize();
  return manifest;
}

}  // namespace ephyspack
