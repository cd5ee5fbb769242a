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

// Acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero
// if any fails. Tolerances and time limits are pinned below.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ephyspack/ingest.h"
#include "ephyspack/jsonl.h"
#include "ephyspack/model.h"
#include "ephyspack/query.h"
#include "ephyspack/validate.h"
#include "support/deep.h"
#include "support/fixtures.h"
#include "support/oracles.h"

namespace ep = ephyspack;
namespace et = ephyspack::testing;
namespace fs = std::filesystem;

namespace {

// ---- pinned limits ----------------------------------------------------------

constexpr double kC1Seconds = 120;
constexpr double kC2Seconds = 300;
constexpr double kC3Seconds = 120;
constexpr double kC4Seconds = 180;
constexpr double kC5Seconds = 60;
constexpr double kC6Seconds = 60;
constexpr double kC7Seconds = 60;

constexpr std::size_t kC2PerKind = 1000;
constexpr std::size_t kC2PerFile = 250;
constexpr std::size_t kC3MaxBytes = 4096;
constexpr std::size_t kC4Specs = 50;
constexpr std::size_t kC5MarkerSets = 300;
constexpr std::uint64_t kC5LastIndex = 10000;
constexpr double kC5RelTol = 1e-12;
constexpr double kC6ProbTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Evidence collected by the checks, keyed by a short name; C1 maps
// requirement clauses onto these names.
using Evidence = std::map<std::string, bool>;

void note(Evidence& ev, const std::string& key, bool ok) {
  auto [it, fresh] = ev.emplace(key, ok);
  if (!fresh) it->second = it->second && ok;
}

// ---- round trips ------------------------------------------------------------

template <typename T>
struct FieldNames;
template <>
struct FieldNames<ep::TimeSeries> {
  static constexpr const char* kind = "TimeSeries";
  static constexpr std::array names{"name", "label", "values", "unit", "start_time", "duration", "sampling", "sources"};
};
template <>
struct FieldNames<ep::SignalEvents> {
  static constexpr const char* kind = "SignalEvents";
  static constexpr std::array names{"name",     "label",          "start_time",          "duration",
                                    "event_times", "source_channels", "templates",       "detection_description",
                                    "trigger",  "channel_triggers", "property_sets"};
};
template <>
struct FieldNames<ep::PropertySet> {
  static constexpr const char* kind = "PropertySet";
  static constexpr std::array names{"name", "per_event_channels", "waveforms", "units", "unit_sources", "features"};
};
template <>
struct FieldNames<ep::ImageStack> {
  static constexpr const char* kind = "ImageStack";
  static constexpr std::array names{"name",        "label",      "start_time", "duration", "pixels",
                                    "dims",        "frame_times", "pixel_unit", "geometry", "sources"};
};
template <>
struct FieldNames<ep::ExperimentalEvents> {
  static constexpr const char* kind = "ExperimentalEvents";
  static constexpr std::array names{"name",        "label",       "monitor_start", "monitor_end",
                                    "description", "event_times", "properties"};
};
template <>
struct FieldNames<ep::GenericArray> {
  static constexpr const char* kind = "GenericArray";
  static constexpr std::array names{"name", "description", "data", "dims", "slice_headings", "categories", "references"};
};
template <>
struct FieldNames<ep::SignalSource> {
  static constexpr const char* kind = "Source";
  static constexpr std::array names{"source_id", "kind", "parent", "static_meta", "position", "roi"};
};
template <>
struct FieldNames<ep::DerivedFrom> {
  static constexpr const char* kind = "DerivedFrom";
  static constexpr std::array names{"inputs", "outputs", "activity", "agents", "params", "timestamp"};
};
template <>
struct FieldNames<ep::Grouping> {
  static constexpr const char* kind = "Grouping";
  static constexpr std::array names{"group_id", "label", "members", "overrides"};
};
template <>
struct FieldNames<ep::GlobalMetadata> {
  static constexpr const char* kind = "Global";
  static constexpr std::array names{"format_version", "file_uuid", "identification", "session_start"};
};

// Compares field by field and records "field:<Kind>.<name>" evidence.
template <typename T>
bool compare_fields(const T& wrote, const T& read, Evidence& ev) {
  using N = FieldNames<T>;
  const auto a = et::deep::fields(wrote);
  const auto b = et::deep::fields(read);
  static_assert(std::tuple_size_v<decltype(a)> == N::names.size());
  bool all = true;
  [&]<std::size_t... I>(std::index_sequence<I...>) {
    ((note(ev, std::string("field:") + N::kind + "." + N::names[I],
           et::canonical(std::get<I>(a)) == et::canonical(std::get<I>(b))),
      all = all && et::canonical(std::get<I>(a)) == et::canonical(std::get<I>(b))),
     ...);
  }(std::make_index_sequence<N::names.size()>{});
  return all;
}

struct RoundTripTally {
  std::map<std::string, std::size_t> checked;
  std::map<std::string, std::size_t> mismatched;
  std::size_t files = 0;
};

// Writes `count` random entities of every kind in files of `per_file`,
// reopens each file and compares what comes back.
void round_trip_all(std::uint64_t seed, std::size_t count, std::size_t per_file, const et::TempDir& dir,
                    RoundTripTally& tally, Evidence& ev) {
  et::EntityFactory fac(seed);
  auto record = [&](const char* kind, bool ok) {
    ++tally.checked[kind];
    if (!ok) ++tally.mismatched[kind];
  };
  auto name = [](const char* prefix, std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%05zu", prefix, k);
    return std::string(buf);
  };
  std::size_t file_no = 0;
  for (std::size_t done = 0; done < count; done += per_file) {
    const std::size_t n = std::min(per_file, count - done);
    const fs::path path = dir.file("rt" + std::to_string(file_no++));
    std::vector<ep::TimeSeries> ts;
    std::vector<ep::SignalEvents> se;
    std::vector<ep::ImageStack> is;
    std::vector<ep::ExperimentalEvents> xe;
    std::vector<ep::GenericArray> ga;
    std::vector<ep::SignalSource> src;
    std::vector<ep::DerivedFrom> rel;
    std::vector<ep::Grouping> grp;
    ep::GlobalMetadata global;
    {
      ep::Container c = et::make_session(path, file_no);
      global = ep::read_global_metadata(c);
      std::vector<std::string> ids = ep::list_sources(c);
      for (std::size_t k = 0; k < n; ++k) {
        src.push_back(fac.source(name("s", k), ids));
        ep::add_source(c, src.back());
        ids.push_back(src.back().source_id);
      }
      std::vector<std::string> paths;
      for (std::size_t k = 0; k < n; ++k) {
        ts.push_back(fac.time_series(name("ts", k)));
        paths.push_back(ep::write_time_series(c, ts.back()));
        se.push_back(fac.signal_events(name("se", k)));
        paths.push_back(ep::write_signal_events(c, se.back()));
        is.push_back(fac.image_stack(name("is", k)));
        paths.push_back(ep::write_image_stack(c, is.back()));
        xe.push_back(fac.experimental_events(name("xe", k)));
        paths.push_back(ep::write_experimental_events(c, xe.back()));
        ga.push_back(fac.generic_array(name("ga", k)));
        paths.push_back(ep::write_generic_array(c, ga.back()));
      }
      // Derivations only point forward in `paths`, so the graph stays acyclic.
      for (std::size_t k = 0; k < n; ++k) {
        ep::DerivedFrom d;
        const std::size_t cut = 1 + fac.below(paths.size() - 1);
        for (std::uint64_t j = 0, m = 1 + fac.below(3); j < m; ++j) d.inputs.push_back(paths[fac.below(cut)]);
        for (std::uint64_t j = 0, m = 1 + fac.below(2); j < m; ++j) {
          d.outputs.push_back(paths[cut + fac.below(paths.size() - cut)]);
        }
        d.activity = fac.text();
        for (std::uint64_t j = 0, m = 1 + fac.below(3); j < m; ++j) d.agents.push_back(fac.text());
        for (std::uint64_t j = 0, m = fac.below(4); j < m; ++j) d.params["p" + std::to_string(j)] = fac.attr();
        d.timestamp = "2026-01-05T10:00:00Z";
        rel.push_back(d);
        ep::add_derived_from(c, d);
      }
      for (std::size_t k = 0; k < n; ++k) {
        ep::Grouping g;
        g.group_id = name("g", k);
        g.label = fac.text();
        std::set<std::string> seen;
        for (std::uint64_t j = 0, m = 1 + fac.below(5); j < m; ++j) {
          const auto& p = paths[fac.below(paths.size())];
          if (seen.insert(p).second) g.members.push_back(p);
        }
        if (fac.below(2) == 0) g.overrides[g.members.front()] = {{"gain", fac.any_finite()}, {"note", fac.attr()}};
        grp.push_back(g);
        ep::add_grouping(c, g);
      }
      c.finalize();
    }
    ++tally.files;
    ep::Container c = ep::Container::open(path);
    record("Global", compare_fields(global, ep::read_global_metadata(c), ev));
    for (const auto& s : src) record("Source", compare_fields(s, ep::get_source(c, s.source_id), ev));
    for (const auto& x : ts) record("TimeSeries", compare_fields(x, ep::read_time_series(c, ep::entity_path(x.name)), ev));
    for (const auto& x : se) {
      auto back = ep::read_signal_events(c, ep::entity_path(x.name));
      bool ok = compare_fields(x, back, ev);
      for (std::size_t k = 0; k < x.property_sets.size() && k < back.property_sets.size(); ++k) {
        const auto& ps = x.property_sets[k];
        const bool same = compare_fields(ps, back.property_sets[k], ev);
        if (ps.units) note(ev, std::string("assign:") + std::string(ep::assignment_mode_name(*ps.units)), same);
        if (ps.waveforms) {
          // Each event's waveform view must carry the stored rows, rate and unit.
          for (std::uint64_t e = 0; e < x.event_times.size(); ++e) {
            auto view = ep::get_waveform(back, ps.name, e);
            const auto rows = ps.waveforms->offsets[e + 1] - ps.waveforms->offsets[e];
            note(ev, "special:waveform_view",
                 view.samples.shape[0] == rows && view.rate_hz == ps.waveforms->rate_hz &&
                     view.unit == ps.waveforms->unit && view.event_time == x.event_times[e]);
          }
        }
      }
      record("SignalEvents", ok);
    }
    for (const auto& x : is) record("ImageStack", compare_fields(x, ep::read_image_stack(c, ep::entity_path(x.name)), ev));
    for (const auto& x : xe) {
      record("ExperimentalEvents",
             compare_fields(x, ep::read_experimental_events(c, ep::entity_path(x.name)), ev));
    }
    for (const auto& x : ga) record("GenericArray", compare_fields(x, ep::read_generic_array(c, ep::entity_path(x.name)), ev));
    auto stored = ep::list_derivations(c);
    bool rel_ok = stored.size() == rel.size();
    for (std::size_t k = 0; k < std::min(stored.size(), rel.size()); ++k) {
      record("DerivedFrom", compare_fields(rel[k], stored[k].rel, ev));
    }
    if (!rel_ok) ++tally.mismatched["DerivedFrom"];
    for (const auto& g : grp) record("Grouping", compare_fields(g, ep::read_grouping(c, g.group_id), ev));
  }
}

// ---- criterion 2 --------------------------------------------------------------

Outcome c2_round_trip(Evidence& ev) {
  et::TempDir dir;
  RoundTripTally tally;
  round_trip_all(2026, kC2PerKind, kC2PerFile, dir, tally, ev);
  Outcome o;
  std::ostringstream d;
  for (const auto& [kind, n] : tally.checked) {
    const std::size_t bad = tally.mismatched[kind];
    const bool enough = kind == "Global" || n >= kC2PerKind;
    if (bad > 0 || !enough) o.pass = false;
    d << kind << "=" << n << (bad ? " (" + std::to_string(bad) + " mismatched)" : "") << " ";
  }
  d << "in " << tally.files << " files, bit-exact";
  o.detail = d.str();
  return o;
}

// ---- criterion 3 --------------------------------------------------------------

struct SmallFile {
  ep::TimeSeries ts;
  ep::SignalEvents se;
  ep::GenericArray ga;
};

SmallFile write_small_file(const fs::path& path) {
  ep::Container c = ep::Container::create(path, {{"lab", "L"}}, et::fixed_create_options(9));
  ep::write_global_metadata(c, ep::make_global_metadata(c, et::kSessionStart));
  ep::add_source(c, {"e0", ep::SourceKind::kElectrode, std::nullopt, {}, std::nullopt, std::nullopt});
  ep::add_source(c, {"n1", ep::SourceKind::kNeuron, std::nullopt, {}, std::nullopt, std::nullopt});
  SmallFile f;
  f.ts.name = "v";
  f.ts.label = "v";
  f.ts.values = ep::make_tensor<double>({12, 1}, {0.5, -0.0, 1e-310, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  f.ts.unit = std::string("mV");
  f.ts.duration = 1.2;
  f.ts.sampling = ep::RegularSampling{10, {{6, 0.65}}};
  f.ts.sources = {"e0"};
  ep::write_time_series(c, f.ts);
  f.se.name = "s";
  f.se.label = "s";
  f.se.duration = 2;
  f.se.event_times = {0.25, 0.5, 1.75};
  f.se.source_channels = {"e0"};
  ep::PropertySet ps;
  ps.name = "k";
  ps.units = ep::ExclusiveUnits{{1, -1, 1}};
  ps.unit_sources = {{1, "n1"}};
  f.se.property_sets.push_back(ps);
  ep::write_signal_events(c, f.se);
  f.ga.name = "g";
  f.ga.description = "d";
  f.ga.data = ep::make_tensor<std::int32_t>({2, 2}, {1, -2, 3, -4});
  f.ga.dims = {{"r", std::nullopt}, {"c", std::string("Hz")}};
  ep::write_generic_array(c, f.ga);
  c.finalize();
  return f;
}

Outcome c3_byte_flips() {
  et::TempDir dir;
  const SmallFile want = write_small_file(dir.file("small"));
  const std::string good = et::read_bytes(dir.file("small"));
  Outcome o;
  if (good.size() > kC3MaxBytes) {
    o.pass = false;
    o.detail = "fixture is " + std::to_string(good.size()) + " bytes";
    return o;
  }
  std::size_t flips = 0, flagged = 0, silent = 0, read_only = 0;
  const fs::path bad = dir.file("bad");
  for (std::size_t at = 0; at < good.size(); ++at) {
    for (unsigned mask : {0xFFu, 0x01u, 0x80u}) {
      std::string bytes = good;
      bytes[at] = static_cast<char>(static_cast<unsigned char>(bytes[at]) ^ mask);
      et::write_bytes(bad, bytes);
      ++flips;
      bool detected = false;
      std::optional<ep::Container> c;
      try {
        c.emplace(ep::Container::open(bad));
        detected = ep::validate_container(*c, {.level = ep::ValidationLevel::kFull}).has_errors();
      } catch (const ep::Error&) {
        detected = true;
      }
      if (detected) {
        ++flagged;
        continue;
      }
      // Not flagged: every value must still read back unchanged.
      try {
        const bool same = et::deep_equal(ep::read_time_series(*c, "/data/v"), want.ts) &&
                          et::deep_equal(ep::read_signal_events(*c, "/data/s"), want.se) &&
                          et::deep_equal(ep::read_generic_array(*c, "/data/g"), want.ga);
        if (!same) ++silent;
      } catch (const ep::Error&) {
        ++read_only;
      }
    }
  }
  o.pass = flagged == flips && silent == 0;
  o.detail = std::to_string(flips) + " flips over " + std::to_string(good.size()) + " bytes, " +
             std::to_string(flagged) + " flagged by open/Full validation, " + std::to_string(silent) +
             " silent wrong reads, " + std::to_string(read_only) + " caught only on read";
  return o;
}

// ---- criterion 4 --------------------------------------------------------------

ep::GenSpec random_spec(std::mt19937_64& g, std::uint64_t k) {
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(g); };
  ep::GenSpec s;
  s.seed = 1000 + k;
  s.n_channels = static_cast<std::uint32_t>(pick(1, 8));
  s.n_units = static_cast<std::uint32_t>(pick(0, 7));
  s.duration_s = std::uniform_real_distribution<double>(0.25, 4.0)(g);
  const double rates[] = {20, 100, 1000, 2500, 30000};
  s.rate_hz = rates[pick(0, 4)];
  s.with_image_stack = pick(0, 3) != 0;
  s.with_irregular = pick(0, 3) != 0;
  s.assignment_mode = static_cast<ep::AssignmentMode>(k % 3);
  return s;
}

Outcome c4_generated_and_mutations(Evidence& ev) {
  et::TempDir dir;
  std::mt19937_64 g(44);
  std::size_t clean = 0;
  std::vector<std::string> dirty;
  for (std::size_t k = 0; k < kC4Specs; ++k) {
    const auto f = dir.file("spec" + std::to_string(k));
    try {
      ep::generate_session(random_spec(g, k), f);
      const auto r = ep::validate_file(f);
      if (r.errors == 0) {
        ++clean;
      } else {
        dirty.push_back("spec " + std::to_string(k) + ": " + ep::format_finding(r.findings.front()));
      }
    } catch (const ep::Error& e) {
      dirty.push_back("spec " + std::to_string(k) + ": " + e.what());
    }
  }
  note(ev, "special:validate_clean", clean == kC4Specs);

  const auto bases = et::mutation_bases(dir);
  std::size_t triggered = 0, as_error = 0;
  std::set<std::string> rules_hit;
  std::vector<std::string> failures;
  for (const auto& m : ep::mutation_catalog()) {
    const auto out = dir.file("mut-" + m.id);
    bool ok = false;
    try {
      const auto base = et::apply_mutation(bases, m.id, out);
      const ep::RuleInfo* rule = ep::find_rule(m.rule);
      const auto before = ep::validate_file(base);
      const auto after = ep::validate_file(out);
      auto count = [&](const ep::ValidationReport& r) {
        return std::count_if(r.findings.begin(), r.findings.end(), [&](const ep::Finding& f) {
          return f.code == m.rule && f.severity == rule->severity;
        });
      };
      ok = count(after) > count(before);
      if (ok && rule->severity == ep::Severity::kError) ++as_error;
    } catch (const ep::Error& e) {
      failures.push_back(m.id + ": " + e.what());
    }
    if (ok) {
      ++triggered;
      rules_hit.insert(m.rule);
    } else {
      failures.push_back(m.id);
    }
    note(ev, "rule:" + m.rule, ok);
  }
  std::size_t error_rules = 0, other_rules = 0;
  bool every_rule = true;
  for (const auto& r : ep::rule_catalog()) {
    (r.severity == ep::Severity::kError ? error_rules : other_rules)++;
    if (!rules_hit.contains(std::string(r.code))) every_rule = false;
  }
  note(ev, "special:mutations_all", failures.empty() && every_rule);
  Outcome o;
  o.pass = clean == kC4Specs && failures.empty() && every_rule;
  o.detail = std::to_string(clean) + "/" + std::to_string(kC4Specs) + " generated specs with 0 errors; " +
             std::to_string(triggered) + "/" + std::to_string(ep::mutation_catalog().size()) +
             " mutations raise their rule (" + std::to_string(as_error) + " as Error; " +
             std::to_string(other_rules) + " of " + std::to_string(error_rules + other_rules) +
             " rules are Warning/Info and are checked at their own severity); " +
             std::to_string(rules_hit.size()) + " rules covered";
  for (const auto& f : dirty) o.detail += "\n    not clean: " + f;
  for (const auto& f : failures) o.detail += "\n    failed: " + f;
  return o;
}

// ---- criterion 5 --------------------------------------------------------------

// Walks the clock one sample at a time: a marker re-anchors it, otherwise
// it moves one period past the previous sample. Steps are counted rather
// than summed so the reference carries no accumulated rounding.
std::vector<long double> simulate_clock(double rate, double start, const std::vector<ep::SyncMarker>& markers,
                                        std::uint64_t last) {
  std::vector<long double> out(last + 1);
  long double anchor = start;
  std::uint64_t steps = 0;
  std::size_t next = 0;
  for (std::uint64_t i = 0; i <= last; ++i, ++steps) {
    if (next < markers.size() && markers[next].index == i) {
      anchor = markers[next++].true_time;
      steps = 0;
    }
    out[i] = anchor + static_cast<long double>(steps) / static_cast<long double>(rate);
  }
  return out;
}

Outcome c5_markers(Evidence& ev) {
  et::TempDir dir;
  std::mt19937_64 g(55);
  std::uniform_real_distribution<double> u01(0, 1);
  double worst = 0;
  std::size_t decreasing = 0, rejected = 0, sets = 0;
  for (std::size_t s = 0; s < kC5MarkerSets; ++s) {
    const double rate = std::exp(std::log(10.0) + u01(g) * (std::log(40000.0) - std::log(10.0)));
    const double start = -5 + 105 * u01(g);
    const std::size_t count = std::uniform_int_distribution<std::size_t>(0, 5)(g);
    std::set<std::uint64_t> picks;
    while (picks.size() < count) picks.insert(std::uniform_int_distribution<std::uint64_t>(1, kC5LastIndex)(g));
    std::vector<ep::SyncMarker> markers;
    double prev_t = start;
    std::uint64_t prev_i = 0;
    for (std::uint64_t i : picks) {
      // Drift between -0.9 and +50 periods relative to the nominal clock.
      const double drift = (-0.9 + 50.9 * u01(g)) / rate;
      const double t = prev_t + static_cast<double>(i - prev_i) / rate + drift;
      markers.push_back({i, t});
      prev_t = t;
      prev_i = i;
    }
    ep::TimeSeries ts;
    ts.name = "c" + std::to_string(s);
    ts.label = "clock";
    ts.values = ep::make_tensor<float>({kC5LastIndex + 1, 1}, std::vector<float>(kC5LastIndex + 1, 0.0f));
    ts.unit = std::string("V");
    ts.start_time = start;
    ts.duration = (markers.empty() ? start : markers.back().true_time) - start +
                  static_cast<double>(kC5LastIndex + 1 - (markers.empty() ? 0 : markers.back().index)) / rate;
    ts.sampling = ep::RegularSampling{rate, markers};
    ts.sources = {"e0"};
    const auto path = dir.file("clock" + std::to_string(s));
    try {
      ep::Container c = et::make_session(path);
      ep::write_time_series(c, ts);
      c.finalize();
    } catch (const ep::Error& e) {
      ++rejected;
      continue;
    }
    ++sets;
    ep::Container c = ep::Container::open(path);
    const auto back = ep::read_time_series(c, ep::entity_path(ts.name));
    const auto oracle = simulate_clock(rate, start, markers, kC5LastIndex);
    double prev = -INFINITY;
    for (std::uint64_t i = 0; i <= kC5LastIndex; ++i) {
      const double t = ep::time_at_index(back, i);
      const long double want = oracle[i];
      const long double err = fabsl(static_cast<long double>(t) - want);
      const long double scale = fabsl(want);
      const double rel = static_cast<double>(scale > 0 ? err / scale : err);
      worst = std::max(worst, rel);
      if (t < prev) ++decreasing;
      prev = t;
    }
    std::filesystem::remove(path);
  }
  Outcome o;
  o.pass = rejected == 0 && decreasing == 0 && worst <= kC5RelTol && sets == kC5MarkerSets;
  note(ev, "special:time_at_index", o.pass);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%zu marker sets, indices 0..%llu, worst relative error %.3g (limit %.0e), %zu decreases, %zu "
                "rejected by the writer",
                sets, static_cast<unsigned long long>(kC5LastIndex), worst, kC5RelTol, decreasing, rejected);
  o.detail = buf;
  return o;
}

// ---- criterion 6 --------------------------------------------------------------

Outcome c6_api(Evidence& ev) {
  et::TempDir dir;
  std::mt19937_64 g(66);
  std::map<std::string, std::size_t> checks, bad;
  auto check = [&](const std::string& fn, bool ok) {
    ++checks[fn];
    if (!ok) ++bad[fn];
  };
  double worst_prob = 0;
  bool tetrode = true;
  int session = 0;
  for (auto mode : {ep::AssignmentMode::kExclusive, ep::AssignmentMode::kMulti, ep::AssignmentMode::kProbabilistic}) {
    const auto f = dir.file("s" + std::to_string(session++));
    ep::generate_session({.seed = 7, .assignment_mode = mode}, f);
    ep::Container c = ep::Container::open(f);

    // 1. global metadata, against the superblock and the raw attributes.
    const auto gm = ep::read_global_metadata(c);
    const auto raw = c.attributes(c.resolve("/global"));
    bool gm_ok = gm.file_uuid == c.superblock().file_uuid.to_string() &&
                 gm.format_version == c.superblock().version &&
                 std::get<std::string>(raw.at("session_start")) == gm.session_start;
    for (const auto& [k, v] : c.attributes(c.resolve("/"))) {
      if (k.rfind("id.", 0) == 0) gm_ok = gm_ok && gm.identification.at(k.substr(3)) == std::get<std::string>(v);
    }
    check("global_metadata", gm_ok);
    // 2. inventory
    check("inventory", ep::inventory(c) == et::oracle_inventory(c));
    for (const auto& p : et::payload_paths(c)) {
      // 3. entity metadata
      check("entity_metadata", ep::entity_metadata(c, p) == et::oracle_metadata(c, p));
      // 4. region reads
      ep::Extent shape;
      for (const auto& e : et::oracle_inventory(c)) {
        if (e.path == p) shape = e.dims;
      }
      for (int trial = 0; trial < 25; ++trial) {
        ep::Extent off(shape.size()), ext(shape.size());
        for (std::size_t d = 0; d < shape.size(); ++d) {
          off[d] = std::uniform_int_distribution<std::uint64_t>(0, shape[d])(g);
          ext[d] = std::uniform_int_distribution<std::uint64_t>(0, shape[d] - off[d])(g);
        }
        check("read_region", et::bit_equal(ep::read_region(c, p, off, ext), et::oracle_region(c, p, off, ext)));
      }
      // 6. related entities
      check("related_entities", ep::related_entities(c, p) == et::oracle_related(c, p));
      for (auto dir_kind : {ep::ChainDirection::kAncestors, ep::ChainDirection::kDescendants}) {
        auto chain = ep::derivation_chain(c, p, dir_kind);
        std::set<std::string> ids;
        for (const auto& r : chain) ids.insert(r.rel_id);
        check("derivation_chain", ids == et::oracle_chain_ids(c, p, dir_kind) && ids.size() == chain.size() &&
                                      et::is_topological(chain));
      }
    }
    // 5. entities by source, with and without descendants
    for (const auto& id : ep::list_sources(c)) {
      for (bool desc : {false, true}) {
        check("entities_by_source", ep::entities_by_source(c, id, desc) == et::oracle_entities_by_source(c, id, desc));
      }
    }
    const auto tt = ep::entities_by_source(c, "tt1", true);
    auto has = [&](const std::string& p) { return std::find(tt.begin(), tt.end(), p) != tt.end(); };
    tetrode = tetrode && has("/data/raw") && has("/data/spikes") && ep::entities_by_source(c, "tt1", false).empty();
    // 7. groupings, 8. members
    const auto groups = ep::read_groupings(c);
    const auto listed = ep::list_groupings(c);
    bool lg = listed.size() == groups.size();
    for (std::size_t k = 0; lg && k < groups.size(); ++k) {
      lg = listed[k].group_id == groups[k].group_id && listed[k].label == groups[k].label &&
           listed[k].member_count == groups[k].members.size();
    }
    check("list_groupings", lg);
    for (const auto& gr : groups) check("grouping_members", ep::grouping_members(c, gr.group_id) == et::oracle_members(c, gr.group_id));
    for (const char* needle : {"", "seed", "SEED", "Binned", "zz"}) {
      check("search_provenance", ep::search_provenance(c, needle) == et::oracle_search(c, needle));
    }
    if (mode == ep::AssignmentMode::kProbabilistic) {
      const auto se = ep::read_signal_events(c, "/data/spikes");
      for (const auto& ps : se.property_sets) {
        const auto* pr = ps.units ? std::get_if<ep::ProbabilisticUnits>(&*ps.units) : nullptr;
        if (!pr) continue;
        const std::size_t u = pr->unit_ids.size();
        for (std::size_t e = 0; e * u < pr->probs.size(); ++e) {
          double sum = 0;
          for (std::size_t j = 0; j < u; ++j) sum += pr->probs[e * u + j];
          worst_prob = std::max(worst_prob, std::fabs(sum - 1.0));
        }
      }
    }
  }
  Outcome o;
  std::ostringstream d;
  for (const auto& [fn, n] : checks) {
    const bool ok = bad[fn] == 0;
    note(ev, "api:" + fn, ok);
    if (!ok) o.pass = false;
    d << fn << " " << (n - bad[fn]) << "/" << n << ", ";
  }
  o.pass = o.pass && checks.size() == 10 && worst_prob <= kC6ProbTol && tetrode;
  note(ev, "special:tetrode", tetrode);
  char buf[160];
  std::snprintf(buf, sizeof buf, "probability rows off by at most %.2g (limit %.0e), tetrode lookup %s", worst_prob,
                kC6ProbTol, tetrode ? "ok" : "WRONG");
  d << buf;
  o.detail = d.str();
  return o;
}

// ---- criterion 7 --------------------------------------------------------------

std::string query_transcript(const ep::Container& c) {
  std::string out;
  for (const auto& e : ep::inventory(c)) out += ep::to_json(e) + "\n";
  for (const auto& p : et::payload_paths(c)) {
    out += ep::to_json(ep::entity_metadata(c, p)) + "\n";
    for (const auto& r : ep::related_entities(c, p)) out += ep::to_json(r) + "\n";
    for (auto d : {ep::ChainDirection::kAncestors, ep::ChainDirection::kDescendants}) {
      for (const auto& r : ep::derivation_chain(c, p, d)) out += ep::to_json(r) + "\n";
    }
  }
  for (const auto& g : ep::list_groupings(c)) {
    out += ep::to_json(g) + "\n";
    for (const auto& m : ep::grouping_members(c, g.group_id)) out += ep::to_json(m) + "\n";
  }
  for (const auto& r : ep::search_provenance(c, "")) out += ep::to_json(r) + "\n";
  return out;
}

std::string validation_transcript(const fs::path& f, unsigned threads) {
  std::string out;
  for (auto level : {ep::ValidationLevel::kFast, ep::ValidationLevel::kFull}) {
    const auto r = ep::validate_file(f, {.level = level, .threads = threads});
    for (const auto& x : r.findings) out += ep::format_finding(x) + "\n";
    out += ep::to_json(r) + "\n";
  }
  return out;
}

Outcome c7_determinism() {
  et::TempDir dir;
  std::mt19937_64 g(77);
  std::size_t gen_same = 0, gen_total = 0;
  for (std::uint64_t k = 0; k < 12; ++k) {
    const auto spec = random_spec(g, k);
    ep::generate_session(spec, dir.file("a"), {.created_time = et::kFixedCreated});
    ep::generate_session(spec, dir.file("b"), {.created_time = et::kFixedCreated});
    ++gen_total;
    if (et::read_bytes(dir.file("a")) == et::read_bytes(dir.file("b"))) ++gen_same;
    fs::remove(dir.file("a"));
    fs::remove(dir.file("b"));
  }

  const auto bases = et::mutation_bases(dir);
  std::vector<fs::path> files = bases;
  for (const char* id : {"flip-chunk-byte", "scale-prob-row", "derivation-cycle", "timestamps-unordered", "drop-global"}) {
    files.push_back(dir.file(std::string("m-") + id));
    et::apply_mutation(bases, id, files.back());
  }
  std::size_t val_same = 0, val_total = 0;
  for (const auto& f : files) {
    const std::string ref = validation_transcript(f, 1);
    for (unsigned t : {1u, 2u, 4u, 8u, 0u}) {
      ++val_total;
      if (validation_transcript(f, t) == ref) ++val_same;
    }
  }

  std::atomic<std::size_t> q_same{0}, q_total{0};
  for (const auto& f : bases) {
    const std::string ref = query_transcript(ep::Container::open(f));
    ++q_total;
    if (query_transcript(ep::Container::open(f)) == ref) ++q_same;
    const ep::Container shared = ep::Container::open(f);
    std::vector<std::thread> pool;
    for (int t = 0; t < 8; ++t) {
      pool.emplace_back([&] {
        ++q_total;
        if (query_transcript(shared) == ref) ++q_same;
      });
    }
    for (auto& th : pool) th.join();
  }
  Outcome o;
  o.pass = gen_same == gen_total && val_same == val_total && q_same == q_total;
  o.detail = "generator " + std::to_string(gen_same) + "/" + std::to_string(gen_total) +
             " byte-identical; validator " + std::to_string(val_same) + "/" + std::to_string(val_total) +
             " identical across runs and 1-8 threads; queries " + std::to_string(q_same.load()) + "/" +
             std::to_string(q_total.load()) + " identical across handles and 8 threads";
  return o;
}

// ---- criterion 1 --------------------------------------------------------------

struct Clause {
  const char* id;
  const char* topic;
  std::vector<const char*> evidence;
};

// Requirement clauses in the original order of topics. Wording is a short
// label, not the text of the requirement.
const std::vector<Clause>& clauses() {
  static const std::vector<Clause> kClauses = {
      {"global.version", "format version", {"field:Global.format_version", "rule:C002", "rule:G004"}},
      {"global.identification", "identification metadata", {"field:Global.identification", "rule:G006"}},
      {"global.uuid", "unique file id", {"field:Global.file_uuid", "rule:G002", "rule:G003", "rule:C006"}},
      {"source.type", "source kinds", {"field:Source.kind", "rule:S001"}},
      {"source.id", "source identifier", {"field:Source.source_id"}},
      {"source.hierarchy", "source hierarchy", {"field:Source.parent", "special:tetrode", "rule:S002", "rule:S003"}},
      {"source.metadata", "source metadata", {"field:Source.static_meta", "field:Source.position", "rule:S007"}},
      {"source.roi", "ROI-derived sources", {"field:Source.roi", "rule:S004", "rule:S005", "rule:S006", "rule:S008"}},
      {"source.session_properties", "per-session overrides", {"field:Grouping.overrides", "rule:R008"}},
      {"ts.values", "sample values with units", {"field:TimeSeries.values", "field:TimeSeries.unit", "rule:T001", "rule:T010"}},
      {"ts.times", "time of each index", {"field:TimeSeries.sampling", "special:time_at_index", "rule:T002", "rule:T004"}},
      {"ts.start", "starting time", {"field:TimeSeries.start_time", "rule:L004", "rule:T003"}},
      {"ts.duration", "duration", {"field:TimeSeries.duration", "rule:T011", "rule:T009"}},
      {"ts.rate", "sampling rate", {"field:TimeSeries.sampling", "rule:T005"}},
      {"ts.sync", "resynchronization markers", {"special:time_at_index", "rule:T006"}},
      {"ts.provenance", "provenance of derived series", {"api:derivation_chain", "rule:R001"}},
      {"ts.label", "descriptive label", {"field:TimeSeries.label", "rule:T012"}},
      {"ts.sources", "signal sources", {"field:TimeSeries.sources", "rule:T007", "rule:T008"}},
      {"se.start", "recording start", {"field:SignalEvents.start_time", "rule:E002"}},
      {"se.duration", "recording duration", {"field:SignalEvents.duration", "rule:E013"}},
      {"se.times", "event times", {"field:SignalEvents.event_times", "rule:E001"}},
      {"se.channels", "session source channels", {"field:SignalEvents.source_channels", "rule:E006"}},
      {"se.templates", "spike templates", {"field:SignalEvents.templates", "rule:E012"}},
      {"se.detection", "detection description", {"field:SignalEvents.detection_description"}},
      {"se.trigger", "trigger type and threshold", {"field:SignalEvents.trigger", "rule:E009"}},
      {"se.channel_triggers", "per-channel triggers", {"field:SignalEvents.channel_triggers"}},
      {"se.event_channels", "per-event channels", {"field:PropertySet.per_event_channels", "rule:E007"}},
      {"se.waveforms", "waveforms with rate, unit, timing",
       {"field:PropertySet.waveforms", "special:waveform_view", "rule:E010", "rule:E003"}},
      {"se.units.exclusive", "one unit per event", {"assign:exclusive", "rule:E005"}},
      {"se.units.multi", "several units per event", {"assign:multi", "rule:E003"}},
      {"se.units.probabilistic", "probabilistic units", {"assign:probabilistic", "rule:E004", "rule:E008"}},
      {"se.features", "feature vectors", {"field:PropertySet.features", "rule:E011"}},
      {"se.property_sets", "multiple property sets", {"field:SignalEvents.property_sets"}},
      {"is.start", "starting time", {"field:ImageStack.start_time"}},
      {"is.duration", "duration", {"field:ImageStack.duration", "rule:I009"}},
      {"is.images", "image collection and dimension meaning",
       {"field:ImageStack.pixels", "field:ImageStack.dims", "rule:I001", "rule:I002", "rule:I007"}},
      {"is.spatial", "spatial relationships and pixel geometry",
       {"field:ImageStack.geometry", "field:ImageStack.sources", "rule:I006", "rule:I008"}},
      {"is.frame_times", "time of each image", {"field:ImageStack.frame_times", "rule:I003", "rule:I004"}},
      {"is.pixel_unit", "pixel units", {"field:ImageStack.pixel_unit", "rule:I005"}},
      {"xe.monitor_start", "monitoring start", {"field:ExperimentalEvents.monitor_start", "rule:X003"}},
      {"xe.monitor_end", "monitoring end", {"field:ExperimentalEvents.monitor_end", "rule:X002"}},
      {"xe.description", "event description", {"field:ExperimentalEvents.description", "rule:X005"}},
      {"xe.times", "event times", {"field:ExperimentalEvents.event_times", "rule:X001"}},
      {"xe.properties", "property values and interpretation", {"field:ExperimentalEvents.properties", "rule:X004"}},
      {"ga.description", "array description", {"field:GenericArray.description", "rule:A001"}},
      {"ga.categories", "categories with quantities", {"field:GenericArray.categories", "rule:A004"}},
      {"ga.array", "n-dimensional array", {"field:GenericArray.data", "api:read_region"}},
      {"ga.dims", "dimension descriptions and units", {"field:GenericArray.dims", "rule:A002"}},
      {"ga.headings", "slice headings", {"field:GenericArray.slice_headings", "rule:A003"}},
      {"ga.references", "references to related entities",
       {"field:GenericArray.references", "rule:A005", "api:related_entities"}},
      {"rel.derived", "derived-from links",
       {"field:DerivedFrom.inputs", "field:DerivedFrom.outputs", "rule:R001", "rule:R002", "rule:R005"}},
      {"rel.how", "agents and activities",
       {"field:DerivedFrom.activity", "field:DerivedFrom.agents", "field:DerivedFrom.params", "rule:R003", "rule:R004"}},
      {"rel.when", "derivation timestamp", {"field:DerivedFrom.timestamp", "rule:R009"}},
      {"rel.search", "inspect and search provenance", {"api:search_provenance", "api:derivation_chain"}},
      {"rel.grouping", "logical groupings", {"field:Grouping.members", "rule:R006", "rule:R007", "api:list_groupings"}},
      {"api.store", "store and retrieve everything", {"special:roundtrip_all", "rule:C005", "rule:C003", "rule:C004"}},
      {"api.validate", "structural validation", {"special:validate_clean", "special:mutations_all"}},
      {"api.global", "retrieve global metadata", {"api:global_metadata"}},
      {"api.inventory", "entity inventory", {"api:inventory", "rule:L006"}},
      {"api.metadata", "entity metadata", {"api:entity_metadata"}},
      {"api.slice", "section of the data", {"api:read_region"}},
      {"api.by_source", "entities by source", {"api:entities_by_source", "special:tetrode"}},
      {"api.related", "related entities", {"api:related_entities"}},
      {"api.groupings", "grouping inventory", {"api:list_groupings"}},
      {"api.members", "members of one grouping", {"api:grouping_members"}},
  };
  return kClauses;
}

Outcome c1_coverage(Evidence ev) {
  // The criteria above only ran on the full workload; a short, separate
  // round trip and rule pass keep this matrix self-contained.
  {
    et::TempDir dir;
    RoundTripTally tally;
    round_trip_all(11, 60, 60, dir, tally, ev);
    std::size_t bad = 0;
    for (const auto& [_, n] : tally.mismatched) bad += n;
    note(ev, "special:roundtrip_all", bad == 0);
  }
  Outcome o;
  std::size_t mapped = 0, passing = 0;
  for (const auto& cl : clauses()) {
    std::string line = std::string("    ") + cl.id + " (" + cl.topic + "):";
    bool ok = !cl.evidence.empty();
    for (const char* key : cl.evidence) {
      auto it = ev.find(key);
      const char* state = it == ev.end() ? "missing" : it->second ? "ok" : "FAIL";
      if (it == ev.end() || !it->second) ok = false;
      line += std::string(" ") + key + "=" + state;
    }
    if (!cl.evidence.empty()) ++mapped;
    if (ok) ++passing;
    std::cout << (ok ? "  ok  " : "  --  ") << line.substr(4) << "\n";
  }
  // Every catalog rule must be claimed by some clause.
  std::set<std::string> claimed;
  for (const auto& cl : clauses()) {
    for (const char* key : cl.evidence) claimed.insert(key);
  }
  std::vector<std::string> orphans;
  for (const auto& r : ep::rule_catalog()) {
    const std::string key = "rule:" + std::string(r.code);
    const bool storage = r.code[0] == 'C' || r.code[0] == 'L' || r.code[0] == 'G';
    if (!claimed.contains(key) && !storage) orphans.push_back(std::string(r.code));
  }
  o.pass = passing == clauses().size() && mapped == clauses().size();
  o.detail = std::to_string(passing) + "/" + std::to_string(clauses().size()) + " clauses evidenced, " +
             std::to_string(mapped) + " mapped";
  if (!orphans.empty()) {
    o.detail += "; rules outside the matrix:";
    for (const auto& r : orphans) o.detail += " " + r;
  }
  return o;
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  struct Run {
    int id;
    const char* what;
    double limit;
    Outcome outcome;
    double seconds = 0;
  };
  Evidence ev;
  std::vector<Run> runs;
  auto timed = [&](int id, const char* what, double limit, const std::function<Outcome()>& fn) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    runs.push_back({id, what, limit, o, s});
  };
  timed(2, "round trip of random entities", kC2Seconds, [&] { return c2_round_trip(ev); });
  timed(3, "single-byte corruption", kC3Seconds, [] { return c3_byte_flips(); });
  timed(4, "validator on generated and mutated files", kC4Seconds, [&] { return c4_generated_and_mutations(ev); });
  timed(5, "sync-marker time mapping", kC5Seconds, [&] { return c5_markers(ev); });
  timed(6, "query API against brute-force oracles", kC6Seconds, [&] { return c6_api(ev); });
  timed(7, "determinism", kC7Seconds, [] { return c7_determinism(); });
  std::cout << "requirements matrix:\n";
  timed(1, "requirements coverage matrix", kC1Seconds, [&] { return c1_coverage(ev); });

  std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.id < b.id; });
  bool all = true;
  for (auto& r : runs) {
    const bool in_time = r.seconds <= r.limit;
    const bool pass = r.outcome.pass && in_time;
    all = all && pass;
    char head[160];
    std::snprintf(head, sizeof head, "C%d %s %s (%.1f s, limit %.0f s): ", r.id, pass ? "PASS" : "FAIL", r.what,
                  r.seconds, r.limit);
    std::cout << head << r.outcome.detail << (in_time ? "" : " [over time limit]") << "\n";
  }
  return all ? 0 : 1;
}
