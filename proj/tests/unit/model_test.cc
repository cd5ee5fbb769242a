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

#include <gtest/gtest.h>

#include <cmath>

#include "ephyspack/ingest.h"
#include "ephyspack/model.h"
#include "ephyspack/query.h"
#include "support/fixtures.h"

namespace ephyspack {
namespace {

using testing::TempDir;

template <typename F>
Error error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error raised";
  return Error(Errc::kInvalidValue, "none");
}

TimeSeries regular_series(const std::string& name, double rate, std::uint64_t n, std::uint64_t channels) {
  TimeSeries ts;
  ts.name = name;
  ts.label = name;
  std::vector<double> v(n * channels);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<double>(k) * 0.25;
  ts.values = make_tensor<double>({n, channels}, v);
  ts.unit = std::string("uV");
  ts.duration = static_cast<double>(n) / rate;
  ts.sampling = RegularSampling{rate, {}};
  ts.sources.assign(testing::kElectrodes.begin(), testing::kElectrodes.begin() + channels);
  return ts;
}

SignalEvents two_events() {
  SignalEvents ev;
  ev.name = "spk";
  ev.label = "spikes";
  ev.duration = 10;
  ev.event_times = {1.0, 2.0};
  ev.source_channels = {"e0"};
  ev.detection_description = "threshold";
  return ev;
}

TEST(Global, RoundTripKeepsOffset) {
  TempDir dir;
  {
    Container c = Container::create(dir.file("g"), {{"lab", "L"}, {"experimenter", "E"}});
    write_global_metadata(c, make_global_metadata(c, "2024-01-02T03:04:05+01:00"));
    c.finalize();
  }
  Container r = Container::open(dir.file("g"));
  GlobalMetadata m = read_global_metadata(r);
  EXPECT_EQ(m.session_start, "2024-01-02T03:04:05+01:00");
  EXPECT_EQ(m.identification, (std::map<std::string, std::string>{{"experimenter", "E"}, {"lab", "L"}}));
  EXPECT_EQ(m.file_uuid, r.superblock().file_uuid.to_string());
  EXPECT_EQ(m.format_version, kFormatVersion);
}

TEST(Global, RejectsZonelessStartAndForeignUuid) {
  TempDir dir;
  Container c = Container::create(dir.file("g"), {});
  EXPECT_EQ(error_of([&] { write_global_metadata(c, make_global_metadata(c, "2024-01-02T03:04:05")); }).code(),
            Errc::kInvalidTime);
  GlobalMetadata m = make_global_metadata(c, "2024-01-02T03:04:05Z");
  m.file_uuid = Uuid::from_bits_v4(1, 2).to_string();
  EXPECT_EQ(error_of([&] { write_global_metadata(c, m); }).code(), Errc::kUuidMismatch);
}

TEST(Global, MissingGroupIsSchemaViolation) {
  TempDir dir;
  GenSpec spec;
  spec.duration_s = 1;
  generate_session(spec, dir.file("s"));
  mutate_for_test(dir.file("s"), "drop-global", dir.file("m"));
  Container r = Container::open(dir.file("m"));
  Error e = error_of([&] { read_global_metadata(r); });
  EXPECT_EQ(e.code(), Errc::kSchemaViolation);
  EXPECT_EQ(e.rule(), "G001");
}

TEST(Sources, TetrodeTree) {
  TempDir dir;
  Container c = Container::create(dir.file("t"), {});
  write_global_metadata(c, make_global_metadata(c, testing::kSessionStart));
  add_source(c, {"tt1", SourceKind::kElectrodeArray, std::nullopt, {}, std::nullopt, std::nullopt});
  for (int k = 1; k <= 4; ++k) {
    add_source(c, {"tt1e" + std::to_string(k), SourceKind::kElectrode, "tt1", {}, std::nullopt, std::nullopt});
  }
  c.finalize();
  auto forest = source_tree(c);
  ASSERT_EQ(forest.size(), 1u);
  EXPECT_EQ(forest[0].source_id, "tt1");
  ASSERT_EQ(forest[0].children.size(), 4u);
  EXPECT_EQ(forest[0].children[3].source_id, "tt1e4");
  EXPECT_EQ(forest[0].children[0].kind, SourceKind::kElectrode);
}

TEST(Sources, ParentMustExist) {
  TempDir dir;
  Container c = testing::make_session(dir.file("p"));
  EXPECT_EQ(error_of([&] {
              add_source(c, {"orphan", SourceKind::kElectrode, "later", {}, std::nullopt, std::nullopt});
            }).code(),
            Errc::kUnknownParent);
  EXPECT_EQ(error_of([&] {
              add_source(c, {"e0", SourceKind::kElectrode, std::nullopt, {}, std::nullopt, std::nullopt});
            }).code(),
            Errc::kDuplicateSourceId);
}

TEST(Sources, RoiTrackTimesMustIncrease) {
  TempDir dir;
  Container c = testing::make_session(dir.file("r"));
  auto roi = [](std::vector<double> times) {
    RoiGeometry g;
    g.vertices = {{{0.0, 0.0}}, {{1.0, 0.0}}, {{1.0, 1.0}}};
    g.times = times;
    g.track.assign(times.size(), g.vertices);
    return g;
  };
  EXPECT_NO_THROW(add_source(c, {"ok", SourceKind::kRoi, std::nullopt, {}, std::nullopt, roi({0, 1, 2, 3, 4})}));
  EXPECT_EQ(error_of([&] {
              add_source(c, {"bad", SourceKind::kRoi, std::nullopt, {}, std::nullopt, roi({0, 1, 1, 3, 4})});
            }).code(),
            Errc::kInvalidRoiGeometry);
  EXPECT_EQ(error_of([&] {
              add_source(c, {"elec", SourceKind::kElectrode, std::nullopt, {}, std::nullopt, roi({0})});
            }).code(),
            Errc::kRoiGeometryOnNonRoi);
  c.finalize();
  EXPECT_EQ(get_source(c, "ok").roi->times.size(), 5u);
}

TEST(TimeSeriesModel, NonMonotonicTimestampsRejected) {
  TempDir dir;
  Container c = testing::make_session(dir.file("ts"));
  TimeSeries ts = regular_series("irr", 1, 3, 1);
  ts.sampling = IrregularSampling{{0.0, 0.1, 0.05}};
  EXPECT_EQ(error_of([&] { write_time_series(c, ts); }).code(), Errc::kNonMonotonicTimestamps);
}

TEST(TimeSeriesModel, WriterErrors) {
  TempDir dir;
  Container c = testing::make_session(dir.file("ts"));
  TimeSeries ts = regular_series("a", 100, 10, 2);
  ts.sources = {"e0"};
  EXPECT_EQ(error_of([&] { write_time_series(c, ts); }).code(), Errc::kSourceCountMismatch);
  ts = regular_series("a", 100, 10, 2);
  ts.unit = std::string();
  EXPECT_EQ(error_of([&] { write_time_series(c, ts); }).code(), Errc::kMissingUnit);
  ts = regular_series("a", 100, 10, 2);
  ts.sampling = RegularSampling{0.0, {}};
  EXPECT_EQ(error_of([&] { write_time_series(c, ts); }).code(), Errc::kNonPositiveRate);
}

TEST(TimeSeriesModel, RegularRoundTripAndIndependentRates) {
  TempDir dir;
  TimeSeries fast = regular_series("fast", 30000, 300, 3);
  TimeSeries slow = regular_series("slow", 25, 10, 1);
  {
    Container c = testing::make_session(dir.file("ts"));
    write_time_series(c, fast);
    write_time_series(c, slow);
    c.finalize();
  }
  Container r = Container::open(dir.file("ts"));
  EXPECT_EQ(read_time_series(r, "/data/fast"), fast);
  EXPECT_EQ(read_time_series(r, "/data/slow"), slow);
  EXPECT_EQ(std::get<RegularSampling>(read_time_series(r, "/data/slow").sampling).rate_hz, 25.0);
}

TEST(TimeAtIndex, UniformMapping) {
  RegularSampling s{1000, {}};
  EXPECT_DOUBLE_EQ(time_at_index(s, 0.0, 1500), 1.5);
}

TEST(TimeAtIndex, MarkerAfterDroppedSamples) {
  RegularSampling s{1000, {{1000, 1.005}}};
  EXPECT_DOUBLE_EQ(time_at_index(s, 0.0, 1500), 1.505);
  EXPECT_DOUBLE_EQ(time_at_index(s, 0.0, 999), 0.999);
  // Clock simulation: advance one period per sample, jump by the gap at the marker.
  long double clock = 0;
  for (std::uint64_t i = 0; i <= 2000; ++i) {
    if (i == 1000) clock = 1.005L;
    ASSERT_NEAR(time_at_index(s, 0.0, i), static_cast<double>(clock), 1e-12) << i;
    clock += 1.0L / 1000;
  }
}

TEST(TimeAtIndex, RoundsOnceNearZero) {
  // Anchor and offset nearly cancel; two double roundings would be off by
  // far more than one ulp of the tiny result.
  const double rate = 3.0;
  const double start = -1.0 / 3.0 + 1e-9;
  RegularSampling s{rate, {}};
  const long double want = static_cast<long double>(start) + 1.0L / 3.0L;
  EXPECT_EQ(time_at_index(s, start, 1), static_cast<double>(want));
}

TEST(TimeAtIndex, IrregularLookupAndRange) {
  TimeSeries ts = regular_series("x", 1, 3, 1);
  ts.sampling = IrregularSampling{{0.1, 0.4, 2.0}};
  EXPECT_EQ(time_at_index(ts, 2), 2.0);
  EXPECT_EQ(error_of([&] { time_at_index(ts, 3); }).code(), Errc::kIndexOutOfRange);
}

TEST(SignalEventsModel, ProbabilityRowsMustSumToOne) {
  TempDir dir;
  Container c = testing::make_session(dir.file("p"));
  SignalEvents ev = two_events();
  PropertySet ps;
  ps.name = "sorter";
  ps.unit_sources = {{1, "n0"}, {2, "n1"}, {3, "n2"}};
  ps.units = ProbabilisticUnits{{1, 2, 3}, {0.5, 0.3, 0.2, 1.0, 0.0, 0.0}};
  ev.property_sets = {ps};
  EXPECT_NO_THROW(write_signal_events(c, ev));
  ev.name = "bad";
  std::get<ProbabilisticUnits>(*ev.property_sets[0].units).probs[2] = 0.1;
  Error e = error_of([&] { write_signal_events(c, ev); });
  EXPECT_EQ(e.code(), Errc::kProbRowNotNormalized);
  EXPECT_NE(std::string(e.what()).find("row 0"), std::string::npos) << e.what();
}

TEST(SignalEventsModel, RaggedWaveforms) {
  TempDir dir;
  SignalEvents ev = two_events();
  ev.event_times = {1.0, 2.0, 3.0};
  PropertySet ps;
  ps.name = "wf";
  Waveforms w;
  w.rate_hz = 32000;
  w.unit = "uV";
  w.pre_trigger_samples = 8;
  w.offsets = {0, 32, 80, 112};
  std::vector<double> payload(112);
  for (std::size_t k = 0; k < payload.size(); ++k) payload[k] = static_cast<double>(k);
  w.payload = make_tensor<double>({112, 1}, payload);
  ps.waveforms = w;
  ev.property_sets = {ps};
  {
    Container c = testing::make_session(dir.file("w"));
    write_signal_events(c, ev);
    c.finalize();
  }
  Container r = Container::open(dir.file("w"));
  SignalEvents back = read_signal_events(r, "/data/spk");
  EXPECT_EQ(back, ev);
  WaveformView one = get_waveform(back, "wf", 1);
  EXPECT_EQ(one.samples.shape, (Extent{48, 1}));
  EXPECT_EQ(one.unit, "uV");
  // Concatenating every event's rows restores the payload.
  std::vector<double> joined;
  for (std::uint64_t k = 0; k < 3; ++k) {
    auto rows = std::get<std::vector<double>>(get_waveform(back, "wf", k).samples.data);
    joined.insert(joined.end(), rows.begin(), rows.end());
  }
  EXPECT_EQ(joined, payload);
  EXPECT_EQ(error_of([&] { get_waveform(back, "wf", 3); }).code(), Errc::kIndexOutOfRange);
  EXPECT_EQ(error_of([&] { get_waveform(back, "none", 0); }).code(), Errc::kNoSuchPropertySet);
}

TEST(SignalEventsModel, WaveformAlignmentAndEmptyRows) {
  SignalEvents ev = two_events();
  PropertySet ps;
  ps.name = "wf";
  ps.waveforms = Waveforms{make_tensor<double>({16, 1}, std::vector<double>(16)), {0, 16, 16}, 32000, "uV", 8};
  ev.property_sets = {ps};
  WaveformView first = get_waveform(ev, "wf", 0);
  EXPECT_EQ(first.sample_time(8), 1.0);
  EXPECT_EQ(get_waveform(ev, "wf", 1).samples.shape, (Extent{0, 1}));
  ev.property_sets[0].waveforms.reset();
  EXPECT_EQ(error_of([&] { get_waveform(ev, "wf", 0); }).code(), Errc::kNoWaveforms);
}

TEST(SignalEventsModel, SeveralPropertySets) {
  TempDir dir;
  SignalEvents ev = two_events();
  PropertySet a, b;
  a.name = "sorter_A";
  a.unit_sources = {{1, "n0"}};
  a.units = ExclusiveUnits{{1, -1}};
  b.name = "sorter_B";
  b.unit_sources = {{7, "mua"}};
  b.units = ExclusiveUnits{{7, 7}};
  b.features = Features{{"amp"}, {-50, -60}};
  ev.property_sets = {a, b};
  {
    Container c = testing::make_session(dir.file("ps"));
    write_signal_events(c, ev);
    SignalEvents dup = ev;
    dup.name = "dup";
    dup.property_sets = {a, a};
    EXPECT_EQ(error_of([&] { write_signal_events(c, dup); }).code(), Errc::kDuplicatePropertySetName);
    c.finalize();
  }
  Container r = Container::open(dir.file("ps"));
  SignalEvents back = read_signal_events(r, "/data/spk");
  EXPECT_EQ(property_set(back, "sorter_A"), a);
  EXPECT_EQ(property_set(back, "sorter_B"), b);
}

TEST(SignalEventsModel, WriterErrors) {
  TempDir dir;
  Container c = testing::make_session(dir.file("se"));
  SignalEvents ev = two_events();
  ev.event_times = {1.0, 20.0};
  EXPECT_EQ(error_of([&] { write_signal_events(c, ev); }).code(), Errc::kEventTimeOutOfWindow);
  ev = two_events();
  PropertySet ps;
  ps.name = "s";
  ps.unit_sources = {{1, "e0"}};
  ps.units = ExclusiveUnits{{1, 1}};
  ev.property_sets = {ps};
  EXPECT_EQ(error_of([&] { write_signal_events(c, ev); }).code(), Errc::kUnknownUnitSource);
  ev = two_events();
  ps = {};
  ps.name = "s";
  ps.per_event_channels = Ragged<std::string>{{0, 1}, {"e0"}};
  ev.property_sets = {ps};
  EXPECT_EQ(error_of([&] { write_signal_events(c, ev); }).code(), Errc::kBadOffsets);
  ev = two_events();
  ev.channel_triggers["e1"] = {"threshold", -30, "uV"};
  ev.trigger = Trigger{"threshold", -40, "uV"};
  EXPECT_EQ(effective_trigger(ev, "e1")->threshold, -30);
  EXPECT_EQ(effective_trigger(ev, "e0")->threshold, -40);
}

TEST(ImageStackModel, RoundTripAndPermutedTime) {
  TempDir dir;
  ImageStack st;
  st.name = "img";
  st.label = "frames";
  st.duration = 1;
  std::vector<std::uint16_t> px(10 * 4 * 4);
  for (std::size_t k = 0; k < px.size(); ++k) px[k] = static_cast<std::uint16_t>(k);
  st.pixels = make_tensor<std::uint16_t>({10, 4, 4}, px);
  st.dims = {DimSemantic::kTime, DimSemantic::kY, DimSemantic::kX};
  for (int k = 0; k < 10; ++k) st.frame_times.push_back(0.1 * k);
  st.pixel_unit = "gray";
  st.geometry = RectangularGeometry{1e-6, 1e-6, {0, 0}};
  Container c = testing::make_session(dir.file("img"));
  write_image_stack(c, st);
  // Time in each of three positions, frame count checked against that axis.
  const std::vector<std::vector<DimSemantic>> orders = {
      {DimSemantic::kTime, DimSemantic::kY, DimSemantic::kX},
      {DimSemantic::kY, DimSemantic::kTime, DimSemantic::kX},
      {DimSemantic::kY, DimSemantic::kX, DimSemantic::kTime}};
  for (std::size_t pos = 0; pos < 3; ++pos) {
    ImageStack p = st;
    p.name = "perm" + std::to_string(pos);
    Extent shape{4, 4, 4};
    shape[pos] = 10;
    p.pixels = make_tensor<std::uint16_t>(shape, px);
    p.dims = orders[pos];
    EXPECT_NO_THROW(write_image_stack(c, p)) << pos;
    p.name = "short" + std::to_string(pos);
    p.frame_times.pop_back();
    EXPECT_EQ(error_of([&] { write_image_stack(c, p); }).code(), Errc::kFrameTimeCountMismatch) << pos;
  }
  ImageStack bad = st;
  bad.name = "bad";
  bad.dims = {DimSemantic::kY, DimSemantic::kY, DimSemantic::kX};
  EXPECT_EQ(error_of([&] { write_image_stack(c, bad); }).code(), Errc::kNoTimeDimension);
  bad.dims = {DimSemantic::kTime, DimSemantic::kY};
  EXPECT_EQ(error_of([&] { write_image_stack(c, bad); }).code(), Errc::kDimSemanticsMismatch);
  bad = st;
  bad.name = "bad";
  std::swap(bad.frame_times[2], bad.frame_times[3]);
  EXPECT_EQ(error_of([&] { write_image_stack(c, bad); }).code(), Errc::kNonMonotonicFrameTimes);
  c.finalize();
  EXPECT_EQ(read_image_stack(c, "/data/img"), st);
}

TEST(ImageStackModel, HexagonalExplicitCoords) {
  TempDir dir;
  ImageStack st;
  st.name = "hex";
  st.label = "hex";
  st.duration = 1;
  st.pixels = make_tensor<double>({1, 2, 3}, std::vector<double>(6, 1.0));
  st.dims = {DimSemantic::kTime, DimSemantic::kY, DimSemantic::kX};
  st.frame_times = {0.5};
  st.pixel_unit = "V";
  const double dx = 1e-5, dy = std::sqrt(3.0) / 2 * dx;
  ExplicitGeometry g;
  for (int row = 0; row < 2; ++row) {
    for (int col = 0; col < 3; ++col) {
      g.coords.push_back(row * dy);
      g.coords.push_back(col * dx + (row % 2) * dx / 2);
    }
  }
  st.geometry = g;
  {
    Container c = testing::make_session(dir.file("hex"));
    write_image_stack(c, st);
    c.finalize();
  }
  Container r = Container::open(dir.file("hex"));
  const auto& back = std::get<ExplicitGeometry>(read_image_stack(r, "/data/hex").geometry);
  EXPECT_TRUE(testing::bit_equal(back.coords, g.coords));
}

TEST(ExperimentalEventsModel, ToneFrequencies) {
  TempDir dir;
  ExperimentalEvents ev;
  ev.name = "tones";
  ev.label = "tones";
  ev.monitor_end = 10;
  ev.description = "pure tones";
  ev.event_times = {1, 10};  // second event sits on the window end
  ev.properties["frequency"] = {std::vector<double>{440, 880}, "frequency in Hz", "Hz"};
  {
    Container c = testing::make_session(dir.file("x"));
    write_experimental_events(c, ev);
    ExperimentalEvents bad = ev;
    bad.name = "bad";
    bad.properties["frequency"].values = std::vector<double>{1, 2, 3};
    EXPECT_EQ(error_of([&] { write_experimental_events(c, bad); }).code(), Errc::kPropertyLengthMismatch);
    bad = ev;
    bad.name = "late";
    bad.event_times = {1, 10.5};
    EXPECT_EQ(error_of([&] { write_experimental_events(c, bad); }).code(), Errc::kEventOutsideMonitorWindow);
    c.finalize();
  }
  Container r = Container::open(dir.file("x"));
  EXPECT_EQ(read_experimental_events(r, "/data/tones"), ev);
}

TEST(GenericArrayModel, HistogramAndCategories) {
  TempDir dir;
  GenericArray hist;
  hist.name = "hist";
  hist.description = "spike count histogram";
  std::vector<std::uint32_t> counts(50);
  for (std::size_t k = 0; k < 50; ++k) counts[k] = static_cast<std::uint32_t>(k % 7);
  hist.data = make_tensor<std::uint32_t>({50}, counts);
  hist.dims = {{"time bin", "s"}};
  GenericArray cats;
  cats.name = "outcomes";
  cats.description = "trial outcomes";
  cats.data = make_tensor<double>({2}, std::vector<double>{37, 13});
  cats.dims = {{"outcome", std::nullopt}};
  cats.categories = std::vector<Category>{{"correct", 37}, {"error", 13}};
  {
    Container c = testing::make_session(dir.file("ga"));
    write_generic_array(c, hist);
    write_generic_array(c, cats);
    GenericArray bad;
    bad.name = "bad";
    bad.description = "table";
    bad.data = make_tensor<double>({100, 3}, std::vector<double>(300));
    bad.dims = {{"row", std::nullopt}, {"col", std::nullopt}};
    bad.slice_headings[1] = {"a", "b"};
    EXPECT_EQ(error_of([&] { write_generic_array(c, bad); }).code(), Errc::kHeadingCountMismatch);
    bad.slice_headings.clear();
    bad.description.clear();
    EXPECT_EQ(error_of([&] { write_generic_array(c, bad); }).code(), Errc::kMissingDescription);
    c.finalize();
  }
  Container r = Container::open(dir.file("ga"));
  EXPECT_EQ(read_generic_array(r, "/data/hist"), hist);
  EXPECT_EQ(read_generic_array(r, "/data/outcomes"), cats);
}

TEST(Relations, DerivedFromAndCycles) {
  TempDir dir;
  Container c = testing::make_session(dir.file("rel"));
  write_time_series(c, regular_series("raw", 1000, 100, 2));
  SignalEvents ev = two_events();
  ev.duration = 0.1;
  ev.event_times = {0.01, 0.02};
  write_signal_events(c, ev);
  DerivedFrom d{{"/data/raw"}, {"/data/spk"}, "threshold crossing -4 sd", {"detector v1"},
                {{"threshold_sd", -4.0}}, "2026-01-05T10:00:00Z"};
  const std::string id = add_derived_from(c, d);
  EXPECT_EQ(id, "rel-000001");
  EXPECT_EQ(error_of([&] {
              add_derived_from(c, {{"/data/spk"}, {"/data/raw"}, "back", {"x"}, {}, "2026-01-05T10:00:00Z"});
            }).code(),
            Errc::kDerivationCycle);
  EXPECT_EQ(error_of([&] {
              add_derived_from(c, {{"/data/none"}, {"/data/raw"}, "a", {"x"}, {}, "2026-01-05T10:00:00Z"});
            }).code(),
            Errc::kDanglingReference);
  EXPECT_EQ(error_of([&] {
              add_derived_from(c, {{"/data/raw"}, {"/data/spk"}, "a", {}, {}, "2026-01-05T10:00:00Z"});
            }).code(),
            Errc::kEmptyAgents);
  c.finalize();
  auto all = list_derivations(c);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].rel_id, id);
  EXPECT_EQ(all[0].rel, d);
}

TEST(Relations, GroupingOverrideLeavesStaticMetadata) {
  TempDir dir;
  Container c = testing::make_session(dir.file("grp"));
  write_time_series(c, regular_series("raw", 1000, 10, 1));
  Grouping g{"session1", "session 1", {"/data/raw", "/sources/amp"}, {{"/sources/amp", {{"amp gain", 500.0}}}}};
  add_grouping(c, g);
  EXPECT_EQ(error_of([&] { add_grouping(c, g); }).code(), Errc::kDuplicateGroupId);
  EXPECT_EQ(error_of([&] { add_grouping(c, {"empty", "e", {}, {}}); }).code(), Errc::kEmptyGroup);
  c.finalize();
  EXPECT_EQ(read_grouping(c, "session1"), g);
  EXPECT_EQ(get_source(c, "amp").static_meta.at("gain"), AttrValue(100.0));
  EXPECT_FALSE(get_source(c, "amp").static_meta.contains("amp gain"));
}

TEST(Relations, RejectedWriteLeavesInventory) {
  TempDir dir;
  Container c = testing::make_session(dir.file("rj"));
  write_time_series(c, regular_series("raw", 1000, 10, 1));
  c.finalize();
  const auto before = inventory(c);
  Container a = Container::open(dir.file("rj"), OpenMode::kAppend);
  TimeSeries bad = regular_series("bad", 1000, 10, 1);
  bad.sources = {"missing"};
  EXPECT_ANY_THROW(write_time_series(a, bad));
  SignalEvents ev = two_events();
  ev.property_sets.push_back({});
  ev.property_sets.back().name = "p";
  ev.property_sets.back().units = ProbabilisticUnits{{1}, {0.5, 0.5}};
  ev.property_sets.back().unit_sources = {{1, "n0"}};
  EXPECT_ANY_THROW(write_signal_events(a, ev));
  a.finalize();
  Container r = Container::open(dir.file("rj"));
  EXPECT_EQ(inventory(r), before);
}

TEST(Model, RandomEntitiesRoundTrip) {
  TempDir dir;
  testing::EntityFactory f(21);
  std::vector<TimeSeries> ts;
  std::vector<SignalEvents> se;
  std::vector<ImageStack> is;
  std::vector<ExperimentalEvents> xe;
  std::vector<GenericArray> ga;
  {
    Container c = testing::make_session(dir.file("rand"));
    for (int k = 0; k < 40; ++k) {
      const std::string n = std::to_string(k);
      ts.push_back(f.time_series("ts" + n));
      write_time_series(c, ts.back());
      se.push_back(f.signal_events("se" + n));
      write_signal_events(c, se.back());
      is.push_back(f.image_stack("is" + n));
      write_image_stack(c, is.back());
      xe.push_back(f.experimental_events("xe" + n));
      write_experimental_events(c, xe.back());
      ga.push_back(f.generic_array("ga" + n));
      write_generic_array(c, ga.back());
    }
    c.finalize();
  }
  Container r = Container::open(dir.file("rand"));
  for (int k = 0; k < 40; ++k) {
    const std::string n = std::to_string(k);
    EXPECT_EQ(read_time_series(r, "/data/ts" + n), ts[k]) << k;
    EXPECT_TRUE(testing::bit_equal(read_time_series(r, "/data/ts" + n).values.data, ts[k].values.data));
    EXPECT_EQ(read_signal_events(r, "/data/se" + n), se[k]) << k;
    EXPECT_EQ(read_image_stack(r, "/data/is" + n), is[k]) << k;
    EXPECT_EQ(read_experimental_events(r, "/data/xe" + n), xe[k]) << k;
    EXPECT_EQ(read_generic_array(r, "/data/ga" + n), ga[k]) << k;
  }
}

}  // namespace
}  // namespace ephyspack
