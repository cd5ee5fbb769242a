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

#ifndef EPHYSPACK_MODEL_H_
#define EPHYSPACK_MODEL_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ephyspack/container.h"
#include "ephyspack/rules.h"
#include "ephyspack/types.h"

namespace ephyspack {

// Dense row-major array with its shape.
struct Tensor {
  Extent shape;
  ArrayData data = std::vector<double>{};

  DType dtype() const { return dtype_of(data); }
  std::size_t rank() const { return shape.size(); }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

template <typename T>
Tensor make_tensor(Extent shape, std::vector<T> values) {
  return Tensor{std::move(shape), ArrayData(std::move(values))};
}

// Variable-length rows packed behind an offsets array of length rows+1.
template <typename T>
struct Ragged {
  std::vector<std::uint64_t> offsets{0};
  std::vector<T> values;

  std::size_t rows() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  void push_row(std::span<const T> row) {
    values.insert(values.end(), row.begin(), row.end());
    offsets.push_back(values.size());
  }
  std::span<const T> row(std::size_t k) const {
    return std::span<const T>(values).subspan(offsets[k], offsets[k + 1] - offsets[k]);
  }
  friend bool operator==(const Ragged&, const Ragged&) = default;
};

enum class EntityKind { kTimeSeries, kSignalEvents, kImageStack, kExperimentalEvents, kGenericArray };

std::string_view entity_kind_name(EntityKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view name);

std::string entity_path(std::string_view name);  // "/data/<name>"
std::string source_path(std::string_view id);    // "/sources/<id>"

// ---- global metadata ------------------------------------------------------

struct GlobalMetadata {
  FormatVersion format_version = kFormatVersion;
  std::string file_uuid;
  std::map<std::string, std::string> identification;
  std::string session_start;
  friend bool operator==(const GlobalMetadata&, const GlobalMetadata&) = default;
};

// Fills version, uuid and identification from the open container.
GlobalMetadata make_global_metadata(const Container& c, std::string session_start);
void write_global_metadata(Container& c, const GlobalMetadata& meta);
GlobalMetadata read_global_metadata(const Container& c);

// ---- sources --------------------------------------------------------------

enum class SourceKind {
  kElectrode,
  kElectrodeArray,
  kAmplifier,
  kSubject,
  kBrainRegion,
  kMua,
  kNeuron,
  kRoi,
};

std::string_view source_kind_name(SourceKind kind);
std::optional<SourceKind> parse_source_kind(std::string_view name);

using Point2 = std::array<double, 2>;

struct RoiGeometry {
  std::vector<Point2> vertices;
  // Optional time-varying outline: one vertex list per entry of times.
  std::vector<double> times;
  std::vector<std::vector<Point2>> track;
  friend bool operator==(const RoiGeometry&, const RoiGeometry&) = default;
};

struct SignalSource {
  std::string source_id;
  SourceKind kind = SourceKind::kElectrode;
  std::optional<std::string> parent;
  AttrMap static_meta;
  std::optional<std::array<double, 3>> position;  // meters, device frame
  std::optional<RoiGeometry> roi;
  friend bool operator==(const SignalSource&, const SignalSource&) = default;
};

struct SourceNode {
  std::string source_id;
  SourceKind kind = SourceKind::kElectrode;
  std::vector<SourceNode> children;
};

void add_source(Container& c, const SignalSource& source);
SignalSource get_source(const Container& c, std::string_view source_id);
std::vector<std::string> list_sources(const Container& c);
std::vector<SourceNode> source_tree(const Container& c);

// ---- time series ----------------------------------------------------------

struct SyncMarker {
  std::uint64_t index = 0;
  double true_time = 0;
  friend bool operator==(const SyncMarker&, const SyncMarker&) = default;
};

struct RegularSampling {
  double rate_hz = 0;
  std::vector<SyncMarker> sync_markers;
  friend bool operator==(const RegularSampling&, const RegularSampling&) = default;
};

struct IrregularSampling {
  std::vector<double> timestamps;
  friend bool operator==(const IrregularSampling&, const IrregularSampling&) = default;
};

using Sampling = std::variant<RegularSampling, IrregularSampling>;
// One unit for the whole series or one per channel.
using UnitSpec = std::variant<std::string, std::vector<std::string>>;

struct TimeSeries {
  std::string name;
  std::string label;
  Tensor values;  // N samples x C channels
  UnitSpec unit;
  double start_time = 0;
  double duration = 0;
  Sampling sampling;
  std::vector<std::string> sources;  // one per channel
  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

std::string write_time_series(Container& c, const TimeSeries& ts);
TimeSeries read_time_series(const Container& c, std::string_view path);

// Regular mapping from the last marker at or before i; a virtual marker
// (0, start_time) always exists.
double time_at_index(const RegularSampling& sampling, double start_time, std::uint64_t i);
double time_at_index(const TimeSeries& ts, std::uint64_t i);

// ---- signal events --------------------------------------------------------

struct Trigger {
  std::string type;
  double threshold = 0;
  std::string unit;
  friend bool operator==(const Trigger&, const Trigger&) = default;
};

struct SpikeTemplates {
  Tensor templates;  // K templates x L samples x C channels, f64
  std::string unit;
  double rate_hz = 0;
  friend bool operator==(const SpikeTemplates&, const SpikeTemplates&) = default;
};

struct Waveforms {
  Tensor payload;  // total samples x C
  std::vector<std::uint64_t> offsets;  // E + 1
  double rate_hz = 0;
  std::string unit;
  std::uint64_t pre_trigger_samples = 0;
  friend bool operator==(const Waveforms&, const Waveforms&) = default;
};

struct ExclusiveUnits {
  std::vector<std::int64_t> unit_of;  // -1 = unassigned
  friend bool operator==(const ExclusiveUnits&, const ExclusiveUnits&) = default;
};

struct MultiUnits {
  Ragged<std::int64_t> units;
  friend bool operator==(const MultiUnits&, const MultiUnits&) = default;
};

struct ProbabilisticUnits {
  std::vector<std::int64_t> unit_ids;  // U
  std::vector<double> probs;           // E x U
  friend bool operator==(const ProbabilisticUnits&, const ProbabilisticUnits&) = default;
};

using UnitAssignment = std::variant<ExclusiveUnits, MultiUnits, ProbabilisticUnits>;
std::string_view assignment_mode_name(const UnitAssignment& units);

struct Features {
  std::vector<std::string> headings;  // F
  std::vector<double> values;         // E x F
  friend bool operator==(const Features&, const Features&) = default;
};

struct PropertySet {
  std::string name;
  std::optional<Ragged<std::string>> per_event_channels;
  std::optional<Waveforms> waveforms;
  std::optional<UnitAssignment> units;
  std::map<std::int64_t, std::string> unit_sources;  // unit id -> source id
  std::optional<Features> features;
  friend bool operator==(const PropertySet&, const PropertySet&) = default;
};

struct SignalEvents {
  std::string name;
  std::string label;
  double start_time = 0;
  double duration = 0;
  std::vector<double> event_times;
  std::vector<std::string> source_channels;
  std::optional<SpikeTemplates> templates;
  std::string detection_description;
  std::optional<Trigger> trigger;
  // Per-channel triggers take precedence over the session trigger.
  std::map<std::string, Trigger> channel_triggers;
  std::vector<PropertySet> property_sets;
  friend bool operator==(const SignalEvents&, const SignalEvents&) = default;
};

std::string write_signal_events(Container& c, const SignalEvents& ev);
SignalEvents read_signal_events(const Container& c, std::string_view path);

const PropertySet& property_set(const SignalEvents& ev, std::string_view set_name);
const Trigger* effective_trigger(const SignalEvents& ev, std::string_view channel);

struct WaveformView {
  Tensor samples;  // rows x C
  double rate_hz = 0;
  std::string unit;
  std::uint64_t pre_trigger_samples = 0;
  double event_time = 0;

  // Time of sample row j.
  double sample_time(std::uint64_t j) const {
    return event_time + (static_cast<double>(j) - static_cast<double>(pre_trigger_samples)) / rate_hz;
  }
};

WaveformView get_waveform(const SignalEvents& ev, std::string_view set_name,
                          std::uint64_t event_index);

// ---- image stacks ---------------------------------------------------------

enum class DimSemantic { kTime, kY, kX, kZ, kPlane, kChannel };

std::string_view dim_semantic_name(DimSemantic dim);
std::optional<DimSemantic> parse_dim_semantic(std::string_view name);

struct RectangularGeometry {
  double dy = 0;
  double dx = 0;
  std::array<double, 2> origin{};
  friend bool operator==(const RectangularGeometry&, const RectangularGeometry&) = default;
};

struct ExplicitGeometry {
  std::vector<double> coords;  // H x W x 2
  friend bool operator==(const ExplicitGeometry&, const ExplicitGeometry&) = default;
};

using PixelGeometry = std::variant<RectangularGeometry, ExplicitGeometry>;

struct ImageStack {
  std::string name;
  std::string label;
  double start_time = 0;
  double duration = 0;
  Tensor pixels;
  std::vector<DimSemantic> dims;
  std::vector<double> frame_times;
  std::string pixel_unit;
  PixelGeometry geometry;
  std::vector<std::string> sources;
  friend bool operator==(const ImageStack&, const ImageStack&) = default;
};

std::string write_image_stack(Container& c, const ImageStack& st);
ImageStack read_image_stack(const Container& c, std::string_view path);

// ---- experimental events --------------------------------------------------

using PropertyValues = std::variant<std::vector<double>, std::vector<std::string>>;

struct EventProperty {
  PropertyValues values;
  std::string interpretation;
  std::optional<std::string> unit;
  friend bool operator==(const EventProperty&, const EventProperty&) = default;
};

struct ExperimentalEvents {
  std::string name;
  std::string label;
  double monitor_start = 0;
  double monitor_end = 0;
  std::string description;
  std::vector<double> event_times;
  std::map<std::string, EventProperty> properties;
  friend bool operator==(const ExperimentalEvents&, const ExperimentalEvents&) = default;
};

std::string write_experimental_events(Container& c, const ExperimentalEvents& ev);
ExperimentalEvents read_experimental_events(const Container& c, std::string_view path);

// ---- generic arrays -------------------------------------------------------

struct DimDescription {
  std::string description;
  std::optional<std::string> unit;
  friend bool operator==(const DimDescription&, const DimDescription&) = default;
};

struct Category {
  std::string name;
  double weight = 0;
  friend bool operator==(const Category&, const Category&) = default;
};

struct EntityReference {
  std::string path;
  std::string relation;
  friend bool operator==(const EntityReference&, const EntityReference&) = default;
};

struct GenericArray {
  std::string name;
  std::string description;
  Tensor data;
  std::vector<DimDescription> dims;
  std::map<std::uint64_t, std::vector<std::string>> slice_headings;
  std::optional<std::vector<Category>> categories;
  std::vector<EntityReference> references;
  friend bool operator==(const GenericArray&, const GenericArray&) = default;
};

std::string write_generic_array(Container& c, const GenericArray& ga);
GenericArray read_generic_array(const Container& c, std::string_view path);

// ---- relationships --------------------------------------------------------

struct DerivedFrom {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string activity;
  std::vector<std::string> agents;
  AttrMap params;
  std::string timestamp;
  friend bool operator==(const DerivedFrom&, const DerivedFrom&) = default;
};

struct StoredDerivation {
  std::string rel_id;  // "rel-000001", ...
  DerivedFrom rel;
  friend bool operator==(const StoredDerivation&, const StoredDerivation&) = default;
};

struct Grouping {
  std::string group_id;
  std::string label;
  std::vector<std::string> members;
  std::map<std::string, AttrMap> overrides;  // member path -> attributes
  friend bool operator==(const Grouping&, const Grouping&) = default;
};

std::string add_derived_from(Container& c, const DerivedFrom& rel);
std::vector<StoredDerivation> list_derivations(const Container& c);
void add_grouping(Container& c, const Grouping& g);
std::vector<Grouping> read_groupings(const Container& c);
Grouping read_grouping(const Container& c, std::string_view group_id);

// ---- layout index ---------------------------------------------------------

struct EntityRecord {
  std::string path;
  std::optional<EntityKind> kind;  // empty when entity_kind is missing or unknown
};

// Lightweight view of what a file holds, built from attributes only.
struct ModelIndex {
  std::map<std::string, std::optional<SourceKind>> sources;  // id -> kind
  std::map<std::string, std::string> source_parents;          // id -> parent id
  std::map<std::string, EntityRecord> entities;              // path -> record

  bool has_source(std::string_view id) const { return sources.contains(std::string(id)); }
  // Payload entity or source path.
  bool resolves(std::string_view path) const;
};

ModelIndex build_index(const Container& c);

// Entity kind stored at path, or nullopt if the path is not a payload entity.
std::optional<EntityKind> entity_kind_at(const Container& c, std::string_view path);

// ---- invariant checks -----------------------------------------------------
// Shared by writers (throwing) and the validator (collecting).

void check_time_series(const TimeSeries& ts, const ModelIndex& index,
                       const std::string& path, Reporter& out);
void check_signal_events(const SignalEvents& ev, const ModelIndex& index,
                         const std::string& path, Reporter& out);
void check_image_stack(const ImageStack& st, const ModelIndex& index,
                       const std::string& path, Reporter& out);
void check_experimental_events(const ExperimentalEvents& ev, const std::string& path,
                               Reporter& out);
void check_generic_array(const GenericArray& ga, const ModelIndex& index,
                         const std::string& path, Reporter& out);
void check_source(const SignalSource& src, const ModelIndex& index, const std::string& path,
                  Reporter& out);
void check_derivation(const DerivedFrom& rel, const ModelIndex& index, const std::string& path,
                      Reporter& out);
void check_grouping(const Grouping& g, const ModelIndex& index, const std::string& path,
                    Reporter& out);
// Reports R002 for every derivation that closes a cycle, in rel_id order.
void check_derivation_graph(const std::vector<StoredDerivation>& rels, Reporter& out);

// Tolerant readers used by the validator: layout problems go to out and an
// EntityAbandoned is thrown when reconstruction is impossible. With
// payload = false no chunk data is read and dataset contents stay empty.
struct ReadContext {
  const Container& c;
  Reporter& out;
  bool payload = true;
};

GlobalMetadata read_global_metadata(ReadContext& ctx);
SignalSource read_source(ReadContext& ctx, std::string_view source_id);
TimeSeries read_time_series(ReadContext& ctx, std::string_view path);
SignalEvents read_signal_events(ReadContext& ctx, std::string_view path);
ImageStack read_image_stack(ReadContext& ctx, std::string_view path);
ExperimentalEvents read_experimental_events(ReadContext& ctx, std::string_view path);
GenericArray read_generic_array(ReadContext& ctx, std::string_view path);
StoredDerivation read_derivation(ReadContext& ctx, std::string_view rel_id);
Grouping read_grouping(ReadContext& ctx, std::string_view group_id);

// Layout constants.
inline constexpr std::string_view kGlobalGroup = "global";
inline constexpr std::string_view kSourcesGroup = "sources";
inline constexpr std::string_view kDataGroup = "data";
inline constexpr std::string_view kRelationsGroup = "relations";
inline constexpr std::string_view kDerivedGroup = "derived";
inline constexpr std::string_view kGroupsGroup = "groups";
inline constexpr std::string_view kExtGroup = "ext";

// Creates /sources, /data, /relations/{derived,groups} and /ext if absent.
void ensure_layout(Container& c);

}  // namespace ephyspack

#endif  // EPHYSPACK_MODEL_H_
