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

#include "ephyspack/rules.h"

#include <algorithm>
#include <array>

namespace ephyspack {
namespace {

constexpr Severity E = Severity::kError;
constexpr Severity W = Severity::kWarning;
constexpr Severity I = Severity::kInfo;

constexpr RuleInfo kRules[] = {
    {"A001", E, "generic array description is missing or empty",
     "generic array: textual description of the array contents", Errc::kMissingDescription, false},
    {"A002", E, "dimension descriptions do not match the array rank or are empty",
     "generic array: description of each dimension", Errc::kLengthMismatch, false},
    {"A003", E, "slice headings do not match the extent of their dimension",
     "generic array: heading of each slice", Errc::kHeadingCountMismatch, false},
    {"A004", E, "category weight is negative or not finite",
     "generic array: count or quantity for each category", Errc::kInvalidValue, false},
    {"A005", E, "entity reference does not resolve",
     "generic array: reference to entities containing related data", Errc::kDanglingReference, false},

    {"C001", E, "file does not start with the container magic",
     "global metadata: format identification", Errc::kBadMagic, true},
    {"C002", E, "unsupported container major version",
     "global metadata: version identification of the file format", Errc::kUnsupportedVersion, true},
    {"C003", E, "footer index is corrupt",
     "storing and retrieving all data accurately", Errc::kCorruptFooter, true},
    {"C004", E, "file is truncated or was never finalized",
     "storing and retrieving all data accurately", Errc::kTruncatedFile, true},
    {"C005", E, "chunk checksum mismatch",
     "storing and retrieving all data accurately", Errc::kChunkChecksumMismatch, false},
    {"C006", E, "superblock checksum mismatch or invalid file UUID",
     "global metadata: unique file id", Errc::kCorruptSuperblock, true},

    {"E001", E, "signal event times are not non-decreasing",
     "signal events: the time of each event", Errc::kNonMonotonicTimestamps, false},
    {"E002", E, "signal event time outside the recording window",
     "signal events: starting time and duration of recording", Errc::kEventTimeOutOfWindow, false},
    {"E003", E, "ragged offsets are malformed",
     "signal events: variable-length waveforms and per-event lists", Errc::kBadOffsets, false},
    {"E004", E, "probabilistic unit row is not a probability distribution",
     "signal events: probabilistic association of units with each event", Errc::kProbRowNotNormalized, false},
    {"E005", E, "unit id does not map to a Neuron or MUA source",
     "signal events: identity of neurons associated with each event", Errc::kUnknownUnitSource, false},
    {"E006", E, "channel source does not resolve",
     "signal events: source channels the events were derived from", Errc::kUnknownSource, false},
    {"E007", E, "no session-level or per-event source channels",
     "signal events: source channels the events were derived from", Errc::kMissingChannels, false},
    {"E008", E, "per-event table length differs from the event count",
     "signal events: properties associated with each event", Errc::kLengthMismatch, false},
    {"E009", E, "trigger record is malformed",
     "signal events: trigger type and threshold, per channel when they vary", Errc::kInvalidValue, false},
    {"E010", E, "waveform sampling rate, unit or alignment is malformed",
     "signal events: waveform with sampling rate and units", Errc::kInvalidValue, false},
    {"E011", E, "feature headings do not match the feature count",
     "signal events: feature vectors used for spike sorting", Errc::kHeadingCountMismatch, false},
    {"E012", E, "spike templates are malformed",
     "signal events: spike templates used for sorting", Errc::kInvalidValue, false},
    {"E013", E, "recording start is not finite or duration is negative",
     "signal events: starting time and duration of recording", Errc::kInvalidTime, false},

    {"G001", E, "global metadata group is missing",
     "global metadata: present for each data file", Errc::kSchemaViolation, true},
    {"G002", E, "file_uuid attribute is missing or malformed",
     "global metadata: unique file id", Errc::kSchemaViolation, true},
    {"G003", E, "file_uuid attribute differs from the superblock",
     "global metadata: unique file id", Errc::kUuidMismatch, true},
    {"G004", E, "format version attributes do not match the superblock",
     "global metadata: version identification of the file format", Errc::kSchemaViolation, true},
    {"G005", E, "session_start is missing or lacks a time zone offset",
     "time: date, local time and time zone", Errc::kInvalidTime, true},
    {"G006", E, "identification attribute is not a string",
     "global metadata: identification of the origin", Errc::kSchemaViolation, true},

    {"I001", E, "dimension semantics count differs from pixel rank",
     "image stack: meaning of stack dimensions", Errc::kDimSemanticsMismatch, false},
    {"I002", E, "image stack needs exactly one time dimension",
     "image stack: time that each image is recorded", Errc::kNoTimeDimension, false},
    {"I003", E, "frame time count differs from the time extent",
     "image stack: time that each image is recorded", Errc::kFrameTimeCountMismatch, false},
    {"I004", E, "frame times are not strictly increasing",
     "image stack: time that each image is recorded", Errc::kNonMonotonicFrameTimes, false},
    {"I005", E, "pixel unit is missing or empty",
     "image stack: units of measure of each pixel", Errc::kMissingUnit, false},
    {"I006", E, "pixel geometry is malformed",
     "image stack: spatial relationship of contributing sources", Errc::kBadPixelGeometry, false},
    {"I007", E, "pixel rank is not 3 or 4 or a dimension semantic is unknown",
     "image stack: meaning of stack dimensions", Errc::kDimSemanticsMismatch, false},
    {"I008", E, "image stack source does not resolve",
     "image stack: sources contributing to each image", Errc::kUnknownSource, false},
    {"I009", E, "stack start is not finite or duration is negative",
     "image stack: starting time and duration", Errc::kInvalidTime, false},

    {"L001", E, "required top-level group is missing",
     "storing and retrieving all data and metadata", Errc::kSchemaViolation, true},
    {"L002", E, "unexpected object in a reserved layout location",
     "storing and retrieving all data and metadata", Errc::kSchemaViolation, true},
    {"L003", E, "entity_kind attribute is missing or unknown",
     "data types: inventory of entity kinds", Errc::kSchemaViolation, true},
    {"L004", E, "required attribute is missing or has the wrong type",
     "storing and retrieving all data and metadata", Errc::kSchemaViolation, true},
    {"L005", E, "required dataset is missing or has the wrong dtype or rank",
     "storing and retrieving all data and metadata", Errc::kSchemaViolation, true},
    {"L006", I, "file contains no payload entities",
     "storing and retrieving all data and metadata", Errc::kSchemaViolation, true},

    {"R001", E, "derivation references a path that does not resolve",
     "relationships: derived from links inputs to outputs", Errc::kDanglingReference, false},
    {"R002", E, "derivation edges form a cycle",
     "relationships: derived from links inputs to outputs", Errc::kDerivationCycle, false},
    {"R003", E, "derivation has no agents or an empty agent",
     "relationships: agents associated with a derivation", Errc::kEmptyAgents, false},
    {"R004", E, "derivation activity is empty",
     "relationships: activity describing how a derivation was performed", Errc::kEmptyActivity, true},
    {"R005", E, "derivation has no inputs or no outputs",
     "relationships: derived from links inputs to outputs", Errc::kInvalidValue, false},
    {"R006", E, "grouping has no members or repeats a member",
     "relationships: logical grouping of experiment data", Errc::kEmptyGroup, false},
    {"R007", E, "grouping member does not resolve",
     "relationships: logical grouping of experiment data", Errc::kDanglingReference, false},
    {"R008", E, "grouping override names a non-member",
     "signal source: properties that change with each session", Errc::kInvalidValue, false},
    {"R009", E, "derivation timestamp is not ISO 8601 with an offset",
     "relationships: provenance information", Errc::kInvalidTime, true},

    {"S001", E, "source kind is missing or unknown",
     "signal source: type of source", Errc::kInvalidValue, true},
    {"S002", E, "source parent does not resolve",
     "signal source: hierarchical sources", Errc::kUnknownParent, true},
    {"S003", E, "source parent links form a cycle",
     "signal source: hierarchical sources", Errc::kCycleDetected, true},
    {"S004", E, "ROI geometry on a source that is not an ROI",
     "signal source: source derived from an image region", Errc::kRoiGeometryOnNonRoi, true},
    {"S005", E, "ROI track does not match its times or times are not increasing",
     "signal source: ROI position and shape varying over time", Errc::kInvalidRoiGeometry, false},
    {"S006", I, "source uses the ROI kind extension",
     "signal source: source derived from an image region", Errc::kInvalidValue, true},
    {"S007", E, "source position is not three finite coordinates",
     "signal source: position of the recording implement", Errc::kInvalidValue, true},
    {"S008", E, "ROI vertices are malformed",
     "signal source: source derived from an image region", Errc::kInvalidRoiGeometry, false},

    {"T001", E, "time series unit is missing or empty",
     "time series: sample values including units", Errc::kMissingUnit, false},
    {"T002", E, "timestamps are not strictly increasing",
     "time series: time point of each index", Errc::kNonMonotonicTimestamps, false},
    {"T003", E, "timestamp outside the series window",
     "time series: starting time and duration", Errc::kTimestampOutOfWindow, false},
    {"T004", E, "timestamp count differs from the sample count",
     "time series: time point of each index", Errc::kLengthMismatch, false},
    {"T005", E, "sampling rate is not positive and finite",
     "time series: sampling rate for regular data", Errc::kNonPositiveRate, false},
    {"T006", E, "sync markers are malformed",
     "time series: resynchronization after dropped samples", Errc::kBadSyncMarkers, false},
    {"T007", E, "source count differs from the channel count",
     "time series: signal sources", Errc::kSourceCountMismatch, false},
    {"T008", E, "time series source does not resolve",
     "time series: signal sources", Errc::kUnknownSource, false},
    {"T009", W, "duration disagrees with sample count and rate",
     "time series: duration and sampling rate", Errc::kInvalidValue, false},
    {"T010", E, "per-channel unit count differs from the channel count",
     "time series: sample values including units", Errc::kLengthMismatch, false},
    {"T011", E, "series start is not finite or duration is negative",
     "time series: starting time and duration", Errc::kInvalidTime, false},
    {"T012", E, "time series label is empty",
     "time series: descriptive label", Errc::kInvalidValue, true},

    {"X001", E, "experimental event times are not non-decreasing",
     "experimental events: sequence of event times", Errc::kNonMonotonicTimestamps, false},
    {"X002", E, "experimental event outside the monitoring window",
     "experimental events: start and end of event monitoring", Errc::kEventOutsideMonitorWindow, false},
    {"X003", E, "monitoring window is inverted or not finite",
     "experimental events: start and end of event monitoring", Errc::kInvalidTime, false},
    {"X004", E, "property value count differs from the event count",
     "experimental events: property values for each event", Errc::kPropertyLengthMismatch, false},
    {"X005", E, "event description or property interpretation is empty",
     "experimental events: description and interpretation of values", Errc::kMissingDescription, true},
};

}  // namespace

std::string_view severity_name(Severity severity) {
  switch (severity) {
    case Severity::kError:
      return "ERROR";
    case Severity::kWarning:
      return "WARNING";
    case Severity::kInfo:
      return "INFO";
  }
  return "?";
}

std::span<const RuleInfo> rule_catalog() { return kRules; }

const RuleInfo* find_rule(std::string_view code) {
  auto it = std::lower_bound(std::begin(kRules), std::end(kRules), code,
                             [](const RuleInfo& r, std::string_view c) { return r.code < c; });
  if (it == std::end(kRules) || it->code != code) return nullptr;
  return &*it;
}

void Reporter::report(std::string_view code, std::string path, std::string message,
                      AttrMap detail) {
  const RuleInfo* rule = find_rule(code);
  if (rule == nullptr) {
    throw Error(Errc::kInvalidArgument, "unknown rule code " + std::string(code));
  }
  switch (mode_) {
    case Mode::kWriter:
      if (rule->severity != Severity::kError) return;
      throw Error(rule->errc, message, std::move(path), std::string(code));
    case Mode::kReader:
      if (rule->severity != Severity::kError) return;
      throw Error(Errc::kSchemaViolation, std::string(code) + " " + message, std::move(path),
                  std::string(code));
    case Mode::kCollect:
      violations_.push_back({std::string(code), std::move(path), std::move(message),
                             std::move(detail)});
      return;
  }
}

void Reporter::fatal(std::string_view code, std::string path, std::string message) {
  report(code, std::move(path), std::move(message));
  throw EntityAbandoned{};
}

}  // namespace ephyspack
