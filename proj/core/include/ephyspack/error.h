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

#ifndef EPHYSPACK_ERROR_H_
#define EPHYSPACK_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ephyspack {

// Every failure raised by the library carries one of these codes.
enum class Errc {
  // container
  kPathExists,
  kIoFailure,
  kLocked,
  kBadMagic,
  kUnsupportedVersion,
  kCorruptSuperblock,
  kCorruptFooter,
  kTruncatedFile,
  kDuplicateName,
  kNotAGroup,
  kNotADataset,
  kReadOnlyHandle,
  kInvalidName,
  kRankMismatch,
  kRankTooHigh,
  kZeroChunkExtent,
  kOutOfBounds,
  kLengthMismatch,
  kDtypeMismatch,
  kChunkChecksumMismatch,
  kAttributeBudgetExceeded,
  kNoSuchKey,
  kNoSuchObject,
  kInvalidValue,
  // model
  kSchemaViolation,
  kUuidMismatch,
  kInvalidTime,
  kDuplicateSourceId,
  kUnknownParent,
  kCycleDetected,
  kRoiGeometryOnNonRoi,
  kInvalidRoiGeometry,
  kUnknownSource,
  kNonMonotonicTimestamps,
  kTimestampOutOfWindow,
  kSourceCountMismatch,
  kMissingUnit,
  kNonPositiveRate,
  kBadSyncMarkers,
  kIndexOutOfRange,
  kEventTimeOutOfWindow,
  kBadOffsets,
  kProbRowNotNormalized,
  kUnknownUnitSource,
  kDuplicatePropertySetName,
  kNoSuchPropertySet,
  kNoWaveforms,
  kMissingChannels,
  kDimSemanticsMismatch,
  kNoTimeDimension,
  kFrameTimeCountMismatch,
  kNonMonotonicFrameTimes,
  kBadPixelGeometry,
  kPropertyLengthMismatch,
  kEventOutsideMonitorWindow,
  kMissingDescription,
  kHeadingCountMismatch,
  kDanglingReference,
  kDerivationCycle,
  kEmptyAgents,
  kEmptyActivity,
  kDuplicateGroupId,
  kEmptyGroup,
  // query
  kNoSuchEntity,
  kNoSuchSource,
  kNoSuchGroup,
  // ingest
  kManifestError,
  kParseError,
  kUnknownMutation,
  kMutationNotApplicable,
  kInvalidArgument,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::string path = {},
        std::string rule = {});

  Errc code() const noexcept { return code_; }
  // Object or entity path the failure refers to, when known.
  const std::string& path() const noexcept { return path_; }
  // Validation rule code (e.g. "T002") for schema violations.
  const std::string& rule() const noexcept { return rule_; }

 private:
  Errc code_;
  std::string path_;
  std::string rule_;
};

}  // namespace ephyspack

#endif  // EPHYSPACK_ERROR_H_
