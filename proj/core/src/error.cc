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

#include "ephyspack/error.h"

#include <utility>

namespace ephyspack {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kPathExists:
      return "PathExists";
    case Errc::kIoFailure:
      return "IoFailure";
    case Errc::kLocked:
      return "Locked";
    case Errc::kBadMagic:
      return "BadMagic";
    case Errc::kUnsupportedVersion:
      return "UnsupportedVersion";
    case Errc::kCorruptSuperblock:
      return "CorruptSuperblock";
    case Errc::kCorruptFooter:
      return "CorruptFooter";
    case Errc::kTruncatedFile:
      return "TruncatedFile";
    case Errc::kDuplicateName:
      return "DuplicateName";
    case Errc::kNotAGroup:
      return "NotAGroup";
    case Errc::kNotADataset:
      return "NotADataset";
    case Errc::kReadOnlyHandle:
      return "ReadOnlyHandle";
    case Errc::kInvalidName:
      return "InvalidName";
    case Errc::kRankMismatch:
      return "RankMismatch";
    case Errc::kRankTooHigh:
      return "RankTooHigh";
    case Errc::kZeroChunkExtent:
      return "ZeroChunkExtent";
    case Errc::kOutOfBounds:
      return "OutOfBounds";
    case Errc::kLengthMismatch:
      return "LengthMismatch";
    case Errc::kDtypeMismatch:
      return "DtypeMismatch";
    case Errc::kChunkChecksumMismatch:
      return "ChunkChecksumMismatch";
    case Errc::kAttributeBudgetExceeded:
      return "AttributeBudgetExceeded";
    case Errc::kNoSuchKey:
      return "NoSuchKey";
    case Errc::kNoSuchObject:
      return "NoSuchObject";
    case Errc::kInvalidValue:
      return "InvalidValue";
    case Errc::kSchemaViolation:
      return "SchemaViolation";
    case Errc::kUuidMismatch:
      return "UuidMismatch";
    case Errc::kInvalidTime:
      return "InvalidTime";
    case Errc::kDuplicateSourceId:
      return "DuplicateSourceId";
    case Errc::kUnknownParent:
      return "UnknownParent";
    case Errc::kCycleDetected:
      return "CycleDetected";
    case Errc::kRoiGeometryOnNonRoi:
      return "RoiGeometryOnNonRoi";
    case Errc::kInvalidRoiGeometry:
      return "InvalidRoiGeometry";
    case Errc::kUnknownSource:
      return "UnknownSource";
    case Errc::kNonMonotonicTimestamps:
      return "NonMonotonicTimestamps";
    case Errc::kTimestampOutOfWindow:
      return "TimestampOutOfWindow";
    case Errc::kSourceCountMismatch:
      return "SourceCountMismatch";
    case Errc::kMissingUnit:
      return "MissingUnit";
    case Errc::kNonPositiveRate:
      return "NonPositiveRate";
    case Errc::kBadSyncMarkers:
      return "BadSyncMarkers";
    case Errc::kIndexOutOfRange:
      return "IndexOutOfRange";
    case Errc::kEventTimeOutOfWindow:
      return "EventTimeOutOfWindow";
    case Errc::kBadOffsets:
      return "BadOffsets";
    case Errc::kProbRowNotNormalized:
      return "ProbRowNotNormalized";
    case Errc::kUnknownUnitSource:
      return "UnknownUnitSource";
    case Errc::kDuplicatePropertySetName:
      return "DuplicatePropertySetName";
    case Errc::kNoSuchPropertySet:
      return "NoSuchPropertySet";
    case Errc::kNoWaveforms:
      return "NoWaveforms";
    case Errc::kMissingChannels:
      return "MissingChannels";
    case Errc::kDimSemanticsMismatch:
      return "DimSemanticsMismatch";
    case Errc::kNoTimeDimension:
      return "NoTimeDimension";
    case Errc::kFrameTimeCountMismatch:
      return "FrameTimeCountMismatch";
    case Errc::kNonMonotonicFrameTimes:
      return "NonMonotonicFrameTimes";
    case Errc::kBadPixelGeometry:
      return "BadPixelGeometry";
    case Errc::kPropertyLengthMismatch:
      return "PropertyLengthMismatch";
    case Errc::kEventOutsideMonitorWindow:
      return "EventOutsideMonitorWindow";
    case Errc::kMissingDescription:
      return "MissingDescription";
    case Errc::kHeadingCountMismatch:
      return "HeadingCountMismatch";
    case Errc::kDanglingReference:
      return "DanglingReference";
    case Errc::kDerivationCycle:
      return "DerivationCycle";
    case Errc::kEmptyAgents:
      return "EmptyAgents";
    case Errc::kEmptyActivity:
      return "EmptyActivity";
    case Errc::kDuplicateGroupId:
      return "DuplicateGroupId";
    case Errc::kEmptyGroup:
      return "EmptyGroup";
    case Errc::kNoSuchEntity:
      return "NoSuchEntity";
    case Errc::kNoSuchSource:
      return "NoSuchSource";
    case Errc::kNoSuchGroup:
      return "NoSuchGroup";
    case Errc::kManifestError:
      return "ManifestError";
    case Errc::kParseError:
      return "ParseError";
    case Errc::kUnknownMutation:
      return "UnknownMutation";
    case Errc::kMutationNotApplicable:
      return "MutationNotApplicable";
    case Errc::kInvalidArgument:
      return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message, std::string path,
             std::string rule)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message),
      code_(code),
      path_(std::move(path)),
      rule_(std::move(rule)) {}

}  // namespace ephyspack
