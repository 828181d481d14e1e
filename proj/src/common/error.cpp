#include "streamvault/common/error.hpp"

namespace sv {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::Malformed: return "Malformed";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::RecordOutOfRange: return "RecordOutOfRange";
    case Errc::UnsortedInput: return "UnsortedInput";
    case Errc::BadTag: return "BadTag";
    case Errc::BadSignature: return "BadSignature";
    case Errc::WrongEpochKey: return "WrongEpochKey";
    case Errc::BeforeStreamStart: return "BeforeStreamStart";
    case Errc::CorruptCompressedData: return "CorruptCompressedData";
    case Errc::MalformedChunk: return "MalformedChunk";
    case Errc::EpochOutOfRange: return "EpochOutOfRange";
    case Errc::InvalidCiphertext: return "InvalidCiphertext";
    case Errc::TokenMismatch: return "TokenMismatch";
    case Errc::NotCurrentlyGranted: return "NotCurrentlyGranted";
    case Errc::MalformedTx: return "MalformedTx";
    case Errc::HeightGap: return "HeightGap";
    case Errc::UnknownStream: return "UnknownStream";
    case Errc::LedgerUnavailable: return "LedgerUnavailable";
    case Errc::NotStreamOwner: return "NotStreamOwner";
    case Errc::KeyExists: return "KeyExists";
    case Errc::ValueTooLarge: return "ValueTooLarge";
    case Errc::PermissionDenied: return "PermissionDenied";
    case Errc::NotFound: return "NotFound";
    case Errc::StaleChallenge: return "StaleChallenge";
    case Errc::StorageUnavailable: return "StorageUnavailable";
    case Errc::PartitionedOverlay: return "PartitionedOverlay";
    case Errc::LateRecord: return "LateRecord";
    case Errc::MissingKeyEpoch: return "MissingKeyEpoch";
  }
  return "Unknown";
}

}  // namespace sv
