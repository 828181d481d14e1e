#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sv {

// Numeric values appear on the storage wire protocol; never renumber.
enum class Errc : std::uint8_t {
  Malformed = 1,
  InvalidArgument = 2,
  // stream_core
  RecordOutOfRange = 10,
  UnsortedInput = 11,
  BadTag = 12,
  BadSignature = 13,
  WrongEpochKey = 14,
  BeforeStreamStart = 15,
  CorruptCompressedData = 16,
  MalformedChunk = 17,
  // crypto
  EpochOutOfRange = 20,
  InvalidCiphertext = 21,
  TokenMismatch = 22,
  NotCurrentlyGranted = 23,
  // ledger
  MalformedTx = 30,
  HeightGap = 31,
  UnknownStream = 32,
  LedgerUnavailable = 33,
  // storage
  NotStreamOwner = 40,
  KeyExists = 41,
  ValueTooLarge = 42,
  PermissionDenied = 43,
  NotFound = 44,
  StaleChallenge = 45,
  StorageUnavailable = 46,
  // dht
  PartitionedOverlay = 50,
  // gateway
  LateRecord = 60,
  MissingKeyEpoch = 61,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  explicit Error(Errc code) : Error(code, errc_name(code)) {}
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sv
