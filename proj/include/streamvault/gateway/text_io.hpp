#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "streamvault/stream/record.hpp"

namespace sv::gateway {

// Text record formats. Values are carried as their raw bytes interpreted
// as text.
//   csv:    optional "timestamp,value" header, then "<ms>,<value>" per line;
//           the value is everything after the first comma
//   ndjson: {"timestamp": <ms>, "value": "<text>"} per line
enum class TextFormat { Csv, Ndjson };

/// Throws InvalidArgument for unknown names.
TextFormat parse_text_format(const std::string& name);

/// Throws Malformed with the offending line number.
std::vector<stream::DataRecord> read_records(std::istream& in, TextFormat format);
void write_records(std::ostream& out, std::span<const stream::DataRecord> records, TextFormat format);

}  // namespace sv::gateway
