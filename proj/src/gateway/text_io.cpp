#include "streamvault/gateway/text_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "streamvault/common/error.hpp"

namespace sv::gateway {

TextFormat parse_text_format(const std::string& name) {
  if (name == "csv") return TextFormat::Csv;
  if (name == "ndjson" || name == "json") return TextFormat::Ndjson;
  throw Error(Errc::InvalidArgument, "unknown record format '" + name + "'");
}

namespace {

[[noreturn]] void bad_line(std::size_t line_no, const std::string& why) {
  throw Error(Errc::Malformed, "line " + std::to_string(line_no) + ": " + why);
}

stream::DataRecord parse_csv_line(const std::string& line, std::size_t line_no) {
  const auto comma = line.find(',');
  if (comma == std::string::npos) bad_line(line_no, "expected <timestamp>,<value>");
  stream::DataRecord r;
  auto [ptr, ec] = std::from_chars(line.data(), line.data() + comma, r.timestamp);
  if (ec != std::errc() || ptr != line.data() + comma) bad_line(line_no, "timestamp is not an integer");
  r.value.assign(line.begin() + static_cast<std::ptrdiff_t>(comma) + 1, line.end());
  return r;
}

stream::DataRecord parse_json_line(const std::string& line, std::size_t line_no) {
  try {
    auto j = nlohmann::json::parse(line);
    stream::DataRecord r;
    r.timestamp = j.at("timestamp").get<std::int64_t>();
    const auto value = j.at("value").get<std::string>();
    r.value.assign(value.begin(), value.end());
    return r;
  } catch (const nlohmann::json::exception& e) {
    bad_line(line_no, e.what());
  }
}

}  // namespace

std::vector<stream::DataRecord> read_records(std::istream& in, TextFormat format) {
  std::vector<stream::DataRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (format == TextFormat::Csv) {
      if (line_no == 1 && line.rfind("timestamp,", 0) == 0) continue;
      out.push_back(parse_csv_line(line, line_no));
    } else {
      out.push_back(parse_json_line(line, line_no));
    }
  }
  return out;
}

void write_records(std::ostream& out, std::span<const stream::DataRecord> records, TextFormat format) {
  if (format == TextFormat::Csv) out << "timestamp,value\n";
  for (const auto& r : records) {
    const std::string value(r.value.begin(), r.value.end());
    if (format == TextFormat::Csv) {
      out << r.timestamp << ',' << value << '\n';
    } else {
      out << nlohmann::json{{"timestamp", r.timestamp}, {"value", value}}.dump() << '\n';
    }
  }
}

}  // namespace sv::gateway
