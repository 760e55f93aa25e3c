#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace pcqa::cli {

using Json = nlohmann::ordered_json;

/// Finite values as numbers; infinities as the strings "inf" / "-inf"; NaN as null.
Json number(double value);
/// Inverse of number(): accepts numbers, "inf", "-inf" and null (NaN).
double read_number(const Json& value);

/// Writes `doc` (pretty, trailing newline) to `path`, or to stdout when empty.
void emit(const Json& doc, const std::filesystem::path& path);

/// One JSON object per line on stderr.
void diagnostic(std::string_view level, std::string_view kind, std::string_view message);
void warn_all(const std::vector<std::string>& warnings);

}  // namespace pcqa::cli
