#include "report.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "pcqa/error.hpp"

namespace pcqa::cli {

Json number(double value) {
  if (std::isnan(value)) return nullptr;
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

double read_number(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw SchemaError("metric value is not a number: " + value.dump());
}

void emit(const Json& doc, const std::filesystem::path& path) {
  const std::string text = doc.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
  if (path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void diagnostic(std::string_view level, std::string_view kind, std::string_view message) {
  Json line;
  line["level"] = level;
  line["kind"] = kind;
  line["message"] = message;
  std::cerr << line.dump(-1, ' ', false, Json::error_handler_t::replace) << "\n";
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) diagnostic("warning", "warning", w);
}

}  // namespace pcqa::cli
