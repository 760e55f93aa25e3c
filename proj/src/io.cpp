#include "pcqa/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>

#include "pcqa/error.hpp"

namespace pcqa::io {

namespace {

enum class ScalarType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<ScalarType> parse_scalar_type(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::Int8;
  if (name == "uchar" || name == "uint8") return ScalarType::UInt8;
  if (name == "short" || name == "int16") return ScalarType::Int16;
  if (name == "ushort" || name == "uint16") return ScalarType::UInt16;
  if (name == "int" || name == "int32") return ScalarType::Int32;
  if (name == "uint" || name == "uint32") return ScalarType::UInt32;
  if (name == "float" || name == "float32") return ScalarType::Float32;
  if (name == "double" || name == "float64") return ScalarType::Float64;
  return std::nullopt;
}

std::size_t type_size(ScalarType t) {
  switch (t) {
    case ScalarType::Int8:
    case ScalarType::UInt8:
      return 1;
    case ScalarType::Int16:
    case ScalarType::UInt16:
      return 2;
    case ScalarType::Int32:
    case ScalarType::UInt32:
    case ScalarType::Float32:
      return 4;
    case ScalarType::Float64:
      return 8;
  }
  return 0;
}

template <typename T>
T read_le(const char* p) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

double read_scalar(const char* p, ScalarType t) {
  switch (t) {
    case ScalarType::Int8:
      return read_le<std::int8_t>(p);
    case ScalarType::UInt8:
      return read_le<std::uint8_t>(p);
    case ScalarType::Int16:
      return read_le<std::int16_t>(p);
    case ScalarType::UInt16:
      return read_le<std::uint16_t>(p);
    case ScalarType::Int32:
      return read_le<std::int32_t>(p);
    case ScalarType::UInt32:
      return read_le<std::uint32_t>(p);
    case ScalarType::Float32:
      return read_le<float>(p);
    case ScalarType::Float64:
      return read_le<double>(p);
  }
  return 0.0;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::Float32;
  bool is_list = false;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
  std::size_t header_line = 0;
};

struct Header {
  PlyFormat format = PlyFormat::Ascii;
  std::vector<Element> elements;
  std::size_t body_offset = 0;
  std::size_t line_count = 0;  // header lines, including end_header
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_size(std::string_view token, std::size_t& out) {
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool parse_double(std::string_view token, double& out) {
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

Header parse_header(std::string_view data) {
  Header header;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool have_format = false;
  bool done = false;
  while (!done) {
    if (pos >= data.size()) throw ParseError("missing end_header", line_no + 1);
    const std::size_t eol = data.find('\n', pos);
    const std::size_t end = eol == std::string_view::npos ? data.size() : eol;
    std::string_view line = data.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol == std::string_view::npos ? data.size() : eol + 1;
    ++line_no;

    if (line_no == 1) {
      if (line != "ply") throw ParseError("not a PLY file (missing 'ply' magic)", 1);
      continue;
    }
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const std::string_view keyword = tokens[0];
    if (keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "format") {
      if (tokens.size() != 3) throw ParseError("malformed format line", line_no);
      if (tokens[2] != "1.0") throw ParseError("unsupported PLY version", line_no);
      if (tokens[1] == "ascii") {
        header.format = PlyFormat::Ascii;
      } else if (tokens[1] == "binary_little_endian") {
        header.format = PlyFormat::BinaryLittleEndian;
      } else if (tokens[1] == "binary_big_endian") {
        throw ParseError("big-endian PLY is not supported", line_no);
      } else {
        throw ParseError("unknown PLY format '" + std::string(tokens[1]) + "'", line_no);
      }
      have_format = true;
    } else if (keyword == "element") {
      Element element;
      if (tokens.size() != 3 || !parse_size(tokens[2], element.count)) {
        throw ParseError("malformed element line", line_no);
      }
      element.name = tokens[1];
      element.header_line = line_no;
      header.elements.push_back(std::move(element));
    } else if (keyword == "property") {
      if (header.elements.empty()) throw ParseError("property before any element", line_no);
      Property property;
      if (tokens.size() == 5 && tokens[1] == "list") {
        if (!parse_scalar_type(tokens[2]) || !parse_scalar_type(tokens[3])) {
          throw ParseError("unknown list property type", line_no);
        }
        property.is_list = true;
        property.name = tokens[4];
      } else if (tokens.size() == 3) {
        const auto type = parse_scalar_type(tokens[1]);
        if (!type) throw ParseError("unknown property type '" + std::string(tokens[1]) + "'", line_no);
        property.type = *type;
        property.name = tokens[2];
      } else {
        throw ParseError("malformed property line", line_no);
      }
      header.elements.back().properties.push_back(std::move(property));
    } else if (keyword == "end_header") {
      done = true;
    } else {
      throw ParseError("unexpected header keyword '" + std::string(keyword) + "'", line_no);
    }
  }
  if (!have_format) throw ParseError("missing format line", line_no);
  header.body_offset = pos;
  header.line_count = line_no;
  return header;
}

// Column roles in the vertex element.
struct VertexLayout {
  std::array<int, 3> position{-1, -1, -1};
  std::array<int, 3> color{-1, -1, -1};
  std::array<int, 3> normal{-1, -1, -1};
  bool has_colors = false;
  bool has_normals = false;
};

int find_property(const Element& e, std::initializer_list<std::string_view> names) {
  for (std::size_t i = 0; i < e.properties.size(); ++i) {
    for (const auto name : names) {
      if (e.properties[i].name == name) return static_cast<int>(i);
    }
  }
  return -1;
}

VertexLayout vertex_layout(const Element& e, std::vector<std::string>& warnings) {
  VertexLayout layout;
  layout.position = {find_property(e, {"x"}), find_property(e, {"y"}), find_property(e, {"z"})};
  for (const int p : layout.position) {
    if (p < 0) throw ParseError("vertex element lacks x, y or z", e.header_line);
    if (e.properties[p].is_list) throw ParseError("list-typed coordinate", e.header_line);
  }
  layout.color = {find_property(e, {"red", "r"}), find_property(e, {"green", "g"}),
                  find_property(e, {"blue", "b"})};
  layout.has_colors = std::all_of(layout.color.begin(), layout.color.end(), [](int p) { return p >= 0; });
  if (layout.has_colors) {
    for (const int p : layout.color) {
      if (e.properties[p].is_list || e.properties[p].type != ScalarType::UInt8) {
        warnings.push_back("color properties are not 8-bit unsigned; colors ignored");
        layout.has_colors = false;
        break;
      }
    }
  }
  layout.normal = {find_property(e, {"nx"}), find_property(e, {"ny"}), find_property(e, {"nz"})};
  layout.has_normals = std::all_of(layout.normal.begin(), layout.normal.end(), [](int p) { return p >= 0; });
  if (layout.has_normals) {
    for (const int p : layout.normal) {
      if (e.properties[p].is_list) {
        layout.has_normals = false;
        break;
      }
    }
  }
  return layout;
}

struct RawVertices {
  std::vector<Vec3> positions;
  std::vector<Rgb> colors;
  std::vector<Vec3> normals;
};

void store_vertex(const VertexLayout& layout, const std::vector<double>& values, RawVertices& out) {
  out.positions.emplace_back(values[layout.position[0]], values[layout.position[1]],
                             values[layout.position[2]]);
  if (!out.positions.back().allFinite()) {
    throw ValidationError("non-finite coordinate", out.positions.size() - 1);
  }
  if (layout.has_colors) {
    out.colors.push_back({static_cast<std::uint8_t>(values[layout.color[0]]),
                          static_cast<std::uint8_t>(values[layout.color[1]]),
                          static_cast<std::uint8_t>(values[layout.color[2]])});
  }
  if (layout.has_normals) {
    out.normals.emplace_back(values[layout.normal[0]], values[layout.normal[1]],
                             values[layout.normal[2]]);
  }
}

RawVertices read_ascii(std::string_view data, const Header& header, std::size_t vertex_element,
                       const VertexLayout& layout) {
  std::size_t pos = header.body_offset;
  std::size_t line_no = header.line_count;
  auto next_line = [&](std::string_view& line) {
    while (pos < data.size()) {
      const std::size_t eol = data.find('\n', pos);
      const std::size_t end = eol == std::string_view::npos ? data.size() : eol;
      line = data.substr(pos, end - pos);
      pos = eol == std::string_view::npos ? data.size() : eol + 1;
      ++line_no;
      if (!split_ws(line).empty()) return true;
    }
    return false;
  };

  std::string_view line;
  for (std::size_t e = 0; e < vertex_element; ++e) {
    for (std::size_t i = 0; i < header.elements[e].count; ++i) {
      if (!next_line(line)) {
        throw TruncationError(header.elements[e].name + " lines", header.elements[e].count, i);
      }
    }
  }

  const Element& vertex = header.elements[vertex_element];
  RawVertices out;
  // Never reserve beyond what the body could possibly hold.
  const std::size_t cap = std::min(vertex.count, (data.size() - pos) / 2 + 1);
  out.positions.reserve(cap);
  if (layout.has_colors) out.colors.reserve(cap);
  if (layout.has_normals) out.normals.reserve(cap);

  std::vector<double> values(vertex.properties.size());
  for (std::size_t i = 0; i < vertex.count; ++i) {
    if (!next_line(line)) throw TruncationError("vertex lines", vertex.count, i);
    const auto tokens = split_ws(line);
    std::size_t t = 0;
    for (std::size_t p = 0; p < vertex.properties.size(); ++p) {
      if (vertex.properties[p].is_list) {
        std::size_t n = 0;
        if (t >= tokens.size() || !parse_size(tokens[t], n)) {
          throw ParseError("bad list length in vertex " + std::to_string(i), line_no);
        }
        t += 1 + n;
        values[p] = 0.0;
        continue;
      }
      if (t >= tokens.size()) throw ParseError("too few values in vertex " + std::to_string(i), line_no);
      if (!parse_double(tokens[t], values[p])) {
        throw ParseError("cannot parse '" + std::string(tokens[t]) + "'", line_no);
      }
      ++t;
    }
    if (t > tokens.size()) throw ParseError("too few values in vertex " + std::to_string(i), line_no);
    if (layout.has_colors) {
      for (const int c : layout.color) {
        if (values[c] < 0.0 || values[c] > 255.0 || values[c] != std::floor(values[c])) {
          throw ValidationError("color value outside 0..255", i);
        }
      }
    }
    store_vertex(layout, values, out);
  }
  return out;
}

RawVertices read_binary(std::string_view data, const Header& header, std::size_t vertex_element,
                        const VertexLayout& layout) {
  std::size_t pos = header.body_offset;
  for (std::size_t e = 0; e < vertex_element; ++e) {
    const Element& element = header.elements[e];
    std::size_t stride = 0;
    for (const Property& p : element.properties) {
      if (p.is_list) {
        throw ParseError("cannot skip list-typed element '" + element.name + "' before vertices",
                         element.header_line);
      }
      stride += type_size(p.type);
    }
    const std::size_t bytes = stride * element.count;
    if (data.size() - pos < bytes) throw TruncationError("bytes", bytes, data.size() - pos);
    pos += bytes;
  }

  const Element& vertex = header.elements[vertex_element];
  for (const Property& p : vertex.properties) {
    if (p.is_list) throw ParseError("list properties in the vertex element are not supported", vertex.header_line);
  }
  std::vector<std::size_t> offsets;
  std::size_t stride = 0;
  for (const Property& p : vertex.properties) {
    offsets.push_back(stride);
    stride += type_size(p.type);
  }
  const std::size_t expected = stride * vertex.count;
  const std::size_t available = data.size() - pos;
  if (available < expected) throw TruncationError("bytes", expected, available);

  RawVertices out;
  out.positions.reserve(vertex.count);
  if (layout.has_colors) out.colors.reserve(vertex.count);
  if (layout.has_normals) out.normals.reserve(vertex.count);
  std::vector<double> values(vertex.properties.size());
  const char* base = data.data() + pos;
  for (std::size_t i = 0; i < vertex.count; ++i) {
    const char* row = base + i * stride;
    for (std::size_t p = 0; p < vertex.properties.size(); ++p) {
      values[p] = read_scalar(row + offsets[p], vertex.properties[p].type);
    }
    store_vertex(layout, values, out);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path.string());
  return data;
}

// Unit normals are required downstream; near-unit normals (float storage)
// are renormalized, and a set containing zero or non-finite vectors is dropped.
std::optional<std::vector<Vec3>> clean_normals(std::vector<Vec3> normals,
                                               std::vector<std::string>& warnings) {
  std::size_t renormalized = 0;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    const double norm = normals[i].norm();
    if (!std::isfinite(norm) || norm < 1e-12) {
      warnings.push_back("normal " + std::to_string(i) + " is zero or non-finite; normals dropped");
      return std::nullopt;
    }
    if (std::abs(norm - 1.0) > 1e-6) ++renormalized;
    if (std::abs(norm - 1.0) > 1e-9) normals[i] /= norm;
  }
  if (renormalized > 0) {
    warnings.push_back(std::to_string(renormalized) + " non-unit normals renormalized");
  }
  return normals;
}

}  // namespace

PlyLoadResult load_ply_with_warnings(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  const Header header = parse_header(data);

  std::size_t vertex_element = header.elements.size();
  for (std::size_t e = 0; e < header.elements.size(); ++e) {
    if (header.elements[e].name == "vertex") {
      vertex_element = e;
      break;
    }
  }
  if (vertex_element == header.elements.size()) {
    throw ParseError("no vertex element", header.line_count);
  }

  PlyLoadResult result;
  const VertexLayout layout = vertex_layout(header.elements[vertex_element], result.warnings);
  RawVertices raw = header.format == PlyFormat::Ascii
                        ? read_ascii(data, header, vertex_element, layout)
                        : read_binary(data, header, vertex_element, layout);

  std::optional<std::vector<Rgb>> colors;
  if (layout.has_colors) colors = std::move(raw.colors);
  std::optional<std::vector<Vec3>> normals;
  if (layout.has_normals) normals = clean_normals(std::move(raw.normals), result.warnings);
  result.cloud = PointCloud(std::move(raw.positions), std::move(colors), std::move(normals));
  return result;
}

PointCloud load_ply(const std::filesystem::path& path) {
  return load_ply_with_warnings(path).cloud;
}

namespace {

bool float_exact(double v) {
  const auto f = static_cast<float>(v);
  return std::isfinite(f) && static_cast<double>(f) == v;
}

template <typename T>
void write_le(std::string& out, T value) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.append(bytes.data(), bytes.size());
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

void save_ply(const PointCloud& cloud, const std::filesystem::path& path, PlyFormat format) {
  bool positions_fit_float = true;
  for (const Vec3& p : cloud.positions()) {
    if (!float_exact(p.x()) || !float_exact(p.y()) || !float_exact(p.z())) {
      positions_fit_float = false;
      break;
    }
  }
  const char* coord_type = positions_fit_float ? "float" : "double";

  std::string out;
  out += "ply\n";
  out += format == PlyFormat::Ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  for (const char* axis : {"x", "y", "z"}) {
    out += std::string("property ") + coord_type + " " + axis + "\n";
  }
  if (cloud.has_colors()) {
    out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  if (cloud.has_normals()) {
    out += "property double nx\nproperty double ny\nproperty double nz\n";
  }
  out += "end_header\n";

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.position(i);
    if (format == PlyFormat::Ascii) {
      for (int a = 0; a < 3; ++a) {
        if (a > 0) out += ' ';
        append_number(out, p[a]);
      }
      if (cloud.has_colors()) {
        for (const std::uint8_t c : cloud.color(i)) out += ' ' + std::to_string(c);
      }
      if (cloud.has_normals()) {
        for (int a = 0; a < 3; ++a) {
          out += ' ';
          append_number(out, cloud.normals()[i][a]);
        }
      }
      out += '\n';
    } else {
      for (int a = 0; a < 3; ++a) {
        if (positions_fit_float) {
          write_le(out, static_cast<float>(p[a]));
        } else {
          write_le(out, p[a]);
        }
      }
      if (cloud.has_colors()) {
        for (const std::uint8_t c : cloud.color(i)) write_le(out, c);
      }
      if (cloud.has_normals()) {
        for (int a = 0; a < 3; ++a) write_le(out, cloud.normals()[i][a]);
      }
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path.string());
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

MosTable load_mos_csv(const std::filesystem::path& path) {
  std::string data = read_file(path);
  if (data.starts_with("\xEF\xBB\xBF")) data.erase(0, 3);
  std::istringstream in(data);

  std::string line;
  std::size_t line_no = 0;
  int content_col = -1;
  int distortion_col = -1;
  int mos_col = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      std::string name(fields[i]);
      std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
      if (name == "content") content_col = static_cast<int>(i);
      if (name == "distortion") distortion_col = static_cast<int>(i);
      if (name == "mos") mos_col = static_cast<int>(i);
    }
    break;
  }
  if (content_col < 0 || distortion_col < 0 || mos_col < 0) {
    throw SchemaError("MOS table header must name content, distortion and mos columns");
  }
  const auto needed = static_cast<std::size_t>(std::max({content_col, distortion_col, mos_col})) + 1;

  MosTable table;
  std::set<std::pair<std::string, std::string>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() < needed) throw ParseError("missing fields in row " + std::to_string(line_no), line_no);
    MosRow row{std::string(fields[content_col]), std::string(fields[distortion_col]), 0.0};
    if (!parse_double(fields[mos_col], row.mos) || !std::isfinite(row.mos)) {
      throw ParseError("non-numeric mos '" + std::string(fields[mos_col]) + "' in row " +
                           std::to_string(line_no),
                       line_no);
    }
    if (!seen.emplace(row.content, row.distortion).second) {
      throw DuplicateKeyError("duplicate MOS key (" + row.content + ", " + row.distortion +
                              ") in row " + std::to_string(line_no));
    }
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace pcqa::io
