#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "pcqa/error.hpp"
#include "pcqa/io.hpp"
#include "support/fixtures.hpp"

using namespace pcqa;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pcqa_test_io";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_text(const std::string& name, const std::string& text) {
  const fs::path p = temp_path(name);
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void expect_equal(const PointCloud& a, const PointCloud& b) {
  REQUIRE(a.size() == b.size());
  CHECK(a.has_colors() == b.has_colors());
  CHECK(a.has_normals() == b.has_normals());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.position(i) == b.position(i));
    if (a.has_colors() && b.has_colors()) CHECK(a.color(i) == b.color(i));
    if (a.has_normals() && b.has_normals()) CHECK(a.normals()[i] == b.normals()[i]);
  }
}

}  // namespace

TEST_CASE("round trips are exact in both formats") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  const PointCloud base = testing::random_cloud(500, 9);
  std::vector<Vec3> normals(base.size());
  for (auto& n : normals) n = Vec3(g(rng), g(rng), g(rng)).normalized();
  const PointCloud with_normals = base.with_normals(normals);
  // Float-representable coordinates, which are stored as float.
  std::vector<Vec3> fpos;
  for (const auto& p : base.positions()) fpos.emplace_back(float(p.x()), float(p.y()), float(p.z()));
  const PointCloud floats(fpos);

  for (const auto fmt : {io::PlyFormat::Ascii, io::PlyFormat::BinaryLittleEndian}) {
    for (const PointCloud* c : {&base, &with_normals, &floats}) {
      const fs::path p = temp_path("rt.ply");
      io::save_ply(*c, p, fmt);
      const auto loaded = io::load_ply_with_warnings(p);
      CHECK(loaded.warnings.empty());
      expect_equal(*c, loaded.cloud);
    }
  }
}

TEST_CASE("ascii header variants") {
  const auto p = write_text("aliases.ply",
                            "ply\nformat ascii 1.0\ncomment made by hand\n"
                            "element camera 1\nproperty float fov\n"
                            "element vertex 2\nproperty float x\nproperty float y\nproperty float z\n"
                            "property uchar r\nproperty uchar g\nproperty uchar b\nproperty float intensity\n"
                            "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
                            "45\n0 0 0 255 0 10 0.5\n1 2 3 1 2 3 0.1\n3 0 1 1\n");
  const PointCloud c = io::load_ply(p);
  REQUIRE(c.size() == 2);
  CHECK(c.position(1) == Vec3(1, 2, 3));
  REQUIRE(c.has_colors());
  CHECK(c.color(0) == Rgb{255, 0, 10});
}

TEST_CASE("non-8-bit colors are ignored with a warning") {
  const auto p = write_text("floatcolor.ply",
                            "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n"
                            "property float z\nproperty float red\nproperty float green\nproperty float blue\n"
                            "end_header\n0 0 0 0.5 0.5 0.5\n");
  const auto r = io::load_ply_with_warnings(p);
  CHECK_FALSE(r.cloud.has_colors());
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("binary little endian with mixed types") {
  std::string body;
  for (int i = 0; i < 3; ++i) {
    put<double>(body, i * 0.5);
    put<float>(body, 1.0f);
    put<int>(body, -i);
    put<unsigned char>(body, 10);
    put<unsigned char>(body, 20);
    put<unsigned char>(body, static_cast<unsigned char>(30 + i));
    put<short>(body, 7);
  }
  const std::string header =
      "ply\nformat binary_little_endian 1.0\nelement vertex 3\nproperty double x\nproperty float y\n"
      "property int z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\nproperty short extra\nend_header\n";
  const auto p = write_text("mixed.ply", header + body);
  const PointCloud c = io::load_ply(p);
  REQUIRE(c.size() == 3);
  CHECK(c.position(2) == Vec3(1.0, 1.0, -2.0));
  CHECK(c.color(2) == Rgb{10, 20, 32});
}

TEST_CASE("normals are renormalized or dropped") {
  const auto near = write_text("near.ply",
                               "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n"
                               "property float z\nproperty float nx\nproperty float ny\nproperty float nz\n"
                               "end_header\n0 0 0 0 0 2\n");
  const auto r = io::load_ply_with_warnings(near);
  REQUIRE(r.cloud.has_normals());
  CHECK(r.cloud.normals()[0] == Vec3(0, 0, 1));
  CHECK(r.warnings.size() == 1);
  const auto zero = write_text("zero.ply",
                               "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n"
                               "property float z\nproperty float nx\nproperty float ny\nproperty float nz\n"
                               "end_header\n0 0 0 0 0 0\n");
  CHECK_FALSE(io::load_ply(zero).has_normals());
}

TEST_CASE("malformed files raise typed errors") {
  CHECK_THROWS_AS(io::load_ply(temp_path("does_not_exist.ply")), IoError);
  CHECK_THROWS_AS(io::load_ply(write_text("magic.ply", "plx\nformat ascii 1.0\nend_header\n")), ParseError);
  CHECK_THROWS_AS(io::load_ply(write_text("be.ply",
                                          "ply\nformat binary_big_endian 1.0\nelement vertex 0\n"
                                          "property float x\nproperty float y\nproperty float z\nend_header\n")),
                  ParseError);
  CHECK_THROWS_AS(io::load_ply(write_text("noz.ply",
                                          "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n"
                                          "property float y\nend_header\n0 0\n")),
                  ParseError);
  try {
    io::load_ply(write_text("bad.ply",
                            "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n"
                            "property float z\nend_header\n0 0 0\n1 zz 1\n"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 9);
  }
  try {
    io::load_ply(write_text("short.ply",
                            "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\n"
                            "property float z\nend_header\n0 0 0\n"));
    FAIL("expected truncation");
  } catch (const TruncationError& e) {
    CHECK(e.expected() == 3);
    CHECK(e.actual() == 1);
  }
  std::string body;
  put<float>(body, 1.0f);
  CHECK_THROWS_AS(io::load_ply(write_text("shortbin.ply",
                                          "ply\nformat binary_little_endian 1.0\nelement vertex 1000000000\n"
                                          "property float x\nproperty float y\nproperty float z\nend_header\n" +
                                              body)),
                  TruncationError);
  try {
    io::load_ply(write_text("nan.ply",
                            "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n"
                            "property float z\nend_header\n0 0 0\nnan 0 0\n"));
    FAIL("expected validation error");
  } catch (const ValidationError& e) {
    CHECK(e.point() == 1);
  }
}

TEST_CASE("empty vertex element loads as an empty cloud") {
  const auto p = write_text("empty.ply",
                            "ply\nformat ascii 1.0\nelement vertex 0\nproperty float x\nproperty float y\n"
                            "property float z\nend_header\n");
  CHECK(io::load_ply(p).empty());
}

TEST_CASE("MOS table") {
  const auto ok = write_text("mos.csv", "\xEF\xBB\xBFMOS,Content,Distortion\n7.5,redandblack,cn_1\n\n3,loot,ds_2\n");
  const auto t = io::load_mos_csv(ok);
  REQUIRE(t.size() == 2);
  CHECK(t[0].content == "redandblack");
  CHECK(t[0].distortion == "cn_1");
  CHECK(t[0].mos == 7.5);
  CHECK(t[1].mos == 3.0);

  CHECK_THROWS_AS(io::load_mos_csv(write_text("nomos.csv", "content,distortion,score\na,b,1\n")), SchemaError);
  CHECK_THROWS_AS(io::load_mos_csv(write_text("dup.csv", "content,distortion,mos\na,b,1\na,b,2\n")),
                  DuplicateKeyError);
  try {
    io::load_mos_csv(write_text("badnum.csv", "content,distortion,mos\na,b,1\na,c,high\n"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("point cloud invariants") {
  CHECK_THROWS_AS(PointCloud({Vec3::Zero()}, std::vector<Rgb>{}), std::invalid_argument);
  CHECK_THROWS_AS(PointCloud({Vec3(0, 0, std::numeric_limits<double>::infinity())}), ValidationError);
  CHECK_THROWS_AS(PointCloud({Vec3::Zero()}, std::nullopt, std::vector<Vec3>{Vec3(1, 1, 0)}), ValidationError);
  CHECK_THROWS_AS(bounding_box(PointCloud{}), DomainError);
  const PointCloud c({Vec3(0, 0, 0), Vec3(2, 1, 4)});
  CHECK(bounding_box(c).min_extent() == 1.0);
  CHECK(bounding_box(c).max_extent() == 4.0);
}
