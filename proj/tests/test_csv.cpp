#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "coadapt/csv.hpp"
#include "coadapt/error.hpp"

using namespace coadapt;
namespace fs = std::filesystem;

namespace {
fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("coadapt_csv_" + name);
}
}  // namespace

TEST_CASE("fmt_double round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 123456.789, 0.0, -7.25})
    CHECK(parse_double(fmt_double(v)) == v);
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(0.5) == "0.5");
}

TEST_CASE("parse_double rejects junk") {
  CHECK_THROWS_AS(parse_double("12x"), DataError);
  CHECK_THROWS_AS(parse_double(""), DataError);
  CHECK_THROWS_AS(parse_double("1 2"), DataError);
  CHECK(parse_double("  3.5") == 3.5);
}

TEST_CASE("csv reader keeps comments and checks shape") {
  const fs::path p = temp_file("read.csv");
  {
    std::ofstream out(p, std::ios::binary);
    out << "# produced by a test\n";
    out << "a,b,c\n";
    out << "1,2,3\n";
    out << "4,5,6\n";
  }
  const CsvTable t = read_csv(p);
  REQUIRE(t.comments.size() == 1);
  CHECK(t.comments[0] == "# produced by a test");
  REQUIRE(t.header.size() == 3);
  CHECK(t.require_column("b") == 1);
  CHECK(t.column("zzz") == -1);
  CHECK_THROWS_AS(t.require_column("zzz"), DataError);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][2] == "6");
  fs::remove(p);
}

TEST_CASE("ragged rows are rejected") {
  const fs::path p = temp_file("ragged.csv");
  {
    std::ofstream out(p, std::ios::binary);
    out << "a,b\n1,2\n3\n";
  }
  CHECK_THROWS_AS(read_csv(p), DataError);
  fs::remove(p);
}

TEST_CASE("missing file raises FileNotFound") {
  CHECK_THROWS_AS(read_csv("/nonexistent/nowhere.csv"), FileNotFound);
}

TEST_CASE("writer emits LF line endings and comment prefixes") {
  const fs::path p = temp_file("write.csv");
  {
    CsvWriter w(p);
    w.comment("hash=abc");
    w.row({"x", "y"});
    w.row({"1", "2"});
  }
  std::ifstream in(p, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "# hash=abc\nx,y\n1,2\n");
  CHECK(content.find('\r') == std::string::npos);

  const CsvTable t = read_csv(p);
  CHECK(t.comments[0] == "# hash=abc");
  CHECK(t.rows.size() == 1);
  fs::remove(p);
}

TEST_CASE("windows line endings are tolerated on read") {
  const fs::path p = temp_file("crlf.csv");
  {
    std::ofstream out(p, std::ios::binary);
    out << "a,b\r\n1,2\r\n";
  }
  const CsvTable t = read_csv(p);
  CHECK(t.header[1] == "b");
  CHECK(t.rows[0][1] == "2");
  fs::remove(p);
}
