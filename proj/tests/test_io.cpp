#include <descore/errors.hpp>
#include <descore/io.hpp>
#include <descore/simulation.hpp>
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

#include "helpers.hpp"

using namespace descore;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("descore_io_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string write(const std::string& name, const std::string& text) const {
        fs::path p = path / name;
        std::ofstream(p) << text;
        return p.string();
    }
};

std::string error_text(const std::function<void()>& f) {
    try {
        f();
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("well-formed file") {
    TempDir tmp;
    std::string p = tmp.write("ok.csv", "y,a,b,c\n1,2,3,4\n5,6,7,8\n-1.5,1e-3,0,2\n");
    CsvTable t = read_csv(p);
    CHECK(t.header == std::vector<std::string>{"y", "a", "b", "c"});
    CHECK(t.values.rows() == 3);
    CHECK(t.values(2, 1) == 1e-3);

    Dataset ds = read_dataset(p, "y", {"b"});
    CHECK(ds.n() == 3);
    CHECK(ds.d() == 3);
    CHECK(ds.interest() == IndexList{1});
    CHECK(ds.y()(2) == -1.5);
    CHECK(ds.Q()(1, 2) == 8.0);

    SUBCASE("response in the middle") {
        Dataset mid = read_dataset(p, "b", {"a", "c"});
        CHECK(mid.y()(0) == 3.0);
        CHECK(mid.interest() == IndexList{1, 2});
        CHECK(mid.Q()(0, 0) == 1.0);
        CHECK(mid.Q()(0, 1) == 2.0);
    }
    SUBCASE("numeric indices") {
        CHECK(read_dataset(p, "y", {"2"}).interest() == IndexList{2});
    }
    SUBCASE("CRLF line endings and a trailing newline-free last row") {
        std::string q = tmp.write("crlf.csv", "y,x\r\n1,2\r\n3,4");
        CHECK(read_dataset(q, "y", {"x"}).n() == 2);
    }
}

TEST_CASE("malformed input") {
    TempDir tmp;
    SUBCASE("missing value names row and column") {
        std::string p = tmp.write("na.csv", "y,a,b\n1,2,3\n4,NA,6\n");
        std::string msg = error_text([&] { read_csv(p); });
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("'a'") != std::string::npos);
    }
    SUBCASE("ragged row") {
        std::string p = tmp.write("ragged.csv", "y,a,b\n1,2,3\n4,5\n");
        CHECK_THROWS_AS(read_csv(p), DataError);
    }
    SUBCASE("empty cell") {
        std::string p = tmp.write("empty.csv", "y,a\n1,\n2,3\n");
        CHECK_THROWS_AS(read_csv(p), DataError);
    }
    SUBCASE("trailing garbage in a number") {
        std::string p = tmp.write("junk.csv", "y,a\n1,2x\n2,3\n");
        CHECK_THROWS_AS(read_csv(p), DataError);
    }
    SUBCASE("one data row") {
        std::string p = tmp.write("one.csv", "y,a\n1,2\n");
        CHECK_THROWS_AS(read_dataset(p, "y", {"a"}), DataError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(read_csv((tmp.path / "nope.csv").string()), DataError); }
    SUBCASE("column lookups") {
        std::string p = tmp.write("cols.csv", "y,a,b\n1,2,3\n4,5,6\n");
        CHECK_THROWS_AS(read_dataset(p, "z", {"a"}), InvalidArgument);
        CHECK_THROWS_AS(read_dataset(p, "y", {"q"}), InvalidArgument);
        CHECK_THROWS_AS(read_dataset(p, "y", {"y"}), InvalidArgument);
        CHECK_THROWS_AS(read_dataset(p, "y", {"7"}), InvalidArgument);
    }
}

TEST_CASE("round trip keeps 15 significant digits") {
    TempDir tmp;
    SimConfig c;
    c.n = 40;
    c.d = 12;
    SimDataset sim = generate_dataset(c, 77);
    std::string p = (tmp.path / "sim.csv").string();
    write_file_atomic(p, format_dataset_csv(sim.data));
    Dataset back = read_dataset(p, "y", {"x0"});
    CHECK(back.interest() == IndexList{0});
    auto close15 = [](double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(a)); };
    for (Index i = 0; i < 40; ++i) {
        CHECK(close15(back.y()(i), sim.data.y()(i)));
        for (Index j = 0; j < 12; ++j) CHECK(close15(back.Q()(i, j), sim.data.Q()(i, j)));
    }
    // 17 digits is enough to recover the doubles exactly.
    CHECK(back.Q() == sim.data.Q());
}

TEST_CASE("atomic writes leave no temporary file") {
    TempDir tmp;
    std::string p = (tmp.path / "out.txt").string();
    write_file_atomic(p, "first");
    write_file_atomic(p, "second");
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "second");
    int entries = 0;
    for (auto& e : fs::directory_iterator(tmp.path)) {
        (void)e;
        ++entries;
    }
    CHECK(entries == 1);
    CHECK_THROWS_AS(write_file_atomic((tmp.path / "missing" / "x.txt").string(), "x"), DataError);
}
