#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "kerr/io.hpp"
#include "kerr/util.hpp"

using kerr::complex;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("kerr_io_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("complex literals round-trip through parse and format", "[io]") {
    for (const complex z : {complex{0.001, 0.1}, complex{-1.5, -2.25e-7}, complex{3.0, 0.0},
                            complex{0.0, -1.0}}) {
        REQUIRE(kerr::parse_complex(kerr::format_complex(z)) == z);
    }
    REQUIRE(kerr::parse_complex("1") == complex{1.0, 0.0});
    REQUIRE(kerr::parse_complex("-0.5i") == complex{0.0, -0.5});
    REQUIRE(kerr::parse_complex("i") == complex{0.0, 1.0});
    REQUIRE(kerr::parse_complex("1e-3+0.1i") == complex{1e-3, 0.1});
    REQUIRE(kerr::parse_complex("2-1i") == complex{2.0, -1.0});
    REQUIRE_THROWS_AS(kerr::parse_complex(""), std::invalid_argument);
    REQUIRE_THROWS_AS(kerr::parse_complex("1+2"), std::invalid_argument);
    REQUIRE_THROWS_AS(kerr::parse_complex("abc"), std::invalid_argument);
    REQUIRE_THROWS_AS(kerr::parse_complex("1+2j"), std::invalid_argument);
}

TEST_CASE("time grids include both endpoints within half a step", "[io]") {
    const auto g = kerr::parse_time_grid("0:0.25:1");
    REQUIRE(g.size() == 5);
    REQUIRE(g.front() == 0.0);
    REQUIRE(g.back() == Approx(1.0));
    const auto g2 = kerr::parse_time_grid("0:0.3:1");  // 0, 0.3, 0.6, 0.9 (+1.2 > 1.15)
    REQUIRE(g2.size() == 4);
    REQUIRE_THROWS_AS(kerr::parse_time_grid("0:0:1"), std::invalid_argument);
    REQUIRE_THROWS_AS(kerr::parse_time_grid("1:0.1"), std::invalid_argument);
    REQUIRE_THROWS_AS(kerr::parse_time_grid("0:-0.1:1"), std::invalid_argument);
}

TEST_CASE("tables write and read back as CSV with a schema line", "[io]") {
    TempDir tmp;
    kerr::io::Table t;
    t.schema = "kerr.test.v1";
    t.columns = {"a", "b", "name"};
    t.add_row({1.5, 7l, std::string("x")});
    t.add_row({-2.25e-9, -1l, std::string("y")});
    REQUIRE_THROWS_AS(t.add_row({1.0}), std::invalid_argument);

    const auto p = tmp.path / "t.csv";
    kerr::io::write_table(p, t, kerr::io::TableFormat::csv);
    const auto back = kerr::io::read_csv(p);
    REQUIRE(back.schema == "kerr.test.v1");
    REQUIRE(back.columns == std::vector<std::string>{"a", "b", "name"});
    REQUIRE(back.rows.size() == 2);
    REQUIRE(back.value(0, "a") == 1.5);
    REQUIRE(back.value(1, "a") == -2.25e-9);
    REQUIRE(back.rows[1][2] == "y");
}

TEST_CASE("json-lines output starts with the schema object", "[io]") {
    TempDir tmp;
    kerr::io::Table t;
    t.schema = "kerr.test.v1";
    t.columns = {"x"};
    t.add_row({2.0});
    const auto p = tmp.path / "t.jsonl";
    kerr::io::write_table(p, t, kerr::io::TableFormat::json_lines);
    std::ifstream in(p);
    std::string line1, line2;
    std::getline(in, line1);
    std::getline(in, line2);
    REQUIRE(line1 == R"({"schema":"kerr.test.v1"})");
    REQUIRE(line2 == R"({"x":2})");
}

TEST_CASE("qgrid binary round-trips bit-exactly", "[io]") {
    TempDir tmp;
    const kerr::QGrid grid =
        kerr::q_function(kerr::coherent_state(complex{1.0, -0.5}), kerr::GridSpec::centered(6.0, 33));
    const auto p = tmp.path / "g.bin";
    kerr::io::write_qgrid_binary(p, grid);
    const kerr::QGrid back = kerr::io::read_qgrid_binary(p);
    REQUIRE(back.spec.nx == grid.spec.nx);
    REQUIRE(back.spec.x_min == grid.spec.x_min);
    REQUIRE(back.values == grid.values);

    std::ofstream bad(tmp.path / "bad.bin", std::ios::binary);
    bad << "notaqgrid";
    bad.close();
    REQUIRE_THROWS_AS(kerr::io::read_qgrid_binary(tmp.path / "bad.bin"), std::runtime_error);
}

TEST_CASE("trajectory table marks the final row of a divergent path", "[io]") {
    kerr::Trajectory traj;
    traj.times = {0.0, 0.1};
    traj.points = {{complex{1, 0}, complex{1, 0}}, {complex{2, 0}, complex{2, 0}}};
    traj.divergence_flag = true;
    traj.divergence_time = 0.2;
    const auto t = kerr::io::trajectory_table(traj);
    REQUIRE(std::get<long>(t.rows[0][5]) == 0);
    REQUIRE(std::get<long>(t.rows[1][5]) == 1);
}
