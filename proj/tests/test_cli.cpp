#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bounce/commands.hpp"
#include "bounce/error.hpp"
#include "bounce/scenario.hpp"

using namespace bounce;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name)
{
    const fs::path p = fs::temp_directory_path() / "bounce_lab_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path &dir, const std::string &text)
{
    const fs::path p = dir / "scenario.cfg";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const char *gamma2_text = "[scenario]\nid = gamma2\nmodel = one_ball\ng = 2\n[plate]\nkind = sinusoid\nperiod = 1\n"
                          "amplitude = 0.5\n[resonant]\nvariant = gamma2\nm2 = 3\n[stop]\nn_events = 100\n";

const char *singular_text = "[scenario]\nid = k1\nmodel = fermi_ulam_singular\ng = 0\n[lower]\nkind = constant\n"
                            "value = 0\n[upper]\nkind = polynomial\ncoefficients = 0, -1\nwindow = -10, 10\n"
                            "[tangency]\nt_star = 0\norder = 1\nepsilon = 2\n[initial]\nt = -1\nv = 10\n"
                            "[stop]\nv_threshold = 300\n";

} // namespace

TEST_CASE("config parsing")
{
    const ConfigText t = ConfigText::parse("# comment\n[scenario]\nid = x # trailing\ng = 2\n\n[plate]\nkind = constant\n");
    REQUIRE(t.find("scenario.id") != nullptr);
    CHECK(t.find("scenario.id")->value == "x");
    CHECK(t.find("plate.kind")->line == 7);
    CHECK_THROWS_AS((void)ConfigText::parse("[scenario\n"), Error);
    CHECK_THROWS_AS((void)ConfigText::parse("[scenario]\nnovalue\n"), Error);
}

TEST_CASE("config validation names the offending field")
{
    try {
        (void)build_config(ConfigText::parse("[scenario]\nmodel = one_ball\n[plate]\nkind = constant\n"));
        FAIL("expected ConfigInvalid");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::ConfigInvalid);
        CHECK(std::string(e.what()).find("scenario.g") != std::string::npos);
    }
    CHECK_THROWS_AS((void)build_config(ConfigText::parse(std::string(gamma2_text) + "bogus = 1\n")), Error);
    CHECK_THROWS_AS((void)build_config(ConfigText::parse(
                        "[scenario]\nmodel = one_ball\ng = 2\n[plate]\nkind = sinusoid\nperiod = 1\n"
                        "amplitude = x\n[initial]\nt = 0\nv = 1\n[stop]\nn_events = 3\n")),
                    Error);
}

TEST_CASE("number formatting round-trips")
{
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(203.0) == "203");
    CHECK(format_number(std::nan("")).empty());
    const double x = 0.19844237578638513;
    CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("grid specs")
{
    CHECK(parse_grid("").empty());
    const auto g = parse_grid("t0=-1:-0.5:3,v0=10:20:2");
    REQUIRE(g.size() == 2);
    CHECK(g[0].name == "t0");
    CHECK(g[0].value(1) == doctest::Approx(-0.75));
    CHECK(g[1].value(1) == 20.0);
    CHECK_THROWS_AS((void)parse_grid("t0=1:2"), Error);
    CHECK(parse_grid("t0=1:2:0").front().count == 0);
    CHECK_THROWS_AS((void)parse_grid("t0=1:2:1.5"), Error);
}

TEST_CASE("simulate writes the event log and a versioned summary")
{
    const fs::path dir = scratch("simulate");
    std::ostringstream log;
    REQUIRE(cmd_simulate(write_config(dir, gamma2_text), dir / "out", 1, log) == 0);
    std::ifstream csv(dir / "out" / "events.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "event_index,kind,time,body,v_pre,v_post,plate_velocity,z");
    const auto j = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
    CHECK(j["schema_version"] == summary_schema_version);
    CHECK(j["runs"][0]["final"]["v"].get<double>() == 3.0 + 2.0 * 100);
    CHECK(j["runs"][0]["envelope"]["verdict"] == "growth_evidence");
}

TEST_CASE("simulate output does not depend on the thread count")
{
    const fs::path dir = scratch("determinism");
    const fs::path cfg = write_config(dir, "[scenario]\nid = s\nmodel = fermi_ulam\ng = 2\n[lower]\nkind = sinusoid\n"
                                           "period = 1\namplitude = 0.1\n[upper]\nkind = sinusoid\nperiod = 1\n"
                                           "amplitude = 0.1\nphase = 1\noffset = 1\n[initial]\n"
                                           "points = 0.1:5, 0.4:7, 0.8:9, 0.2:11\n[stop]\nn_events = 2000\n");
    std::ostringstream log;
    REQUIRE(cmd_simulate(cfg, dir / "a", 1, log) == 0);
    REQUIRE(cmd_simulate(cfg, dir / "b", 4, log) == 0);
    for (const char *f : {"events.csv", "events_3.csv", "summary.json"}) {
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
}

TEST_CASE("simulate exit codes")
{
    std::ostringstream log;
    const fs::path dir = scratch("codes");
    CHECK(cmd_simulate(write_config(dir, "[scenario]\nmodel = one_ball\n"), dir / "o", 1, log) == 2);
    CHECK(cmd_simulate(dir / "does_not_exist.cfg", dir / "o", 1, log) == 2);
    CHECK(cmd_simulate(write_config(dir, singular_text), dir / "o", 1, log) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "o" / "summary.json"));
    CHECK(j["threshold_crossing_time"].get<double>() < 0.0);
    const char *triple = "[scenario]\nid = t\nmodel = two_ball\ng = 2\n[plate]\nkind = constant\nvalue = 0\n"
                         "[ball1]\nmass = 1\nz = 0.50000000000001\nv = 0\n[ball2]\nmass = 1\nz = 0.5\nv = 0\n"
                         "[initial]\nt = 0\n[stop]\nn_events = 10\n";
    CHECK(cmd_simulate(write_config(dir, triple), dir / "t", 1, log) == 3);
}

TEST_CASE("sweep over the singular regime")
{
    const fs::path dir = scratch("sweep");
    std::ostringstream log;
    const fs::path cfg = write_config(dir, singular_text);
    REQUIRE(cmd_sweep(cfg, "t0=-1.5:-0.5:3,v0=10:20:3", dir / "out", 2, log) == 0);
    std::ifstream in(dir / "out" / "sweep.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("cell_index,t0,v0,status,verdict", 0) == 0);
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(line.find("growth_evidence") != std::string::npos);
    }
    CHECK(rows == 9);
    REQUIRE(cmd_sweep(cfg, "", dir / "empty", 2, log) == 0);
    std::ifstream empty(dir / "empty" / "sweep.csv");
    std::getline(empty, line);
    CHECK_FALSE(std::getline(empty, line));
}

TEST_CASE("portraits")
{
    const fs::path dir = scratch("portrait");
    std::ostringstream log;
    const fs::path cfg = write_config(dir, gamma2_text);
    REQUIRE(cmd_portrait(cfg, PortraitCoords::tv, dir / "tv", log) == 0);
    std::ifstream in(dir / "tv" / "portrait.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "trajectory_id,event_index,phase,value");
    CHECK(cmd_portrait(cfg, PortraitCoords::ty, dir / "ty", log) == 2);
}
