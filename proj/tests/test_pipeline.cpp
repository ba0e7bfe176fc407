#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "batchps/pipeline.hpp"

using namespace batchps;
namespace fs = std::filesystem;

namespace {
std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}
}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("scenario file round-trip and stable hashing") {
    auto dir = fs::temp_directory_path() / "batchps_test_scenario";
    fs::create_directories(dir);
    auto p = dir / "scenario.json";
    {
        std::ofstream f(p);
        f << R"({"rho": 0.4, "q": 0.1, "n_max": 150, "b_max": 10, "tol": 1e-7, "seed": 9})";
    }
    auto sc = Scenario::from_file(p.string());
    CHECK(sc.params.rho == 0.4);
    CHECK(sc.params.q == 0.1);
    CHECK(sc.params.n_max == 150);
    CHECK(sc.seed == 9);
    CHECK(sc.hash() == sc.hash());
    auto sc2 = sc;
    sc2.seed = 10;
    CHECK(sc.hash() != sc2.hash());
    CHECK_THROWS_AS(Scenario::from_file((dir / "missing.json").string()),
                    InvalidInput);
}

TEST_CASE("x-grid parsing") {
    auto g = XGrid::parse("0.5:2:0.5");
    auto pts = g.points();
    REQUIRE(pts.size() == 4);
    CHECK(pts.front() == 0.5);
    CHECK(pts.back() == 2.0);
    CHECK_THROWS_AS(XGrid::parse("nonsense"), InvalidInput);
    CHECK_THROWS_AS(XGrid::parse("0:1:0.1"), InvalidInput);
}

TEST_CASE("pipeline artifacts are deterministic for a fixed scenario+seed") {
    Scenario sc;
    sc.params.rho = 0.5;
    sc.params.q = 0.2;
    sc.seed = 3;
    XGrid grid{0.5, 1.5, 0.5};
    auto base = fs::temp_directory_path() / "batchps_test_pipeline";
    fs::remove_all(base);
    auto o1 = run_pipeline(sc, (base / "a").string(), grid, 1, 1, 2);
    auto o2 = run_pipeline(sc, (base / "b").string(), grid, 1, 1, 2);
    REQUIRE(o1.files.size() == o2.files.size());
    REQUIRE(o1.files.size() >= 5);
    for (std::size_t i = 0; i < o1.files.size(); ++i) {
        CHECK(fs::exists(o1.files[i]));
        CHECK(slurp(o1.files[i]) == slurp(o2.files[i]));
        // content-addressed names carry the scenario hash
        CHECK(o1.files[i].find(sc.hash()) != std::string::npos);
    }
}

TEST_CASE("unstable scenarios are rejected before any work") {
    Scenario sc;
    sc.params.rho = 0.8;
    sc.params.q = 0.2;
    XGrid grid{0.5, 1.0, 0.5};
    CHECK_THROWS_AS(
        run_pipeline(sc, (fs::temp_directory_path() / "x").string(), grid, 1, 1),
        InvalidInput);
}

}  // TEST_SUITE
