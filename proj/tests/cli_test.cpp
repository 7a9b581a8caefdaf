#include "sectorfhc/cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("sectorfhc-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& path, const std::string& text)
{
    std::ofstream(path) << text;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int tool(const std::string& args)
{
    const std::string cmd = std::string(SECTORFHC_TOOL) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kDesk = R"({"weight": "exp", "p": 1, "h": "1/8", "seed": 7,
  "targets": [{"radius": 1, "scale": 8}, {"radius": 1, "scale": 4}],
  "integer_horizon": 256, "horizon": 200, "vector": "out/vector.json"})";

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("check exit codes")
    {
        const auto dir = scratch("check");
        write(dir / "small.json", R"({"necessary": {"samples": 20000}, "admissibility_samples": 2000})");
        const std::string cfg = "--config " + (dir / "small.json").string();
        CHECK(tool("check " + cfg + " --seed 1 --out " + (dir / "exp").string()) == 0);
        CHECK(fs::exists(dir / "exp" / "check.json"));
        write(dir / "chaouchi.json", R"({"weight": "chaouchi", "necessary": {"samples": 20000}})");
        CHECK(tool("check --config " + (dir / "chaouchi.json").string() + " --seed 1 --out " + dir.string()) == 2);
        write(dir / "bad.json", R"({"weight": "unknown-weight"})");
        CHECK(tool("check --config " + (dir / "bad.json").string() + " --seed 1 --out " + dir.string()) == 1);
        CHECK(tool("check " + cfg + " --out " + dir.string()) == 1); // no seed
        CHECK(tool("frobnicate") == 1);
        CHECK(tool("check --config " + (dir / "missing.json").string()) == 1);
    }

    TEST_CASE("density columns")
    {
        const auto dir = scratch("density");
        write(dir / "full.json", R"({"set": {"primitives": [{"kind": "subsector", "theta_min": -9, "theta_max": 9}]},
                                     "horizons": [1, 10, 100]})");
        REQUIRE(tool("density --config " + (dir / "full.json").string() + " --out " + (dir / "full").string()) == 0);
        CHECK(slurp(dir / "full" / "density.csv") == "horizon,ratio,halfwidth\r\n1,1,0\r\n10,1,0\r\n100,1,0\r\n");

        write(dir / "ray.json", R"({"set": {"primitives": [{"kind": "subsector", "theta_min": 0.2, "theta_max": 0.2}]},
                                    "horizons": [1, 10, 100]})");
        REQUIRE(tool("density --config " + (dir / "ray.json").string() + " --out " + (dir / "ray").string()) == 0);
        CHECK(slurp(dir / "ray" / "density.csv") == "horizon,ratio,halfwidth\r\n1,0,0\r\n10,0,0\r\n100,0,0\r\n");

        write(dir / "broken.json", R"({"set": {"primitives": [{"kind": "nope"}]}, "horizons": [1]})");
        CHECK(tool("density --config " + (dir / "broken.json").string() + " --out " + dir.string()) == 1);
    }

    TEST_CASE("construct and orbit")
    {
        const auto dir = scratch("orbit");
        write(dir / "desk.json", kDesk);
        const std::string cfg = "--config " + (dir / "desk.json").string();
        REQUIRE(tool("construct " + cfg + " --out " + (dir / "out").string()) == 0);
        CHECK(fs::exists(dir / "out" / "vector.json"));
        CHECK(fs::exists(dir / "out" / "ledger.json"));

        auto with = [&](const std::string& name, const std::string& extra) {
            std::string doc = kDesk;
            doc.insert(doc.size() - 1, ", " + extra);
            write(dir / name, doc);
            return "orbit --config " + (dir / name).string() + " --out " + (dir / "report").string();
        };
        CHECK(tool(with("ret.json", R"("returns": {"levels": [1], "samples": 16})")) == 0);
        CHECK(tool(with("far.json", R"("orbit": {"target": {"radius": 1, "scale": 80}, "radius": 0.5,
                                                 "horizons": [50, 100], "samples": 2000})")) == 0);
        CHECK(tool(with("beyond.json", R"("orbit": {"target": {"level": 1}, "radius": 1.8,
                                                    "horizons": [500], "samples": 2000})")) == 1);

        write(dir / "empty.json", R"({"weight": "exp", "targets": [], "horizon": 50})");
        CHECK(tool("construct --config " + (dir / "empty.json").string() + " --out " + dir.string()) == 1);
        write(dir / "div.json", R"({"weight": "chaouchi", "targets": [{"radius": 1}], "horizon": 50})");
        CHECK(tool("construct --config " + (dir / "div.json").string() + " --out " + dir.string()) == 1);
    }

    TEST_CASE("overrides take precedence")
    {
        const auto dir = scratch("overrides");
        write(dir / "c.json", R"({"seed": 3, "alpha": 0.5, "h": "1/4", "workers": 2})");
        sectorfhc::cli::Overrides o;
        o.seed = 9;
        o.h = "1/16";
        o.horizon = 12.0;
        const auto config = sectorfhc::cli::RunConfig::load(dir / "c.json", o, dir);
        CHECK(config.doc["seed"] == 9);
        CHECK(config.doc["alpha"] == 0.5);
        CHECK(config.doc["h"] == "1/16");
        CHECK(config.workers == 2);
        CHECK(config.horizon == 12.0);
    }
}
