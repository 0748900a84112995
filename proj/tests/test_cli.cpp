#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    return STRIPS_CLI_PATH;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("strips_cli_test_" + std::to_string(std::rand()) + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = cli_path() + " " + args + " > " + log.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    REQUIRE(raw != -1);
    return WEXITSTATUS(raw);
}

} // namespace

TEST_CASE("validate reports an infinite validity radius for the flat strip") {
    TempDir dir;
    write_file(dir.path / "cfg.json", R"({
        "geometry": {"preset": "flat-line", "L": 3.141592653589793},
        "epsilon": 0.1, "N": 3
    })");
    const int code = run("validate --config " + (dir.path / "cfg.json").string() +
                             " --out " + dir.path.string(),
                         dir.path / "log.txt");
    CHECK(code == 0);
    const std::string body = read_file(dir.path / "validity.json");
    CHECK(body.find("\"eps_tilde\": \"inf\"") != std::string::npos);
    CHECK(body.find("\"valid\": true") != std::string::npos);
    CHECK(body.find("\"c_eps\": 0") != std::string::npos);
}

TEST_CASE("spectrum of the flat strip matches the closed form") {
    TempDir dir;
    write_file(dir.path / "cfg.json", R"({
        "geometry": {"preset": "flat-line", "L": 3.141592653589793},
        "epsilon": 0.1, "N": 3,
        "grid": {"n_s": 192, "n_t": 5}
    })");
    const int code = run("spectrum --config " + (dir.path / "cfg.json").string() +
                             " --out " + dir.path.string(),
                         dir.path / "log.txt");
    CHECK(code == 0);

    std::ifstream csv(dir.path / "spectrum.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "run_id,geometry,epsilon,n,lambda,residual,degenerate_flag");
    const std::vector<double> expected = {0.0, 1.0, 4.0};
    for (int n = 0; n < 3; ++n) {
        REQUIRE(std::getline(csv, line));
        std::stringstream row(line);
        std::string field;
        for (int k = 0; k < 5; ++k)
            std::getline(row, field, ',');
        CHECK(std::abs(std::stod(field) - expected[n]) < 5e-3);
    }
    CHECK(fs::exists(dir.path / "metric.txt"));
}

TEST_CASE("reruns with the same config and seed are byte-identical") {
    TempDir a, b;
    const std::string cfg = R"({
        "geometry": {"preset": "flat-arc", "L": 3.141592653589793, "curvature": 0.5},
        "epsilon": 0.05, "N": 3,
        "grid": {"n_s": 96, "n_t": 5},
        "seed": 42
    })";
    write_file(a.path / "cfg.json", cfg);
    write_file(b.path / "cfg.json", cfg);
    CHECK(run("spectrum --config " + (a.path / "cfg.json").string() + " --out " + a.path.string(),
              a.path / "log.txt") == 0);
    CHECK(run("spectrum --config " + (b.path / "cfg.json").string() + " --out " + b.path.string(),
              b.path / "log.txt") == 0);
    CHECK(read_file(a.path / "spectrum.csv") == read_file(b.path / "spectrum.csv"));
    CHECK(read_file(a.path / "metric.txt") == read_file(b.path / "metric.txt"));
}

TEST_CASE("hotspots verdicts hold on a gently curved strip") {
    TempDir dir;
    write_file(dir.path / "cfg.json", R"({
        "geometry": {"preset": "flat-arc", "L": 3.141592653589793, "curvature": 0.5},
        "epsilon": 0.05, "N": 2,
        "grid": {"n_s": 121, "n_t": 5}
    })");
    const int code = run("hotspots --config " + (dir.path / "cfg.json").string() +
                             " --out " + dir.path.string(),
                         dir.path / "log.txt");
    CHECK(code == 0);
    const std::string body = read_file(dir.path / "hotspots_n2.json");
    CHECK(body.find("\"verdict_max\": true") != std::string::npos);
    CHECK(body.find("\"verdict_min\": true") != std::string::npos);
    CHECK(body.find("\"boundary_verdict\": true") != std::string::npos);
}

TEST_CASE("sweep rejects a non-geometric eps_list with exit code 2") {
    TempDir dir;
    write_file(dir.path / "cfg.json", R"({
        "geometry": {"preset": "flat-arc", "L": 3.141592653589793, "curvature": 0.5},
        "eps_list": [0.2, 0.1, 0.06, 0.025], "N": 2
    })");
    const int code = run("sweep --config " + (dir.path / "cfg.json").string() +
                             " --out " + dir.path.string(),
                         dir.path / "log.txt");
    CHECK(code == 2);
    CHECK(read_file(dir.path / "log.txt").find("geometric") != std::string::npos);
}

TEST_CASE("epsilon outside the mode-ordering window is a config error") {
    TempDir dir;
    write_file(dir.path / "cfg.json", R"({
        "geometry": {"preset": "flat-line", "L": 3.141592653589793},
        "epsilon": 0.9, "N": 3
    })");
    const int code = run("spectrum --config " + (dir.path / "cfg.json").string() +
                             " --out " + dir.path.string(),
                         dir.path / "log.txt");
    CHECK(code == 2);
    CHECK(read_file(dir.path / "log.txt").find("eps < L/(2(N-1))") != std::string::npos);
}

TEST_CASE("missing geometry is a config error") {
    TempDir dir;
    write_file(dir.path / "cfg.json", R"({"epsilon": 0.1})");
    const int code = run("validate --config " + (dir.path / "cfg.json").string() +
                             " --out " + dir.path.string(),
                         dir.path / "log.txt");
    CHECK(code == 2);
}

TEST_CASE("flat sweep reports exact agreement") {
    TempDir dir;
    write_file(dir.path / "cfg.json", R"({
        "geometry": {"preset": "flat-line", "L": 3.141592653589793},
        "eps_list": [0.2, 0.1, 0.05, 0.025], "N": 2,
        "grid": {"n_s": 48, "n_t": 5},
        "observables": ["eigenvalue_error"]
    })");
    const int code = run("sweep --config " + (dir.path / "cfg.json").string() +
                             " --out " + dir.path.string(),
                         dir.path / "log.txt");
    CHECK(code == 0);
    const std::string body = read_file(dir.path / "sweep_eigenvalue_error.json");
    CHECK(body.find("exact, fit skipped") != std::string::npos);
}
