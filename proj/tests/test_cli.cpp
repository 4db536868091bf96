#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "rcbound/errors.hpp"
#include "rcbound/run_config.hpp"
#include "rcbound/runner.hpp"

using namespace rcbound;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / ("rcbound_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

RunConfig config_from(const std::string& text, const std::string& prefix) {
    RunConfig c = parse_run_config(text);
    c.output = (scratch() / prefix).string();
    return c;
}

int cli(const std::string& args, const std::string& env = {}) {
    const std::string cmd = env + " " + RCBOUND_CLI + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string error_of(const std::string& text) {
    try {
        (void)parse_run_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("SHA-256 test vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config validation names the offending location") {
    CHECK(error_of(R"({"task": "map", "spectral": {"kind": "rubin", "gama": 1}})").find("/spectral/gama") == 0);
    CHECK(error_of(R"({"task": "sweep", "sweep": {"gammas": [0.5, 1.0, 0.8]}})").find("/sweep/gammas/2") == 0);
    CHECK(error_of(R"({"task": "map", "system": {"omega": -1}})").find("/system/omega") == 0);
    CHECK(error_of(R"({"spectral": {}})").find("/task") == 0);
    CHECK(error_of(R"({"task": "fly"})").find("/task") == 0);
    CHECK(error_of(R"({"task": "sweep"})").find("/sweep") == 0);
    CHECK(error_of(R"({"task": "map", "rc_count": [2, 0]})").find("/rc_count/1") == 0);
    CHECK(error_of(R"({"task": "lifetime", "lifetime": {"generator": "magic"}})").find("/lifetime/generator") == 0);
    CHECK(error_of(R"({"task": "map", "spectral": {"kind": "shifted_sum", "offsets": [0, 0.5]}})").find("/spectral") ==
          0);
    CHECK(error_of("{\"task\": \"map\",\n").find("line 2") != std::string::npos);
}

TEST_CASE("grid shorthand expands to an inclusive linear grid") {
    const auto c = parse_run_config(R"({"task": "sweep", "sweep": {"start": 1, "stop": 2, "points": 5}})");
    REQUIRE(c.sweep_gammas.size() == 5);
    CHECK(c.sweep_gammas.front() == 1.0);
    CHECK(c.sweep_gammas[2] == 1.5);
    CHECK(c.sweep_gammas.back() == 2.0);
}

TEST_CASE("map of a single RC reproduces the closed-form row") {
    const std::string text = R"({"task": "map", "spectral": {"kind": "rubin", "gamma": 1.0}, "rc_count": 1})";
    const auto out = run(config_from(text, "single"), Exec::serial);
    const std::string csv = slurp(scratch() / "single_map.csv");
    CHECK(csv.rfind("# config_sha256=" + sha256_hex(text) + " task=map\n", 0) == 0);
    const auto rows = csv_rows(csv);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"index", "lo", "hi", "omega", "lambda"});
    const std::vector<double> want{1.0, 0.0, 1.0, 0.5, 0.25};
    REQUIRE(rows[1].size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::stod(rows[1][i]) == doctest::Approx(want[i]).epsilon(1e-15));
    CHECK(rows[1][0] == "1");
    CHECK(rows[1][1] == "0");
    CHECK(rows[1][2] == "1");
    CHECK(out.files.size() == 2);
}

TEST_CASE("sweep output is byte-identical across runs and execution policies") {
    const std::string text = R"({"task": "sweep", "spectral": {"kind": "rubin"}, "rc_count": 60,
        "sweep": {"start": 0.1, "stop": 4.0, "points": 40}})";
    run(config_from(text, "sw_a"), Exec::serial);
    run(config_from(text, "sw_b"), Exec::parallel);
    const std::string a = slurp(scratch() / "sw_a_sweep.csv");
    CHECK(a == slurp(scratch() / "sw_b_sweep.csv"));
    CHECK(slurp(scratch() / "sw_a_sweep_gaps.csv") == slurp(scratch() / "sw_b_sweep_gaps.csv"));

    const auto rows = csv_rows(a);
    REQUIRE(rows.size() == 41);
    CHECK(rows[0][1] == "bs_exists");
    const double step = 3.9 / 39.0;
    double onset = -1.0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r][1] == "1") {
            onset = std::stod(rows[r][0]);
            break;
        }
        CHECK(rows[r][2] == "nan");
    }
    CHECK(std::abs(onset - 1.5) <= step);
}

TEST_CASE("exact task reports the weak-coupling thermal occupation") {
    const std::string text = R"({"task": "exact", "spectral": {"kind": "rubin", "gamma": 0.001},
        "system": {"omega": 0.5, "temperature": 1.0}})";
    run(config_from(text, "weak"), Exec::serial);
    const std::string json = slurp(scratch() / "weak_exact.json");
    const auto pos = json.find("\"occupation\": ");
    REQUIRE(pos != std::string::npos);
    const double occ = std::stod(json.substr(pos + 14));
    const double bose = 1.0 / std::expm1(0.5);
    CHECK(bose == doctest::Approx(1.5414941).epsilon(1e-7));
    CHECK(occ == doctest::Approx(bose).epsilon(0.02));
    CHECK(json.find(sha256_hex(text)) != std::string::npos);
}

TEST_CASE("lifetime task writes per-point series and a summary") {
    const std::string text = R"({"task": "lifetime", "spectral": {"kind": "rubin", "gamma": 4.0},
        "lifetime": {"gammas": [4.0], "anharmonicities": [0.0, 0.002], "t_final": 20, "n_max": 2, "records": 20}})";
    run(config_from(text, "life_a"), Exec::serial);
    run(config_from(text, "life_b"), Exec::parallel);
    for (const char* f : {"_lifetime_0.csv", "_lifetime_1.csv"})
        CHECK(slurp(scratch() / (std::string("life_a") + f)) == slurp(scratch() / (std::string("life_b") + f)));
    std::string summary_b = slurp(scratch() / "life_b_lifetime.json");
    for (auto p = summary_b.find("life_b"); p != std::string::npos; p = summary_b.find("life_b"))
        summary_b.replace(p, 6, "life_a");
    CHECK(slurp(scratch() / "life_a_lifetime.json") == summary_b);
    const auto rows = csv_rows(slurp(scratch() / "life_a_lifetime_0.csv"));
    REQUIRE(rows.size() > 2);
    CHECK(rows[0] == std::vector<std::string>{"t", "bs_population", "band_population", "trace_defect"});
    for (std::size_t r = 1; r < rows.size(); ++r) CHECK(std::stod(rows[r][1]) == doctest::Approx(1.0).epsilon(1e-9));
    const std::string json = slurp(scratch() / "life_a_lifetime.json");
    for (const char* key : {"\"gamma\"", "\"U\"", "\"T\"", "\"tau_b\"", "\"fit_residual\""})
        CHECK(json.find(key) != std::string::npos);
}

TEST_CASE("error classification") {
    CHECK(classify_error(ConfigError("x")).code == 2);
    CHECK(classify_error(StateError("x")).code == 2);
    CHECK(classify_error(AccuracyError("integrate: tolerance not met", 1.0, 0.1)).code == 3);
    CHECK(classify_error(StepSizeError("drift")).code == 3);
    CHECK(classify_error(DivergenceError("edge")).code == 3);
    CHECK(classify_error(std::runtime_error("x")).code == 1);
    CHECK(classify_error(AccuracyError("integrate: tolerance not met", 1.0, 0.1)).message.find("integrate") !=
          std::string::npos);
}

TEST_CASE("driver exit codes and overrides") {
    const fs::path good = write_config("good.json", R"({"task": "map", "spectral": {"kind": "rubin"}, "rc_count": 4})");
    const std::string out = (scratch() / "drv").string();
    CHECK(cli("--config " + good.string() + " --out " + out + " --quiet") == 0);
    CHECK(fs::exists(out + "_map.csv"));
    CHECK(cli("--config " + good.string() + " --out " + out + " --task critical --quiet") == 0);
    CHECK(fs::exists(out + "_critical.json"));
    CHECK(cli("--config " + good.string() + " --out " + out + " --task nonsense") == 2);
    const fs::path bad = write_config("bad.json", R"({"task": "map", "spectral": {"kind": "rubin", "gama": 1}})");
    CHECK(cli("--config " + bad.string()) == 2);
    CHECK(cli("--config " + (scratch() / "missing.json").string()) == 2);
    CHECK(cli("") == 2);
    CHECK(cli("--config " + good.string() + " --out " + out, "RC_THREADS=zero") == 2);
    CHECK(cli("--config " + good.string() + " --out " + out + " --quiet", "RC_THREADS=1") == 0);
    const fs::path step = write_config("step.json", R"({"task": "lifetime", "spectral": {"kind": "rubin", "gamma": 4},
        "lifetime": {"t_final": 1, "dt": 0.5, "n_max": 2}})");
    CHECK(cli("--config " + step.string() + " --out " + out) == 2);
}
