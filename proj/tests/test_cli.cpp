#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adacp/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("adacp_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ADACP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("quantiles command writes a reusable cache") {
    TempDir tmp;
    const std::string out = tmp.file("q.json");
    CHECK(run_cli("quantiles --snr 5 --reps 30000 --seed 4 --zeta 0.01,0.5 --tau 0.05 --out " + out) == 0);
    const json q = read_json(out);
    CHECK(q.at("snr") == 5.0);
    CHECK(q.at("reps") == 30000);
    CHECK(q.at("q_dav").size() == q.at("prob_grid").size());
    // insufficient reps for an extreme tail is a validation failure
    CHECK(run_cli("quantiles --snr 5 --reps 10000 --zeta 0.0005") == 2);
}

TEST_CASE("plan command derives window constants") {
    TempDir tmp;
    write_file(tmp.file("plan_cfg.json"), R"({
      "schema_version": 1, "n": 200, "delta": 0.001,
      "plan": {"stages": 2, "snr": 5.0}
    })");
    const std::string out = tmp.file("plan_out.json");
    CHECK(run_cli("plan --config " + tmp.file("plan_cfg.json") + " --quantile-reps 100000 --cache-dir " +
                  tmp.file("cache") + " --out " + out) == 0);
    const json p = read_json(out);
    CHECK(p.at("plan").at("zeta")[0] == doctest::Approx(0.0005));
    CHECK(p.at("plan").at("K")[0].get<double>() > 0);
    CHECK(p.at("stage_counts")[0] == 100);
    CHECK(p.at("nominal_window_widths")[0].get<double>() > 0);
    // unknown fields are rejected before any compute
    write_file(tmp.file("bad.json"), R"({"schema_version":1, "n": 200, "plam": {}})");
    CHECK(run_cli("plan --config " + tmp.file("bad.json")) == 2);
}

TEST_CASE("run command with a noiseless model oracle covers the change point") {
    TempDir tmp;
    write_file(tmp.file("run_cfg.json"), R"({
      "schema_version": 1, "n": 40, "basis": "stump", "tau": 0.05,
      "quantile_reps": 100000,
      "plan": {"stages": 2, "zeta": [0.0005], "first_stage_design": "equispaced"},
      "model": {"d0": 0.5, "basis": "stump", "beta_l": [0.5], "beta_u": [1.5],
                "noise": {"sigma": 0.0}}
    })");
    const std::string out = tmp.file("report.json");
    CHECK(run_cli("run --config " + tmp.file("run_cfg.json") + " --oracle model --seed 5 --cache-dir " +
                  tmp.file("cache") + " --out " + out) == 0);
    const json r = read_json(out);
    CHECK(r.at("oracle").at("budget_used") == 40);
    const json est = r.at("run").at("estimate");
    CHECK(est.at("d_lo").get<double>() <= 0.5);
    CHECK(est.at("d_hi").get<double>() >= 0.5);
    const json ci = r.at("intervals").at("multistage");
    CHECK(ci.at("lo").get<double>() <= 0.5);
    CHECK(ci.at("hi").get<double>() >= 0.5);
    const json fs_ci = r.at("intervals").at("finite_sample");
    CHECK(fs_ci.at("lo").get<double>() <= 0.5);
    CHECK(fs_ci.at("hi").get<double>() >= 0.5);
}

TEST_CASE("run command against a synthetic covariate pool") {
    TempDir tmp;
    // 134-point pool shaped like two linear segments with a break at 0.8
    std::ostringstream pool;
    pool << "x,y\n";
    for (int i = 0; i < 134; ++i) {
        const double x = static_cast<double>(i) / 133.0;
        const double noise = 0.05 * std::sin(37.0 * x + 1.0);
        const double y = x <= 0.8 ? 0.3 + 0.5 * x + noise : 2.5 + 1.0 * (x - 0.8) + noise;
        pool << x << ',' << y << '\n';
    }
    write_file(tmp.file("pool.csv"), pool.str());
    write_file(tmp.file("run_cfg.json"), R"({
      "schema_version": 1, "n": 70, "basis": "affine", "tau": 0.05,
      "quantile_reps": 100000,
      "plan": {"stages": 2, "lambda": [0.5, 0.5], "zeta": [0.0005]}
    })");
    const std::string out = tmp.file("report.json");
    CHECK(run_cli("run --config " + tmp.file("run_cfg.json") + " --oracle pool:" + tmp.file("pool.csv") +
                  " --seed 6 --cache-dir " + tmp.file("cache") + " --out " + out) == 0);
    const json r = read_json(out);
    CHECK(r.at("run").at("budget_used") == 70);
    const json stages = r.at("run").at("stages");
    REQUIRE(stages.size() == 2);
    const double lo1 = stages[0].at("window").at("lo"), hi1 = stages[0].at("window").at("hi");
    const double lo2 = stages[1].at("window").at("lo"), hi2 = stages[1].at("window").at("hi");
    CHECK(lo2 > lo1);
    CHECK(hi2 < hi1);
    CHECK(stages[1].at("fit").at("d_av").get<double>() == doctest::Approx(0.8).epsilon(0.1));
}

TEST_CASE("run command drives an external oracle over the line protocol") {
    TempDir tmp;
    // a well-behaved oracle process: y = 2 for x <= 0.6, y = 5 beyond
    write_file(tmp.file("oracle.py"), R"(import sys
while True:
    line = sys.stdin.readline()
    if not line:
        break
    tag, k = line.split()
    for _ in range(int(k)):
        x = float(sys.stdin.readline())
        print(2.0 if x <= 0.6 else 5.0)
    sys.stdout.flush()
)");
    write_file(tmp.file("run_cfg.json"), R"({
      "schema_version": 1, "n": 30, "basis": "stump", "tau": 0.05,
      "quantile_reps": 100000,
      "plan": {"stages": 2, "zeta": [0.0005], "first_stage_design": "equispaced"}
    })");
    const std::string out = tmp.file("report.json");
    CHECK(run_cli("run --config " + tmp.file("run_cfg.json") + " --oracle \"exec:python3 " +
                  tmp.file("oracle.py") + "\" --seed 7 --cache-dir " + tmp.file("cache") + " --out " +
                  out) == 0);
    const json r = read_json(out);
    CHECK(r.at("run").at("estimate").at("d_av").get<double>() == doctest::Approx(0.6).epsilon(0.05));

    // a garbage oracle is reported as an oracle failure (exit 4)
    write_file(tmp.file("garbage.py"), R"(import sys
sys.stdin.readline()
print("banana")
sys.stdout.flush()
)");
    CHECK(run_cli("run --config " + tmp.file("run_cfg.json") + " --oracle \"exec:python3 " +
                  tmp.file("garbage.py") + "\" --seed 7 --cache-dir " + tmp.file("cache")) == 4);
}

TEST_CASE("stage underflow surfaces as a runtime failure") {
    TempDir tmp;
    write_file(tmp.file("run_cfg.json"), R"({
      "schema_version": 1, "n": 50, "basis": "stump",
      "plan": {"stages": 2, "lambda": [0.98, 0.02], "zeta": [0.0005], "K": [1.0]},
      "model": {"d0": 0.5, "basis": "stump", "beta_l": [0.5], "beta_u": [1.5],
                "noise": {"sigma": 0.1}}
    })");
    CHECK(run_cli("run --config " + tmp.file("run_cfg.json") + " --oracle model --cache-dir " +
                  tmp.file("cache")) == 3);
}

TEST_CASE("mc reruns are byte-identical") {
    TempDir tmp;
    write_file(tmp.file("mc.json"), R"({
      "schema_version": 1, "study": "rate", "budgets": [100, 200], "replicates": 120
    })");
    const std::string base = "mc --config " + tmp.file("mc.json") + " --seed 12 --threads 2 --cache-dir " +
                             tmp.file("cache") + " --out ";
    CHECK(run_cli(base + tmp.file("a")) == 0);
    CHECK(run_cli(base + tmp.file("b")) == 0);
    CHECK(read_text(tmp.file("a_rate.csv")) == read_text(tmp.file("b_rate.csv")));
    CHECK(read_text(tmp.file("a.json")) == read_text(tmp.file("b.json")));
    CHECK(run_cli("mc --config " + tmp.file("mc.json") + " --preset rate") == 2);  // both sources
    // an empty grid fails validation before any compute
    write_file(tmp.file("empty.json"), R"({
      "schema_version": 1, "study": "are", "budgets": [], "replicates": 200
    })");
    CHECK(run_cli("mc --config " + tmp.file("empty.json") + " --cache-dir " + tmp.file("cache")) == 2);
}
