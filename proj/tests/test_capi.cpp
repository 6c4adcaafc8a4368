#include "qftion/qftion.h"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const char* emission_text = R"(
[couplings]
g1 = 0.1
g2 = 0
[initial]
state = f
[integration]
t_end = 6.2831853071795862
n_max = 8
)";

fs::path scratch_dir(const std::string& name) {
    std::random_device rd;
    const fs::path p = fs::temp_directory_path() / ("qftion_capi_" + name + "_" + std::to_string(rd()));
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("version and errors") {
    CHECK(std::strlen(qft_version()) > 0);
    qft_scenario* s = nullptr;
    CHECK(qft_scenario_parse("[couplings]\ng1 = x\n", &s) == QFT_ERR_PARSE);
    CHECK(s == nullptr);
    CHECK(std::string(qft_last_error()).find("line 2") != std::string::npos);
    CHECK(qft_scenario_parse("[couplings]\ng1 = -1\n", &s) == QFT_ERR_VALIDATION);
    CHECK(qft_scenario_load("/nonexistent.ini", &s) == QFT_ERR_PARSE);
    CHECK(qft_scenario_parse(nullptr, &s) == QFT_ERR_INTERNAL);
    CHECK(qft_scenario_parse("", nullptr) == QFT_ERR_INTERNAL);
    qft_scenario_free(nullptr);
    qft_series_free(nullptr);
    qft_report_free(nullptr);
}

TEST_CASE("simulate through handles") {
    qft_scenario* s = nullptr;
    REQUIRE(qft_scenario_parse(emission_text, &s) == QFT_OK);
    CHECK(std::string(qft_scenario_warnings(s)).empty());
    qft_series* ts = nullptr;
    REQUIRE(qft_scenario_simulate(s, &ts) == QFT_OK);
    const std::size_t n = qft_series_length(ts);
    CHECK(n == 1001);
    CHECK(qft_series_n_max(ts) == 8);
    std::vector<double> t(n), mean(n), surv(n);
    REQUIRE(qft_series_column(ts, QFT_COL_TIME, t.data(), n) == QFT_OK);
    REQUIRE(qft_series_column(ts, QFT_COL_MEAN_N, mean.data(), n) == QFT_OK);
    REQUIRE(qft_series_column(ts, QFT_COL_SURVIVAL, surv.data(), n) == QFT_OK);
    CHECK(qft_series_column(ts, QFT_COL_TIME, t.data(), n - 1) == QFT_ERR_VALIDATION);
    CHECK(qft_series_column(ts, static_cast<qft_column>(42), t.data(), n) == QFT_ERR_VALIDATION);
    for (std::size_t k = 0; k < n; k += 50) {
        double m = 0.0, p = 0.0;
        REQUIRE(qft_driven_oscillator_oracle(0.1, 1.0, t[k], &m, &p) == QFT_OK);
        CHECK(std::abs(mean[k] - m) < 1e-6);
        CHECK(std::abs(surv[k] - p) < 1e-6);
    }
    const std::string csv = qft_series_csv(ts);
    CHECK(csv.rfind("t,survival,mean_n,", 0) == 0);
    qft_series_free(ts);

    CHECK(qft_scenario_set(s, "g1", 0.05) == QFT_OK);
    CHECK(qft_scenario_set(s, "n_max", 3) == QFT_ERR_VALIDATION);
    REQUIRE(qft_scenario_simulate(s, &ts) == QFT_OK);
    double last = 0.0;
    std::vector<double> col(qft_series_length(ts));
    qft_series_column(ts, QFT_COL_MEAN_N, col.data(), col.size());
    for (double v : col) last = std::max(last, v);
    CHECK(std::abs(last - 0.04) < 1e-4);
    qft_series_free(ts);
    qft_scenario_free(s);
}

TEST_CASE("run, sweep and verify through handles") {
    const fs::path dir = scratch_dir("run");
    qft_scenario* s = nullptr;
    REQUIRE(qft_scenario_parse(emission_text, &s) == QFT_OK);
    char path[1024];
    REQUIRE(qft_scenario_run(s, dir.c_str(), path, sizeof path) == QFT_OK);
    CHECK(fs::exists(path));
    const std::string first = slurp(path);
    REQUIRE(qft_scenario_run(s, dir.c_str(), path, sizeof path) == QFT_OK);
    CHECK(slurp(path) == first);

    qft_report* r = nullptr;
    REQUIRE(qft_scenario_sweep(s, "g1", "0.01,0.1", dir.c_str(), 2, &r) == QFT_OK);
    CHECK(std::string(qft_report_text(r)).find("0.1") != std::string::npos);
    qft_report_free(r);
    CHECK(qft_scenario_sweep(s, "g1", "0.01,bad", dir.c_str(), 2, &r) == QFT_ERR_VALIDATION);
    qft_report_free(r);

    REQUIRE(qft_scenario_verify(s, &r) == QFT_OK);
    CHECK(std::string(qft_report_text(r)).find("all checks passed") != std::string::npos);
    qft_report_free(r);
    qft_scenario_free(s);
    fs::remove_all(dir);
}

TEST_CASE("building blocks") {
    double re = 0.0, im = 0.0;
    REQUIRE(qft_gaussian_overlap(0, 1, 0, 1, 1, &re, &im) == QFT_OK);
    CHECK(re == doctest::Approx(std::exp(-0.25)).epsilon(1e-14));
    CHECK(std::abs(im) < 1e-15);
    CHECK(qft_gaussian_overlap(0, 0, 0, 1, 1, &re, &im) == QFT_ERR_VALIDATION);
    std::uint64_t dim = 0;
    REQUIRE(qft_manymode_dimension(10, 5, &dim) == QFT_OK);
    CHECK(dim == 10000000000ULL);
    CHECK(qft_manymode_dimension(0, 5, &dim) == QFT_ERR_VALIDATION);
    double m = 0.0, p = 0.0;
    REQUIRE(qft_driven_oscillator_oracle(0.15, 1.0, std::numbers::pi, &m, &p) == QFT_OK);
    CHECK(m == doctest::Approx(0.36).epsilon(1e-14));
    CHECK(p == doctest::Approx(std::exp(-0.36)).epsilon(1e-14));
}
