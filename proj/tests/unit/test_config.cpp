#include <catch_amalgamated.hpp>

#include <random>

#include "qucl/config.hpp"
#include "qucl/experiments.hpp"
#include "qucl/plot.hpp"

using namespace qucl;

namespace {

// Random configurations over every section, with values that survive shortest round-trip printing.
RunConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<int> I(0, 1000);
    auto any = [&] { return std::ldexp(U(rng), I(rng) % 40 - 20); };
    RunConfig c;
    c.seed = static_cast<std::uint64_t>(I(rng));
    c.workers = I(rng) % 9;
    c.out = "dir" + std::to_string(I(rng));
    c.mode = I(rng) % 2 ? "fit" : "explicit";
    c.lengths = {0.5 + U(rng), 0.5 + U(rng), 0.5 + U(rng)};
    c.origin = {any(), -any(), 0.0};
    c.h = 1.0 / (8 + I(rng) % 60);
    const char* pots[] = {"constant", "two_level", "radial_power"};
    c.potential = pots[I(rng) % 3];
    c.value = any();
    c.high = any();
    c.power = U(rng);
    c.s = I(rng) % 3 == 0 ? kInf : 1.5 + 10 * U(rng);
    c.drift = I(rng) % 2 ? "none" : "constant";
    c.drift_value = {any(), any(), any()};
    c.m = I(rng) % 2 ? kInf : 3 + U(rng);
    c.tol = any() * 1e-8;
    c.max_iterations = I(rng);
    c.universal.k = any();
    c.universal.alpha = 0.01 + 0.98 * U(rng);
    c.universal.frak_t = U(rng);
    c.sigma = any();
    c.quadrature.radial = 1 + I(rng) % 40;
    const auto& kinds = experiment_kinds();
    const int ne = I(rng) % 4;
    for (int i = 0; i < ne; ++i) {
        ExperimentConfig e;
        e.name = "e" + std::to_string(i);
        e.kind = kinds[I(rng) % kinds.size()];
        const auto& keys = experiment_keys(e.kind);
        for (const auto& k : keys)
            if (I(rng) % 2) e.params[k] = std::to_string(I(rng));
        c.experiments.push_back(e);
    }
    return c;
}

}  // namespace

TEST_CASE("configs survive a serialize and parse round trip", "[config][property]") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = random_config(rng);
        const auto text = serialize_config(c);
        const auto back = parse_config(text);
        INFO(text);
        CHECK(back == c);
        CHECK(serialize_config(back) == text);
        CHECK(back.experiments == c.experiments);
    }
}

TEST_CASE("empty text gives the defaults", "[config]") {
    const auto c = parse_config("# nothing here\n\n");
    CHECK(c == RunConfig{});
    CHECK(c.experiments.empty());
}

TEST_CASE("malformed configs are rejected with a line number", "[config]") {
    const std::vector<std::string> bad{
        "[run]\nunknown = 1\n",
        "[nosuch]\n",
        "[run]\nseed = 1\nseed = 2\n",
        "[run]\n[run]\n",
        "seed = 1\n",
        "[domain]\nh = zero\n",
        "[domain]\nlengths = 1 2\n",
        "[domain]\nh = -1\n",
        "[run]\nmode = maybe\n",
        "[constants]\nalpha = 1.5\n",
        "[experiment.a]\nr = 1\n",
        "[experiment.a]\nkind = nope\n",
        "[experiment.a]\nkind = doubling\nregime = critical\n",
        "[run\n",
        "[run]\njust text\n",
    };
    for (const auto& text : bad) {
        INFO(text);
        CHECK_THROWS_AS(parse_config(text), ConfigError);
    }
    try {
        parse_config("[run]\nseed = 1\n\nbogus = 2\n");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("experiment parameters are typed on access", "[config]") {
    const auto c = parse_config("[experiment.x]\nkind = doubling\nr = 0.2\nrhos = 0.01, 0.005\ncenter = 1 2 3\n");
    const auto& e = c.experiments.front();
    CHECK(param_number(e, "r", 0.0) == 0.2);
    CHECK(param_list(e, "rhos", {}) == std::vector<double>{0.01, 0.005});
    CHECK(param_vec(e, "center", {}) == Vec{1, 2, 3});
    CHECK(param_number(e, "missing", 7.0) == 7.0);
    CHECK_THROWS_AS(param_vec(e, "rhos", {}), ConfigError);
}

TEST_CASE("an empty experiment list runs clean with a header-only report", "[config][run]") {
    const auto res = run(RunConfig{});
    CHECK(res.exit_code == 0);
    CHECK(res.report_csv.find('\n') == res.report_csv.size() - 1);
    CHECK(res.report_csv.rfind("experiment,kind,id,", 0) == 0);
}

TEST_CASE("exit codes follow the outcome", "[config][run]") {
    auto c = parse_config(
        "[domain]\nh = 0.0625\n"
        "[experiment.ok]\nkind = cover\n"
        "[experiment.refused]\nkind = doubling\nr = 0.1\nrhos = 0.0125\n");
    auto res = run(c);
    REQUIRE(res.experiments.size() == 2);
    CHECK(res.experiments[0].pass());
    CHECK(res.experiments[1].error_kind == "invalid-argument");
    CHECK(res.exit_code == 2);

    c = parse_config("[domain]\nh = 0.0625\n[experiment.tight]\nkind = carleman\nnorm = square\nweight = exponential\n"
                     "points = 200\ntolerance = 0.01\n");
    res = run(c);
    CHECK(res.exit_code == 1);
    CHECK_FALSE(res.experiments[0].pass());
}

TEST_CASE("report bodies do not depend on the worker count", "[config][run]") {
    const std::string base =
        "[domain]\nh = 0.0625\n[potential]\nvalue = 1\n"
        "[experiment.f]\nkind = frequency\nfield = harmonic\ndegree = 2\n"
        "[experiment.c]\nkind = cover\n"
        "[experiment.t]\nkind = three-ball\nmembers = 6\n";
    std::string first_csv, first_json;
    for (int w : {1, 2, 5}) {
        auto c = parse_config(base);
        c.workers = w;
        c.out = "elsewhere" + std::to_string(w);
        const auto res = run(c);
        if (first_csv.empty()) {
            first_csv = res.report_csv;
            first_json = res.report_json;
        }
        CHECK(res.report_csv == first_csv);
        CHECK(res.report_json == first_json);
    }
}

TEST_CASE("plots", "[plot]") {
    Table t;
    t.name = "profile";
    t.columns = {"r", "N", "label"};
    for (int i = 1; i <= 10; ++i) t.add({0.01 * i, 1.0, std::string("x")});
    const auto svg = svg_plot(t, {"r", {"N"}, PlotScale::SemilogX, ""});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK_THROWS_AS(svg_plot(t, {"r", {"missing"}, PlotScale::Linear, ""}), InvalidArgument);
    CHECK_THROWS_AS(svg_plot(t, {"r", {"label"}, PlotScale::Linear, ""}), EmptyRegion);
    Table empty;
    empty.name = "empty";
    empty.columns = {"a", "b"};
    CHECK_THROWS_AS(svg_plot(empty, {"a", {"b"}, PlotScale::Linear, ""}), EmptyRegion);
    CHECK_THROWS_AS(parse_plot_scale("cubic"), InvalidArgument);
}
