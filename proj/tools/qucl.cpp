#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qucl/config.hpp"
#include "qucl/experiments.hpp"
#include "qucl/parallel.hpp"
#include "qucl/plot.hpp"
#include "qucl/report.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int grid = 0;
    std::string mode;
    int workers = -1;
    std::vector<std::string> params;
};

void add_run_flags(CLI::App* app, Overrides& o) {
    app->add_option("--config", o.config, "configuration file");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--seed", o.seed, "random seed");
    app->add_option("--grid", o.grid, "grid resolution: spacing h = 1/N")->check(CLI::PositiveNumber);
    app->add_option("--mode", o.mode, "explicit or fit")->check(CLI::IsMember({"explicit", "fit"}));
    app->add_option("--workers", o.workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

qucl::RunConfig resolve(const Overrides& o, CLI::App* app) {
    qucl::RunConfig c = o.config.empty() ? qucl::RunConfig{} : qucl::load_config(o.config);
    if (!o.out.empty()) c.out = o.out;
    if (app->count("--seed")) c.seed = o.seed;
    if (o.grid > 0) c.h = 1.0 / o.grid;
    if (!o.mode.empty()) c.mode = o.mode;
    if (o.workers >= 0) c.workers = o.workers;
    return c;
}

// Keeps the experiments of one kind; with none configured, adds a default one. --param applies to each.
void select_kind(qucl::RunConfig& c, const std::string& kind, const std::vector<std::string>& params) {
    std::vector<qucl::ExperimentConfig> kept;
    for (const auto& e : c.experiments)
        if (e.kind == kind) kept.push_back(e);
    if (kept.empty()) kept.push_back({kind, kind, {}});
    const auto& keys = qucl::experiment_keys(kind);
    for (const auto& p : params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw qucl::ConfigError("--param expects key=value, got '" + p + "'");
        const std::string key = p.substr(0, eq);
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw qucl::ConfigError("unknown key '" + key + "' for " + kind);
        for (auto& e : kept) e.params[key] = p.substr(eq + 1);
    }
    c.experiments = kept;
}

int execute(const qucl::RunConfig& c) {
    qucl::set_default_workers(c.workers);
    const auto result = qucl::run(c);
    qucl::write_run(result, c.out);
    for (const auto& x : result.experiments) {
        std::size_t passed = 0;
        for (const auto& r : x.reports) passed += r.pass ? 1 : 0;
        std::cout << x.name << ' ' << x.kind << ' ';
        if (!x.error_kind.empty()) std::cout << "error " << x.error_kind << ": " << x.error << '\n';
        else std::cout << (x.pass() ? "pass " : "fail ") << passed << '/' << x.reports.size() << '\n';
    }
    std::cout << "wrote " << c.out << "/report.csv and report.json; exit " << result.exit_code << '\n';
    return result.exit_code;
}

int plot_command(const std::string& input, const std::string& x, const std::vector<std::string>& y,
                 const std::string& scale, const std::string& out) {
    std::ifstream in(input);
    if (!in) throw qucl::ConfigError("cannot read '" + input + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto table = qucl::parse_table_csv(ss.str(), input);
    qucl::PlotSpec spec;
    spec.x = x;
    spec.y = y;
    spec.scale = qucl::parse_plot_scale(scale);
    const std::string svg = qucl::svg_plot(table, spec);
    if (out.empty()) {
        std::cout << svg;
    } else {
        std::ofstream f(out);
        f << svg;
        if (!f) throw qucl::ConfigError("cannot write '" + out + "'");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks of quantitative unique continuation estimates"};
    app.require_subcommand(1);

    Overrides run_o;
    auto* run = app.add_subcommand("run", "run every experiment in the configuration");
    add_run_flags(run, run_o);
    run->get_option("--config")->required();

    Overrides show_o;
    auto* show = app.add_subcommand("config", "print the resolved configuration");
    add_run_flags(show, show_o);

    std::map<std::string, Overrides> kind_o;
    std::map<std::string, CLI::App*> kind_cmd;
    for (const auto& kind : qucl::experiment_kinds()) {
        auto& o = kind_o[kind];
        auto* cmd = app.add_subcommand(kind, "run the " + kind + " experiments (or one with defaults)");
        add_run_flags(cmd, o);
        cmd->add_option("--param", o.params, "experiment parameter key=value");
        kind_cmd[kind] = cmd;
    }

    std::string plot_in, plot_x, plot_scale = "loglog", plot_out;
    std::vector<std::string> plot_y;
    auto* plot = app.add_subcommand("plot", "draw columns of a report table as SVG");
    plot->add_option("table", plot_in, "CSV table written by a run")->required();
    plot->add_option("--x", plot_x, "x column")->required();
    plot->add_option("--y", plot_y, "y column (repeatable)")->required();
    plot->add_option("--scale", plot_scale, "linear, semilogx, semilogy or loglog");
    plot->add_option("--out", plot_out, "output file (stdout when absent)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) return execute(resolve(run_o, run));
        if (*show) {
            std::cout << qucl::serialize_config(resolve(show_o, show));
            return 0;
        }
        if (*plot) return plot_command(plot_in, plot_x, plot_y, plot_scale, plot_out);
        for (const auto& [kind, cmd] : kind_cmd)
            if (*cmd) {
                auto c = resolve(kind_o[kind], cmd);
                select_kind(c, kind, kind_o[kind].params);
                return execute(c);
            }
    } catch (const qucl::Error& e) {
        std::cerr << "qucl: " << e.kind() << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "qucl: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
