#pragma once

#include <string>
#include <vector>

#include "qucl/config.hpp"
#include "qucl/plot.hpp"
#include "qucl/report.hpp"

namespace qucl {

struct ExperimentOutput {
    std::string name;
    std::string kind;
    std::vector<InequalityReport> reports;
    std::vector<Table> tables;
    std::vector<PlotSpec> plots;  // title holds the table name
    std::string error_kind;       // empty when the experiment ran to completion
    std::string error;

    bool pass() const;
};

struct RunResult {
    std::vector<ExperimentOutput> experiments;
    int exit_code = 0;
    std::string report_csv;
    std::string report_json;
};

/// Runs one experiment; library errors propagate.
ExperimentOutput run_experiment(const RunConfig& config, const ExperimentConfig& experiment, int workers);

/// Runs every experiment (concurrently when there are several), catching library errors per experiment.
/// Exit code 2 when an experiment was refused for its input, 1 when a report fails or a computation
/// did not complete, 0 otherwise.
RunResult run(const RunConfig& config);

/// Writes report.csv, report.json and one CSV (and SVG where set) per table; each file is written to a
/// temporary name and renamed into place.
void write_run(const RunResult& result, const std::string& out_dir);

/// Exit code an error kind maps to.
int error_exit_code(const std::string& kind);

}  // namespace qucl
