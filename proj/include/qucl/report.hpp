#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qucl/constants.hpp"

namespace qucl {

/// Margins above this are flagged as vacuous: the inequality holds but says nothing.
inline constexpr double kVacuousMargin = 1e6;

/// One checked inequality lhs <= rhs. Logs are authoritative; lhs and rhs may over/underflow.
struct InequalityReport {
    std::string id;
    std::string mode = "explicit";  // explicit | fit
    double log_lhs = -kInf, log_rhs = -kInf;
    double lhs = 0, rhs = 0;
    double margin = kInf;  // rhs / lhs
    bool pass = true;
    bool trivial = false;  // lhs == 0
    bool vacuous = false;
    int ensemble_size = 0;
    std::map<std::string, double> constants;
    std::string note;

    /// Fills lhs, rhs, margin and the flags from the two logarithms.
    static InequalityReport from_logs(std::string id, std::string mode, double log_lhs, double log_rhs);
    static InequalityReport from_values(std::string id, std::string mode, double lhs, double rhs);
    InequalityReport& with(const std::string& name, double value);
    InequalityReport& with_note(const std::string& text);
};

/// Reports sharing `id` pass together; the margin is the smallest one.
bool all_pass(const std::vector<InequalityReport>& reports);
double min_margin(const std::vector<InequalityReport>& reports);

/// Column table (profiles, sweeps). Cells are numbers or strings.
struct Table {
    using Cell = std::variant<double, std::string>;
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
    std::vector<double> column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

/// Shortest round-trip representation used by every writer.
std::string format_number(double x);
std::string csv_quote(const std::string& s);

std::string reports_csv(const std::vector<InequalityReport>& reports);
std::string table_csv(const Table& t);

/// Parses the CSV written by table_csv (numbers where they parse, strings otherwise).
Table parse_table_csv(const std::string& text, const std::string& name = "");

}  // namespace qucl
