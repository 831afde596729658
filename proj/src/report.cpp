#include "qucl/report.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace qucl {

InequalityReport InequalityReport::from_logs(std::string id, std::string mode, double log_lhs, double log_rhs) {
    InequalityReport r;
    r.id = std::move(id);
    r.mode = std::move(mode);
    r.log_lhs = log_lhs;
    r.log_rhs = log_rhs;
    r.lhs = std::exp(log_lhs);
    r.rhs = std::exp(log_rhs);
    if (std::isnan(log_lhs) || std::isnan(log_rhs)) {
        r.margin = std::numeric_limits<double>::quiet_NaN();
        r.pass = false;
        r.note = "undefined side";
        return r;
    }
    r.trivial = log_lhs == -kInf;
    r.margin = r.trivial ? kInf : std::exp(log_rhs - log_lhs);
    r.pass = r.margin >= 1.0;
    r.vacuous = !r.trivial && r.margin > kVacuousMargin;
    return r;
}

InequalityReport InequalityReport::from_values(std::string id, std::string mode, double lhs, double rhs) {
    require(lhs >= 0.0 && rhs >= 0.0, "inequality sides must be nonnegative");
    return from_logs(std::move(id), std::move(mode), std::log(lhs), std::log(rhs));
}

InequalityReport& InequalityReport::with(const std::string& name, double value) {
    constants[name] = value;
    return *this;
}

InequalityReport& InequalityReport::with_note(const std::string& text) {
    note = note.empty() ? text : note + "; " + text;
    return *this;
}

bool all_pass(const std::vector<InequalityReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

double min_margin(const std::vector<InequalityReport>& reports) {
    double m = kInf;
    for (const auto& r : reports) m = std::min(m, r.margin);
    return m;
}

void Table::add(std::vector<Cell> row) {
    require(row.size() == columns.size(), "row width does not match the table columns");
    rows.push_back(std::move(row));
}

bool Table::has_column(const std::string& c) const {
    return std::find(columns.begin(), columns.end(), c) != columns.end();
}

std::vector<double> Table::column(const std::string& c) const {
    const auto it = std::find(columns.begin(), columns.end(), c);
    if (it == columns.end()) throw InvalidArgument("unknown column " + c);
    const auto k = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    for (const auto& row : rows) {
        if (const double* v = std::get_if<double>(&row[k])) out.push_back(*v);
        else out.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

std::string cell_text(const Table::Cell& c) {
    if (const double* v = std::get_if<double>(&c)) return format_number(*v);
    return csv_quote(std::get<std::string>(c));
}

std::string constants_text(const std::map<std::string, double>& m) {
    std::string out;
    for (const auto& [k, v] : m) {
        if (!out.empty()) out += ";";
        out += k + "=" + format_number(v);
    }
    return out;
}

}  // namespace

std::string reports_csv(const std::vector<InequalityReport>& reports) {
    std::ostringstream os;
    os << "id,mode,lhs,rhs,log_lhs,log_rhs,margin,pass,vacuous,trivial,ensemble_size,constants,note\n";
    for (const auto& r : reports) {
        os << csv_quote(r.id) << ',' << r.mode << ',' << format_number(r.lhs) << ',' << format_number(r.rhs) << ','
           << format_number(r.log_lhs) << ',' << format_number(r.log_rhs) << ',' << format_number(r.margin) << ','
           << (r.pass ? "true" : "false") << ',' << (r.vacuous ? "true" : "false") << ','
           << (r.trivial ? "true" : "false") << ',' << r.ensemble_size << ',' << csv_quote(constants_text(r.constants))
           << ',' << csv_quote(r.note) << '\n';
    }
    return os.str();
}

std::string table_csv(const Table& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_quote(t.columns[i]);
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
        os << '\n';
    }
    return os.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& text, std::size_t& pos) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    while (pos < text.size()) {
        const char c = text[pos++];
        if (quoted) {
            if (c == '"') {
                if (pos < text.size() && text[pos] == '"') {
                    cur += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

Table parse_table_csv(const std::string& text, const std::string& name) {
    Table t;
    t.name = name;
    std::size_t pos = 0;
    if (text.empty()) return t;
    t.columns = split_csv_line(text, pos);
    while (pos < text.size()) {
        const auto fields = split_csv_line(text, pos);
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != t.columns.size()) throw InvalidArgument("ragged CSV row");
        std::vector<Table::Cell> row;
        for (const auto& f : fields) {
            double v = 0;
            if (f == "inf") row.emplace_back(kInf);
            else if (f == "-inf") row.emplace_back(-kInf);
            else if (f == "nan") row.emplace_back(std::numeric_limits<double>::quiet_NaN());
            else {
                const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
                if (res.ec == std::errc() && res.ptr == f.data() + f.size() && !f.empty()) row.emplace_back(v);
                else row.emplace_back(f);
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace qucl
