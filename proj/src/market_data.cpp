#include "syshock/market_data.hpp"

#include "syshock/error.hpp"
#include "syshock/montecarlo.hpp"
#include "syshock/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace syshock {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    // A trailing comma means a trailing empty cell.
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string line_error(const std::string& source, std::size_t line, const std::string& what) {
    return source + ":" + std::to_string(line) + ": " + what;
}

std::string format_number(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

// Observations of entity j restricted to one calendar year.
std::vector<std::vector<double>> year_series(const IntensityPanel& panel, int year, TauOn on) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < panel.rows(); ++r)
        if (static_cast<int>(panel.dates[r].year()) == year) rows.push_back(r);
    const std::size_t needed = 30;
    if (rows.size() < needed)
        throw DataError("year " + std::to_string(year) + " has " + std::to_string(rows.size()) +
                        " observations; at least 30 are required");
    std::vector<std::vector<double>> out(panel.cols());
    for (std::size_t j = 0; j < panel.cols(); ++j) {
        for (std::size_t m = 0; m < rows.size(); ++m) {
            if (on == TauOn::Levels) {
                out[j].push_back(panel.at(rows[m], j));
            } else if (m > 0) {
                out[j].push_back(panel.at(rows[m], j) - panel.at(rows[m - 1], j));
            }
        }
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t d) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = i + 1; k < d; ++k) out.emplace_back(i, k);
    return out;
}

}  // namespace

Date parse_date(const std::string& text) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const std::string s = trim(text);
    const char* p = s.data();
    const char* end = s.data() + s.size();
    bool ok = s.size() == 10 && s[4] == '-' && s[7] == '-';
    ok = ok && std::from_chars(p, p + 4, y).ec == std::errc{};
    ok = ok && std::from_chars(p + 5, p + 7, m).ec == std::errc{};
    ok = ok && std::from_chars(p + 8, end, d).ec == std::errc{};
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ok || !date.ok()) throw DataError("invalid ISO-8601 date '" + s + "'");
    return date;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::string CleaningReport::summary() const {
    std::string out = "rows read " + std::to_string(rows_read) + ", kept " +
                      std::to_string(rows_kept) + ", dropped " + std::to_string(rows_dropped);
    if (!dropped_lines.empty()) {
        out += " (lines";
        for (std::size_t m = 0; m < dropped_lines.size() && m < 20; ++m)
            out += " " + std::to_string(dropped_lines[m]);
        if (dropped_lines.size() > 20) out += " ...";
        out += ")";
    }
    return out;
}

LoadedSpreads load_spreads(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open spread file '" + path.string() + "'");
    return parse_spreads(in, path.string());
}

LoadedSpreads parse_spreads(std::istream& in, const std::string& source) {
    LoadedSpreads out;
    std::string line;
    std::size_t line_no = 0;
    // Header, skipping blank lines.
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw DataError(source + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv(line);
    if (header.size() < 2 || lower(header[0]) != "date")
        throw DataError(line_error(source, line_no, "header must be date,<entity1>,...,<entityd>"));
    for (std::size_t j = 1; j < header.size(); ++j) {
        if (header[j].empty()) throw DataError(line_error(source, line_no, "empty entity name"));
        out.panel.entities.push_back(header[j]);
    }
    const std::size_t d = out.panel.entities.size();

    bool have_prev = false;
    Date prev{};
    std::vector<double> row(d);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++out.report.rows_read;
        const auto cells = split_csv(line);
        if (cells.size() != d + 1)
            throw DataError(line_error(source, line_no,
                                       "expected " + std::to_string(d + 1) + " fields, found " +
                                           std::to_string(cells.size())));
        Date date;
        try {
            date = parse_date(cells[0]);
        } catch (const DataError& e) {
            throw DataError(line_error(source, line_no, e.what()));
        }
        if (have_prev && !(prev < date))
            throw DataError(line_error(source, line_no, "dates must be strictly increasing"));
        prev = date;
        have_prev = true;

        bool keep = true;
        for (std::size_t j = 0; j < d; ++j) {
            const std::string& c = cells[j + 1];
            const std::string lc = lower(c);
            if (c.empty() || lc == "na" || lc == "nan" || lc == "null") {
                keep = false;
                continue;
            }
            double v = 0.0;
            const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
            if (res.ec != std::errc{} || res.ptr != c.data() + c.size())
                throw DataError(line_error(source, line_no, "cannot parse spread '" + c + "'"));
            if (!(v > 0.0) || !std::isfinite(v)) keep = false;
            row[j] = v;
        }
        if (!keep) {
            ++out.report.rows_dropped;
            out.report.dropped_lines.push_back(line_no);
            continue;
        }
        out.panel.dates.push_back(date);
        out.panel.spreads.insert(out.panel.spreads.end(), row.begin(), row.end());
        ++out.report.rows_kept;
    }
    return out;
}

void write_spreads(const SpreadPanel& panel, std::ostream& out, int precision) {
    out << "date";
    for (const auto& e : panel.entities) out << ',' << e;
    out << '\n';
    for (std::size_t r = 0; r < panel.rows(); ++r) {
        out << format_date(panel.dates[r]);
        for (std::size_t j = 0; j < panel.cols(); ++j) out << ',' << format_number(panel.at(r, j), precision);
        out << '\n';
    }
}

void write_spreads(const SpreadPanel& panel, const std::filesystem::path& path, int precision) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    write_spreads(panel, out, precision);
}

IntensityPanel extract_intensities(const SpreadPanel& panel, double lgd, double rate) {
    if (!(lgd > 0.0 && lgd <= 1.0)) throw ValidationError("lgd must lie in (0, 1]");
    if (!std::isfinite(rate)) throw ValidationError("rate must be finite");
    IntensityPanel out;
    out.dates = panel.dates;
    out.entities = panel.entities;
    out.lgd = lgd;
    out.rate = rate;
    out.intensities.reserve(panel.spreads.size());
    for (double s : panel.spreads) {
        if (!(s > 0.0)) throw ValidationError("spreads must be positive after cleaning");
        out.intensities.push_back(s / 1e4 / lgd);
    }
    return out;
}

TauOn parse_tau_on(const std::string& text) {
    const std::string t = lower(trim(text));
    if (t == "levels") return TauOn::Levels;
    if (t == "diffs") return TauOn::Diffs;
    throw ValidationError("tau-on must be 'levels' or 'diffs', got '" + text + "'");
}

std::vector<int> years(const IntensityPanel& panel) {
    std::vector<int> out;
    for (const auto& d : panel.dates) out.push_back(static_cast<int>(d.year()));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

TauMatrix yearly_empirical_taus(const IntensityPanel& panel, int year, TauOn on, int workers) {
    if (panel.cols() < 2) throw ValidationError("need at least two entities");
    const auto series = year_series(panel, year, on);
    const auto pairs = all_pairs(panel.cols());
    std::vector<double> values(pairs.size());
    parallel_for(pairs.size(), workers, [&](std::size_t m) {
        values[m] = empirical_tau(series[pairs[m].first], series[pairs[m].second]);
    });
    TauMatrix out(panel.cols(), panel.entities);
    for (std::size_t m = 0; m < pairs.size(); ++m) out.set(pairs[m].first, pairs[m].second, values[m]);
    return out;
}

TauMatrix yearly_empirical_taus_serial(const IntensityPanel& panel, int year, TauOn on) {
    if (panel.cols() < 2) throw ValidationError("need at least two entities");
    const auto series = year_series(panel, year, on);
    TauMatrix out(panel.cols(), panel.entities);
    for (const auto& [i, k] : all_pairs(panel.cols())) out.set(i, k, empirical_tau(series[i], series[k]));
    return out;
}

SpreadPanel synthesize_spreads(const ModelParams& params, const SyntheticSpec& spec) {
    validate(params);
    const std::size_t d = params.dim();
    if (spec.base_intensity.size() != d) throw ValidationError("one base intensity per entity required");
    if (!(spec.lgd > 0.0 && spec.lgd <= 1.0)) throw ValidationError("lgd must lie in (0, 1]");
    if (spec.days < 1) throw ValidationError("days must be positive");
    for (double b : spec.base_intensity)
        if (!(b > 0.0)) throw ValidationError("base intensities must be positive");

    SpreadPanel panel;
    panel.entities = spec.entities;
    if (panel.entities.empty())
        for (std::size_t j = 0; j < d; ++j) panel.entities.push_back("E" + std::to_string(j + 1));
    if (panel.entities.size() != d) throw ValidationError("one entity name per entity required");

    using namespace std::chrono;
    sys_days day = sys_days{year{spec.year} / January / 1};
    while (panel.dates.size() < spec.days) {
        const weekday wd{day};
        if (wd != Saturday && wd != Sunday) panel.dates.emplace_back(day);
        day += days{1};
    }

    SimulationConfig cfg;
    cfg.n_samples = spec.days;
    cfg.seed = spec.seed;
    cfg.n_workers = spec.workers;
    const SampleBatch batch = sample_model(params, cfg);
    panel.spreads.resize(spec.days * d);
    for (std::size_t r = 0; r < spec.days; ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            const double s = marginal_survival_T(params, j, batch.lifetime(r, j));
            const double intensity = spec.base_intensity[j] * (0.5 + s);
            panel.spreads[r * d + j] = intensity * spec.lgd * 1e4;
        }
    }
    return panel;
}

}  // namespace syshock
