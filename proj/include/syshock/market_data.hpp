#pragma once

#include "syshock/calibration.hpp"
#include "syshock/shock_model.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace syshock {

using Date = std::chrono::year_month_day;

/// Parses YYYY-MM-DD; throws DataError on anything else.
Date parse_date(const std::string& text);
std::string format_date(const Date& date);

/// CDS spreads in basis points, row-major dates x entities.
struct SpreadPanel {
    std::vector<Date> dates;
    std::vector<std::string> entities;
    std::vector<double> spreads;

    std::size_t rows() const { return dates.size(); }
    std::size_t cols() const { return entities.size(); }
    double at(std::size_t r, std::size_t j) const { return spreads[r * cols() + j]; }
};

struct CleaningReport {
    std::size_t rows_read = 0;
    std::size_t rows_kept = 0;
    std::size_t rows_dropped = 0;
    /// 1-based file line numbers of the dropped rows.
    std::vector<std::size_t> dropped_lines;

    std::string summary() const;
};

struct LoadedSpreads {
    SpreadPanel panel;
    CleaningReport report;
};

/// Reads `date,<entity1>,...,<entityd>` CSV with ISO dates and spreads in bp.
/// Rows with an empty, NA or non-positive cell are dropped and counted.
/// Malformed headers or rows, unparseable numbers and non-increasing dates
/// throw DataError naming the line. A missing file throws DataError.
LoadedSpreads load_spreads(const std::filesystem::path& path);
LoadedSpreads parse_spreads(std::istream& in, const std::string& source = "<stream>");

/// Writes the panel in the load_spreads format with `precision` significant
/// digits.
void write_spreads(const SpreadPanel& panel, std::ostream& out, int precision = 6);
void write_spreads(const SpreadPanel& panel, const std::filesystem::path& path, int precision = 6);

/// Hazard rates per annum, same layout as SpreadPanel.
struct IntensityPanel {
    std::vector<Date> dates;
    std::vector<std::string> entities;
    std::vector<double> intensities;
    double lgd = 0.6;
    /// Flat rate; cancels in the credit triangle and is kept as metadata.
    double rate = 0.0;

    std::size_t rows() const { return dates.size(); }
    std::size_t cols() const { return entities.size(); }
    double at(std::size_t r, std::size_t j) const { return intensities[r * cols() + j]; }
};

/// Credit triangle: lambda = (spread / 1e4) / lgd. Throws ValidationError
/// unless lgd in (0, 1].
IntensityPanel extract_intensities(const SpreadPanel& panel, double lgd = 0.6, double rate = 0.0);

enum class TauOn { Levels, Diffs };
TauOn parse_tau_on(const std::string& text);

/// Calendar years present in the panel, ascending.
std::vector<int> years(const IntensityPanel& panel);

/// Pairwise empirical taus of the year's intensity levels (or day-on-day
/// differences within the year). Needs at least 30 observations in the year,
/// else DataError naming the year. Pairs are spread over `workers` threads.
TauMatrix yearly_empirical_taus(const IntensityPanel& panel, int year, TauOn on = TauOn::Levels,
                                int workers = 1);
/// Serial reference for yearly_empirical_taus.
TauMatrix yearly_empirical_taus_serial(const IntensityPanel& panel, int year,
                                       TauOn on = TauOn::Levels);

struct SyntheticSpec {
    int year = 2021;
    std::size_t days = 250;
    std::uint64_t seed = 20170101;
    double lgd = 0.6;
    /// Base intensity per entity; the daily intensity moves in
    /// base * [0.5, 1.5].
    std::vector<double> base_intensity;
    std::vector<std::string> entities;
    int workers = 1;
};

/// Spread panel whose day-r intensities come from one lifetime draw of the
/// model: intensity_j = base_j (0.5 + S_j(T_j)) with S_j the survival function
/// of T_j. The same decreasing map for every entity keeps concordance, so the
/// panel's taus estimate the model's. Dates are the first `days` weekdays of
/// spec.year.
SpreadPanel synthesize_spreads(const ModelParams& params, const SyntheticSpec& spec);

}  // namespace syshock
