#pragma once

// CSV and JSON emission for experiment records.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "parabolica/experiments.hpp"

namespace parabolica {

struct RunMetadata {
    std::string command;
    double R = kDefaultEscapeRadius;
    std::uint64_t cap = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    /// Absent when the caller wants byte-reproducible output.
    std::optional<double> wall_time_s;
};

/// site_re, site_im, qn, alpha_abs, N, scaled, residual. A failed cell keeps
/// its site and radius; the remaining columns are empty.
void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);

/// {"metadata": {...}, "records": [...]}; failed cells carry an "error" string.
void write_records_json(std::ostream& os, const std::vector<ExperimentRecord>& records, const RunMetadata& meta);

/// t_index, c_re, c_im, N_ray, samples, max_dev, disk_radius.
void write_stability_csv(std::ostream& os, const std::vector<StabilityRecord>& records);
void write_stability_json(std::ostream& os, const std::vector<StabilityRecord>& records, const RunMetadata& meta);

/// alpha_abs, N, predicted, D; then a blank line and a max_D, slope block.
void write_transit_csv(std::ostream& os, const TransitReport& report);
void write_transit_json(std::ostream& os, const TransitReport& report, const RunMetadata& meta);

/// printf-style helper used by all emitters.
std::string fmt(const char* format, double value);

}  // namespace parabolica
