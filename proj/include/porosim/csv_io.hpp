#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "porosim/analysis.hpp"
#include "porosim/grid.hpp"

namespace porosim {

/// Field interchange format: header `x[,y],t,value`, one row per
/// (node, time) sample, %.17g formatting. Deterministic byte-for-byte.
void write_field_csv(const ScalarField& field, const std::string& path);
std::string field_csv_string(const ScalarField& field);

/// Rebuilds the grid from the coordinate columns; throws on malformed rows
/// (message carries the line number) and non-uniform coordinates.
ScalarField read_field_csv(const std::string& path);
ScalarField parse_field_csv(const std::string& text, const std::string& origin);

/// key=value sidecar, sorted by key.
void write_metadata(const std::map<std::string, std::string>& meta,
                    const std::string& path);
std::map<std::string, std::string> read_metadata(const std::string& path);

/// One row per free boundary point: coordinates, label, Weiss ratio,
/// fitted exponents and constants.
struct FbReportRow {
    FbPoint point;
    double weiss_ratio = std::nan("");
    double exponent = std::nan("");
    double c_lower = std::nan("");
    double C_upper = std::nan("");
    double M_bound = std::nan("");
    std::string blowup_kind = "none";
};

void write_fb_report_csv(const std::vector<FbReportRow>& rows, int dim,
                         const std::string& path);

/// Regularity columns only (exponent and fitted constants per point).
void write_regularity_csv(const std::vector<FbReportRow>& rows, int dim,
                          const std::string& path);

void write_weiss_sweep_csv(const std::vector<WeissValue>& sweeps, int dim,
                           const std::string& path);

std::string format_g17(double v);

}  // namespace porosim
