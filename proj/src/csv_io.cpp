#include "porosim/csv_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace porosim {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string field_csv_string(const ScalarField& field) {
    const Grid& g = field.grid();
    const TimeGrid& tg = field.time_grid();
    std::string out;
    out.reserve(field.values().size() * 24);
    out += g.dim() == 1 ? "x,t,value\n" : "x,y,t,value\n";
    for (int j = 0; j < tg.n_times(); ++j) {
        const std::string ts = format_g17(tg.time(j));
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            const SpacePoint p = g.node_coords(n);
            out += format_g17(p[0]);
            out += ',';
            if (g.dim() == 2) {
                out += format_g17(p[1]);
                out += ',';
            }
            out += ts;
            out += ',';
            out += format_g17(field.at(n, j));
            out += '\n';
        }
    }
    return out;
}

void write_field_csv(const ScalarField& field, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << field_csv_string(field);
}

namespace {

std::vector<double> split_doubles(const std::string& line, std::size_t line_no,
                                  const std::string& origin) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const std::size_t comma = line.find(',', pos);
        const std::string tok = line.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": malformed numeric field '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// recover a uniform axis from the sorted unique coordinates
void axis_from_coords(std::vector<double> coords, double& origin, double& extent,
                      int& n_cells, const std::string& what) {
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    if (coords.size() < 2)
        throw std::runtime_error("field csv: axis '" + what +
                                 "' needs at least 2 distinct coordinates");
    origin = coords.front();
    extent = coords.back() - coords.front();
    n_cells = static_cast<int>(coords.size()) - 1;
    const double h = extent / n_cells;
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (std::abs(coords[i] - (origin + i * h)) > 1e-9 * std::max(1.0, extent))
            throw std::runtime_error("field csv: axis '" + what +
                                     "' is not uniform");
}

}  // namespace

ScalarField parse_field_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(origin + ": empty field csv");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    int dim;
    if (line == "x,t,value")
        dim = 1;
    else if (line == "x,y,t,value")
        dim = 2;
    else
        throw std::runtime_error(origin + ":1: unrecognized header '" + line + "'");

    struct Row {
        double x, y, t, v;
    };
    std::vector<Row> rows;
    std::vector<double> xs, ys, ts;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto vals = split_doubles(line, line_no, origin);
        if (vals.size() != static_cast<std::size_t>(dim) + 2)
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(dim + 2) +
                                     " fields, got " + std::to_string(vals.size()));
        Row r;
        r.x = vals[0];
        r.y = dim == 2 ? vals[1] : 0.0;
        r.t = vals[dim];
        r.v = vals[dim + 1];
        rows.push_back(r);
        xs.push_back(r.x);
        if (dim == 2) ys.push_back(r.y);
        ts.push_back(r.t);
    }
    if (rows.empty()) throw std::runtime_error(origin + ": no data rows");

    double ox, ex, oy = 0, ey = 0, ot, et;
    int ncx, ncy = 0, nct;
    axis_from_coords(xs, ox, ex, ncx, "x");
    if (dim == 2) axis_from_coords(ys, oy, ey, ncy, "y");
    axis_from_coords(ts, ot, et, nct, "t");

    Grid g = dim == 1 ? Grid::make1d(ox, ex, ncx)
                      : Grid::make(2, {ox, oy}, {ex, ey}, {ncx, ncy});
    TimeGrid tg = TimeGrid::make(ot, et / nct, nct);
    ScalarField field(g, tg, "u");
    if (rows.size() != field.values().size())
        throw std::runtime_error(origin + ": sample count " +
                                 std::to_string(rows.size()) +
                                 " does not fill the grid (" +
                                 std::to_string(field.values().size()) + ")");

    const double hx = g.h(0);
    for (const Row& r : rows) {
        const int i = static_cast<int>(std::lround((r.x - ox) / hx));
        const int jj = dim == 2 ? static_cast<int>(std::lround((r.y - oy) / g.h(1)))
                                : 0;
        const int jt = static_cast<int>(std::lround((r.t - ot) / tg.dt));
        field.at_ij(i, jj, jt) = r.v;
    }
    return field;
}

ScalarField read_field_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_field_csv(ss.str(), path);
}

void write_metadata(const std::map<std::string, std::string>& meta,
                    const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& [k, v] : meta) f << k << "=" << v << "\n";
}

std::map<std::string, std::string> read_metadata(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

namespace {

std::string label_name(FbLabel l) {
    switch (l) {
        case FbLabel::regular: return "regular";
        case FbLabel::singular: return "singular";
        default: return "unresolved";
    }
}

}  // namespace

void write_fb_report_csv(const std::vector<FbReportRow>& rows, int dim,
                         const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << (dim == 1 ? "x,t,label,weiss_ratio,exponent,c_lower,C_upper,M_bound,blowup\n"
                   : "x,y,t,label,weiss_ratio,exponent,c_lower,C_upper,M_bound,blowup\n");
    for (const auto& r : rows) {
        f << format_g17(r.point.x[0]) << ',';
        if (dim == 2) f << format_g17(r.point.x[1]) << ',';
        f << format_g17(r.point.t) << ',' << label_name(r.point.label) << ','
          << format_g17(r.weiss_ratio) << ',' << format_g17(r.exponent) << ','
          << format_g17(r.c_lower) << ',' << format_g17(r.C_upper) << ','
          << format_g17(r.M_bound) << ',' << r.blowup_kind << "\n";
    }
}

void write_regularity_csv(const std::vector<FbReportRow>& rows, int dim,
                          const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << (dim == 1 ? "x,t,exponent,c_lower,C_upper,M_bound\n"
                   : "x,y,t,exponent,c_lower,C_upper,M_bound\n");
    for (const auto& r : rows) {
        f << format_g17(r.point.x[0]) << ',';
        if (dim == 2) f << format_g17(r.point.x[1]) << ',';
        f << format_g17(r.point.t) << ',' << format_g17(r.exponent) << ','
          << format_g17(r.c_lower) << ',' << format_g17(r.C_upper) << ','
          << format_g17(r.M_bound) << "\n";
    }
}

void write_weiss_sweep_csv(const std::vector<WeissValue>& sweeps, int dim,
                           const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << (dim == 1 ? "x,t,tau,W,limit,extrap_residual,A_n,ratio\n"
                   : "x,y,t,tau,W,limit,extrap_residual,A_n,ratio\n");
    for (const auto& w : sweeps)
        for (std::size_t i = 0; i < w.tau_values.size(); ++i) {
            f << format_g17(w.x_star[0]) << ',';
            if (dim == 2) f << format_g17(w.x_star[1]) << ',';
            f << format_g17(w.t_star) << ',' << format_g17(w.tau_values[i]) << ','
              << format_g17(w.W_values[i]) << ',' << format_g17(w.extrapolated_limit)
              << ',' << format_g17(w.extrapolation_residual) << ','
              << format_g17(w.A_n) << ',' << format_g17(w.ratio) << "\n";
        }
}

}  // namespace porosim
