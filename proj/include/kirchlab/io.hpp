#pragma once

// Deterministic report output. Floats go through %.17g with '.' decimal
// separator so repeated runs produce byte-identical files.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "kirchlab/errors.hpp"
#include "kirchlab/grid.hpp"
#include "kirchlab/kirchhoff.hpp"

namespace kirchlab {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot open output file: " + path);
    }
    void header(const std::vector<std::string>& names) { line(names); }
    void row(const std::vector<double>& vals) {
        std::vector<std::string> cells;
        cells.reserve(vals.size());
        for (double v : vals)
            cells.push_back(std::isnan(v) ? std::string("") : fmt17(v));
        line(cells);
    }
    void row(const std::vector<std::string>& cells) { line(cells); }

private:
    void line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    std::ofstream out_;
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << text;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

/// (r, v) for radial grids, (x, y, v) for rectangles.
inline void write_field_csv(const std::string& path, const Grid& g, const Field& f) {
    CsvWriter csv(path);
    if (g.shape == DomainShape::Disk) {
        csv.header({"r", "v"});
        for (std::size_t i = 0; i < f.size(); ++i) csv.row({g.node_r(i), f[i]});
        csv.row({g.radius, 0.0});  // boundary closes the profile
    } else {
        csv.header({"x", "y", "v"});
        for (std::size_t i = 0; i < f.size(); ++i) csv.row({g.node_x(i), g.node_y(i), f[i]});
    }
}

inline const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::Collapsed: return "collapsed";
        case SolveStatus::NoConvergence: return "no-convergence";
    }
    return "?";
}

inline nlohmann::json record_to_json(const SolutionRecord& rec) {
    nlohmann::json j;
    j["params"] = {{"a", rec.params.a},
                   {"b", rec.params.b},
                   {"alpha", rec.params.alpha},
                   {"p", rec.params.p}};
    if (!std::isnan(rec.beta)) j["beta"] = rec.beta;
    j["grad_sq"] = rec.grad_sq;
    j["sup_norm"] = rec.sup_norm;
    j["residual_rel"] = rec.residual_rel;
    j["status"] = status_name(rec.status);
    j["iterations"] = rec.iterations;
    if (rec.provenance.kind == Provenance::Kind::Reconstructed)
        j["provenance"] = {{"kind", "reconstructed"}, {"root_index", rec.provenance.root_index}};
    else
        j["provenance"] = {{"kind", "homotopy"}, {"t", rec.provenance.t}};
    return j;
}

} // namespace kirchlab
