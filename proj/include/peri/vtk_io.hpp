#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "mesh.hpp"

namespace peri {

//----------------------------------------------------------------------------
// Legacy ASCII VTK UnstructuredGrid writer. Deterministic formatting
// (9 significant digits) so identical runs produce byte-identical files.
//----------------------------------------------------------------------------

struct VtkFields {
    std::map<std::string, const std::vector<double>*> point_vectors; // 2N each
    std::map<std::string, const std::vector<double>*> point_scalars; // N each
    std::map<std::string, const std::vector<ElementStrain>*> cell_tensors;
    double deform_scale = 0.0; // write points as x + scale*U when > 0
    const std::vector<double>* deform_U = nullptr;
};

namespace detail {
inline void fmt_g9(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out += buf;
}
} // namespace detail

inline void write_vtk(const std::string& path, const TriMesh& mesh,
                      const VtkFields& fields) {
    const int32_t n = mesh.num_nodes();
    const int32_t ne = mesh.num_elements();

    // Validate every field length before touching the filesystem.
    for (const auto& [name, f] : fields.point_vectors)
        if (static_cast<int32_t>(f->size()) != 2 * n)
            throw std::invalid_argument("write_vtk: vector field '" + name +
                                        "' length mismatch");
    for (const auto& [name, f] : fields.point_scalars)
        if (static_cast<int32_t>(f->size()) != n)
            throw std::invalid_argument("write_vtk: scalar field '" + name +
                                        "' length mismatch");
    for (const auto& [name, f] : fields.cell_tensors)
        if (static_cast<int32_t>(f->size()) != ne)
            throw std::invalid_argument("write_vtk: tensor field '" + name +
                                        "' length mismatch");
    if (fields.deform_scale > 0.0 &&
        (!fields.deform_U || static_cast<int32_t>(fields.deform_U->size()) != 2 * n))
        throw std::invalid_argument("write_vtk: deform displacement missing");

    std::string out;
    out.reserve(static_cast<size_t>(n) * 40 + static_cast<size_t>(ne) * 20);
    out += "# vtk DataFile Version 3.0\nperi2d snapshot\nASCII\n"
           "DATASET UNSTRUCTURED_GRID\n";

    out += "POINTS " + std::to_string(n) + " double\n";
    for (int32_t i = 0; i < n; ++i) {
        double x = mesh.coords()[2 * i], y = mesh.coords()[2 * i + 1];
        if (fields.deform_scale > 0.0) {
            x += fields.deform_scale * (*fields.deform_U)[2 * i];
            y += fields.deform_scale * (*fields.deform_U)[2 * i + 1];
        }
        detail::fmt_g9(out, x);
        out += ' ';
        detail::fmt_g9(out, y);
        out += " 0\n";
    }

    out += "CELLS " + std::to_string(ne) + ' ' + std::to_string(4 * ne) + '\n';
    for (int32_t e = 0; e < ne; ++e) {
        const auto nd = mesh.element(e);
        out += "3 " + std::to_string(nd[0]) + ' ' + std::to_string(nd[1]) + ' ' +
               std::to_string(nd[2]) + '\n';
    }
    out += "CELL_TYPES " + std::to_string(ne) + '\n';
    for (int32_t e = 0; e < ne; ++e) out += "5\n";

    if (!fields.point_vectors.empty() || !fields.point_scalars.empty()) {
        out += "POINT_DATA " + std::to_string(n) + '\n';
        for (const auto& [name, f] : fields.point_vectors) {
            out += "VECTORS " + name + " double\n";
            for (int32_t i = 0; i < n; ++i) {
                detail::fmt_g9(out, (*f)[2 * i]);
                out += ' ';
                detail::fmt_g9(out, (*f)[2 * i + 1]);
                out += " 0\n";
            }
        }
        for (const auto& [name, f] : fields.point_scalars) {
            out += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
            for (int32_t i = 0; i < n; ++i) {
                detail::fmt_g9(out, (*f)[i]);
                out += '\n';
            }
        }
    }

    if (!fields.cell_tensors.empty()) {
        out += "CELL_DATA " + std::to_string(ne) + '\n';
        for (const auto& [name, f] : fields.cell_tensors) {
            out += "TENSORS " + name + " double\n";
            for (int32_t e = 0; e < ne; ++e) {
                const auto& s = (*f)[e];
                detail::fmt_g9(out, s.exx);
                out += ' ';
                detail::fmt_g9(out, s.exy);
                out += " 0\n";
                detail::fmt_g9(out, s.exy);
                out += ' ';
                detail::fmt_g9(out, s.eyy);
                out += " 0\n0 0 0\n";
            }
        }
    }

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_vtk: cannot open " + path);
    os << out;
    if (!os) throw std::runtime_error("write_vtk: write failed for " + path);
}

//----------------------------------------------------------------------------
// Minimal legacy-VTK reader used by tests to check that snapshots are
// independently loadable: parses point/cell counts and field names.
//----------------------------------------------------------------------------
struct VtkSummary {
    int64_t num_points = 0;
    int64_t num_cells = 0;
    std::vector<std::string> point_fields;
    std::vector<std::string> cell_fields;
};

inline VtkSummary read_vtk_summary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_vtk_summary: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0)
        throw std::runtime_error("read_vtk_summary: missing VTK header");
    std::getline(in, line); // title
    if (!std::getline(in, line) || line != "ASCII")
        throw std::runtime_error("read_vtk_summary: not ASCII");
    if (!std::getline(in, line) || line.find("UNSTRUCTURED_GRID") == std::string::npos)
        throw std::runtime_error("read_vtk_summary: not an unstructured grid");

    VtkSummary s;
    bool in_cell_data = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "POINTS") {
            ls >> s.num_points;
            for (int64_t i = 0; i < s.num_points; ++i) {
                double x, y, z;
                if (!(in >> x >> y >> z))
                    throw std::runtime_error("read_vtk_summary: truncated POINTS");
            }
        } else if (kw == "CELLS") {
            int64_t total;
            ls >> s.num_cells >> total;
            for (int64_t e = 0; e < s.num_cells; ++e) {
                int cnt;
                if (!(in >> cnt))
                    throw std::runtime_error("read_vtk_summary: truncated CELLS");
                for (int v = 0; v < cnt; ++v) {
                    int64_t id;
                    if (!(in >> id) || id < 0 || id >= s.num_points)
                        throw std::runtime_error(
                            "read_vtk_summary: cell references bad point");
                }
            }
        } else if (kw == "CELL_DATA") {
            in_cell_data = true;
        } else if (kw == "POINT_DATA") {
            in_cell_data = false;
        } else if (kw == "VECTORS" || kw == "SCALARS" || kw == "TENSORS") {
            std::string name;
            ls >> name;
            (in_cell_data ? s.cell_fields : s.point_fields).push_back(name);
        }
    }
    return s;
}

} // namespace peri
