#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "mesh.hpp"

namespace peri {

//----------------------------------------------------------------------------
// Gmsh MSH v2.2 ASCII reader. Only $MeshFormat/$Nodes/$Elements are
// consumed; points (type 15) and lines (type 1) are skipped, triangles
// (type 2) become elements. Anything else is a parse error.
//----------------------------------------------------------------------------

namespace detail {
struct MshParseError : std::runtime_error {
    MshParseError(const std::string& msg, int line)
        : std::runtime_error("MSH parse error at line " + std::to_string(line) +
                             ": " + msg) {}
};
} // namespace detail

inline TriMesh load_msh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_msh: cannot open " + path);

    int lineno = 0;
    auto next_line = [&](std::string& s) -> bool {
        while (std::getline(in, s)) {
            ++lineno;
            if (!s.empty() && s.back() == '\r') s.pop_back();
            if (!s.empty()) return true;
        }
        return false;
    };

    std::string line;
    bool saw_format = false, saw_nodes = false, saw_elements = false;
    std::vector<double> X;
    std::unordered_map<int64_t, int32_t> id_map; // file node id -> dense index
    std::vector<int32_t> tri;

    while (next_line(line)) {
        if (line == "$MeshFormat") {
            if (!next_line(line))
                throw detail::MshParseError("EOF in $MeshFormat", lineno);
            std::istringstream fs(line);
            double version = 0.0;
            int file_type = -1, data_size = 0;
            if (!(fs >> version >> file_type >> data_size))
                throw detail::MshParseError("malformed format line", lineno);
            if (version < 2.0 || version >= 3.0 || file_type != 0)
                throw detail::MshParseError(
                    "unsupported MSH version (need v2.x ASCII)", lineno);
            if (!next_line(line) || line != "$EndMeshFormat")
                throw detail::MshParseError("missing $EndMeshFormat", lineno);
            saw_format = true;
        } else if (line == "$Nodes") {
            if (!next_line(line))
                throw detail::MshParseError("EOF in $Nodes", lineno);
            const long long count = std::stoll(line);
            X.reserve(2 * count);
            for (long long k = 0; k < count; ++k) {
                if (!next_line(line))
                    throw detail::MshParseError("truncated $Nodes", lineno);
                std::istringstream ns(line);
                int64_t id;
                double x, y, z;
                if (!(ns >> id >> x >> y >> z))
                    throw detail::MshParseError("malformed node line", lineno);
                id_map[id] = static_cast<int32_t>(X.size() / 2);
                X.push_back(x);
                X.push_back(y);
            }
            if (!next_line(line) || line != "$EndNodes")
                throw detail::MshParseError("missing $EndNodes", lineno);
            saw_nodes = true;
        } else if (line == "$Elements") {
            if (!saw_nodes)
                throw detail::MshParseError("$Elements before $Nodes", lineno);
            if (!next_line(line))
                throw detail::MshParseError("EOF in $Elements", lineno);
            const long long count = std::stoll(line);
            for (long long k = 0; k < count; ++k) {
                if (!next_line(line))
                    throw detail::MshParseError("truncated $Elements", lineno);
                std::istringstream es(line);
                int64_t id;
                int type = 0, ntags = 0;
                if (!(es >> id >> type >> ntags))
                    throw detail::MshParseError("malformed element line", lineno);
                int64_t tag;
                for (int t = 0; t < ntags; ++t)
                    if (!(es >> tag))
                        throw detail::MshParseError("missing element tag", lineno);
                int nverts = 0;
                if (type == 15) nverts = 1;      // point: skipped
                else if (type == 1) nverts = 2;  // line: skipped
                else if (type == 2) nverts = 3;  // triangle
                else
                    throw detail::MshParseError(
                        "unsupported element type " + std::to_string(type), lineno);
                for (int v = 0; v < nverts; ++v) {
                    int64_t nid;
                    if (!(es >> nid))
                        throw detail::MshParseError("missing element node", lineno);
                    if (type == 2) {
                        const auto it = id_map.find(nid);
                        if (it == id_map.end())
                            throw detail::MshParseError(
                                "element references unknown node " +
                                    std::to_string(nid),
                                lineno);
                        tri.push_back(it->second);
                    }
                }
            }
            if (!next_line(line) || line != "$EndElements")
                throw detail::MshParseError("missing $EndElements", lineno);
            saw_elements = true;
        } else if (!line.empty() && line[0] == '$') {
            // Unknown section (e.g. $PhysicalNames): skip to its end marker.
            const std::string end = "$End" + line.substr(1);
            while (next_line(line) && line != end) {}
        }
    }

    if (!saw_format) throw detail::MshParseError("missing $MeshFormat", lineno);
    if (!saw_nodes) throw detail::MshParseError("missing $Nodes", lineno);
    if (!saw_elements) throw detail::MshParseError("missing $Elements", lineno);

    return TriMesh(std::move(X), std::move(tri));
}

} // namespace peri
