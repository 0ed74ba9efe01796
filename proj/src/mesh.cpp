/*
 * mesh.cpp
 * Structured triangulations and uniform red refinement.
 */
#include "eoc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace eoc {

namespace {

double signed_area(const Mesh& mesh, const std::array<int, 3>& tri) {
    const auto& a = mesh.nodes[tri[0]];
    const auto& b = mesh.nodes[tri[1]];
    const auto& c = mesh.nodes[tri[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

double edge_length(const Mesh& mesh, int i, int j) {
    const auto& p = mesh.nodes[i];
    const auto& q = mesh.nodes[j];
    return std::hypot(q[0] - p[0], q[1] - p[1]);
}

// Counts triangle incidence per undirected edge; conforming meshes have
// counts in {1, 2} and the count-1 edges form the boundary.
std::map<std::pair<int, int>, int> edge_incidence(const Mesh& mesh) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const int i = tri[e];
            const int j = tri[(e + 1) % 3];
            ++count[{std::min(i, j), std::max(i, j)}];
        }
    }
    return count;
}

// Derives boundary flags, h, and interior dof maps; validates orientation
// and conformity.
void finalize(Mesh& mesh) {
    const int n_nodes = static_cast<int>(mesh.nodes.size());
    for (const auto& tri : mesh.triangles) {
        for (int v : tri) {
            if (v < 0 || v >= n_nodes) {
                throw std::invalid_argument("mesh: triangle index out of range");
            }
        }
        if (signed_area(mesh, tri) <= 0.0) {
            throw std::invalid_argument("mesh: triangle not CCW or degenerate");
        }
    }

    mesh.boundary_mask.assign(mesh.nodes.size(), 0);
    mesh.h = 0.0;
    for (const auto& [edge, count] : edge_incidence(mesh)) {
        if (count > 2) {
            throw std::invalid_argument("mesh: edge shared by more than 2 triangles");
        }
        if (count == 1) {
            mesh.boundary_mask[edge.first] = 1;
            mesh.boundary_mask[edge.second] = 1;
        }
        mesh.h = std::max(mesh.h, edge_length(mesh, edge.first, edge.second));
    }

    mesh.interior_index_map.assign(mesh.nodes.size(), -1);
    mesh.interior_nodes.clear();
    for (int i = 0; i < n_nodes; ++i) {
        if (!mesh.boundary_mask[i]) {
            mesh.interior_index_map[i] = static_cast<int>(mesh.interior_nodes.size());
            mesh.interior_nodes.push_back(i);
        }
    }
    mesh.n_interior = static_cast<int>(mesh.interior_nodes.size());
}

}  // namespace

Mesh unit_square_mesh(int n) {
    if (n < 1) {
        throw std::invalid_argument("unit_square_mesh: n must be >= 1");
    }
    Mesh mesh;
    mesh.domain = Domain::square;
    mesh.nodes.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int iy = 0; iy <= n; ++iy) {
        for (int ix = 0; ix <= n; ++ix) {
            mesh.nodes.push_back({static_cast<double>(ix) / n,
                                  static_cast<double>(iy) / n});
        }
    }
    mesh.triangles.reserve(static_cast<std::size_t>(2) * n * n);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const int ll = iy * (n + 1) + ix;
            const int lr = ll + 1;
            const int ul = ll + (n + 1);
            const int ur = ul + 1;
            // Both children CCW, split along the ll -> ur diagonal.
            mesh.triangles.push_back({ll, lr, ur});
            mesh.triangles.push_back({ll, ur, ul});
        }
    }
    finalize(mesh);
    return mesh;
}

Mesh unit_disk_mesh(int level) {
    if (level < 0) {
        throw std::invalid_argument("unit_disk_mesh: level must be >= 0");
    }
    Mesh mesh;
    mesh.domain = Domain::disk;
    mesh.nodes.push_back({0.0, 0.0});
    for (int k = 0; k < 6; ++k) {
        const double phi = 2.0 * M_PI * k / 6.0;
        mesh.nodes.push_back({std::cos(phi), std::sin(phi)});
    }
    for (int k = 0; k < 6; ++k) {
        mesh.triangles.push_back({0, 1 + k, 1 + (k + 1) % 6});
    }
    finalize(mesh);
    for (int l = 0; l < level; ++l) {
        mesh = refine(mesh);
    }
    return mesh;
}

Mesh refine(const Mesh& mesh) {
    Mesh fine;
    fine.domain = mesh.domain;
    fine.nodes = mesh.nodes;

    const auto incidence = edge_incidence(mesh);
    std::map<std::pair<int, int>, int> midpoint;
    for (const auto& [edge, count] : incidence) {
        const auto& p = mesh.nodes[edge.first];
        const auto& q = mesh.nodes[edge.second];
        std::array<double, 2> m = {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
        if (mesh.domain == Domain::disk && count == 1) {
            // Boundary-edge midpoints return to the unit circle.
            const double r = std::hypot(m[0], m[1]);
            m[0] /= r;
            m[1] /= r;
        }
        midpoint[edge] = static_cast<int>(fine.nodes.size());
        fine.nodes.push_back(m);
    }

    auto mid = [&](int i, int j) {
        return midpoint.at({std::min(i, j), std::max(i, j)});
    };
    fine.triangles.reserve(4 * mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        const int a = tri[0], b = tri[1], c = tri[2];
        const int ab = mid(a, b), bc = mid(b, c), ac = mid(a, c);
        fine.triangles.push_back({a, ab, ac});
        fine.triangles.push_back({ab, b, bc});
        fine.triangles.push_back({ac, bc, c});
        fine.triangles.push_back({ab, bc, ac});
    }
    finalize(fine);
    return fine;
}

double triangle_area(const Mesh& mesh, int t) {
    return signed_area(mesh, mesh.triangles[t]);
}

double mesh_area(const Mesh& mesh) {
    double area = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        area += triangle_area(mesh, static_cast<int>(t));
    }
    return area;
}

std::vector<std::pair<int, int>> mesh_edges(const Mesh& mesh) {
    std::vector<std::pair<int, int>> edges;
    for (const auto& [edge, count] : edge_incidence(mesh)) {
        edges.push_back(edge);
    }
    return edges;
}

double shape_regularity(const Mesh& mesh) {
    double worst = 0.0;
    for (const auto& tri : mesh.triangles) {
        const double la = edge_length(mesh, tri[0], tri[1]);
        const double lb = edge_length(mesh, tri[1], tri[2]);
        const double lc = edge_length(mesh, tri[2], tri[0]);
        const double longest = std::max({la, lb, lc});
        const double area = signed_area(mesh, tri);
        const double inscribed = 4.0 * area / (la + lb + lc);
        worst = std::max(worst, longest / inscribed);
    }
    return worst;
}

void dump_mesh(const Mesh& mesh, std::ostream& os) {
    os << "nodes " << mesh.nodes.size() << " triangles " << mesh.triangles.size()
       << '\n';
    os << std::setprecision(17);
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        os << mesh.nodes[i][0] << ' ' << mesh.nodes[i][1] << ' '
           << static_cast<int>(mesh.boundary_mask[i]) << '\n';
    }
    for (const auto& tri : mesh.triangles) {
        os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    }
}

}  // namespace eoc
