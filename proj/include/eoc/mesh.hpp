/*
 * mesh.hpp
 * Conforming P1 triangulations of the unit square and the polygonal unit disk,
 * with uniform red refinement.
 */
#pragma once

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>

namespace eoc {

enum class Domain { square, disk, other };

// Immutable after construction; build through the factory functions below.
struct Mesh {
    Domain domain = Domain::other;
    std::vector<std::array<double, 2>> nodes;
    std::vector<std::array<int, 3>> triangles;  // CCW node indices
    std::vector<char> boundary_mask;            // 1 iff node lies on the boundary
    double h = 0.0;                             // max edge length
    std::vector<int> interior_index_map;        // node id -> dof id, -1 on boundary
    std::vector<int> interior_nodes;            // dof id -> node id
    int n_interior = 0;
};

// Uniform n-by-n grid, each cell split along its lower-left -> upper-right
// diagonal. h = sqrt(2)/n. Throws std::invalid_argument for n < 1.
Mesh unit_square_mesh(int n);

// Level 0 is a hexagon fan around the origin (7 nodes, 6 triangles); each
// level applies one red refinement with boundary midpoints projected onto the
// unit circle. Throws std::invalid_argument for level < 0.
Mesh unit_disk_mesh(int level);

// Splits every triangle into 4 via edge midpoints. Disk boundary-edge
// midpoints are projected radially onto the unit circle; existing nodes never
// move, so square-family meshes stay nested with h halved.
Mesh refine(const Mesh& mesh);

double triangle_area(const Mesh& mesh, int t);
double mesh_area(const Mesh& mesh);

// Unique edges as (min, max) node pairs in lexicographic order. refine()
// assigns the midpoint of edge k the node id nodes.size() + k.
std::vector<std::pair<int, int>> mesh_edges(const Mesh& mesh);

// Max over triangles of longest edge / inscribed-circle diameter.
double shape_regularity(const Mesh& mesh);

// Plain-text dump: "nodes N triangles T", N lines "x y flag", T lines "i j k".
void dump_mesh(const Mesh& mesh, std::ostream& os);

}  // namespace eoc
