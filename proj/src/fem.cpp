/*
 * fem.cpp
 * P1 assembly, projections, quadrature errors, convergence orders.
 */
#include "eoc/fem.hpp"

#include <cmath>
#include <stdexcept>

#include "eoc/krylov.hpp"

namespace eoc {

namespace {

// 7-point degree-5 rule on the reference triangle, barycentric coordinates;
// weights sum to 1 and are scaled by the triangle area on use.
struct QuadPoint {
    double l1, l2, l3, w;
};

constexpr QuadPoint kTriQuad[7] = {
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.059715871789770, 0.470142064105115, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.059715871789770, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.470142064105115, 0.059715871789770, 0.132394152788506},
    {0.797426985353087, 0.101286507323456, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.797426985353087, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.101286507323456, 0.797426985353087, 0.125939180544827},
};

struct TriGeometry {
    double area;
    double bx[3], by[3];  // gradient of barycentric i is (bx[i], by[i]) / (2 area)
};

TriGeometry triangle_geometry(const Mesh& mesh, const std::array<int, 3>& tri) {
    const auto& p0 = mesh.nodes[tri[0]];
    const auto& p1 = mesh.nodes[tri[1]];
    const auto& p2 = mesh.nodes[tri[2]];
    TriGeometry g;
    g.area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) -
                    (p2[0] - p0[0]) * (p1[1] - p0[1]));
    g.bx[0] = p1[1] - p2[1];
    g.bx[1] = p2[1] - p0[1];
    g.bx[2] = p0[1] - p1[1];
    g.by[0] = p2[0] - p1[0];
    g.by[1] = p0[0] - p2[0];
    g.by[2] = p1[0] - p0[0];
    return g;
}

}  // namespace

SparseMatrix assemble_stiffness_full(const Mesh& mesh, double c0) {
    if (c0 < 0.0) {
        throw std::invalid_argument("assemble_stiffness: c0 must be >= 0");
    }
    std::vector<Triplet> t;
    t.reserve(9 * mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        const TriGeometry g = triangle_geometry(mesh, tri);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double v = (g.bx[i] * g.bx[j] + g.by[i] * g.by[j]) / (4.0 * g.area);
                if (c0 > 0.0) {
                    v += c0 * (g.area / 12.0) * (i == j ? 2.0 : 1.0);
                }
                t.push_back({tri[i], tri[j], v});
            }
        }
    }
    return SparseMatrix(static_cast<int>(mesh.nodes.size()),
                        static_cast<int>(mesh.nodes.size()), t);
}

SparseMatrix assemble_mass_full(const Mesh& mesh) {
    std::vector<Triplet> t;
    t.reserve(9 * mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        const double area = triangle_geometry(mesh, tri).area;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                t.push_back({tri[i], tri[j], (area / 12.0) * (i == j ? 2.0 : 1.0)});
            }
        }
    }
    return SparseMatrix(static_cast<int>(mesh.nodes.size()),
                        static_cast<int>(mesh.nodes.size()), t);
}

SparseMatrix restrict_interior(const SparseMatrix& full, const Mesh& mesh) {
    return full.submatrix(mesh.interior_nodes, mesh.interior_nodes);
}

SparseMatrix assemble_stiffness(const Mesh& mesh, double c0) {
    return restrict_interior(assemble_stiffness_full(mesh, c0), mesh);
}

SparseMatrix assemble_mass(const Mesh& mesh) {
    return restrict_interior(assemble_mass_full(mesh), mesh);
}

Vec lump_mass(const SparseMatrix& M) { return M.row_sums(); }

Vec load_vector(const ScalarField& f, const Mesh& mesh) {
    Vec full = Vec::Zero(static_cast<int>(mesh.nodes.size()));
    for (const auto& tri : mesh.triangles) {
        const double area = triangle_geometry(mesh, tri).area;
        const auto& p0 = mesh.nodes[tri[0]];
        const auto& p1 = mesh.nodes[tri[1]];
        const auto& p2 = mesh.nodes[tri[2]];
        for (const auto& q : kTriQuad) {
            const double x = q.l1 * p0[0] + q.l2 * p1[0] + q.l3 * p2[0];
            const double y = q.l1 * p0[1] + q.l2 * p1[1] + q.l3 * p2[1];
            const double fx = f(x, y);
            if (!std::isfinite(fx)) {
                throw std::runtime_error("load_vector: non-finite quadrature value");
            }
            const double lam[3] = {q.l1, q.l2, q.l3};
            for (int v = 0; v < 3; ++v) {
                full[tri[v]] += area * q.w * lam[v] * fx;
            }
        }
    }
    Vec b(mesh.n_interior);
    for (int d = 0; d < mesh.n_interior; ++d) b[d] = full[mesh.interior_nodes[d]];
    return b;
}

Vec project_l2(const ScalarField& f, const FemSystem& system) {
    if (system.n == 0) return Vec(0);
    return system.M_factor->solve(load_vector(f, system.mesh));
}

double l2_error(const Vec& v, const ScalarField& exact, const Mesh& mesh) {
    if (v.size() != mesh.n_interior) {
        throw std::invalid_argument("l2_error: vector/mesh size mismatch");
    }
    // Zero extension to boundary nodes.
    Vec full = Vec::Zero(static_cast<int>(mesh.nodes.size()));
    for (int d = 0; d < mesh.n_interior; ++d) full[mesh.interior_nodes[d]] = v[d];
    return l2_error_nodal(full, exact, mesh, 1);
}

double l2_error_nodal(const Vec& full_nodal, const ScalarField& exact,
                      const Mesh& mesh, int subdiv) {
    if (full_nodal.size() != static_cast<int>(mesh.nodes.size())) {
        throw std::invalid_argument("l2_error_nodal: vector/mesh size mismatch");
    }
    if (subdiv < 1) {
        throw std::invalid_argument("l2_error_nodal: subdiv must be >= 1");
    }
    double err2 = 0.0;
    for (const auto& tri : mesh.triangles) {
        const double area = triangle_geometry(mesh, tri).area;
        const auto& p0 = mesh.nodes[tri[0]];
        const auto& p1 = mesh.nodes[tri[1]];
        const auto& p2 = mesh.nodes[tri[2]];
        const double v0 = full_nodal[tri[0]];
        const double v1 = full_nodal[tri[1]];
        const double v2 = full_nodal[tri[2]];
        const double sub_area = area / (subdiv * subdiv);
        for (int a = 0; a < subdiv; ++a) {
            for (int b = 0; b < subdiv - a; ++b) {
                // Barycentric lattice cell (a, b): one upward subtriangle and,
                // away from the hypotenuse, one downward subtriangle.
                for (int up = 0; up < 2; ++up) {
                    if (up == 1 && a + b >= subdiv - 1) continue;
                    double c1[3], c2[3];
                    if (up == 0) {
                        c1[0] = a;
                        c2[0] = b;
                        c1[1] = a + 1.0;
                        c2[1] = b;
                        c1[2] = a;
                        c2[2] = b + 1.0;
                    } else {
                        c1[0] = a + 1.0;
                        c2[0] = b;
                        c1[1] = a + 1.0;
                        c2[1] = b + 1.0;
                        c1[2] = a;
                        c2[2] = b + 1.0;
                    }
                    for (const auto& q : kTriQuad) {
                        const double l1 =
                            (q.l1 * c1[0] + q.l2 * c1[1] + q.l3 * c1[2]) / subdiv;
                        const double l2 =
                            (q.l1 * c2[0] + q.l2 * c2[1] + q.l3 * c2[2]) / subdiv;
                        const double l0 = 1.0 - l1 - l2;
                        const double x = l0 * p0[0] + l1 * p1[0] + l2 * p2[0];
                        const double y = l0 * p0[1] + l1 * p1[1] + l2 * p2[1];
                        const double vh = l0 * v0 + l1 * v1 + l2 * v2;
                        const double d = vh - exact(x, y);
                        err2 += sub_area * q.w * d * d;
                    }
                }
            }
        }
    }
    return std::sqrt(err2);
}

std::vector<double> eoc(const std::vector<double>& errors,
                        const std::vector<double>& hs) {
    if (errors.size() != hs.size() || errors.size() < 2) {
        throw std::invalid_argument("eoc: need equal-length lists of size >= 2");
    }
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (errors[k] <= 0.0) {
            throw std::invalid_argument("eoc: errors must be positive");
        }
        if (k > 0 && hs[k] >= hs[k - 1]) {
            throw std::invalid_argument("eoc: hs must be strictly decreasing");
        }
    }
    std::vector<double> orders(errors.size() - 1);
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        orders[k] = (std::log(errors[k]) - std::log(errors[k + 1])) /
                    (std::log(hs[k]) - std::log(hs[k + 1]));
    }
    return orders;
}

FemSystem build_fem_system(const Mesh& mesh, double c0) {
    FemSystem sys;
    sys.mesh = mesh;
    sys.K = assemble_stiffness(mesh, c0);
    sys.M = assemble_mass(mesh);
    sys.W = lump_mass(sys.M);
    sys.n = mesh.n_interior;
    if (sys.n == 0) return sys;

    sys.K_factor = sparse_direct_solve(sys.K);
    sys.M_factor = sparse_direct_solve(sys.M);

    // ||M K^{-1}||_2 = sqrt(lambda_max(K^{-1} M M K^{-1})).
    const FunctionOperator mk_sq(sys.n, [&](const Vec& x) {
        return sys.K_factor->solve(sys.M.apply(sys.M.apply(sys.K_factor->solve(x))));
    });
    sys.mk_inv_norm = std::sqrt(std::max(0.0, power_iteration_lambda_max(mk_sq, 50)));

    const MatrixOperator m_op(sys.M);
    sys.m_norm = power_iteration_lambda_max(m_op, 50);
    return sys;
}

}  // namespace eoc
