/*
 * fem.hpp
 * P1 finite-element assembly on triangulations: stiffness, consistent and
 * lumped mass, L2 projections, quadrature-based L2 errors, and convergence
 * orders. All system matrices are restricted to interior dofs (homogeneous
 * Dirichlet data).
 */
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "eoc/direct.hpp"
#include "eoc/mesh.hpp"
#include "eoc/sparse.hpp"

namespace eoc {

using ScalarField = std::function<double(double, double)>;

/*
 * One discretization level. K and M are SPD on interior dofs; W holds the
 * lumped-mass diagonal (row sums of M). Factorizations and operator-norm
 * estimates are computed once here and shared read-only afterwards.
 */
struct FemSystem {
    Mesh mesh;
    SparseMatrix K;  // stiffness (+ c0 * mass when a reaction term is present)
    SparseMatrix M;  // consistent mass
    Vec W;           // lumped-mass diagonal
    std::shared_ptr<const CholeskyFactor> K_factor;
    std::shared_ptr<const CholeskyFactor> M_factor;
    double mk_inv_norm = 0.0;  // estimate of ||M K^{-1}||_2
    double m_norm = 0.0;       // estimate of ||M||_2
    int n = 0;                 // interior dof count
};

// Full (all-node) matrices; rows indexed by global node ids.
SparseMatrix assemble_stiffness_full(const Mesh& mesh, double c0);
SparseMatrix assemble_mass_full(const Mesh& mesh);

// Keeps rows/columns whose nodes are interior, in interior_nodes order.
SparseMatrix restrict_interior(const SparseMatrix& full, const Mesh& mesh);

// Interior-restricted assembly. Throws std::invalid_argument for c0 < 0.
SparseMatrix assemble_stiffness(const Mesh& mesh, double c0);
SparseMatrix assemble_mass(const Mesh& mesh);

// Row-sum lumping of whatever mass matrix it is given.
Vec lump_mass(const SparseMatrix& M);

// Interior load vector b_i = integral of f * phi_i (7-point degree-5 rule).
Vec load_vector(const ScalarField& f, const Mesh& mesh);

// L2 projection onto the interior-supported P1 space: solves M v = b.
// Throws std::runtime_error if quadrature produces non-finite values.
Vec project_l2(const ScalarField& f, const FemSystem& system);

// || v_h - exact ||_{L2(Omega_h)} with v extended by zero to the boundary.
double l2_error(const Vec& v, const ScalarField& exact, const Mesh& mesh);

// Same integral for a vector holding values at every mesh node. subdiv splits
// each triangle into subdiv^2 congruent subtriangles before applying the
// 7-point rule; use subdiv > 1 when exact has kinks inside elements.
double l2_error_nodal(const Vec& full_nodal, const ScalarField& exact,
                      const Mesh& mesh, int subdiv = 1);

// Experimental orders of convergence between consecutive levels. Throws
// std::invalid_argument on length mismatch, nonpositive errors, or hs not
// strictly decreasing.
std::vector<double> eoc(const std::vector<double>& errors,
                        const std::vector<double>& hs);

FemSystem build_fem_system(const Mesh& mesh, double c0);

}  // namespace eoc
