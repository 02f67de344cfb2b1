#pragma once

#include <vector>

#include "ivem/sparse.hpp"

namespace ivem {

/// Assembled bilinear form plus its Dirichlet-eliminated SPD reduction.
/// The full (pre-elimination) matrix stays around: energy norms of DoF
/// differences are evaluated through it.
struct GlobalSystem {
    SparseSystem full;                   // rhs = plain load vector
    std::vector<bool> boundary;
    std::vector<double> boundary_values;
    std::vector<int> reduced_index;      // -1 for eliminated DoFs
    SparseSystem reduced;

    int n_dofs() const { return full.n; }

    static GlobalSystem build(int n, const std::vector<Triplet>& triplets,
                              std::vector<double> load, std::vector<bool> bdry,
                              std::vector<double> bdry_values) {
        GlobalSystem g;
        g.full = SparseSystem::from_triplets(n, triplets, load);
        g.boundary = std::move(bdry);
        g.boundary_values = std::move(bdry_values);

        g.reduced_index.assign(n, -1);
        int m = 0;
        for (int i = 0; i < n; ++i)
            if (!g.boundary[i]) g.reduced_index[i] = m++;

        // symmetric elimination: keep interior rows/cols, move the boundary
        // coupling to the right-hand side
        std::vector<Triplet> rt;
        std::vector<double> rr(m, 0.0);
        for (int i = 0; i < n; ++i) {
            if (g.boundary[i]) continue;
            int ri = g.reduced_index[i];
            rr[ri] = g.full.rhs[i];
            for (int k = g.full.row_ptr[i]; k < g.full.row_ptr[i + 1]; ++k) {
                int j = g.full.col[k];
                if (g.boundary[j])
                    rr[ri] -= g.full.val[k] * g.boundary_values[j];
                else
                    rt.push_back({ri, g.reduced_index[j], g.full.val[k]});
            }
        }
        g.reduced = SparseSystem::from_triplets(m, rt, rr);
        return g;
    }

    std::vector<double> expand(const std::vector<double>& reduced_x) const {
        std::vector<double> x(full.n);
        for (int i = 0; i < full.n; ++i)
            x[i] = boundary[i] ? boundary_values[i] : reduced_x[reduced_index[i]];
        return x;
    }

    /// v^T A v through the pre-elimination matrix.
    double energy(const std::vector<double>& v) const {
        std::vector<double> av(full.n);
        full.multiply(v, av);
        double s = 0.0;
        for (int i = 0; i < full.n; ++i) s += v[i] * av[i];
        return s;
    }
};

struct SchemeSolution {
    std::vector<double> dofs;
    int cg_iterations = 0;
    double relative_residual = 0.0;
};

inline SchemeSolution solve_system(const GlobalSystem& g, double tol = 1e-10,
                                   bool use_dense = false) {
    SchemeSolution s;
    if (g.reduced.n == 0) {
        s.dofs = g.expand({});
        return s;
    }
    SolveReport rep = use_dense ? dense_solve(g.reduced) : cg_solve(g.reduced, tol);
    s.dofs = g.expand(rep.x);
    s.cg_iterations = rep.iterations;
    s.relative_residual = rep.relative_residual;
    return s;
}

}  // namespace ivem
