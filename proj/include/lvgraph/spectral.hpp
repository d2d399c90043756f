#pragma once

#include "lvgraph/graph.hpp"

namespace lvg {

/// Smallest Dirichlet eigenvalue of -Delta on the interior and its Perron
/// vector. phi has one entry per graph vertex: positive on the interior with
/// max 1, zero elsewhere.
struct EigenPair {
  double lambda0 = 0.0;
  Field phi;
  double residual = 0.0;  // sup over interior of |-Delta phi - lambda0 phi|
  int iterations = 0;
};

/// Dense interior block of -Delta (rows and columns ordered as
/// partition.interior()), with boundary values taken as 0.
Eigen::MatrixXd dirichlet_operator(const WeightedGraph& graph, Species species,
                                   const DomainPartition& partition);

/// Inverse power iteration on the mu-symmetrized interior operator.
/// Errors: NoConvergence (10000 iterations), EmptyBoundary, PositivityViolated
/// (eigenvector changes sign, e.g. a disconnected interior with a degenerate
/// bottom eigenvalue).
EigenPair smallest_dirichlet_eigenpair(const WeightedGraph& graph, Species species,
                                       const DomainPartition& partition, double tol = 1e-12);

}  // namespace lvg
