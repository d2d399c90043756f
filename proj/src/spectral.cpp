#include "lvgraph/spectral.hpp"

#include "lvgraph/error.hpp"

#include <cmath>

namespace lvg {

Eigen::MatrixXd dirichlet_operator(const WeightedGraph& graph, Species species,
                                   const DomainPartition& partition) {
  const auto& in = partition.interior();
  const auto k = static_cast<Eigen::Index>(in.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
  std::vector<Eigen::Index> local(graph.size(), -1);
  for (Eigen::Index i = 0; i < k; ++i) local[in[i]] = i;
  for (Eigen::Index i = 0; i < k; ++i) {
    const std::size_t x = in[i];
    const double mu = graph.measure(species, x);
    for (std::size_t y : graph.neighbors(x)) {
      if (!partition.in_closure(y)) continue;
      const double c = graph.weight(species, x, y) / mu;
      A(i, i) += c;
      if (local[y] >= 0) A(i, local[y]) -= c;
    }
  }
  return A;
}

EigenPair smallest_dirichlet_eigenpair(const WeightedGraph& graph, Species species,
                                       const DomainPartition& partition, double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidProblem, "tolerance must be positive");
  if (partition.boundary().empty()) fail(ErrorCode::EmptyBoundary, "no boundary vertices");
  const auto& in = partition.interior();
  const auto k = static_cast<Eigen::Index>(in.size());

  const Eigen::MatrixXd A = dirichlet_operator(graph, species, partition);
  Eigen::VectorXd root_mu(k);
  for (Eigen::Index i = 0; i < k; ++i) root_mu(i) = std::sqrt(graph.measure(species, in[i]));
  // S = D^{1/2} A D^{-1/2} is symmetric positive definite.
  Eigen::MatrixXd S = root_mu.asDiagonal() * A * root_mu.cwiseInverse().asDiagonal();
  S = 0.5 * (S + S.transpose());
  const Eigen::LLT<Eigen::MatrixXd> chol(S);
  if (chol.info() != Eigen::Success) {
    fail(ErrorCode::NoConvergence, "interior operator is not positive definite");
  }

  auto residual_of = [&](const Eigen::VectorXd& x, double lambda) {
    const Eigen::VectorXd phi = x.cwiseQuotient(root_mu);
    return (A * phi - lambda * phi).cwiseAbs().maxCoeff() / phi.cwiseAbs().maxCoeff();
  };

  constexpr int max_iters = 10000;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(k).normalized();
  double lambda = x.dot(S * x);
  int it = 0;
  for (; it < max_iters; ++it) {
    Eigen::VectorXd y = chol.solve(x);
    y.normalize();
    const double next = y.dot(S * y);
    const bool settled = std::abs(next - lambda) < tol * std::max(1.0, next);
    x = std::move(y);
    lambda = next;
    if (settled && residual_of(x, lambda) <= tol) break;
  }
  if (it == max_iters) {
    fail(ErrorCode::NoConvergence, "inverse iteration did not settle in 10000 steps");
  }

  Eigen::VectorXd phi = x.cwiseQuotient(root_mu);
  Eigen::Index arg = 0;
  phi.cwiseAbs().maxCoeff(&arg);
  if (phi(arg) < 0.0) phi = -phi;
  phi /= phi.maxCoeff();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(phi(i) > 0.0)) {
      fail(ErrorCode::PositivityViolated,
           "eigenvector not positive at '" + graph.name(in[i]) + "'");
    }
  }

  EigenPair out;
  out.lambda0 = lambda;
  out.phi = Field::Zero(static_cast<Eigen::Index>(graph.size()));
  for (Eigen::Index i = 0; i < k; ++i) out.phi(in[i]) = phi(i);
  out.residual = (A * phi - lambda * phi).cwiseAbs().maxCoeff();
  out.iterations = it + 1;
  return out;
}

}  // namespace lvg
