#include "fblb/embed.hpp"

#include <algorithm>
#include <cmath>

namespace fblb {

OrthoEmbedding sample_orthogonal(Eigen::Index dim, Eigen::Index d2, Rng& rng) {
  if (dim < 1) throw InvalidArgument("embedding needs at least one column");
  if (d2 < dim) throw InvalidArgument("d2 must be at least the instance dimension");
  if (static_cast<double>(dim) * static_cast<double>(d2) > kMaxEmbeddingEntries)
    throw InvalidArgument("embedding with " + std::to_string(dim) + "x" + std::to_string(d2) +
                          " entries exceeds the dense storage cap");
  Mat<double> g(d2, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < d2; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat<double>> qr(g);
  OrthoEmbedding e;
  e.U = qr.householderQ() * Mat<double>::Identity(d2, dim);
  const Mat<double>& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j)
    if (r(j, j) < 0) e.U.col(j) *= -1.0;
  return e;
}

OracleAnswer embedded_oracle(const Point& w, const OrthoEmbedding& e, const Sample& s) {
  if (w.size() != e.d2()) throw InvalidArgument("query does not live in the embedding space");
  if (e.dim() != s.params.dim()) throw InvalidArgument("embedding does not match the instance dimension");
  if (!(w.norm() <= 1.0 + kDomainTolerance)) throw DomainViolation("query outside the unit ball");
  OracleAnswer inner = full_batch_oracle(project_unit_ball(Point(e.U.transpose() * w)), s);
  return {e.U * inner.grad, inner.value};
}

double leakage(const Point& w, const OrthoEmbedding& e, const SpanBasis& basis) {
  const Point x = e.U.transpose() * w;
  return (x - project(x, basis)).lpNorm<Eigen::Infinity>();
}

double leakage_bound_stated(Eigen::Index dim, Eigen::Index k, Eigen::Index d2, double c) {
  return 2.0 * static_cast<double>(d2) *
         std::exp(-static_cast<double>(dim) * c * c * static_cast<double>(d2 - k + 1) / 2.0);
}

double leakage_bound_derived(Eigen::Index dim, Eigen::Index k, Eigen::Index d2, double c) {
  return 2.0 * static_cast<double>(d2) *
         std::exp(-c * c * static_cast<double>(d2 - k + 1) / (2.0 * static_cast<double>(dim)));
}

ArbitrationResult arbitration_divergence(const AlgorithmFactory& make, const OrthoEmbedding& e, const Sample& s,
                                         std::size_t T, std::uint64_t algorithm_seed) {
  const SurvivorSet survivors = survivor_set(s);
  if (survivors.size() <= 2 * T)
    throw PreconditionViolated("arbitration needs |I(S)| > 2T, have " + std::to_string(survivors.size()));
  const Point vbar = mean_perturbation(s);
  std::vector<SpanBasis> bases;
  bases.reserve(T);
  for (std::size_t i = 0; i < T; ++i) bases.push_back(build_basis(vbar, s.params, top_survivors(survivors, 2 * i)));

  ArbitrationResult out;
  out.steps = T;

  {
    auto alg = make();
    Rng rng(algorithm_seed);
    out.free_run = run_full_batch(*alg, [&](const Point& w) { return embedded_oracle(w, e, s); }, T, rng);
  }

  std::size_t step = 0;
  auto arbitrated = [&](const Point& w) {
    const Point x = e.U.transpose() * w;
    const SpanBasis& basis = bases[step];
    const Point v = project(x, basis);
    OracleAnswer inner = full_batch_oracle(project_unit_ball(v), s);
    OracleAnswer answer{e.U * inner.grad, inner.value};
    out.max_leakage = std::max(out.max_leakage, (x - v).lpNorm<Eigen::Infinity>());
    if (!same_answer(answer, embedded_oracle(w, e, s))) ++out.divergences;
    ++step;
    return answer;
  };
  {
    auto alg = make();
    Rng rng(algorithm_seed);
    out.projected_run = run_full_batch(*alg, arbitrated, T, rng);
  }

  out.first_split = T;
  for (std::size_t i = 0; i < T; ++i)
    if (!same_answer(out.free_run.answers[i], out.projected_run.answers[i])) {
      out.first_split = i;
      break;
    }
  return out;
}

}  // namespace fblb
