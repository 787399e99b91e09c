#include "fblb/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fblb {

std::string to_string(Averaging a) { return a == Averaging::Last ? "last" : "uniform"; }

Averaging averaging_from_string(const std::string& s) {
  if (s == "last") return Averaging::Last;
  if (s == "uniform") return Averaging::Uniform;
  throw InvalidArgument("unknown averaging '" + s + "'");
}

double StepSchedule::at(std::size_t t) const {
  if (decay == Decay::Constant) return eta;
  return eta / std::sqrt(static_cast<double>(std::max<std::size_t>(t, 1)));
}

Point FullBatchAlgorithm::output(std::span<const Point> iterates) const {
  if (iterates.empty()) return Point::Zero(dim_);
  if (averaging_ == Averaging::Last) return iterates.back();
  Point sum = Point::Zero(dim_);
  for (const auto& w : iterates) sum += w;
  return sum / static_cast<double>(iterates.size());
}

namespace {

class ProjectedGd : public FullBatchAlgorithm {
 public:
  ProjectedGd(Eigen::Index dim, StepSchedule eta, Averaging averaging)
      : FullBatchAlgorithm(dim, averaging), eta_(eta) {}

  std::string name() const override { return "projected_gd"; }

  Point next_query(std::span<const Exchange> history, Rng&) override {
    if (history.empty()) return Point::Zero(dim_);
    const auto& last = history.back();
    return project_unit_ball(Point(last.query - eta_.at(history.size()) * last.answer.grad));
  }

 private:
  StepSchedule eta_;
};

class RegularizedGd : public FullBatchAlgorithm {
 public:
  RegularizedGd(Eigen::Index dim, double lambda, StepSchedule eta, RegularizedForm form, Averaging averaging)
      : FullBatchAlgorithm(dim, averaging), lambda_(lambda), eta_(eta), form_(form) {
    if (lambda < 0) throw InvalidArgument("lambda must be non-negative");
  }

  std::string name() const override { return "regularized_gd"; }

  Point next_query(std::span<const Exchange> history, Rng&) override {
    if (history.empty()) return Point::Zero(dim_);
    const auto& last = history.back();
    const double eta = eta_.at(history.size());
    if (form_ == RegularizedForm::AsWritten)
      return project_unit_ball(Point((1.0 - eta) * (2.0 * lambda_) * last.query - eta * last.answer.grad));
    return project_unit_ball(Point((last.query - eta * last.answer.grad) / (1.0 + 2.0 * eta * lambda_)));
  }

 private:
  double lambda_;
  StepSchedule eta_;
  RegularizedForm form_;
};

class NoisyGd : public FullBatchAlgorithm {
 public:
  NoisyGd(Eigen::Index dim, StepSchedule eta, double noise_std, Averaging averaging)
      : FullBatchAlgorithm(dim, averaging), eta_(eta), noise_std_(noise_std) {
    if (noise_std < 0) throw InvalidArgument("noise_std must be non-negative");
  }

  std::string name() const override { return "noisy_gd"; }

  Point next_query(std::span<const Exchange> history, Rng& rng) override {
    if (history.empty()) return Point::Zero(dim_);
    const auto& last = history.back();
    Point next = last.query - eta_.at(history.size()) * last.answer.grad;
    if (noise_std_ > 0) {
      const double scale = noise_std_ / std::sqrt(static_cast<double>(dim_));
      for (Eigen::Index i = 0; i < next.size(); ++i) next(i) += scale * rng.normal();
    }
    return project_unit_ball(next);
  }

 private:
  StepSchedule eta_;
  double noise_std_;
};

class HeavyBall : public FullBatchAlgorithm {
 public:
  HeavyBall(Eigen::Index dim, StepSchedule eta, double momentum, Averaging averaging)
      : FullBatchAlgorithm(dim, averaging), eta_(eta), momentum_(momentum) {
    if (momentum < 0 || momentum >= 1) throw InvalidArgument("momentum must lie in [0, 1)");
  }

  std::string name() const override { return "heavy_ball"; }

  Point next_query(std::span<const Exchange> history, Rng&) override {
    if (history.empty()) return Point::Zero(dim_);
    const auto& last = history.back();
    Point next = last.query - eta_.at(history.size()) * last.answer.grad;
    if (history.size() >= 2) next += momentum_ * (last.query - history[history.size() - 2].query);
    return project_unit_ball(next);
  }

 private:
  StepSchedule eta_;
  double momentum_;
};

class ConstantAlgorithm : public FullBatchAlgorithm {
 public:
  ConstantAlgorithm(Point query, Point out)
      : FullBatchAlgorithm(query.size(), Averaging::Last), query_(std::move(query)), out_(std::move(out)) {}

  std::string name() const override { return "constant"; }
  Point next_query(std::span<const Exchange>, Rng&) override { return query_; }
  Point output(std::span<const Point>) const override { return out_; }

 private:
  Point query_;
  Point out_;
};

}  // namespace

std::unique_ptr<FullBatchAlgorithm> projected_gd(Eigen::Index dim, StepSchedule eta, Averaging averaging) {
  if (eta.eta < 0) throw InvalidArgument("eta must be non-negative");
  return std::make_unique<ProjectedGd>(dim, eta, averaging);
}

std::unique_ptr<FullBatchAlgorithm> regularized_gd(Eigen::Index dim, double lambda, StepSchedule eta,
                                                   RegularizedForm form, Averaging averaging) {
  return std::make_unique<RegularizedGd>(dim, lambda, eta, form, averaging);
}

std::unique_ptr<FullBatchAlgorithm> noisy_gd(Eigen::Index dim, StepSchedule eta, double noise_std,
                                             Averaging averaging) {
  return std::make_unique<NoisyGd>(dim, eta, noise_std, averaging);
}

std::unique_ptr<FullBatchAlgorithm> heavy_ball(Eigen::Index dim, StepSchedule eta, double momentum,
                                               Averaging averaging) {
  return std::make_unique<HeavyBall>(dim, eta, momentum, averaging);
}

std::unique_ptr<FullBatchAlgorithm> constant_algorithm(Point query, Point output) {
  if (query.size() != output.size()) throw InvalidArgument("query and output dimensions differ");
  return std::make_unique<ConstantAlgorithm>(std::move(query), std::move(output));
}

Trajectory run_full_batch(FullBatchAlgorithm& alg, const OracleFn& oracle, std::size_t T, Rng& rng) {
  if (T < 1) throw InvalidArgument("T must be at least 1");
  Trajectory tr;
  std::vector<Exchange> history;
  history.reserve(T);
  auto admissible = [&](Point w) {
    if (w.size() != alg.dim()) throw InvalidArgument("algorithm produced a query of the wrong dimension");
    if (!(w.norm() <= 1.0 + kDomainTolerance)) {
      ++tr.domain_violations;
      w = project_unit_ball(w);
    }
    return w;
  };
  for (std::size_t t = 0; t < T; ++t) {
    Point w = admissible(alg.next_query(history, rng));
    OracleAnswer a = oracle(w);
    ++tr.oracle_calls;
    if (t > 0) tr.iterates.push_back(w);
    tr.queries.push_back(w);
    tr.answers.push_back(a);
    history.push_back({std::move(w), std::move(a)});
  }
  tr.iterates.push_back(admissible(alg.next_query(history, rng)));
  tr.output = alg.output(tr.iterates);
  return tr;
}

Trajectory sgd(StepSchedule eta, const Sample& s, Rng& rng, Averaging averaging) {
  const auto& p = s.params;
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng.engine());

  Trajectory tr;
  Point w = Point::Zero(p.dim());
  for (std::size_t t = 0; t < order.size(); ++t) {
    OracleAnswer a = sample_oracle(w, s.points[order[t]], p);
    ++tr.oracle_calls;
    tr.queries.push_back(w);
    w = project_unit_ball(Point(w - eta.at(t + 1) * a.grad));
    tr.answers.push_back(std::move(a));
    tr.iterates.push_back(w);
  }
  if (tr.iterates.empty()) {
    tr.output = w;
  } else if (averaging == Averaging::Last) {
    tr.output = tr.iterates.back();
  } else {
    Point sum = Point::Zero(p.dim());
    for (const auto& x : tr.iterates) sum += x;
    tr.output = sum / static_cast<double>(tr.iterates.size());
  }
  return tr;
}

}  // namespace fblb
