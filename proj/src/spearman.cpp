#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "matchbench/errors.hpp"
#include "matchbench/estimators.hpp"
#include "matchbench/parallel.hpp"
#include "matchbench/rng.hpp"

namespace matchbench {

namespace {

// Sum over i of rank_u(i) * rank_v(i), ranks 1-based with ties averaged.
// Scratch buffers are reused across calls; the previous order seeds the next
// sort, so nearby weight vectors cost little more than a linear pass.
class RankProduct {
 public:
  explicit RankProduct(std::size_t n) : keyed_(n), ranks_(n) {}

  const std::vector<double>& ranks(const VectorXd& values) {
    const std::size_t n = keyed_.size();
    auto less = [](const Keyed& a, const Keyed& b) { return a.value < b.value; };
    if (!warm_) {
      for (std::size_t i = 0; i < n; ++i) keyed_[i] = {values(static_cast<Eigen::Index>(i)), static_cast<std::uint32_t>(i)};
      std::sort(keyed_.begin(), keyed_.end(), less);
      warm_ = true;
    } else {
      for (auto& k : keyed_) k.value = values(static_cast<Eigen::Index>(k.index));
      if (!insertion_sort(4 * n + 64)) std::sort(keyed_.begin(), keyed_.end(), less);
    }
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i + 1;
      while (j < n && keyed_[j].value == keyed_[i].value) ++j;
      const double r = 0.5 * static_cast<double>(i + 1 + j);
      for (std::size_t k = i; k < j; ++k) ranks_[keyed_[k].index] = r;
      i = j;
    }
    return ranks_;
  }

 private:
  struct Keyed {
    double value;
    std::uint32_t index;
  };

  // false once more than budget element moves were needed
  bool insertion_sort(std::size_t budget) {
    std::size_t moves = 0;
    for (std::size_t i = 1; i < keyed_.size(); ++i) {
      if (!(keyed_[i].value < keyed_[i - 1].value)) continue;
      const Keyed item = keyed_[i];
      std::size_t j = i;
      while (j > 0 && item.value < keyed_[j - 1].value) {
        keyed_[j] = keyed_[j - 1];
        --j;
        ++moves;
      }
      keyed_[j] = item;
      if (moves > budget) return false;
    }
    return true;
  }

  std::vector<Keyed> keyed_;
  std::vector<double> ranks_;
  bool warm_ = false;
};

double rank_objective(const std::vector<double>& ru, const std::vector<double>& rv) {
  const double n = static_cast<double>(ru.size());
  double s = 0.0;
  for (std::size_t i = 0; i < ru.size(); ++i) s += ru[i] * rv[i];
  return s / (n * (n + 1.0) * (n + 1.0));
}

void check_weights(const MatchedSample& sample, const VectorXd& alpha, const VectorXd& beta) {
  if (sample.n() < 1) throw ConfigError("spearman objective needs a non-empty sample");
  if (alpha.size() != sample.dx() || beta.size() != sample.dy()) {
    throw ConfigError("spearman objective: weight dimensions do not match the sample");
  }
}

}  // namespace

double spearman_objective(const MatchedSample& sample, const VectorXd& alpha, const VectorXd& beta) {
  check_weights(sample, alpha, beta);
  RankProduct ru(static_cast<std::size_t>(sample.n()));
  RankProduct rv(static_cast<std::size_t>(sample.n()));
  return rank_objective(ru.ranks(sample.xs * alpha), rv.ranks(sample.ys * beta));
}

double spearman_objective_pr_form(const MatchedSample& sample, const VectorXd& alpha, const VectorXd& beta) {
  check_weights(sample, alpha, beta);
  const auto n = static_cast<std::size_t>(sample.n());
  if (n > kMaxPrFormSize) {
    throw ConfigError("spearman_objective_pr_form is quadratic in n; n = " + std::to_string(n) + " exceeds " +
                      std::to_string(kMaxPrFormSize));
  }
  const VectorXd u = sample.xs * alpha;
  const VectorXd v = sample.ys * beta;
  // sum over k of #{i : u_i <= u_k} * #{j : v_j <= v_k} is the triple sum
  // with the i and j indicators factored out.
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double below_u = 0.0, below_v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      below_u += u(static_cast<Eigen::Index>(i)) <= u(static_cast<Eigen::Index>(k)) ? 1.0 : 0.0;
      below_v += v(static_cast<Eigen::Index>(i)) <= v(static_cast<Eigen::Index>(k)) ? 1.0 : 0.0;
    }
    total += below_u * below_v;
  }
  const double nn = static_cast<double>(n);
  return total / (nn * nn * nn);
}

VectorXd sphere_point(const std::vector<double>& angles, Eigen::Index dim) {
  if (static_cast<Eigen::Index>(angles.size()) != dim - 1) {
    throw ConfigError("sphere_point: need dim - 1 angles");
  }
  VectorXd x(dim);
  double carry = 1.0;
  for (Eigen::Index i = 0; i + 1 < dim; ++i) {
    x(i) = carry * std::cos(angles[static_cast<std::size_t>(i)]);
    carry *= std::sin(angles[static_cast<std::size_t>(i)]);
  }
  x(dim - 1) = carry;
  return x;
}

namespace {

struct Candidate {
  VectorXd alpha;
  VectorXd beta;
  double objective = -1.0;
  int evaluations = 0;
};

// Objective over the free angles. The objective is unchanged by flipping
// both weight vectors, so with dy = 1 beta is pinned to +1 (and alpha to +1
// when only beta has free directions).
class SphereProblem {
 public:
  explicit SphereProblem(const MatchedSample& sample)
      : sample_(sample),
        dx_(sample.dx()),
        dy_(sample.dy()),
        alpha_free_(dx_ > 1 || dy_ == 1 ? dx_ - 1 : 0),
        beta_free_(dy_ > 1 ? dy_ - 1 : 0) {}

  std::size_t dimension() const { return static_cast<std::size_t>(alpha_free_ + beta_free_); }

  std::pair<VectorXd, VectorXd> weights(const std::vector<double>& angles) const {
    const std::vector<double> a(angles.begin(), angles.begin() + alpha_free_);
    const std::vector<double> b(angles.begin() + alpha_free_, angles.end());
    VectorXd alpha = dx_ > 1 ? sphere_point(a, dx_) : VectorXd::Ones(1);
    VectorXd beta = dy_ > 1 ? sphere_point(b, dy_) : VectorXd::Ones(1);
    return {std::move(alpha), std::move(beta)};
  }

  const MatchedSample& sample() const { return sample_; }

 private:
  const MatchedSample& sample_;
  Eigen::Index dx_, dy_;
  Eigen::Index alpha_free_, beta_free_;
};

class Evaluator {
 public:
  explicit Evaluator(const MatchedSample& sample)
      : sample_(sample), ru_(static_cast<std::size_t>(sample.n())), rv_(static_cast<std::size_t>(sample.n())) {
    if (sample.dy() == 1) fixed_v_ = rv_.ranks(sample.ys.col(0));
  }

  double operator()(const VectorXd& alpha, const VectorXd& beta) {
    ++count_;
    const auto& ru = ru_.ranks(sample_.xs * alpha);
    if (!fixed_v_.empty() && beta(0) > 0.0) return rank_objective(ru, fixed_v_);
    return rank_objective(ru, rv_.ranks(sample_.ys * beta));
  }

  int count() const { return count_; }

 private:
  const MatchedSample& sample_;
  RankProduct ru_;
  RankProduct rv_;
  std::vector<double> fixed_v_;
  int count_ = 0;
};

// Nelder-Mead maximization on angle coordinates.
Candidate nelder_mead(const SphereProblem& problem, Evaluator& eval, std::vector<double> start,
                      const SpearmanOptions& opt) {
  const std::size_t m = problem.dimension();
  auto f = [&](const std::vector<double>& p) {
    const auto [a, b] = problem.weights(p);
    return -eval(a, b);
  };

  std::vector<std::vector<double>> simplex(m + 1, start);
  for (std::size_t i = 0; i < m; ++i) simplex[i + 1][i] += 0.25;
  std::vector<double> values(m + 1);
  for (std::size_t i = 0; i <= m; ++i) values[i] = f(simplex[i]);
  const int budget = eval.count() + opt.max_evaluations;

  std::vector<std::size_t> order(m + 1);
  while (eval.count() < budget) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[m > 0 ? m - 1 : 0];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= m; ++i)
      for (std::size_t k = 0; k < m; ++k) diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[best][k]));
    if (diameter < opt.simplex_tolerance) break;

    std::vector<double> centroid(m, 0.0);
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < m; ++k) centroid[k] += simplex[i][k] / static_cast<double>(m);
    }
    auto along = [&](double t) {
      std::vector<double> p(m);
      for (std::size_t k = 0; k < m; ++k) p[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
      return p;
    };

    const auto reflected = along(-1.0);
    const double fr = f(reflected);
    if (fr < values[best]) {
      const auto expanded = along(-2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
    } else {
      const bool outside = fr < values[worst];
      const auto contracted = along(outside ? -0.5 : 0.5);
      const double fc = f(contracted);
      if (fc < (outside ? fr : values[worst])) {
        simplex[worst] = contracted;
        values[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= m; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < m; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
          values[i] = f(simplex[i]);
        }
      }
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  auto [a, b] = problem.weights(simplex[best]);
  return {std::move(a), std::move(b), -values[best], 0};
}

Candidate angular_grid(const SphereProblem& problem, Evaluator& eval, double resolution) {
  Candidate best;
  const double two_pi = 2.0 * std::numbers::pi;
  const auto steps = static_cast<long>(std::ceil(two_pi / resolution));
  for (long s = 0; s < steps; ++s) {
    const auto [a, b] = problem.weights({two_pi * static_cast<double>(s) / static_cast<double>(steps)});
    const double v = eval(a, b);
    if (v > best.objective) best = {a, b, v, 0};
  }
  return best;
}

bool same_direction(const VectorXd& a, const VectorXd& b) { return (a - b).norm() < 1e-4; }

nlohmann::json candidate_json(const Candidate& c, const std::string& source) {
  return {{"alpha", std::vector<double>(c.alpha.data(), c.alpha.data() + c.alpha.size())},
          {"beta", std::vector<double>(c.beta.data(), c.beta.data() + c.beta.size())},
          {"objective", c.objective},
          {"source", source}};
}

}  // namespace

EstimatorResult spearman_estimate(const MatchedSample& sample, const SpearmanOptions& opt) {
  if (sample.dx() < 1 || sample.dy() < 1 || sample.n() < 2) {
    throw ConfigError("spearman_estimate needs dx >= 1, dy >= 1 and at least two couples");
  }
  if (opt.restarts < 1) throw ConfigError("spearman_estimate needs at least one restart");
  const SphereProblem problem(sample);
  const std::size_t m = problem.dimension();

  std::vector<Candidate> found;
  std::vector<std::string> sources;
  int evaluations = 0;

  if (m == 0) {
    // dx = dy = 1: only the relative sign is free
    Evaluator eval(sample);
    for (double sign : {1.0, -1.0}) {
      const VectorXd a = VectorXd::Constant(1, sign);
      const VectorXd b = VectorXd::Ones(1);
      found.push_back({a, b, eval(a, b), 0});
      sources.push_back(sign > 0 ? "comonotone" : "antimonotone");
    }
    evaluations = eval.count();
  } else {
    const CounterStream stream(opt.seed);
    std::vector<Candidate> starts(static_cast<std::size_t>(opt.restarts));
    parallel_for(starts.size(), [&](std::size_t r) {
      Evaluator eval(sample);
      const CounterStream s = stream.split(r);
      std::vector<double> angles(m);
      for (std::size_t k = 0; k < m; ++k) angles[k] = 2.0 * std::numbers::pi * s.uniform(k);
      starts[r] = nelder_mead(problem, eval, angles, opt);
      starts[r].evaluations = eval.count();
    });
    for (std::size_t r = 0; r < starts.size(); ++r) {
      evaluations += starts[r].evaluations;
      found.push_back(starts[r]);
      sources.push_back("restart " + std::to_string(r));
    }
    if (opt.angular_grid && sample.dx() == 2 && sample.dy() == 1) {
      Evaluator eval(sample);
      Candidate g = angular_grid(problem, eval, opt.grid_resolution);
      // polish the grid winner with a local search started on it
      const double theta = std::atan2(g.alpha(1), g.alpha(0));
      SpearmanOptions polish = opt;
      Candidate refined = nelder_mead(problem, eval, {theta}, polish);
      found.push_back(g);
      sources.push_back("angular grid");
      found.push_back(refined);
      sources.push_back("angular grid polish");
      evaluations += eval.count();
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < found.size(); ++i) {
    if (found[i].objective > found[best].objective) best = i;
  }

  nlohmann::json optima = nlohmann::json::array();
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < found.size(); ++i) {
    bool duplicate = false;
    for (std::size_t k : kept) {
      if (same_direction(found[i].alpha, found[k].alpha) && same_direction(found[i].beta, found[k].beta)) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    kept.push_back(i);
    optima.push_back(candidate_json(found[i], sources[i]));
  }

  EstimatorResult r;
  r.method = Method::spearman;
  r.alpha = normalize_weights(found[best].alpha);
  r.beta = normalize_weights(found[best].beta);
  r.objective = found[best].objective;
  r.diagnostics["restarts"] = opt.restarts;
  r.diagnostics["evaluations"] = evaluations;
  r.diagnostics["best_source"] = sources[best];
  r.diagnostics["alpha_raw"] = std::vector<double>(found[best].alpha.data(), found[best].alpha.data() + found[best].alpha.size());
  r.diagnostics["beta_raw"] = std::vector<double>(found[best].beta.data(), found[best].beta.data() + found[best].beta.size());
  r.diagnostics["local_optima"] = optima;
  const double n = static_cast<double>(sample.n());
  r.diagnostics["finite_sample_max"] = (2.0 * n + 1.0) / (6.0 * (n + 1.0));
  return r;
}

}  // namespace matchbench
