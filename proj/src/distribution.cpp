#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "biobench/metrics.hpp"

namespace biobench::metrics {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<FeatureVector>& set) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(set.size()), FeatureVector::kDims);
  for (std::size_t i = 0; i < set.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = set[i].as_vector().transpose();
  }
  return m;
}

}  // namespace

double jsd_features(const std::vector<FeatureVector>& real,
                    const std::vector<FeatureVector>& gen,
                    const HistogramSpec& spec) {
  if (real.empty() || gen.empty()) {
    throw std::invalid_argument("feature sets must be non-empty");
  }
  if (spec.bins_per_dim < 2) {
    throw std::invalid_argument("bins_per_dim must be >= 2");
  }
  const Eigen::MatrixXd a = to_matrix(real);
  const Eigen::MatrixXd b = to_matrix(gen);
  const int bins = spec.bins_per_dim;

  double total = 0.0;
  for (int d = 0; d < FeatureVector::kDims; ++d) {
    const double lo = std::min(a.col(d).minCoeff(), b.col(d).minCoeff());
    const double hi = std::max(a.col(d).maxCoeff(), b.col(d).maxCoeff());
    if (!(hi > lo)) {
      continue;  // degenerate dimension: identical point masses, JSD 0
    }
    const double width = (hi - lo) / bins;
    std::vector<double> p(static_cast<std::size_t>(bins), 0.0);
    std::vector<double> q(static_cast<std::size_t>(bins), 0.0);
    auto bin_of = [&](double v) {
      auto idx = static_cast<long>((v - lo) / width);
      if (idx < 0) idx = 0;
      if (idx >= bins) idx = bins - 1;
      return static_cast<std::size_t>(idx);
    };
    for (Eigen::Index i = 0; i < a.rows(); ++i) p[bin_of(a(i, d))] += 1.0;
    for (Eigen::Index i = 0; i < b.rows(); ++i) q[bin_of(b(i, d))] += 1.0;
    for (double& v : p) v /= static_cast<double>(a.rows());
    for (double& v : q) v /= static_cast<double>(b.rows());

    double jsd_d = 0.0;
    for (int i = 0; i < bins; ++i) {
      const double pi = p[static_cast<std::size_t>(i)];
      const double qi = q[static_cast<std::size_t>(i)];
      const double m = 0.5 * (pi + qi);
      // One combined term per bin keeps jsd(A,B) and jsd(B,A)
      // bit-identical (addition is commutative, not associative).
      double term = 0.0;
      if (pi > 0.0) term += 0.5 * pi * std::log2(pi / m);
      if (qi > 0.0) term += 0.5 * qi * std::log2(qi / m);
      jsd_d += term;
    }
    total += jsd_d;
  }
  return total / FeatureVector::kDims;
}

namespace {

// Uniform double in [0, 1) with pinned bit mapping, so results do not
// depend on the standard library's distribution implementation.
double canonical_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard k-means++ seeding followed by Lloyd iterations. Data rows are
// observations; returns the centroid matrix.
Eigen::MatrixXd kmeans_fit(const Eigen::MatrixXd& data, int k,
                           std::uint64_t seed, int max_iters = 100) {
  const Eigen::Index n = data.rows();
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd centroids(k, data.cols());

  const auto first = static_cast<Eigen::Index>(canonical_double(rng) * n);
  centroids.row(0) = data.row(std::min(first, n - 1));
  Eigen::VectorXd dist2 =
      (data.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = canonical_double(rng) * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= dist2[i];
        if (target <= 0.0) {
          pick = i;
          break;
        }
        pick = i;
      }
    } else {
      pick = static_cast<Eigen::Index>(canonical_double(rng) * n);
      pick = std::min(pick, n - 1);
    }
    centroids.row(c) = data.row(pick);
    dist2 = dist2.cwiseMin(
        (data.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (data.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, data.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += data.row(i);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) =
            sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Re-seed an empty cluster with the point farthest from its centroid.
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d =
              (data.row(i) - centroids.row(assign[static_cast<std::size_t>(i)]))
                  .squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centroids.row(c) = data.row(far);
      }
    }
  }
  return centroids;
}

std::vector<Eigen::Index> bin_counts(const Eigen::MatrixXd& data,
                                     const Eigen::MatrixXd& centroids) {
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(centroids.rows()), 0);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (data.row(i) - centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    ++counts[static_cast<std::size_t>(best)];
  }
  return counts;
}

}  // namespace

int ndb(const std::vector<FeatureVector>& real,
        const std::vector<FeatureVector>& gen, int k, double alpha,
        std::uint64_t seed) {
  if (gen.empty()) throw std::invalid_argument("generated set is empty");
  if (static_cast<int>(real.size()) < k) {
    throw std::invalid_argument("real set smaller than bin count");
  }
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in (0, 1)");
  }

  Eigen::MatrixXd a = to_matrix(real);
  Eigen::MatrixXd b = to_matrix(gen);

  // Standardize by the real set so no single feature scale dominates the
  // clustering distance.
  const Eigen::RowVectorXd mean = a.colwise().mean();
  Eigen::RowVectorXd stddev =
      ((a.rowwise() - mean).array().square().colwise().mean()).sqrt();
  stddev = stddev.cwiseMax(1e-12);
  a = (a.rowwise() - mean).array().rowwise() / stddev.array();
  b = (b.rowwise() - mean).array().rowwise() / stddev.array();

  const Eigen::MatrixXd centroids = kmeans_fit(a, k, seed);
  const std::vector<Eigen::Index> real_counts = bin_counts(a, centroids);
  const std::vector<Eigen::Index> gen_counts = bin_counts(b, centroids);

  const auto n1 = static_cast<double>(a.rows());
  const auto n2 = static_cast<double>(b.rows());
  int differing = 0;
  for (int c = 0; c < k; ++c) {
    const double p1 = real_counts[static_cast<std::size_t>(c)] / n1;
    const double p2 = gen_counts[static_cast<std::size_t>(c)] / n2;
    const double pooled = (real_counts[static_cast<std::size_t>(c)] +
                           gen_counts[static_cast<std::size_t>(c)]) /
                          (n1 + n2);
    const double se =
        std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    if (se <= 0.0) continue;  // both proportions 0 or 1: no difference
    const double z = (p1 - p2) / se;
    const double p_value = std::erfc(std::abs(z) / std::sqrt(2.0));
    if (p_value < alpha) ++differing;
  }
  return differing;
}

GaussianFit fit_gaussian(const Eigen::MatrixXd& embeddings) {
  if (embeddings.rows() < 2) {
    throw std::invalid_argument("need at least 2 samples to fit");
  }
  GaussianFit fit;
  fit.mean = embeddings.colwise().mean().transpose();
  const Eigen::MatrixXd centered =
      embeddings.rowwise() - fit.mean.transpose();
  fit.covariance = centered.transpose() * centered /
                   static_cast<double>(embeddings.rows() - 1);
  fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose()).eval();
  return fit;
}

namespace {

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double frechet_distance(const GaussianFit& a, const GaussianFit& b) {
  if (a.mean.size() != b.mean.size() ||
      a.covariance.rows() != b.covariance.rows()) {
    throw std::invalid_argument("dimension mismatch between fits");
  }
  if (!a.mean.allFinite() || !b.mean.allFinite() ||
      !a.covariance.allFinite() || !b.covariance.allFinite()) {
    throw std::invalid_argument("non-finite entries in Gaussian fit");
  }

  const Eigen::MatrixXd sqrt_a = psd_sqrt(a.covariance);
  Eigen::MatrixXd inner = sqrt_a * b.covariance * sqrt_a;
  inner = 0.5 * (inner + inner.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  const double trace_sqrt = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

  const double d = (a.mean - b.mean).squaredNorm() + a.covariance.trace() +
                   b.covariance.trace() - 2.0 * trace_sqrt;
  return std::max(d, 0.0);
}

}  // namespace biobench::metrics
