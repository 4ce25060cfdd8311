#ifndef FOLEVAL_ANALYSIS_TSNE_HPP
#define FOLEVAL_ANALYSIS_TSNE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "foleval/errors.hpp"

namespace foleval::analysis {

struct EmbeddingSet {
  std::vector<std::vector<double>> points;  // N x d
  std::vector<std::string> labels;          // raw | logic | full_prompt
};

struct Projection {
  std::vector<std::array<double, 2>> coords;  // N x 2
  std::vector<double> kl_history;             // recorded every 10 iterations
  uint64_t seed = 0;
};

namespace detail {

inline std::vector<double> pairwise_sq_dists(const std::vector<std::vector<double>>& x) {
  size_t n = x.size();
  std::vector<double> d(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      double s = 0;
      for (size_t k = 0; k < x[i].size(); ++k) {
        double diff = x[i][k] - x[j][k];
        s += diff * diff;
      }
      d[i * n + j] = d[j * n + i] = s;
    }
  }
  return d;
}

// Per-point Gaussian bandwidth found by bisection on the precision beta so
// that the conditional distribution's perplexity matches the target.
inline void conditional_affinities(const std::vector<double>& d2, size_t n,
                                   double perplexity, std::vector<double>& p) {
  const double target_entropy = std::log(perplexity);
  const double tol = 1e-5;
  p.assign(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double beta = 1.0, beta_min = 0.0, beta_max = INFINITY;
    double entropy = 0.0;
    for (int step = 0; step < 50; ++step) {
      double sum = 0.0;
      for (size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double v = std::exp(-beta * d2[i * n + j]);
        p[i * n + j] = v;
        sum += v;
      }
      if (sum <= 0.0) {
        throw Error(Errc::degenerate_input,
                    "point " + std::to_string(i) + " has no finite-distance neighbors");
      }
      // H = log(sum) + beta * <d2> under the conditional distribution
      double weighted = 0.0;
      for (size_t j = 0; j < n; ++j) {
        if (j != i) weighted += d2[i * n + j] * p[i * n + j];
      }
      entropy = std::log(sum) + beta * weighted / sum;
      for (size_t j = 0; j < n; ++j) {
        if (j != i) p[i * n + j] /= sum;
      }
      if (std::abs(entropy - target_entropy) < tol) break;
      if (entropy > target_entropy) {
        beta_min = beta;
        beta = std::isinf(beta_max) ? beta * 2.0 : (beta + beta_max) / 2.0;
      } else {
        beta_max = beta;
        beta = (beta + beta_min) / 2.0;
      }
    }
  }
}

// Cyclic Jacobi eigensolver for a symmetric matrix; returns eigenvalues and
// column eigenvectors, deterministically.
inline void jacobi_eigen(std::vector<double> a, size_t d, std::vector<double>& eigvals,
                         std::vector<double>& eigvecs) {
  eigvecs.assign(d * d, 0.0);
  for (size_t i = 0; i < d; ++i) eigvecs[i * d + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (size_t p = 0; p < d; ++p)
      for (size_t q = p + 1; q < d; ++q) off += a[p * d + q] * a[p * d + q];
    if (off < 1e-24) break;
    for (size_t p = 0; p < d; ++p) {
      for (size_t q = p + 1; q < d; ++q) {
        double apq = a[p * d + q];
        if (std::abs(apq) < 1e-300) continue;
        double theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (size_t k = 0; k < d; ++k) {
          double akp = a[k * d + p], akq = a[k * d + q];
          a[k * d + p] = c * akp - s * akq;
          a[k * d + q] = s * akp + c * akq;
        }
        for (size_t k = 0; k < d; ++k) {
          double apk = a[p * d + k], aqk = a[q * d + k];
          a[p * d + k] = c * apk - s * aqk;
          a[q * d + k] = s * apk + c * aqk;
        }
        for (size_t k = 0; k < d; ++k) {
          double vkp = eigvecs[k * d + p], vkq = eigvecs[k * d + q];
          eigvecs[k * d + p] = c * vkp - s * vkq;
          eigvecs[k * d + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  eigvals.resize(d);
  for (size_t i = 0; i < d; ++i) eigvals[i] = a[i * d + i];
}

// First two principal components, scaled to 1e-4 standard deviation.
inline std::vector<std::array<double, 2>> pca_init(const std::vector<std::vector<double>>& x) {
  size_t n = x.size(), d = x[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& row : x)
    for (size_t k = 0; k < d; ++k) mean[k] += row[k];
  for (double& m : mean) m /= static_cast<double>(n);

  std::vector<double> cov(d * d, 0.0);
  for (const auto& row : x) {
    for (size_t a = 0; a < d; ++a) {
      double ca = row[a] - mean[a];
      for (size_t b = a; b < d; ++b) {
        cov[a * d + b] += ca * (row[b] - mean[b]);
      }
    }
  }
  for (size_t a = 0; a < d; ++a)
    for (size_t b = a; b < d; ++b) {
      cov[a * d + b] /= static_cast<double>(n - 1);
      cov[b * d + a] = cov[a * d + b];
    }

  std::vector<double> eigvals, eigvecs;
  jacobi_eigen(cov, d, eigvals, eigvecs);

  // top two eigenvalues
  size_t i1 = 0, i2 = d > 1 ? 1 : 0;
  if (eigvals[i2] > eigvals[i1]) std::swap(i1, i2);
  for (size_t i = 2; i < d; ++i) {
    if (eigvals[i] > eigvals[i1]) {
      i2 = i1;
      i1 = i;
    } else if (eigvals[i] > eigvals[i2]) {
      i2 = i;
    }
  }

  // deterministic sign: largest-magnitude component of each axis positive
  auto axis = [&](size_t col) {
    std::vector<double> v(d);
    for (size_t k = 0; k < d; ++k) v[k] = eigvecs[k * d + col];
    size_t arg = 0;
    for (size_t k = 1; k < d; ++k)
      if (std::abs(v[k]) > std::abs(v[arg])) arg = k;
    if (v[arg] < 0)
      for (double& c : v) c = -c;
    return v;
  };
  std::vector<double> v1 = axis(i1), v2 = axis(i2);

  std::vector<std::array<double, 2>> y(n);
  for (size_t i = 0; i < n; ++i) {
    double a = 0, b = 0;
    for (size_t k = 0; k < d; ++k) {
      a += (x[i][k] - mean[k]) * v1[k];
      b += (x[i][k] - mean[k]) * v2[k];
    }
    y[i] = {a, b};
  }
  double var = 0.0;
  for (const auto& p : y) var += p[0] * p[0] + p[1] * p[1];
  double std_dev = std::sqrt(var / static_cast<double>(2 * n));
  double scale = std_dev > 0 ? 1e-4 / std_dev : 0.0;
  for (auto& p : y) {
    p[0] *= scale;
    p[1] *= scale;
  }
  return y;
}

}  // namespace detail

// Exact (non-approximate) t-SNE with PCA initialization, early exaggeration
// 12 for the first 250 iterations, momentum 0.5 switching to 0.8 at iteration
// 250, learning rate 200, and KL divergence recorded every 10 iterations.
inline Projection tsne(const std::vector<std::vector<double>>& points, double perplexity,
                       int iters, uint64_t seed) {
  size_t n = points.size();
  if (n < 5) throw Error(Errc::degenerate_input, "need at least 5 points");
  for (const auto& row : points) {
    if (row.size() != points[0].size()) {
      throw Error(Errc::degenerate_input, "ragged point matrix");
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw Error(Errc::degenerate_input, "non-finite input");
    }
  }
  if (!(perplexity > 1.0 && perplexity < static_cast<double>(n) / 3.0)) {
    throw Error(Errc::perplexity_out_of_range,
                "perplexity must satisfy 1 < p < N/3 (N = " + std::to_string(n) + ")");
  }
  if (iters < 300) throw Error(Errc::perplexity_out_of_range, "iters must be >= 300");

  std::vector<double> d2 = detail::pairwise_sq_dists(points);
  double max_d2 = 0.0;
  for (double v : d2) max_d2 = std::max(max_d2, v);
  if (max_d2 == 0.0) throw Error(Errc::degenerate_input, "all points identical");

  std::vector<double> cond;
  detail::conditional_affinities(d2, n, perplexity, cond);

  // symmetrize: p_ij = (p_j|i + p_i|j) / 2N, floored
  std::vector<double> P(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      P[i * n + j] = std::max((cond[i * n + j] + cond[j * n + i]) /
                                  (2.0 * static_cast<double>(n)),
                              1e-12);
    }
  }

  Projection proj;
  proj.seed = seed;
  proj.coords = detail::pca_init(points);

  const double learning_rate = 200.0;
  const int exaggeration_end = 250;
  const double exaggeration = 12.0;

  std::vector<std::array<double, 2>> velocity(n, {0.0, 0.0});
  std::vector<std::array<double, 2>> gains(n, {1.0, 1.0});
  std::vector<double> qnum(n * n, 0.0);

  for (int iter = 1; iter <= iters; ++iter) {
    double ex = iter <= exaggeration_end ? exaggeration : 1.0;
    double momentum = iter <= exaggeration_end ? 0.5 : 0.8;

    // student-t kernel, unnormalized, plus the normalizer
    double qsum = 0.0;
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        double dx = proj.coords[i][0] - proj.coords[j][0];
        double dy = proj.coords[i][1] - proj.coords[j][1];
        double v = 1.0 / (1.0 + dx * dx + dy * dy);
        qnum[i * n + j] = qnum[j * n + i] = v;
        qsum += 2.0 * v;
      }
    }

    // all gradients from the same snapshot, then one update pass
    std::vector<std::array<double, 2>> grad(n, {0.0, 0.0});
    for (size_t i = 0; i < n; ++i) {
      double gx = 0.0, gy = 0.0;
      for (size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double q = std::max(qnum[i * n + j] / qsum, 1e-12);
        double mult = (ex * P[i * n + j] - q) * qnum[i * n + j];
        gx += mult * (proj.coords[i][0] - proj.coords[j][0]);
        gy += mult * (proj.coords[i][1] - proj.coords[j][1]);
      }
      grad[i] = {4.0 * gx, 4.0 * gy};
    }
    for (size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 2; ++c) {
        double g = grad[i][c];
        gains[i][c] = (g > 0) == (velocity[i][c] > 0) ? gains[i][c] * 0.8
                                                      : gains[i][c] + 0.2;
        gains[i][c] = std::max(gains[i][c], 0.01);
        velocity[i][c] = momentum * velocity[i][c] - learning_rate * gains[i][c] * g;
        proj.coords[i][c] += velocity[i][c];
      }
    }

    // re-center
    double mx = 0, my = 0;
    for (const auto& p : proj.coords) {
      mx += p[0];
      my += p[1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (auto& p : proj.coords) {
      p[0] -= mx;
      p[1] -= my;
    }

    if (iter % 10 == 0) {
      double kl = 0.0;
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          double q = std::max(qnum[i * n + j] / qsum, 1e-12);
          kl += P[i * n + j] * std::log(P[i * n + j] / q);
        }
      }
      proj.kl_history.push_back(kl);
    }
  }
  return proj;
}

}  // namespace foleval::analysis

#endif  // FOLEVAL_ANALYSIS_TSNE_HPP
