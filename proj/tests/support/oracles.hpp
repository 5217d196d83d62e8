#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the code under test beyond plain evaluation hooks passed in as lambdas.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// M_π built entry by entry from the (h, j) double index.
Eigen::MatrixXd m_pi_bruteforce(const Eigen::MatrixXd& C, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                const std::vector<int>& dims);

// Central finite-difference gradient.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                            double h = 1e-6);

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14);

// Ordinary least squares via the normal equations.
Eigen::VectorXd ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Kolmogorov–Smirnov distance of a sample to a continuous cdf.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

// Test-side generators (hand rolled, independent of the library RNG).
struct Gen {
  explicit Gen(std::uint64_t seed) : eng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  Eigen::VectorXd vec(int n, double lo = -2, double hi = 2) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }
  std::vector<int> partition(int k, int max_block) {
    std::vector<int> d(k);
    for (auto& x : d) x = integer(1, max_block);
    return d;
  }
  std::mt19937_64 eng;
};

// GEVD Fisher information at σ=1 from 40-digit quadrature of the score
// outer product (mpmath), entries (I11, I12, I22).
struct FrozenGevd {
  double xi, i11, i12, i22;
};
extern const FrozenGevd kFrozenGevd[5];

}  // namespace oracle
