#include "asketch/rng.hpp"

namespace asketch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> labels) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t l : labels) {
    s = splitmix64(s ^ splitmix64(l));
  }
  return s;
}

std::uint64_t hash_label(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a offset basis
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Matrix gaussian_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix out(rows, cols);
  // column-major fill order, part of the reproducibility contract
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      out(i, j) = dist(gen);
    }
  }
  return out;
}

Matrix uniform_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols,
                      double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      out(i, j) = dist(gen);
    }
  }
  return out;
}

}  // namespace asketch
