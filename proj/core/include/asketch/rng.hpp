#pragma once

#include <cstdint>
#include <random>

#include "asketch/common.hpp"

namespace asketch {

// Deterministically derive an independent child seed from a master seed and a
// sequence of labels (problem tag, sketch size, trial index, ...).  Uses
// splitmix64 as the mixing function, so nearby inputs give unrelated streams.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> labels);

// FNV-1a over a string, for turning tags like "quadratic" into seed labels.
std::uint64_t hash_label(const std::string& s);

// m x n matrix of iid N(0,1) draws from a seeded engine.  All randomness in
// the library flows through mt19937_64 engines seeded via derive_seed, so a
// run with a fixed master seed reproduces exactly.
Matrix gaussian_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols);

// m x n matrix of iid U(lo, hi) draws.
Matrix uniform_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols,
                      double lo, double hi);

}  // namespace asketch
