#include "asketch/estimators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "asketch/rng.hpp"

namespace asketch {

namespace {

void check_measurement_set(const MeasurementSet& ms, const char* where) {
  const Eigen::Index count = ms.count();
  if (count < 1) throw std::invalid_argument(std::string(where) + ": empty measurement set");
  const Eigen::Index m = ms.sketches.matrices.front().rows();
  const Eigen::Index k = ms.sketches.matrices.front().cols();
  if (k < 1 || k > m) throw std::invalid_argument(std::string(where) + ": sketches must be m x k with 1 <= k <= m");
  for (const Matrix& e : ms.sketches.matrices) {
    if (e.rows() != m || e.cols() != k) {
      throw std::invalid_argument(std::string(where) + ": sketch shapes are inconsistent");
    }
  }
  if (ms.measurements.rows() != k || ms.measurements.cols() != count) {
    throw std::invalid_argument(std::string(where) + ": measurements must be k x M");
  }
  if (!ms.measurements.allFinite()) {
    throw std::invalid_argument(std::string(where) + ": measurements contain non-finite values");
  }
}

}  // namespace

void apply_sign_convention(Matrix& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Eigen::Index imax = 0;
    columns.col(j).cwiseAbs().maxCoeff(&imax);  // first index on ties
    if (columns(imax, j) < 0.0) columns.col(j) = -columns.col(j);
  }
}

EigenDecomposition sym_eig(const Matrix& c) {
  if (c.rows() != c.cols() || c.rows() < 1) throw std::invalid_argument("sym_eig: matrix must be square");
  if (!c.allFinite()) throw std::invalid_argument("sym_eig: matrix has non-finite entries");

  const Matrix sym = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw numerical_error("sym_eig: eigendecomposition failed to converge");

  // Eigen sorts ascending; flip to descending.
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  apply_sign_convention(out.eigenvectors);
  return out;
}

EigenDecomposition estimate_c_monte_carlo(const Matrix& gradients) {
  if (gradients.rows() < 1 || gradients.cols() < 1) {
    throw std::invalid_argument("estimate_c_monte_carlo: gradient matrix is empty");
  }
  if (!gradients.allFinite()) {
    throw std::invalid_argument("estimate_c_monte_carlo: gradients contain non-finite values");
  }
  const Eigen::Index m = gradients.rows();
  Matrix c = Matrix::Zero(m, m);
  c.selfadjointView<Eigen::Lower>().rankUpdate(gradients, 1.0 / static_cast<double>(gradients.cols()));
  const Matrix full = c.selfadjointView<Eigen::Lower>();
  return sym_eig(full);
}

SketchSet draw_sketches(Eigen::Index m, Eigen::Index k, Eigen::Index count, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("draw_sketches: m must be >= 1");
  if (k < 1 || k > m) throw std::invalid_argument("draw_sketches: need 1 <= k <= m");
  if (count < 1) throw std::invalid_argument("draw_sketches: count must be >= 1");

  SketchSet out;
  out.seed = seed;
  out.matrices.reserve(static_cast<std::size_t>(count));
  std::mt19937_64 gen(seed);
  for (Eigen::Index i = 0; i < count; ++i) {
    out.matrices.push_back(gaussian_matrix(gen, m, k));
  }
  return out;
}

Vector project_measurement(const Matrix& sketch, const Vector& m_vec) {
  if (sketch.rows() < sketch.cols() || sketch.cols() < 1) {
    throw std::invalid_argument("project_measurement: sketch must be m x k with k <= m");
  }
  if (m_vec.size() != sketch.cols()) {
    throw std::invalid_argument("project_measurement: measurement length must equal sketch columns");
  }
  const Matrix gram = sketch.transpose() * sketch;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw numerical_error("project_measurement: sketch Gram matrix is numerically singular");
  }
  Vector out = sketch * llt.solve(m_vec);
  if (!out.allFinite()) {
    throw numerical_error("project_measurement: projection produced non-finite values");
  }
  return out;
}

EigenDecomposition estimate_c_projection(const MeasurementSet& ms) {
  check_measurement_set(ms, "estimate_c_projection");
  const Eigen::Index m = ms.dim();
  const Eigen::Index count = ms.count();

  Matrix projected(m, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    projected.col(i) = project_measurement(ms.sketches.matrices[static_cast<std::size_t>(i)],
                                           ms.measurements.col(i));
  }
  Matrix c = Matrix::Zero(m, m);
  c.selfadjointView<Eigen::Lower>().rankUpdate(projected, 1.0 / static_cast<double>(count));
  const Matrix full = c.selfadjointView<Eigen::Lower>();
  return sym_eig(full);
}

Matrix als_init(const EigenDecomposition& cp, Eigen::Index rank) {
  const Eigen::Index m = cp.eigenvectors.rows();
  if (rank < 1 || rank > m) throw std::invalid_argument("als_init: need 1 <= rank <= m");
  if (cp.eigenvalues.size() < rank) throw std::invalid_argument("als_init: decomposition has too few eigenvalues");

  Matrix a0(m, rank);
  for (Eigen::Index j = 0; j < rank; ++j) {
    const double lambda = std::max(cp.eigenvalues[j], 0.0);  // clamp round-off negatives
    a0.col(j) = std::sqrt(lambda) * cp.eigenvectors.col(j);
  }
  return a0;
}

AlsResult als_fit(const MeasurementSet& ms, const AlsConfig& cfg, const Matrix& a0) {
  check_measurement_set(ms, "als_fit");
  const Eigen::Index m = ms.dim();
  const Eigen::Index k = ms.measurements_per_sample();
  const Eigen::Index count = ms.count();
  const Eigen::Index r = cfg.rank;

  if (r < 1) throw std::invalid_argument("als_fit: rank must be >= 1");
  if (r > k) {
    throw std::invalid_argument("als_fit: rank must not exceed the number of measurements per sample");
  }
  if (r > std::min(m, count)) {
    throw std::invalid_argument("als_fit: rank must not exceed min(m, M)");
  }
  if (cfg.max_iterations < 1) throw std::invalid_argument("als_fit: max_iterations must be >= 1");
  if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("als_fit: tolerance must be > 0");
  if (cfg.ridge < 0.0) throw std::invalid_argument("als_fit: ridge must be >= 0");
  if (a0.rows() != m || a0.cols() != r) throw std::invalid_argument("als_fit: initial factor must be m x rank");
  if (!a0.allFinite()) throw std::invalid_argument("als_fit: initial factor has non-finite entries");

  // Per-sample precomputations that are constant across iterations:
  //   F.col(i)  = vec(E_i E_i')   (m^2 x M), so the normal-equation blocks for
  //               every A-step come from a single GEMM F * W below;
  //   em.col(i) = E_i m_i         (m x M), the right-hand-side ingredients.
  Matrix f(m * m, count);
  Matrix em(m, count);
  Matrix ee(m, m);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Matrix& e = ms.sketches.matrices[static_cast<std::size_t>(i)];
    ee.noalias() = e * e.transpose();
    f.col(i) = Eigen::Map<const Vector>(ee.data(), m * m);
    em.col(i).noalias() = e * ms.measurements.col(i);
  }

  const double data_norm = ms.measurements.norm();
  const double stop_tol = cfg.tolerance * std::max(data_norm, std::numeric_limits<double>::min());

  Matrix a = a0;
  Matrix b = Matrix::Zero(count, r);
  Matrix b_cand(count, r);
  std::vector<Matrix> g(static_cast<std::size_t>(count));       // g[i] = E_i' A for the held A
  std::vector<Matrix> g_cand(static_cast<std::size_t>(count));  // same, for a candidate A

  auto refresh_g = [&](std::vector<Matrix>& dst, const Matrix& factor) {
    for (Eigen::Index i = 0; i < count; ++i) {
      dst[static_cast<std::size_t>(i)].noalias() =
          ms.sketches.matrices[static_cast<std::size_t>(i)].transpose() * factor;
    }
  };
  auto misfit = [&](const std::vector<Matrix>& gg, const Matrix& bb) {
    double sq = 0.0;
    for (Eigen::Index i = 0; i < count; ++i) {
      sq += (ms.measurements.col(i) - gg[static_cast<std::size_t>(i)] * bb.row(i).transpose()).squaredNorm();
    }
    return std::sqrt(sq);
  };

  refresh_g(g, a);

  const Eigen::Index npairs = r * (r + 1) / 2;
  Matrix w(count, npairs);
  Matrix h(m * r, m * r);
  Matrix rhs_mat(m, r);

  AlsResult out;
  out.trace.reserve(2 * static_cast<std::size_t>(cfg.max_iterations));
  double prev = std::numeric_limits<double>::infinity();

  // Each half-step solves its block subproblem exactly, so in exact arithmetic
  // the objective never increases.  Near the round-off floor (e.g. the k = r
  // interpolation regime) a recomputed solution can drift upward by solver
  // noise, so a candidate factor is kept only when it does not increase its
  // subproblem objective; otherwise the held iterate stands.
  double held = std::numeric_limits<double>::infinity();  // misfit of the held (a, b)

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    // B-step: per-sample minimum-norm least squares (handles rank-deficient
    // E_i'A, e.g. zero columns inherited from a zero eigenvalue in the init).
    for (Eigen::Index i = 0; i < count; ++i) {
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(g[static_cast<std::size_t>(i)]);
      b_cand.row(i) = cod.solve(ms.measurements.col(i)).transpose();
    }
    if (const double cand = misfit(g, b_cand); cand <= held) {
      b.swap(b_cand);
      held = cand;
    }
    out.trace.push_back(held);

    // A-step: solve sum_i (b_i b_i' (x) E_i E_i') vec(A) = vec(sum_i E_i m_i b_i').
    // The (p,q) block of the system matrix is sum_i b_ip b_iq E_i E_i', i.e.
    // column pair(p,q) of F * W reshaped to m x m.
    {
      Eigen::Index pair = 0;
      for (Eigen::Index q = 0; q < r; ++q) {
        for (Eigen::Index p = 0; p <= q; ++p) {
          w.col(pair++) = b.col(p).cwiseProduct(b.col(q));
        }
      }
    }
    const Matrix hcols = f * w;
    {
      Eigen::Index pair = 0;
      for (Eigen::Index q = 0; q < r; ++q) {
        for (Eigen::Index p = 0; p <= q; ++p) {
          const auto block = Eigen::Map<const Matrix>(hcols.col(pair++).data(), m, m);
          h.block(p * m, q * m, m, m) = block;
          if (p != q) h.block(q * m, p * m, m, m) = block;
        }
      }
    }
    if (cfg.ridge > 0.0) h.diagonal().array() += cfg.ridge;

    rhs_mat.noalias() = em * b;
    const auto rhs = Eigen::Map<const Vector>(rhs_mat.data(), m * r);

    Eigen::LLT<Matrix> llt(h);
    Vector vec_a;
    if (llt.info() == Eigen::Success) {
      vec_a = llt.solve(rhs);
    } else {
      vec_a = Eigen::LDLT<Matrix>(h).solve(rhs);
    }
    const double residual = (h.selfadjointView<Eigen::Lower>() * vec_a - rhs).norm();
    const double scale = h.norm() * vec_a.norm() + rhs.norm();
    if (!vec_a.allFinite() || !(residual <= 1e-6 * scale + 1e-300)) {
      throw numerical_error(
          "als_fit: A-step normal equations are numerically singular; "
          "set AlsConfig.ridge > 0 to regularize");
    }
    const Matrix a_cand = Eigen::Map<const Matrix>(vec_a.data(), m, r);
    refresh_g(g_cand, a_cand);
    // With ridge > 0 the A-step minimizes misfit^2 + ridge*|A|_F^2, so the
    // acceptance test compares that quantity; the trace records the raw misfit
    // either way.
    const double cand = misfit(g_cand, b);
    const bool accept =
        cfg.ridge > 0.0
            ? cand * cand + cfg.ridge * a_cand.squaredNorm() <= held * held + cfg.ridge * a.squaredNorm()
            : cand <= held;
    if (accept) {
      a = a_cand;
      g.swap(g_cand);
      held = cand;
    }
    out.trace.push_back(held);
    out.iterations = iter;

    const double cur = out.trace.back();
    if (iter >= 2 && std::abs(prev - cur) <= stop_tol) {
      out.converged = true;
      break;
    }
    prev = cur;
  }

  out.factors.A = std::move(a);
  out.factors.B = std::move(b);
  return out;
}

SubspaceResult subspace_from_factors(const LowRankFactors& factors, Eigen::Index n) {
  const Eigen::Index m = factors.A.rows();
  const Eigen::Index r = factors.A.cols();
  if (r < 1 || factors.B.cols() != r) {
    throw std::invalid_argument("subspace_from_factors: factors must share rank r >= 1");
  }
  if (factors.B.rows() < r) {
    throw std::invalid_argument("subspace_from_factors: need at least r samples in B");
  }
  if (n < 1 || n > r) throw std::invalid_argument("subspace_from_factors: need 1 <= n <= rank");
  if (!factors.A.allFinite() || !factors.B.allFinite()) {
    throw std::invalid_argument("subspace_from_factors: factors contain non-finite values");
  }

  // Left singular vectors of A B' without forming the m x M product:
  // B = Q R  =>  A B' = (A R') Q', so svd(A R') supplies U and the singular values.
  Eigen::HouseholderQR<Matrix> qr(factors.B);
  const Matrix rfac = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const Matrix t = factors.A * rfac.transpose();
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeThinU);
  Matrix u = svd.matrixU();
  apply_sign_convention(u);

  SubspaceResult out;
  out.basis = u.leftCols(n);
  out.singular_values = svd.singularValues();
  return out;
}

}  // namespace asketch
