#include "asketch/testfns.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <vector>

namespace asketch {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Cell p = iy*N + ix; ix grows to the right, iy upward.  Dirichlet edges are
// left (ix=0), bottom (iy=0), top (iy=N-1); the right edge (ix=N-1) is the
// no-flux boundary the quantity of interest averages over.
struct Face {
  Eigen::Index p, q;  // adjacent cells
};

// Flux coefficient of an interior face: harmonic mean of the two cell
// coefficients (face area h over center distance h cancels to 1).
double transmissibility(double ap, double aq) { return 2.0 * ap * aq / (ap + aq); }

SparseMatrix assemble_operator(Eigen::Index n, const Vector& a) {
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(5 * n * n));
  auto cell = [n](Eigen::Index ix, Eigen::Index iy) { return iy * n + ix; };

  for (Eigen::Index iy = 0; iy < n; ++iy) {
    for (Eigen::Index ix = 0; ix < n; ++ix) {
      const Eigen::Index p = cell(ix, iy);
      double diag = 0.0;
      const Eigen::Index neighbors[4][2] = {
          {ix + 1, iy}, {ix - 1, iy}, {ix, iy + 1}, {ix, iy - 1}};
      for (const auto& nb : neighbors) {
        if (nb[0] < 0 || nb[0] >= n || nb[1] < 0 || nb[1] >= n) continue;
        const Eigen::Index q = cell(nb[0], nb[1]);
        const double t = transmissibility(a[p], a[q]);
        diag += t;
        triplets.emplace_back(p, q, -t);
      }
      // Dirichlet half-cell faces: distance h/2 from center to boundary.
      if (ix == 0) diag += 2.0 * a[p];
      if (iy == 0) diag += 2.0 * a[p];
      if (iy == n - 1) diag += 2.0 * a[p];
      // ix == n-1: homogeneous Neumann, no flux term.
      triplets.emplace_back(p, p, diag);
    }
  }

  SparseMatrix k(n * n, n * n);
  k.setFromTriplets(triplets.begin(), triplets.end());
  return k;
}

Vector solve_spd(const SparseMatrix& k, const Vector& rhs, const char* what) {
  Eigen::SimplicialLDLT<SparseMatrix> solver(k);
  if (solver.info() != Eigen::Success) {
    throw numerical_error(std::string(what) + ": sparse factorization failed");
  }
  Vector u = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !u.allFinite()) {
    throw numerical_error(std::string(what) + ": sparse solve failed");
  }
  return u;
}

}  // namespace

PoissonKLModel::PoissonKLModel(Eigen::Index grid, Eigen::Index modes,
                               double correlation_length, double forcing)
    : grid_(grid), correlation_length_(correlation_length), forcing_(forcing) {
  if (grid < 2) throw std::invalid_argument("PoissonKLModel: grid must be >= 2");
  const Eigen::Index cells = grid * grid;
  if (modes < 1 || modes > cells) {
    throw std::invalid_argument("PoissonKLModel: need 1 <= modes <= grid^2");
  }
  if (!(correlation_length > 0.0)) {
    throw std::invalid_argument("PoissonKLModel: correlation length must be > 0");
  }

  // Dense covariance of the Gaussian field at the cell centers,
  // cov(s, s') = exp(-|s - s'| / l); its top eigenpairs are the KL basis.
  const double h = 1.0 / static_cast<double>(grid);
  Matrix centers(cells, 2);
  for (Eigen::Index iy = 0; iy < grid; ++iy) {
    for (Eigen::Index ix = 0; ix < grid; ++ix) {
      centers(iy * grid + ix, 0) = (static_cast<double>(ix) + 0.5) * h;
      centers(iy * grid + ix, 1) = (static_cast<double>(iy) + 0.5) * h;
    }
  }
  Matrix cov(cells, cells);
  for (Eigen::Index p = 0; p < cells; ++p) {
    cov(p, p) = 1.0;
    for (Eigen::Index q = 0; q < p; ++q) {
      const double dist = (centers.row(p) - centers.row(q)).norm();
      const double v = std::exp(-dist / correlation_length);
      cov(p, q) = v;
      cov(q, p) = v;
    }
  }

  const EigenDecomposition eig = sym_eig(cov);
  gamma_ = eig.eigenvalues.head(modes);
  modes_ = eig.eigenvectors.leftCols(modes);
  if (!(gamma_.minCoeff() > 0.0)) {
    throw numerical_error("PoissonKLModel: covariance returned a non-positive KL weight");
  }
  scaled_modes_ = modes_ * gamma_.cwiseSqrt().asDiagonal();
}

Vector PoissonKLModel::coefficient_field(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("PoissonKLModel: input has wrong length");
  if (!x.allFinite()) throw std::invalid_argument("PoissonKLModel: input has non-finite entries");
  Vector a = (scaled_modes_ * x).array().exp();
  if (!a.allFinite()) {
    throw numerical_error("PoissonKLModel: coefficient field overflowed (input too extreme)");
  }
  return a;
}

double PoissonKLModel::evaluate(const Vector& x) const {
  const Vector a = coefficient_field(x);
  const Eigen::Index n = grid_;
  const double h = 1.0 / static_cast<double>(n);
  const SparseMatrix k = assemble_operator(n, a);
  const Vector rhs = Vector::Constant(n * n, h * h * forcing_);
  const Vector u = solve_spd(k, rhs, "poisson_eval");

  double sum = 0.0;
  for (Eigen::Index iy = 0; iy < n; ++iy) sum += u[iy * n + (n - 1)];
  return sum / static_cast<double>(n);
}

Vector PoissonKLModel::gradient(const Vector& x) const {
  const Vector a = coefficient_field(x);
  const Eigen::Index n = grid_;
  const Eigen::Index cells = n * n;
  const double h = 1.0 / static_cast<double>(n);
  const SparseMatrix k = assemble_operator(n, a);

  Eigen::SimplicialLDLT<SparseMatrix> solver(k);
  if (solver.info() != Eigen::Success) {
    throw numerical_error("poisson_grad: sparse factorization failed");
  }
  const Vector rhs = Vector::Constant(cells, h * h * forcing_);
  Vector c = Vector::Zero(cells);
  for (Eigen::Index iy = 0; iy < n; ++iy) c[iy * n + (n - 1)] = 1.0 / static_cast<double>(n);

  const Vector u = solver.solve(rhs);
  const Vector v = solver.solve(c);  // adjoint state; K is symmetric
  if (!u.allFinite() || !v.allFinite()) {
    throw numerical_error("poisson_grad: sparse solve failed");
  }

  // Accumulate r_p = v' (dK/da_p) u over the faces touching cell p, then
  // apply the log-normal chain rule da_p/dx_j = a_p * sqrt(gamma_j) phi_j(p).
  Vector r = Vector::Zero(cells);
  auto cell = [n](Eigen::Index ix, Eigen::Index iy) { return iy * n + ix; };
  for (Eigen::Index iy = 0; iy < n; ++iy) {
    for (Eigen::Index ix = 0; ix < n; ++ix) {
      const Eigen::Index p = cell(ix, iy);
      if (ix + 1 < n) {  // each interior face handled once, from its left/bottom cell
        const Eigen::Index q = cell(ix + 1, iy);
        const double duv = (u[p] - u[q]) * (v[p] - v[q]);
        const double denom = (a[p] + a[q]) * (a[p] + a[q]);
        r[p] += duv * 2.0 * a[q] * a[q] / denom;
        r[q] += duv * 2.0 * a[p] * a[p] / denom;
      }
      if (iy + 1 < n) {
        const Eigen::Index q = cell(ix, iy + 1);
        const double duv = (u[p] - u[q]) * (v[p] - v[q]);
        const double denom = (a[p] + a[q]) * (a[p] + a[q]);
        r[p] += duv * 2.0 * a[q] * a[q] / denom;
        r[q] += duv * 2.0 * a[p] * a[p] / denom;
      }
      // Dirichlet faces contribute d(diag)/da_p = 2 each.
      double boundary = 0.0;
      if (ix == 0) boundary += 2.0;
      if (iy == 0) boundary += 2.0;
      if (iy == n - 1) boundary += 2.0;
      r[p] += boundary * u[p] * v[p];
    }
  }

  return -scaled_modes_.transpose() * r.cwiseProduct(a);
}

PoissonKLModel build_poisson_kl(Eigen::Index grid, Eigen::Index modes, double correlation_length) {
  return PoissonKLModel(grid, modes, correlation_length);
}

double poisson_eval(const PoissonKLModel& model, const Vector& x) { return model.evaluate(x); }

Vector poisson_grad(const PoissonKLModel& model, const Vector& x) { return model.gradient(x); }

}  // namespace asketch
