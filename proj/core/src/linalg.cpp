#include "bht/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "bht/errors.hpp"

namespace bht {

namespace {

using cplx = std::complex<double>;

void multiply(const SparseSymMatrix& H, const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> y) {
  H.multiply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
             std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
}

void multiply(const SparseSymMatrix& H, const Eigen::Ref<const Eigen::VectorXcd>& x,
              Eigen::Ref<Eigen::VectorXcd> y) {
  H.multiply(std::span<const cplx>(x.data(), static_cast<std::size_t>(x.size())),
             std::span<cplx>(y.data(), static_cast<std::size_t>(y.size())));
}

void require_times(std::span<const double> times) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || times[k] < 0.0) throw InvalidArgument("evolve: times must be finite and >= 0");
    if (k > 0 && times[k] < times[k - 1]) throw InvalidArgument("evolve: times must be ascending");
  }
}

Spectrum dense_spectrum(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigh_dense: tridiagonal QR did not converge");
  Spectrum s{es.eigenvalues(), es.eigenvectors()};
  for (Eigen::Index i = 0; i < s.vectors.cols(); ++i) canonicalize_sign(s.vectors.col(i));
  return s;
}

GroundState lanczos_ground_state(const SparseSymMatrix& H, const GroundStateOptions& opt) {
  const auto n = static_cast<Eigen::Index>(H.dim());
  const double scale = std::max(1.0, H.norm_inf());
  const double target = opt.tolerance * scale;
  const Eigen::Index m = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::max<std::size_t>(opt.krylov_dim, 2)), n);

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  v.normalize();

  Eigen::MatrixXd V(n, m);
  Eigen::VectorXd w(n);
  Eigen::VectorXd alpha(m);
  Eigen::VectorXd beta(m);
  GroundState gs;
  gs.iterative = true;

  while (true) {
    V.col(0) = v;
    Eigen::Index k = 0;
    double theta = 0.0;
    Eigen::VectorXd ritz;
    bool degenerate = false;
    for (Eigen::Index j = 0; j < m; ++j) {
      multiply(H, V.col(j), w);
      ++gs.matvecs;
      alpha(j) = V.col(j).dot(w);
      w -= alpha(j) * V.col(j);
      if (j > 0) w -= beta(j - 1) * V.col(j - 1);
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd h = V.leftCols(j + 1).transpose() * w;
        w -= V.leftCols(j + 1) * h;
      }
      beta(j) = w.norm();
      k = j + 1;

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(alpha.head(k), beta.head(k - 1), Eigen::ComputeEigenvectors);
      theta = tri.eigenvalues()(0);
      ritz = tri.eigenvectors().col(0);
      degenerate = k > 1 && tri.eigenvalues()(1) - theta < kDegeneracyTolerance;

      const bool breakdown = beta(j) <= 1e-14 * scale;
      if (breakdown || beta(j) * std::abs(ritz(k - 1)) <= 0.1 * target || k == n) break;
      if (j + 1 < m) V.col(j + 1) = w / beta(j);
    }

    Eigen::VectorXd x = V.leftCols(k) * ritz;
    x.normalize();
    multiply(H, x, w);
    ++gs.matvecs;
    const double rayleigh = x.dot(w);
    const double residual = (w - rayleigh * x).lpNorm<Eigen::Infinity>();
    if (residual <= target) {
      gs.energy = rayleigh;
      gs.vector = std::move(x);
      canonicalize_sign(gs.vector);
      gs.residual = residual;
      gs.degenerate = degenerate;
      return gs;
    }
    if (gs.matvecs >= opt.max_matvecs) {
      throw ConvergenceError("ground_state: Lanczos residual " + std::to_string(residual) + " above " +
                             std::to_string(target) + " after " + std::to_string(gs.matvecs) + " matvecs");
    }
    v = std::move(x);
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> Spectrum::degenerate_groups(double tol) const {
  std::vector<std::vector<std::size_t>> groups;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && energies(static_cast<Eigen::Index>(j)) - energies(static_cast<Eigen::Index>(j - 1)) < tol) ++j;
    if (j - i > 1) {
      std::vector<std::size_t> g;
      for (std::size_t k = i; k < j; ++k) g.push_back(k);
      groups.push_back(std::move(g));
    }
    i = j;
  }
  return groups;
}

StateVector::StateVector(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {}

StateVector::StateVector(std::shared_ptr<const SectorBasis> basis, Eigen::VectorXcd amplitudes)
    : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
  if (basis_ && basis_->size() != static_cast<std::size_t>(amplitudes_.size())) {
    throw DimensionMismatch("StateVector: " + std::to_string(amplitudes_.size()) + " amplitudes for a basis of size " +
                            std::to_string(basis_->size()));
  }
}

void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return;
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak - 1e-12) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

Spectrum eigh_dense(const SparseSymMatrix& H, std::size_t dense_ceiling) {
  if (H.dim() > dense_ceiling) {
    throw CapacityError("eigh_dense: dimension " + std::to_string(H.dim()) + " exceeds dense ceiling " +
                        std::to_string(dense_ceiling));
  }
  return dense_spectrum(H.to_dense());
}

GroundState ground_state(const SparseSymMatrix& H, const GroundStateOptions& options) {
  if (H.dim() == 0) throw InvalidArgument("ground_state: empty matrix");
  if (!options.force_iterative && H.dim() <= options.dense_ceiling) {
    const Spectrum s = eigh_dense(H, options.dense_ceiling);
    GroundState gs;
    gs.energy = s.energies(0);
    gs.vector = s.vectors.col(0);
    gs.degenerate = s.size() > 1 && s.energies(1) - s.energies(0) < kDegeneracyTolerance;
    gs.residual = (H * gs.vector - gs.energy * gs.vector).lpNorm<Eigen::Infinity>();
    return gs;
  }
  return lanczos_ground_state(H, options);
}

void evolve_spectral(const Spectrum& spectrum, const Eigen::VectorXcd& psi0, std::span<const double> times,
                     const EvolutionObserver& observer) {
  if (static_cast<std::size_t>(psi0.size()) != spectrum.size()) {
    throw DimensionMismatch("evolve_spectral: state has " + std::to_string(psi0.size()) + " amplitudes, spectrum " +
                            std::to_string(spectrum.size()));
  }
  require_times(times);
  const Eigen::MatrixXd& V = spectrum.vectors;
  const Eigen::VectorXd c_re = V.transpose() * psi0.real();
  const Eigen::VectorXd c_im = V.transpose() * psi0.imag();
  const Eigen::Index n = psi0.size();
  Eigen::VectorXd x_re(n), x_im(n);
  Eigen::VectorXcd psi(n);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t == 0.0) {
      observer(k, psi0);
      continue;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const cplx phase = std::polar(1.0, -spectrum.energies(i) * t);
      const cplx c(c_re(i), c_im(i));
      const cplx x = phase * c;
      x_re(i) = x.real();
      x_im(i) = x.imag();
    }
    psi.real() = V * x_re;
    psi.imag() = V * x_im;
    observer(k, psi);
  }
}

std::vector<StateVector> evolve_spectral(const Spectrum& spectrum, const StateVector& psi0,
                                         std::span<const double> times) {
  std::vector<StateVector> out;
  out.reserve(times.size());
  evolve_spectral(spectrum, psi0.amplitudes(), times,
                  [&](std::size_t, const Eigen::VectorXcd& psi) { out.emplace_back(psi0.basis(), psi); });
  return out;
}

KrylovStats evolve_krylov(const SparseSymMatrix& H, const Eigen::VectorXcd& psi0, std::span<const double> times,
                          const KrylovOptions& options, const EvolutionObserver& observer) {
  if (static_cast<std::size_t>(psi0.size()) != H.dim()) {
    throw DimensionMismatch("evolve_krylov: state has " + std::to_string(psi0.size()) + " amplitudes, matrix " +
                            std::to_string(H.dim()));
  }
  if (options.subspace_dim < 2) throw InvalidArgument("evolve_krylov: subspace_dim must be >= 2");
  require_times(times);

  const auto n = static_cast<Eigen::Index>(H.dim());
  const Eigen::Index m = std::min<Eigen::Index>(static_cast<Eigen::Index>(options.subspace_dim), n);
  const double scale = std::max(1.0, H.norm_inf());

  KrylovStats stats;
  Eigen::MatrixXcd V(n, m);
  Eigen::VectorXcd w(n);
  Eigen::VectorXd alpha(m);
  Eigen::VectorXd beta(m);
  Eigen::VectorXcd psi = psi0;
  Eigen::VectorXcd y;
  double t = 0.0;
  std::size_t k = 0;

  while (k < times.size()) {
    if (times[k] <= t) {
      observer(k, psi);
      ++k;
      continue;
    }
    const double nu = psi.norm();
    if (nu == 0.0) {
      t = times[k];
      continue;
    }
    V.col(0) = psi / nu;
    Eigen::Index kdim = 0;
    bool breakdown = false;
    for (Eigen::Index j = 0; j < m; ++j) {
      multiply(H, V.col(j), w);
      ++stats.matvecs;
      alpha(j) = V.col(j).dot(w).real();
      w -= alpha(j) * V.col(j);
      if (j > 0) w -= beta(j - 1) * V.col(j - 1);
      if (options.reorthogonalize) {
        const Eigen::VectorXcd h = V.leftCols(j + 1).adjoint() * w;
        w -= V.leftCols(j + 1) * h;
      }
      beta(j) = w.norm();
      kdim = j + 1;
      if (beta(j) <= 1e-14 * scale) {
        breakdown = true;
        break;
      }
      if (j + 1 < m) V.col(j + 1) = w / beta(j);
    }
    ++stats.steps;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(alpha.head(kdim), beta.head(kdim - 1), Eigen::ComputeEigenvectors);
    const Eigen::VectorXd& theta = tri.eigenvalues();
    const Eigen::MatrixXd& Q = tri.eigenvectors();
    const Eigen::VectorXd q0 = Q.row(0).transpose();

    // Projected propagator for step tau; returns the a-posteriori error estimate.
    auto project = [&](double tau) {
      Eigen::VectorXcd coeff(kdim);
      for (Eigen::Index i = 0; i < kdim; ++i) coeff(i) = std::polar(1.0, -theta(i) * tau) * q0(i);
      y = Q * coeff;
      return breakdown ? 0.0 : nu * beta(kdim - 1) * std::abs(y(kdim - 1));
    };

    // The same basis serves every following output time it resolves to tolerance.
    const double t0 = t;
    while (k < times.size() && project(times[k] - t0) <= options.tolerance) {
      psi = nu * (V.leftCols(kdim) * y);
      t = times[k];
      observer(k, psi);
      ++k;
    }
    if (t > t0) continue;

    double tau = times[k] - t0;
    std::size_t halvings = 0;
    while (true) {
      tau *= 0.5;
      ++stats.rejections;
      const double err = project(tau);
      if (err <= options.tolerance) break;
      if (++halvings > options.max_halvings) {
        throw ConvergenceError("evolve_krylov: error estimate " + std::to_string(err) + " above tolerance after " +
                               std::to_string(halvings) + " step halvings");
      }
    }
    psi = nu * (V.leftCols(kdim) * y);
    t = t0 + tau;
  }
  return stats;
}

std::vector<StateVector> evolve_krylov(const SparseSymMatrix& H, const StateVector& psi0,
                                       std::span<const double> times, const KrylovOptions& options) {
  std::vector<StateVector> out;
  out.reserve(times.size());
  evolve_krylov(H, psi0.amplitudes(), times, options,
                [&](std::size_t, const Eigen::VectorXcd& psi) { out.emplace_back(psi0.basis(), psi); });
  return out;
}

std::vector<double> site_densities(const SectorBasis& basis, const Eigen::VectorXcd& psi) {
  if (basis.size() != static_cast<std::size_t>(psi.size())) {
    throw DimensionMismatch("site_densities: state/basis size mismatch");
  }
  const int L = basis.sites();
  std::vector<double> dens(static_cast<std::size_t>(L), 0.0);
  for (std::size_t s = 0; s < basis.size(); ++s) {
    const double p = std::norm(psi(static_cast<Eigen::Index>(s)));
    if (p == 0.0) continue;
    const auto occ = basis.row(s);
    for (int j = 0; j < L; ++j) dens[static_cast<std::size_t>(j)] += p * occ[static_cast<std::size_t>(j)];
  }
  return dens;
}

double expectation_number(const StateVector& psi, int site) {
  if (!psi.basis()) throw InvalidArgument("expectation_number: state is not bound to a basis");
  const int L = psi.basis()->sites();
  if (site < 1 || site > L) {
    throw InvalidArgument("expectation_number: site " + std::to_string(site) + " outside 1.." + std::to_string(L));
  }
  double acc = 0.0;
  const auto& a = psi.amplitudes();
  for (std::size_t s = 0; s < psi.size(); ++s) {
    acc += std::norm(a(static_cast<Eigen::Index>(s))) * psi.basis()->occupation(s, site - 1);
  }
  return acc;
}

double expectation_energy(const SparseSymMatrix& H, const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd hpsi = H * psi;
  return psi.dot(hpsi).real();
}

}  // namespace bht
