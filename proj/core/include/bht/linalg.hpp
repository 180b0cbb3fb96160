#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bht/fock_basis.hpp"
#include "bht/sparse_sym_matrix.hpp"

namespace bht {

inline constexpr std::size_t kDefaultDenseCeiling = 4000;
inline constexpr double kDegeneracyTolerance = 1e-10;

/// Full eigendecomposition. Energies ascend; column i of `vectors` pairs with energies[i] and has
/// its largest-magnitude component positive.
struct Spectrum {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;

  std::size_t size() const noexcept { return static_cast<std::size_t>(energies.size()); }

  /// Runs of adjacent eigenvalues closer than `tol`; singletons are omitted.
  std::vector<std::vector<std::size_t>> degenerate_groups(double tol = kDegeneracyTolerance) const;
};

/// Complex amplitudes over a sector basis. The basis may be absent for matrix-only use, in which
/// case occupation observables are unavailable.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(Eigen::VectorXcd amplitudes);
  StateVector(std::shared_ptr<const SectorBasis> basis, Eigen::VectorXcd amplitudes);

  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  const std::shared_ptr<const SectorBasis>& basis() const noexcept { return basis_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  double norm() const { return amplitudes_.norm(); }

 private:
  std::shared_ptr<const SectorBasis> basis_;
  Eigen::VectorXcd amplitudes_;
};

/// Flips `v` so that its largest-magnitude entry is positive (first index wins near-ties).
void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v);

/// Dense symmetric eigensolver (Householder tridiagonalisation + implicit QR, via Eigen).
/// Throws CapacityError above `dense_ceiling`, ConvergenceError if the QR sweep fails.
Spectrum eigh_dense(const SparseSymMatrix& H, std::size_t dense_ceiling = kDefaultDenseCeiling);

struct GroundStateOptions {
  std::size_t dense_ceiling = kDefaultDenseCeiling;
  bool force_iterative = false;
  std::size_t krylov_dim = 100;       // basis size per Lanczos restart
  std::size_t max_matvecs = 20000;
  double tolerance = 1e-9;            // residual bound relative to max(1, ||H||_inf)
  std::uint64_t seed = 0x5eed'1234'abcdULL;
};

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXd vector;
  bool degenerate = false;
  bool iterative = false;
  double residual = 0.0;  // ||H v - E v||_inf
  std::size_t matvecs = 0;
};

/// Lowest eigenpair. Dense path up to the ceiling, restarted Lanczos with full
/// reorthogonalisation above it (or when forced).
GroundState ground_state(const SparseSymMatrix& H, const GroundStateOptions& options = {});

using EvolutionObserver = std::function<void(std::size_t time_index, const Eigen::VectorXcd& psi)>;

/// psi(t) = sum_i exp(-i E_i t) <v_i|psi0> v_i at each requested time; t == 0 returns psi0 verbatim.
void evolve_spectral(const Spectrum& spectrum, const Eigen::VectorXcd& psi0, std::span<const double> times,
                     const EvolutionObserver& observer);
std::vector<StateVector> evolve_spectral(const Spectrum& spectrum, const StateVector& psi0,
                                         std::span<const double> times);

struct KrylovOptions {
  std::size_t subspace_dim = 30;
  double tolerance = 1e-10;  // a-posteriori error bound per accepted step
  std::size_t max_halvings = 60;
  bool reorthogonalize = false;  // three-term recurrence only; short bases stay orthogonal enough
};

struct KrylovStats {
  std::size_t steps = 0;
  std::size_t matvecs = 0;
  std::size_t rejections = 0;
};

/// Lanczos propagation of psi0 from t = 0 through ascending `times`. One Krylov basis serves every
/// following output time whose error estimate nu beta_m |[exp(-i T tau) e_1]_m| meets the tolerance;
/// if none does, the step is halved on the same basis until it does.
KrylovStats evolve_krylov(const SparseSymMatrix& H, const Eigen::VectorXcd& psi0, std::span<const double> times,
                          const KrylovOptions& options, const EvolutionObserver& observer);
std::vector<StateVector> evolve_krylov(const SparseSymMatrix& H, const StateVector& psi0,
                                       std::span<const double> times, const KrylovOptions& options = {});

/// <n_site> for a 1-based site index.
double expectation_number(const StateVector& psi, int site);

/// All L site densities <n_j> in one pass.
std::vector<double> site_densities(const SectorBasis& basis, const Eigen::VectorXcd& psi);

/// <psi|H|psi> (real for symmetric H).
double expectation_energy(const SparseSymMatrix& H, const Eigen::VectorXcd& psi);

}  // namespace bht
