#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bht/fock_basis.hpp"
#include "bht/hamiltonian.hpp"
#include "bht/linalg.hpp"

namespace bht {

enum class BarrierKind { vertical, angled, custom };

std::string_view to_string(BarrierKind kind) noexcept;
/// Accepts "vertical", "angled" or "custom"; throws InvalidArgument otherwise.
BarrierKind parse_barrier_kind(std::string_view text);

/// Quench potential. `custom` carries a full per-site list.
struct Barrier {
  BarrierKind kind = BarrierKind::vertical;
  std::vector<double> custom;

  static Barrier vertical() { return {BarrierKind::vertical, {}}; }
  static Barrier angled() { return {BarrierKind::angled, {}}; }
  static Barrier custom_potential(std::vector<double> v) { return {BarrierKind::custom, std::move(v)}; }

  std::vector<double> potential(int L, double h) const;
};

/// Solver routing shared by every experiment.
struct EvolutionOptions {
  // Propagate by full diagonalisation up to this sector size, Krylov above it.
  std::size_t spectral_max_dim = 1000;
  GroundStateOptions ground;
  KrylovOptions krylov;
  std::size_t max_sector_dimension = kDefaultMaxSectorDimension;
};

struct QuenchSpec {
  int L = 6;
  int N = 4;
  double J = 1.0;
  double U = 1.42;
  double h = 10.0;
  Barrier barrier;
  std::vector<double> times;

  /// L even and >= 4, N >= 1, J > 0, h >= 0, times non-empty, starting at 0 and ascending.
  void validate() const;
};

/// Uniform grid 0, dt, 2 dt, ... up to and including t_max (within rounding).
std::vector<double> time_grid(double t_max, double dt);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> site_density;  // [time][site]
  std::vector<double> n_after;
  std::vector<double> norm;
  std::vector<double> energy;
  double particle_number = 0.0;   // expected sum of site densities
  double discarded_weight = 0.0;  // Poisson tail dropped by coherent runs

  std::size_t sites() const noexcept { return site_density.empty() ? 0 : site_density.front().size(); }
};

/// Population of the post-barrier sites L/2+2 .. L (1-based).
double n_after(std::span<const double> densities, int L);

/// n_after(a) - n_after(b) pointwise. Throws DimensionMismatch unless the time grids are identical.
std::vector<double> population_imbalance(const Trajectory& a, const Trajectory& b);

struct ConservationStats {
  double norm_drift = 0.0;      // max_t | ||psi(t)|| - 1 |
  double energy_drift = 0.0;    // max_t |E(t) - E(0)| / max(1, |E(0)|)
  double particle_drift = 0.0;  // max_t | sum_j <n_j>(t) - particle_number |

  void merge(const ConservationStats& other);
  bool within(double tol) const { return norm_drift <= tol && energy_drift <= tol && particle_drift <= tol; }
};

ConservationStats conservation(const Trajectory& traj);

struct InitialState {
  StateVector state;
  double energy = 0.0;
  double pre_barrier_population = 0.0;  // sum of <n_j> over sites 1 .. L/2-1
  bool degenerate = false;
};

/// Ground state under the cooling potential (0 on sites 1..L/2-1, 3h elsewhere).
InitialState prepare_initial_state(std::shared_ptr<const SectorBasis> basis, double J, double U, double h,
                                   const GroundStateOptions& options = {});
InitialState prepare_initial_state(int L, int N, double J, double U, double h, const EvolutionOptions& options = {});

/// Evolves psi0 under H over `times` and records densities, n_after, norm and energy.
Trajectory record_trajectory(const SparseSymMatrix& H, const StateVector& psi0, std::span<const double> times,
                             const EvolutionOptions& options = {});

/// Cooling-barrier preparation followed by a quench to `spec.barrier`.
Trajectory run_quench(const QuenchSpec& spec, const EvolutionOptions& options = {});

struct CoherentSpec {
  std::vector<double> mean_occupations;  // n_j = |alpha_j|^2 per site
  int n_max = 0;                          // 0 selects the smallest sector cut meeting weight_tol
  double weight_tol = 1e-6;
  int n_max_ceiling = 24;

  void validate() const;
};

struct SectorWeights {
  double lambda = 0.0;          // total mean particle number
  std::vector<double> weights;  // Poisson(lambda) for N = 0 .. n_max
  double discarded = 0.0;       // tail mass beyond n_max

  int n_max() const noexcept { return static_cast<int>(weights.size()) - 1; }
  double kept() const noexcept;
};

/// Throws CapacityError when the tail cannot be brought below weight_tol within the ceiling.
SectorWeights coherent_sector_weights(const CoherentSpec& spec);

/// Normalised projection of the product coherent state onto a fixed-N sector:
/// amplitude(m) proportional to prod_j alpha_j^{m_j} / sqrt(m_j!), alpha_j = sqrt(n_j).
StateVector coherent_sector_state(const CoherentSpec& spec, std::shared_ptr<const SectorBasis> basis);

/// Exact coherent-state quench: each number sector is evolved independently and the
/// observables are combined with Poisson weights renormalised to the kept mass.
/// `spec.N` is ignored; the sectors run from 0 to the resolved n_max.
Trajectory run_coherent_quench(const QuenchSpec& spec, const CoherentSpec& cspec,
                               const EvolutionOptions& options = {});

}  // namespace bht
