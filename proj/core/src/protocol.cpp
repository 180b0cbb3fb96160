#include "bht/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bht/errors.hpp"

namespace bht {

std::string_view to_string(BarrierKind kind) noexcept {
  switch (kind) {
    case BarrierKind::vertical:
      return "vertical";
    case BarrierKind::angled:
      return "angled";
    case BarrierKind::custom:
      return "custom";
  }
  return "unknown";
}

BarrierKind parse_barrier_kind(std::string_view text) {
  if (text == "vertical") return BarrierKind::vertical;
  if (text == "angled") return BarrierKind::angled;
  if (text == "custom") return BarrierKind::custom;
  throw InvalidArgument("barrier must be vertical, angled or custom, got '" + std::string(text) + "'");
}

std::vector<double> Barrier::potential(int L, double h) const {
  switch (kind) {
    case BarrierKind::vertical:
      return potential_vertical(L, h);
    case BarrierKind::angled:
      return potential_angled(L, h);
    case BarrierKind::custom:
      if (custom.size() != static_cast<std::size_t>(L)) {
        throw DimensionMismatch("custom barrier has " + std::to_string(custom.size()) + " entries, L = " +
                                std::to_string(L));
      }
      return custom;
  }
  throw InvalidArgument("unknown barrier kind");
}

void QuenchSpec::validate() const {
  if (L < 4 || L % 2 != 0) throw InvalidArgument("L must be even and >= 4, got " + std::to_string(L));
  if (N < 1) throw InvalidArgument("N must be >= 1, got " + std::to_string(N));
  if (!(J > 0.0) || !std::isfinite(J)) throw InvalidArgument("J must be positive and finite");
  if (!std::isfinite(U)) throw InvalidArgument("U must be finite");
  if (!(h >= 0.0) || !std::isfinite(h)) throw InvalidArgument("h must be finite and >= 0");
  if (times.empty()) throw InvalidArgument("times must be non-empty");
  if (times.front() != 0.0) throw InvalidArgument("times must start at 0");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] >= times[k - 1]) || !std::isfinite(times[k])) throw InvalidArgument("times must be ascending");
  }
  if (barrier.kind == BarrierKind::custom && barrier.custom.size() != static_cast<std::size_t>(L)) {
    throw DimensionMismatch("custom barrier has " + std::to_string(barrier.custom.size()) + " entries, L = " +
                            std::to_string(L));
  }
}

std::vector<double> time_grid(double t_max, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time_grid: dt must be positive");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw InvalidArgument("time_grid: t_max must be >= 0");
  const auto count = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
  std::vector<double> t(count + 1);
  for (std::size_t k = 0; k <= count; ++k) t[k] = static_cast<double>(k) * dt;
  if (std::abs(t.back() - t_max) <= 1e-9 * dt) t.back() = t_max;
  return t;
}

double n_after(std::span<const double> densities, int L) {
  if (densities.size() != static_cast<std::size_t>(L)) {
    throw DimensionMismatch("n_after: " + std::to_string(densities.size()) + " densities for L = " +
                            std::to_string(L));
  }
  double s = 0.0;
  for (int j = L / 2 + 1; j < L; ++j) s += densities[static_cast<std::size_t>(j)];
  return s;
}

std::vector<double> population_imbalance(const Trajectory& a, const Trajectory& b) {
  if (a.times != b.times || a.n_after.size() != b.n_after.size()) {
    throw DimensionMismatch("population_imbalance: trajectories use different time grids");
  }
  std::vector<double> dn(a.n_after.size());
  for (std::size_t k = 0; k < dn.size(); ++k) dn[k] = a.n_after[k] - b.n_after[k];
  return dn;
}

void ConservationStats::merge(const ConservationStats& other) {
  norm_drift = std::max(norm_drift, other.norm_drift);
  energy_drift = std::max(energy_drift, other.energy_drift);
  particle_drift = std::max(particle_drift, other.particle_drift);
}

ConservationStats conservation(const Trajectory& traj) {
  ConservationStats s;
  if (traj.times.empty()) return s;
  const double e0 = traj.energy.front();
  const double escale = std::max(1.0, std::abs(e0));
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    s.norm_drift = std::max(s.norm_drift, std::abs(traj.norm[k] - 1.0));
    s.energy_drift = std::max(s.energy_drift, std::abs(traj.energy[k] - e0) / escale);
    double total = 0.0;
    for (double d : traj.site_density[k]) total += d;
    s.particle_drift = std::max(s.particle_drift, std::abs(total - traj.particle_number));
  }
  return s;
}

InitialState prepare_initial_state(std::shared_ptr<const SectorBasis> basis, double J, double U, double h,
                                   const GroundStateOptions& options) {
  const int L = basis->sites();
  const ModelParams params{J, U, potential_cooling(L, h)};
  const SparseSymMatrix H = build_hamiltonian(*basis, params);
  GroundState gs = ground_state(H, options);

  InitialState init;
  init.energy = gs.energy;
  init.degenerate = gs.degenerate;
  init.state = StateVector(basis, gs.vector.cast<std::complex<double>>());
  const auto dens = site_densities(*basis, init.state.amplitudes());
  for (int j = 0; j < L / 2 - 1; ++j) init.pre_barrier_population += dens[static_cast<std::size_t>(j)];
  return init;
}

InitialState prepare_initial_state(int L, int N, double J, double U, double h, const EvolutionOptions& options) {
  QuenchSpec check{L, N, J, U, h, Barrier::vertical(), {0.0}};
  check.validate();
  auto basis = std::make_shared<const SectorBasis>(L, N, options.max_sector_dimension);
  return prepare_initial_state(std::move(basis), J, U, h, options.ground);
}

Trajectory record_trajectory(const SparseSymMatrix& H, const StateVector& psi0, std::span<const double> times,
                             const EvolutionOptions& options) {
  if (!psi0.basis()) throw InvalidArgument("record_trajectory: state is not bound to a basis");
  const SectorBasis& basis = *psi0.basis();
  const int L = basis.sites();

  Trajectory traj;
  traj.times.assign(times.begin(), times.end());
  traj.site_density.resize(times.size());
  traj.n_after.resize(times.size());
  traj.norm.resize(times.size());
  traj.energy.resize(times.size());
  traj.particle_number = basis.particles();

  auto record = [&](std::size_t k, const Eigen::VectorXcd& psi) {
    traj.site_density[k] = site_densities(basis, psi);
    traj.n_after[k] = n_after(traj.site_density[k], L);
    traj.norm[k] = psi.norm();
    traj.energy[k] = expectation_energy(H, psi);
  };

  if (H.dim() <= options.spectral_max_dim) {
    const Spectrum spectrum = eigh_dense(H, std::max(options.spectral_max_dim, H.dim()));
    evolve_spectral(spectrum, psi0.amplitudes(), times, record);
  } else {
    evolve_krylov(H, psi0.amplitudes(), times, options.krylov, record);
  }
  return traj;
}

Trajectory run_quench(const QuenchSpec& spec, const EvolutionOptions& options) {
  spec.validate();
  auto basis = std::make_shared<const SectorBasis>(spec.L, spec.N, options.max_sector_dimension);
  const InitialState init = prepare_initial_state(basis, spec.J, spec.U, spec.h, options.ground);
  const ModelParams quench{spec.J, spec.U, spec.barrier.potential(spec.L, spec.h)};
  const SparseSymMatrix H = build_hamiltonian(*basis, quench);
  return record_trajectory(H, init.state, spec.times, options);
}

void CoherentSpec::validate() const {
  if (mean_occupations.empty()) throw InvalidArgument("coherent: mean_occupations must be non-empty");
  for (double n : mean_occupations) {
    if (!(n >= 0.0) || !std::isfinite(n)) throw InvalidArgument("coherent: mean occupations must be finite and >= 0");
  }
  if (!(weight_tol > 0.0 && weight_tol < 1.0)) throw InvalidArgument("coherent: weight_tol must lie in (0, 1)");
  if (n_max < 0) throw InvalidArgument("coherent: n_max must be >= 0");
  if (n_max_ceiling < 0) throw InvalidArgument("coherent: n_max_ceiling must be >= 0");
}

double SectorWeights::kept() const noexcept {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

namespace {

double poisson_pmf(double lambda, int n) {
  if (lambda == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-lambda + n * std::log(lambda) - std::lgamma(n + 1.0));
}

// P(X > m), summed term by term so small tails keep full relative precision.
double poisson_tail(double lambda, int m) {
  if (lambda == 0.0) return 0.0;
  double tail = 0.0;
  for (int n = m + 1;; ++n) {
    const double p = poisson_pmf(lambda, n);
    tail += p;
    if (n > lambda && p <= tail * 1e-17) break;
    if (n > m + 100000) break;
  }
  return tail;
}

}  // namespace

SectorWeights coherent_sector_weights(const CoherentSpec& spec) {
  spec.validate();
  SectorWeights sw;
  for (double n : spec.mean_occupations) sw.lambda += n;

  int cut = spec.n_max;
  if (cut == 0 && sw.lambda > 0.0) {
    while (poisson_tail(sw.lambda, cut) > spec.weight_tol) {
      if (++cut > spec.n_max_ceiling) {
        throw CapacityError("coherent: discarded weight cannot reach " + std::to_string(spec.weight_tol) +
                            " within n_max ceiling " + std::to_string(spec.n_max_ceiling));
      }
    }
  } else if (cut > spec.n_max_ceiling) {
    throw CapacityError("coherent: n_max " + std::to_string(cut) + " exceeds ceiling " +
                        std::to_string(spec.n_max_ceiling));
  }
  sw.discarded = poisson_tail(sw.lambda, cut);
  if (sw.discarded > spec.weight_tol) {
    throw CapacityError("coherent: discarded weight " + std::to_string(sw.discarded) + " above tolerance at n_max " +
                        std::to_string(cut));
  }
  sw.weights.resize(static_cast<std::size_t>(cut) + 1);
  for (int n = 0; n <= cut; ++n) sw.weights[static_cast<std::size_t>(n)] = poisson_pmf(sw.lambda, n);
  return sw;
}

StateVector coherent_sector_state(const CoherentSpec& spec, std::shared_ptr<const SectorBasis> basis) {
  spec.validate();
  const int L = basis->sites();
  if (spec.mean_occupations.size() != static_cast<std::size_t>(L)) {
    throw DimensionMismatch("coherent: " + std::to_string(spec.mean_occupations.size()) +
                            " mean occupations for L = " + std::to_string(L));
  }
  if (spec.n_max > 0 && basis->particles() > spec.n_max) {
    throw InvalidArgument("coherent: sector N = " + std::to_string(basis->particles()) + " exceeds n_max");
  }

  std::vector<double> log_alpha(static_cast<std::size_t>(L));
  for (int j = 0; j < L; ++j) {
    const double n = spec.mean_occupations[static_cast<std::size_t>(j)];
    log_alpha[static_cast<std::size_t>(j)] = n > 0.0 ? 0.5 * std::log(n) : -INFINITY;
  }

  const auto dim = static_cast<Eigen::Index>(basis->size());
  std::vector<double> log_amp(basis->size(), -INFINITY);
  double peak = -INFINITY;
  for (std::size_t s = 0; s < basis->size(); ++s) {
    const auto occ = basis->row(s);
    double la = 0.0;
    bool supported = true;
    for (int j = 0; j < L && supported; ++j) {
      const int m = occ[static_cast<std::size_t>(j)];
      if (m == 0) continue;
      if (std::isinf(log_alpha[static_cast<std::size_t>(j)])) {
        supported = false;
        break;
      }
      la += m * log_alpha[static_cast<std::size_t>(j)] - 0.5 * std::lgamma(m + 1.0);
    }
    if (!supported) continue;
    log_amp[s] = la;
    peak = std::max(peak, la);
  }
  if (std::isinf(peak)) {
    throw InvalidArgument("coherent: sector N = " + std::to_string(basis->particles()) +
                          " has no support (all occupied sites have zero mean)");
  }

  Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(dim);
  for (std::size_t s = 0; s < basis->size(); ++s) {
    if (!std::isinf(log_amp[s])) amp(static_cast<Eigen::Index>(s)) = std::exp(log_amp[s] - peak);
  }
  amp /= amp.norm();
  return StateVector(std::move(basis), std::move(amp));
}

Trajectory run_coherent_quench(const QuenchSpec& spec, const CoherentSpec& cspec, const EvolutionOptions& options) {
  QuenchSpec checked = spec;
  checked.N = 1;
  checked.validate();
  if (cspec.mean_occupations.size() != static_cast<std::size_t>(spec.L)) {
    throw DimensionMismatch("coherent: " + std::to_string(cspec.mean_occupations.size()) +
                            " mean occupations for L = " + std::to_string(spec.L));
  }
  const SectorWeights sw = coherent_sector_weights(cspec);
  const double kept = sw.kept();
  const std::size_t nt = spec.times.size();
  const auto L = static_cast<std::size_t>(spec.L);
  const std::vector<double> potential = spec.barrier.potential(spec.L, spec.h);

  Trajectory traj;
  traj.times = spec.times;
  traj.site_density.assign(nt, std::vector<double>(L, 0.0));
  traj.n_after.assign(nt, 0.0);
  traj.norm.assign(nt, 0.0);
  traj.energy.assign(nt, 0.0);
  traj.discarded_weight = sw.discarded;

  for (int n = 0; n <= sw.n_max(); ++n) {
    const double w = sw.weights[static_cast<std::size_t>(n)] / kept;
    if (w == 0.0) continue;
    auto basis = std::make_shared<const SectorBasis>(spec.L, n, options.max_sector_dimension);
    const StateVector psi0 = coherent_sector_state(cspec, basis);
    const SparseSymMatrix H = build_hamiltonian(*basis, ModelParams{spec.J, spec.U, potential});
    const Trajectory sector = record_trajectory(H, psi0, spec.times, options);
    for (std::size_t k = 0; k < nt; ++k) {
      for (std::size_t j = 0; j < L; ++j) traj.site_density[k][j] += w * sector.site_density[k][j];
      traj.norm[k] += w * sector.norm[k] * sector.norm[k];
      traj.energy[k] += w * sector.energy[k];
    }
    traj.particle_number += w * n;
  }
  for (std::size_t k = 0; k < nt; ++k) {
    traj.norm[k] = std::sqrt(traj.norm[k]);
    traj.n_after[k] = n_after(traj.site_density[k], spec.L);
  }
  return traj;
}

}  // namespace bht
