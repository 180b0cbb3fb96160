#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bht/fock_basis.hpp"
#include "bht/linalg.hpp"
#include "bht/protocol.hpp"

namespace bht {

/// U in [0, 5] step 0.02.
std::vector<double> default_U_grid();
/// t in [0, 50] step 0.25.
std::vector<double> default_sweep_times();

/// A (U, t) sweep of the population imbalance at fixed L, N, J, h.
struct SweepSpec {
  int L = 6;
  int N = 4;
  double J = 1.0;
  double h = 10.0;
  std::vector<double> U_values = default_U_grid();
  std::vector<double> t_values = default_sweep_times();
  unsigned threads = 1;  // 0 = hardware concurrency
  EvolutionOptions evolution;

  void validate() const;
};

/// Delta n(U, t), row-major with one row per U value.
struct SweepGrid {
  int N = 0;
  std::vector<double> U_values;
  std::vector<double> t_values;
  std::vector<double> dn;
  std::vector<ConservationStats> diagnostics;  // merged over both configurations, per row

  std::size_t rows() const noexcept { return U_values.size(); }
  std::size_t cols() const noexcept { return t_values.size(); }
  double at(std::size_t row, std::size_t col) const { return dn[row * cols() + col]; }
  std::span<const double> row(std::size_t r) const { return {dn.data() + r * cols(), cols()}; }
};

struct SweepRow {
  std::vector<double> dn;
  ConservationStats stats;
};

/// One U value: prepare, quench to both barriers, subtract.
SweepRow sweep_row(const SweepSpec& spec, double U);

/// Rows are independent and may run on `spec.threads` workers; the result does not depend on it.
SweepGrid sweep_interaction(const SweepSpec& spec);

struct FockWeight {
  OccupationVector occupation;
  std::size_t basis_index = 0;
  double weight = 0.0;
};

/// The k largest |c_j|^2 of `eigvec`, descending, ties by ascending basis index.
std::vector<FockWeight> fock_composition(const Eigen::Ref<const Eigen::VectorXd>& eigvec, const SectorBasis& basis,
                                         std::size_t top_k);

struct EigenOverlap {
  std::size_t index = 0;  // 0-based, ascending energy
  double energy = 0.0;
  double overlap = 0.0;   // |<psi_i|psi_0>|^2
  bool degenerate = false;
  std::vector<FockWeight> fock_top;  // filled when overlap exceeds the report threshold
};

struct DegenerateOverlap {
  std::vector<std::size_t> indices;
  double overlap_sum = 0.0;
};

struct OverlapReport {
  std::vector<EigenOverlap> eigenstates;
  std::vector<DegenerateOverlap> degenerate_groups;

  double total_overlap() const;
  /// Eigenstate indices ordered by decreasing overlap.
  std::vector<std::size_t> ranked() const;
};

struct OverlapOptions {
  std::size_t top_k = 5;
  double report_threshold = 0.05;
  double degeneracy_tol = kDegeneracyTolerance;
};

OverlapReport overlap_analysis(const StateVector& psi0, const Spectrum& spectrum, const OverlapOptions& options = {});

struct DirectionalWindow {
  double U_begin = 0.0;
  double U_end = 0.0;
  int sign = 0;            // sign of Delta n at the window's largest |Delta n|
  double peak = 0.0;       // that largest |Delta n|
  double peak_U = 0.0;
  double peak_t = 0.0;
};

/// Maximal runs of consecutive U rows with max_t |Delta n| >= threshold.
std::vector<DirectionalWindow> find_directional_windows(const SweepGrid& grid, double threshold);

}  // namespace bht
