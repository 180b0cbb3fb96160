#pragma once

#include <vector>

#include "bht/fock_basis.hpp"
#include "bht/sparse_sym_matrix.hpp"

namespace bht {

/// Bose-Hubbard parameters in units of the hopping J.
struct ModelParams {
  double J = 1.0;
  double U = 0.0;
  std::vector<double> potential;  // V_j per site, length L

  /// Throws InvalidArgument for J <= 0 or non-finite values, DimensionMismatch when potential.size() != L.
  void validate(int L) const;
};

// Site potentials, listed for sites 1..L. L must be even and >= 4.

/// h on site L/2, h/2 on site L/2+1.
std::vector<double> potential_vertical(int L, double h);
/// h/2 on site L/2, h on site L/2+1.
std::vector<double> potential_angled(int L, double h);
/// 0 on the pre-barrier sites 1..L/2-1, 3h on every site from L/2 on.
std::vector<double> potential_cooling(int L, double h);
/// `first` on site L/2 and `second` on site L/2+1, zero elsewhere.
std::vector<double> potential_barrier_pair(int L, double first, double second);

/// Bose-Hubbard Hamiltonian with open boundaries on a fixed-N sector:
///   H = -J sum_j (b+_j b_{j+1} + h.c.) + U/2 sum_j n_j(n_j-1) + sum_j V_j n_j.
SparseSymMatrix build_hamiltonian(const SectorBasis& basis, const ModelParams& params);

}  // namespace bht
