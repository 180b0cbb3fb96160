#include "bht/hamiltonian.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "bht/errors.hpp"

namespace bht {

namespace {

void require_barrier_lattice(int L, double h, const char* who) {
  if (L < 4 || L % 2 != 0) {
    throw InvalidArgument(std::string(who) + ": L must be even and >= 4, got " + std::to_string(L));
  }
  if (!std::isfinite(h) || h < 0.0) throw InvalidArgument(std::string(who) + ": h must be finite and >= 0");
}

}  // namespace

void ModelParams::validate(int L) const {
  if (!(J > 0.0) || !std::isfinite(J)) throw InvalidArgument("ModelParams: J must be positive and finite");
  if (!std::isfinite(U)) throw InvalidArgument("ModelParams: U must be finite");
  if (potential.size() != static_cast<std::size_t>(L)) {
    throw DimensionMismatch("ModelParams: potential has " + std::to_string(potential.size()) +
                            " entries, lattice has L = " + std::to_string(L));
  }
  for (double v : potential) {
    if (!std::isfinite(v)) throw InvalidArgument("ModelParams: potential entries must be finite");
  }
}

std::vector<double> potential_barrier_pair(int L, double first, double second) {
  if (L < 4 || L % 2 != 0) {
    throw InvalidArgument("potential_barrier_pair: L must be even and >= 4, got " + std::to_string(L));
  }
  std::vector<double> v(static_cast<std::size_t>(L), 0.0);
  v[static_cast<std::size_t>(L / 2 - 1)] = first;
  v[static_cast<std::size_t>(L / 2)] = second;
  return v;
}

std::vector<double> potential_vertical(int L, double h) {
  require_barrier_lattice(L, h, "potential_vertical");
  return potential_barrier_pair(L, h, h / 2.0);
}

std::vector<double> potential_angled(int L, double h) {
  require_barrier_lattice(L, h, "potential_angled");
  return potential_barrier_pair(L, h / 2.0, h);
}

std::vector<double> potential_cooling(int L, double h) {
  require_barrier_lattice(L, h, "potential_cooling");
  std::vector<double> v(static_cast<std::size_t>(L), 0.0);
  for (int j = L / 2 - 1; j < L; ++j) v[static_cast<std::size_t>(j)] = 3.0 * h;
  return v;
}

SparseSymMatrix build_hamiltonian(const SectorBasis& basis, const ModelParams& params) {
  const int L = basis.sites();
  params.validate(L);

  const std::size_t dim = basis.size();
  SparseSymMatrix::Builder builder(dim);
  std::vector<SectorBasis::Count> target(static_cast<std::size_t>(L));

  for (std::size_t s = 0; s < dim; ++s) {
    const auto occ = basis.row(s);
    double diag = 0.0;
    for (int j = 0; j < L; ++j) {
      const double n = occ[static_cast<std::size_t>(j)];
      diag += 0.5 * params.U * n * (n - 1.0) + params.potential[static_cast<std::size_t>(j)] * n;
    }
    builder.add_diagonal(s, diag);

    // b+_j b_{j+1}: one boson from site j+1 to site j. The reverse hop is the transpose,
    // so only this direction is generated.
    for (int j = 0; j + 1 < L; ++j) {
      const int from = occ[static_cast<std::size_t>(j + 1)];
      if (from == 0) continue;
      const int to = occ[static_cast<std::size_t>(j)];
      std::copy(occ.begin(), occ.end(), target.begin());
      --target[static_cast<std::size_t>(j + 1)];
      ++target[static_cast<std::size_t>(j)];
      const std::size_t t = basis.rank(target);
      assert(t < dim);
      const double amp = -params.J * std::sqrt(static_cast<double>(from)) * std::sqrt(static_cast<double>(to + 1));
      builder.add(s, t, amp);
    }
  }
  return std::move(builder).build();
}

}  // namespace bht
