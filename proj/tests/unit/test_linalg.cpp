#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "bht/errors.hpp"
#include "bht/hamiltonian.hpp"
#include "bht/linalg.hpp"
#include "bht/protocol.hpp"

using namespace bht;
using cplx = std::complex<double>;

namespace {

SparseSymMatrix from_dense(const Eigen::MatrixXd& A) {
  SparseSymMatrix::Builder b(static_cast<std::size_t>(A.rows()));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    b.add_diagonal(static_cast<std::size_t>(i), A(i, i));
    for (Eigen::Index j = i + 1; j < A.cols(); ++j) {
      if (A(i, j) != 0.0) b.add(static_cast<std::size_t>(i), static_cast<std::size_t>(j), A(i, j));
    }
  }
  return std::move(b).build();
}

// exp(-i H t) psi0 through Eigen's Pade-based matrix exponential.
Eigen::VectorXcd expm_propagate(const Eigen::MatrixXd& H, const Eigen::VectorXcd& psi0, double t) {
  const Eigen::MatrixXcd A = (cplx(0.0, -t) * H.cast<cplx>()).eval();
  return A.exp() * psi0;
}

Eigen::VectorXcd random_state(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

struct System {
  int L, N;
  double U;
  std::vector<double> V;
};

std::vector<System> test_systems() {
  return {{6, 4, 1.42, potential_vertical(6, 10)}, {6, 4, 1.42, potential_angled(6, 10)},
          {6, 4, 0.0, potential_cooling(6, 10)},  {8, 3, 2.7, potential_vertical(8, 10)},
          {8, 4, 3.5, potential_angled(8, 10)},   {4, 6, 5.0, potential_vertical(4, 3)},
          {6, 2, 1.0, potential_vertical(6, 0)},  {10, 1, 0.5, potential_angled(10, 10)}};
}

}  // namespace

TEST_CASE("two-level eigensystem") {
  Eigen::MatrixXd A(2, 2);
  A << 0, -1, -1, 0;
  const Spectrum s = eigh_dense(from_dense(A));
  CHECK(s.energies(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(s.energies(1) == doctest::Approx(1.0).epsilon(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(s.vectors(0, 0) - r) < 1e-14);
  CHECK(std::abs(s.vectors(1, 0) - r) < 1e-14);
  // Sign rule: largest-magnitude entry positive, first index on a tie.
  CHECK(std::abs(s.vectors(0, 1) - r) < 1e-14);
  CHECK(std::abs(s.vectors(1, 1) + r) < 1e-14);
}

TEST_CASE("diagonal matrices sort and pick the ground state") {
  Eigen::MatrixXd A = Eigen::Vector3d(3, 1, 2).asDiagonal();
  const Spectrum s = eigh_dense(from_dense(A));
  CHECK(s.energies(0) == 1.0);
  CHECK(s.energies(1) == 2.0);
  CHECK(s.energies(2) == 3.0);

  Eigen::MatrixXd B = Eigen::Vector3d(5, -2, 7).asDiagonal();
  for (bool iterative : {false, true}) {
    GroundStateOptions o;
    o.force_iterative = iterative;
    const GroundState g = ground_state(from_dense(B), o);
    CHECK(g.energy == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(std::abs(g.vector(1)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(g.vector(1) > 0.0);
  }
}

TEST_CASE("two-site bonding state") {
  const SectorBasis b(2, 1);
  const GroundState g = ground_state(build_hamiltonian(b, {1.0, 0.0, {0.0, 0.0}}));
  CHECK(g.energy == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("spectrum invariants on the working sector") {
  const SectorBasis b(6, 4);
  const SparseSymMatrix H = build_hamiltonian(b, {1.0, 1.42, potential_vertical(6, 10)});
  const Spectrum s = eigh_dense(H);
  const Eigen::MatrixXd D = H.to_dense();
  const double scale = std::max(1.0, H.norm_inf());
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    const Eigen::VectorXd r = D * s.vectors.col(i) - s.energies(i) * s.vectors.col(i);
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-9 * scale);
    if (i > 0) CHECK(s.energies(i) >= s.energies(i - 1));
  }
  const Eigen::MatrixXd I = s.vectors.transpose() * s.vectors;
  CHECK((I - Eigen::MatrixXd::Identity(I.rows(), I.cols())).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("mirror spectra agree") {
  const SectorBasis b(6, 4);
  const Spectrum a = eigh_dense(build_hamiltonian(b, {1.0, 1.42, potential_vertical(6, 10)}));
  const Spectrum c = eigh_dense(build_hamiltonian(b, {1.0, 1.42, potential_angled(6, 10)}));
  CHECK((a.energies - c.energies).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("dense ceiling") {
  const SectorBasis b(6, 4);
  const SparseSymMatrix H = build_hamiltonian(b, {1.0, 1.0, potential_vertical(6, 10)});
  CHECK_THROWS_AS(eigh_dense(H, 100), CapacityError);
}

TEST_CASE("Lanczos and dense ground states agree") {
  for (const auto& sys : test_systems()) {
    CAPTURE(sys.L);
    CAPTURE(sys.N);
    const SectorBasis b(sys.L, sys.N);
    const SparseSymMatrix H = build_hamiltonian(b, {1.0, sys.U, sys.V});
    GroundStateOptions o;
    const GroundState dense = ground_state(H, o);
    o.force_iterative = true;
    const GroundState lanczos = ground_state(H, o);
    CHECK_FALSE(dense.iterative);
    CHECK(lanczos.iterative);
    CHECK(std::abs(dense.energy - lanczos.energy) <= 1e-8);
    CHECK(lanczos.residual <= 1e-9 * std::max(1.0, H.norm_inf()));
    CHECK(std::abs(std::abs(dense.vector.dot(lanczos.vector)) - 1.0) <= 1e-8);
  }
}

TEST_CASE("cooling ground state through both solver paths") {
  const SectorBasis b(6, 4);
  const SparseSymMatrix H = build_hamiltonian(b, {1.0, 1.42, potential_cooling(6, 10)});
  GroundStateOptions o;
  o.force_iterative = true;
  CHECK(std::abs(ground_state(H, o).energy - eigh_dense(H).energies(0)) <= 1e-8);
}

TEST_CASE("spectral evolution basics") {
  Eigen::MatrixXd A(2, 2);
  A << 0, -1, -1, 0;
  const Spectrum s = eigh_dense(from_dense(A));
  Eigen::VectorXcd e1(2);
  e1 << 1.0, 0.0;
  const std::vector<double> times = {0.0, 0.3, 0.7, 1.1, 2.5, 7.0};
  const auto out = evolve_spectral(s, StateVector(e1), times);
  REQUIRE(out.size() == times.size());
  CHECK(out[0].amplitudes() == e1);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double expected = std::pow(std::sin(times[k]), 2);
    CHECK(std::norm(out[k].amplitudes()(1)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(out[k].norm() - 1.0) <= 1e-10);
  }

  const SectorBasis b(6, 4);
  const Spectrum sp = eigh_dense(build_hamiltonian(b, {1.0, 1.42, potential_vertical(6, 10)}));
  const Eigen::VectorXcd vk = sp.vectors.col(17).cast<cplx>();
  for (const auto& psi : evolve_spectral(sp, StateVector(vk), times)) {
    CHECK(std::abs(std::abs(vk.dot(psi.amplitudes())) - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(evolve_spectral(sp, StateVector(e1), times), DimensionMismatch);
  const std::vector<double> bad = {0.0, 2.0, 1.0};
  CHECK_THROWS_AS(evolve_spectral(s, StateVector(e1), bad), InvalidArgument);
}

TEST_CASE("spectral propagation matches the matrix-exponential oracle") {
  for (const auto& sys : test_systems()) {
    const SectorBasis b(sys.L, sys.N);
    const SparseSymMatrix H = build_hamiltonian(b, {1.0, sys.U, sys.V});
    const Eigen::MatrixXd D = H.to_dense();
    const Spectrum s = eigh_dense(H);
    const Eigen::VectorXcd psi0 = random_state(D.rows(), 11);
    const std::vector<double> times = {0.0, 0.5, 3.0, 12.25};
    const auto out = evolve_spectral(s, StateVector(psi0), times);
    for (std::size_t k = 1; k < times.size(); ++k) {
      const Eigen::VectorXcd ref = expm_propagate(D, psi0, times[k]);
      CHECK((out[k].amplitudes() - ref).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("Krylov agrees with spectral on every test system up to dim 500") {
  const std::vector<double> times = time_grid(20.0, 0.25);
  for (const auto& sys : test_systems()) {
    CAPTURE(sys.L);
    CAPTURE(sys.N);
    const SectorBasis b(sys.L, sys.N);
    REQUIRE(b.size() <= 500);
    const SparseSymMatrix H = build_hamiltonian(b, {1.0, sys.U, sys.V});
    const Spectrum s = eigh_dense(H);
    const Eigen::VectorXcd psi0 = random_state(static_cast<Eigen::Index>(b.size()), 5);
    std::vector<Eigen::VectorXcd> ref;
    evolve_spectral(s, psi0, times, [&](std::size_t, const Eigen::VectorXcd& p) { ref.push_back(p); });
    for (bool reorth : {false, true}) {
      KrylovOptions ko;
      ko.reorthogonalize = reorth;
      double worst = 0.0;
      evolve_krylov(H, psi0, times, ko, [&](std::size_t k, const Eigen::VectorXcd& p) {
        worst = std::max(worst, (p - ref[k]).cwiseAbs().maxCoeff());
      });
      CHECK(worst <= 1e-8);
    }
  }
}

TEST_CASE("Krylov edge cases") {
  const SectorBasis b(6, 2);
  const SparseSymMatrix H = build_hamiltonian(b, {1.0, 1.0, potential_vertical(6, 10)});
  const Eigen::VectorXcd psi0 = random_state(static_cast<Eigen::Index>(b.size()), 3);
  const std::vector<double> times = {0.0, 1.0, 4.0};

  const auto out = evolve_krylov(H, StateVector(psi0), times);
  CHECK(out[0].amplitudes() == psi0);

  const SparseSymMatrix Z = SparseSymMatrix::Builder(b.size()).build();
  for (const auto& psi : evolve_krylov(Z, StateVector(psi0), times)) {
    CHECK((psi.amplitudes() - psi0).cwiseAbs().maxCoeff() <= 1e-14);
  }

  // A small subspace forces step halving on the same basis.
  KrylovOptions tight;
  tight.subspace_dim = 4;
  KrylovStats stats = evolve_krylov(H, psi0, times, tight, [](std::size_t, const Eigen::VectorXcd&) {});
  CHECK(stats.rejections > 0);
  const Spectrum s = eigh_dense(H);
  const auto ref = evolve_spectral(s, StateVector(psi0), times);
  const auto got = evolve_krylov(H, StateVector(psi0), times, tight);
  CHECK((got.back().amplitudes() - ref.back().amplitudes()).cwiseAbs().maxCoeff() <= 1e-8);

  KrylovOptions bad;
  bad.subspace_dim = 1;
  CHECK_THROWS_AS(evolve_krylov(H, StateVector(psi0), times, bad), InvalidArgument);
}

TEST_CASE("number expectations") {
  auto basis = std::make_shared<const SectorBasis>(6, 4);
  Eigen::VectorXcd fock = Eigen::VectorXcd::Zero(126);
  fock(static_cast<Eigen::Index>(basis->index_of(OccupationVector({2, 2, 0, 0, 0, 0})))) = 1.0;
  const StateVector f(basis, fock);
  CHECK(expectation_number(f, 1) == 2.0);
  CHECK(expectation_number(f, 2) == 2.0);
  for (int j = 3; j <= 6; ++j) CHECK(expectation_number(f, j) == 0.0);
  CHECK_THROWS_AS(expectation_number(f, 0), InvalidArgument);
  CHECK_THROWS_AS(expectation_number(f, 7), InvalidArgument);

  const StateVector r(basis, random_state(126, 9));
  double total = 0.0;
  for (int j = 1; j <= 6; ++j) total += expectation_number(r, j);
  CHECK(std::abs(total - 4.0) <= 1e-12);
  const auto dens = site_densities(*basis, r.amplitudes());
  for (int j = 1; j <= 6; ++j) CHECK(std::abs(dens[static_cast<std::size_t>(j - 1)] - expectation_number(r, j)) <= 1e-13);

  auto two = std::make_shared<const SectorBasis>(2, 1);
  Eigen::VectorXcd sup(2);
  sup << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(expectation_number(StateVector(two, sup), 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sign canonicalisation") {
  Eigen::VectorXd v(3);
  v << 0.2, -0.9, 0.1;
  canonicalize_sign(v);
  CHECK(v(1) == 0.9);
  CHECK(v(0) == -0.2);
  Eigen::VectorXd tie(2);
  tie << -0.5, 0.5;
  canonicalize_sign(tie);
  CHECK(tie(0) == 0.5);
}

TEST_CASE("degenerate groups") {
  Spectrum s;
  s.energies = Eigen::Vector4d(-1.0, 0.0, 0.0 + 1e-12, 2.0);
  s.vectors = Eigen::MatrixXd::Identity(4, 4);
  const auto groups = s.degenerate_groups();
  REQUIRE(groups.size() == 1);
  CHECK(groups[0] == std::vector<std::size_t>{1, 2});
}
