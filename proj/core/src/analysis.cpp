#include "bht/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "bht/errors.hpp"

namespace bht {

namespace {

std::vector<double> uniform_grid(double lo, double step, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) g[k] = lo + static_cast<double>(k) * step;
  return g;
}

void require_ascending(const std::vector<double>& v, const char* name) {
  if (v.empty()) throw InvalidArgument(std::string(name) + " must be non-empty");
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k])) throw InvalidArgument(std::string(name) + " must be finite");
    if (k > 0 && !(v[k] > v[k - 1])) throw InvalidArgument(std::string(name) + " must be strictly ascending");
  }
}

}  // namespace

std::vector<double> default_U_grid() { return uniform_grid(0.0, 0.02, 251); }

std::vector<double> default_sweep_times() { return uniform_grid(0.0, 0.25, 201); }

void SweepSpec::validate() const {
  QuenchSpec check{L, N, J, 0.0, h, Barrier::vertical(), {0.0}};
  check.validate();
  require_ascending(U_values, "U grid");
  require_ascending(t_values, "t grid");
  if (t_values.front() < 0.0) throw InvalidArgument("t grid must be non-negative");
}

SweepRow sweep_row(const SweepSpec& spec, double U) {
  auto basis = std::make_shared<const SectorBasis>(spec.L, spec.N, spec.evolution.max_sector_dimension);
  const InitialState init = prepare_initial_state(basis, spec.J, U, spec.h, spec.evolution.ground);
  const SparseSymMatrix Ha = build_hamiltonian(*basis, ModelParams{spec.J, U, potential_vertical(spec.L, spec.h)});
  const SparseSymMatrix Hb = build_hamiltonian(*basis, ModelParams{spec.J, U, potential_angled(spec.L, spec.h)});
  const Trajectory a = record_trajectory(Ha, init.state, spec.t_values, spec.evolution);
  const Trajectory b = record_trajectory(Hb, init.state, spec.t_values, spec.evolution);
  SweepRow row{population_imbalance(a, b), conservation(a)};
  row.stats.merge(conservation(b));
  return row;
}

SweepGrid sweep_interaction(const SweepSpec& spec) {
  spec.validate();
  SweepGrid grid;
  grid.N = spec.N;
  grid.U_values = spec.U_values;
  grid.t_values = spec.t_values;
  grid.dn.assign(grid.rows() * grid.cols(), 0.0);
  grid.diagnostics.assign(grid.rows(), {});

  unsigned workers = spec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec.threads;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(grid.rows()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < grid.rows(); r = next++) {
      try {
        SweepRow row = sweep_row(spec, grid.U_values[r]);
        std::copy(row.dn.begin(), row.dn.end(), grid.dn.begin() + static_cast<std::ptrdiff_t>(r * grid.cols()));
        grid.diagnostics[r] = row.stats;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = grid.rows();
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return grid;
}

std::vector<FockWeight> fock_composition(const Eigen::Ref<const Eigen::VectorXd>& eigvec, const SectorBasis& basis,
                                         std::size_t top_k) {
  if (static_cast<std::size_t>(eigvec.size()) != basis.size()) {
    throw DimensionMismatch("fock_composition: vector of size " + std::to_string(eigvec.size()) +
                            " for a basis of size " + std::to_string(basis.size()));
  }
  if (top_k > basis.size()) throw InvalidArgument("fock_composition: top_k exceeds the sector dimension");

  std::vector<std::size_t> order(basis.size());
  std::iota(order.begin(), order.end(), 0);
  auto weight = [&](std::size_t j) { return eigvec(static_cast<Eigen::Index>(j)) * eigvec(static_cast<Eigen::Index>(j)); };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top_k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double wa = weight(a);
                      const double wb = weight(b);
                      return wa != wb ? wa > wb : a < b;
                    });

  std::vector<FockWeight> out;
  out.reserve(top_k);
  for (std::size_t k = 0; k < top_k; ++k) out.push_back({basis.state_at(order[k]), order[k], weight(order[k])});
  return out;
}

double OverlapReport::total_overlap() const {
  double s = 0.0;
  for (const auto& e : eigenstates) s += e.overlap;
  return s;
}

std::vector<std::size_t> OverlapReport::ranked() const {
  std::vector<std::size_t> order(eigenstates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eigenstates[a].overlap > eigenstates[b].overlap; });
  return order;
}

OverlapReport overlap_analysis(const StateVector& psi0, const Spectrum& spectrum, const OverlapOptions& options) {
  if (psi0.size() != spectrum.size()) {
    throw DimensionMismatch("overlap_analysis: state has " + std::to_string(psi0.size()) + " amplitudes, spectrum " +
                            std::to_string(spectrum.size()));
  }
  if (options.top_k < 1) throw InvalidArgument("overlap_analysis: top_k must be >= 1");
  if (!psi0.basis()) throw InvalidArgument("overlap_analysis: state is not bound to a basis");

  const Eigen::VectorXd c_re = spectrum.vectors.transpose() * psi0.amplitudes().real();
  const Eigen::VectorXd c_im = spectrum.vectors.transpose() * psi0.amplitudes().imag();
  const std::size_t top_k = std::min(options.top_k, spectrum.size());

  OverlapReport report;
  report.eigenstates.resize(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    auto& e = report.eigenstates[i];
    e.index = i;
    e.energy = spectrum.energies(ii);
    e.overlap = c_re(ii) * c_re(ii) + c_im(ii) * c_im(ii);
    if (e.overlap > options.report_threshold) {
      e.fock_top = fock_composition(spectrum.vectors.col(ii), *psi0.basis(), top_k);
    }
  }
  for (auto& group : spectrum.degenerate_groups(options.degeneracy_tol)) {
    DegenerateOverlap d;
    for (std::size_t i : group) {
      report.eigenstates[i].degenerate = true;
      d.overlap_sum += report.eigenstates[i].overlap;
    }
    d.indices = std::move(group);
    report.degenerate_groups.push_back(std::move(d));
  }
  return report;
}

std::vector<DirectionalWindow> find_directional_windows(const SweepGrid& grid, double threshold) {
  if (!(threshold > 0.0)) throw InvalidArgument("find_directional_windows: threshold must be positive");
  std::vector<DirectionalWindow> windows;

  // Per row: location of the largest |dn|.
  std::vector<std::size_t> arg(grid.rows(), 0);
  std::vector<double> peak(grid.rows(), 0.0);
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    const auto row = grid.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (std::abs(row[c]) > peak[r]) {
        peak[r] = std::abs(row[c]);
        arg[r] = c;
      }
    }
  }

  for (std::size_t r = 0; r < grid.rows();) {
    if (peak[r] < threshold) {
      ++r;
      continue;
    }
    DirectionalWindow w;
    w.U_begin = grid.U_values[r];
    std::size_t best = r;
    std::size_t end = r;
    for (; end < grid.rows() && peak[end] >= threshold; ++end) {
      if (peak[end] > peak[best]) best = end;
    }
    w.U_end = grid.U_values[end - 1];
    w.peak = peak[best];
    w.peak_U = grid.U_values[best];
    w.peak_t = grid.t_values[arg[best]];
    w.sign = grid.at(best, arg[best]) > 0.0 ? 1 : -1;
    windows.push_back(w);
    r = end;
  }
  return windows;
}

}  // namespace bht
