#include "bht/fock_basis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bht/errors.hpp"

namespace bht {

OccupationVector::OccupationVector(std::vector<int> counts) : counts_(std::move(counts)) {
  for (int c : counts_) {
    if (c < 0) throw InvalidArgument("occupation counts must be non-negative");
  }
}

int OccupationVector::total() const noexcept { return std::accumulate(counts_.begin(), counts_.end(), 0); }

std::string OccupationVector::to_string() const {
  bool single_digit = true;
  for (int c : counts_) single_digit = single_digit && c <= 9;
  std::string out;
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    if (!single_digit && j > 0) out += ',';
    out += std::to_string(counts_[j]);
  }
  return out;
}

__extension__ using u128 = unsigned __int128;

std::int64_t dimension(int L, int N) {
  if (L < 1) throw InvalidArgument("dimension: L must be >= 1, got " + std::to_string(L));
  if (N < 0) throw InvalidArgument("dimension: N must be >= 0, got " + std::to_string(N));
  // C(L+N-1, N) built as a running product of exact binomials C(L-1+k, k).
  const int k_max = std::min(N, L - 1);
  const int n = L + N - 1;
  u128 c = 1;
  constexpr auto limit = static_cast<u128>(std::numeric_limits<std::int64_t>::max());
  for (int k = 1; k <= k_max; ++k) {
    c = c * static_cast<u128>(n - k_max + k) / static_cast<u128>(k);
    if (c > limit) throw std::overflow_error("dimension: C(L+N-1, N) exceeds 2^63-1");
  }
  return static_cast<std::int64_t>(c);
}

SectorBasis::SectorBasis(int L, int N, std::size_t max_dimension) : L_(L), N_(N) {
  const std::int64_t dim = dimension(L, N);
  if (N > std::numeric_limits<Count>::max()) {
    throw CapacityError("SectorBasis: N = " + std::to_string(N) + " exceeds per-site storage");
  }
  if (static_cast<std::uint64_t>(dim) > max_dimension) {
    throw CapacityError("SectorBasis: dimension " + std::to_string(dim) + " for (L=" + std::to_string(L) +
                        ", N=" + std::to_string(N) + ") exceeds ceiling " + std::to_string(max_dimension));
  }
  size_ = static_cast<std::size_t>(dim);

  tail_counts_.assign(static_cast<std::size_t>(L + 1) * static_cast<std::size_t>(N + 1), 0);
  for (int s = 1; s <= L; ++s) {
    for (int m = 0; m <= N; ++m) {
      tail_counts_[static_cast<std::size_t>(s) * static_cast<std::size_t>(N + 1) + static_cast<std::size_t>(m)] =
          static_cast<std::size_t>(dimension(s, m));
    }
  }

  const auto width = static_cast<std::size_t>(L);
  occupations_.resize(size_ * width);
  std::vector<int> cur(width, 0);
  cur[0] = N;
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t j = 0; j < width; ++j) occupations_[i * width + j] = static_cast<Count>(cur[j]);
    if (i + 1 == size_) break;
    // Descending-lex successor: decrement the rightmost non-zero entry before the last site and
    // collect everything to its right into the next site.
    int k = L - 2;
    while (cur[static_cast<std::size_t>(k)] == 0) --k;
    int rest = 0;
    for (int j = k + 1; j < L; ++j) {
      rest += cur[static_cast<std::size_t>(j)];
      cur[static_cast<std::size_t>(j)] = 0;
    }
    --cur[static_cast<std::size_t>(k)];
    cur[static_cast<std::size_t>(k + 1)] = rest + 1;
  }
}

OccupationVector SectorBasis::state_at(std::size_t index) const {
  if (index >= size_) throw InvalidArgument("state_at: index out of range");
  auto r = row(index);
  return OccupationVector(std::vector<int>(r.begin(), r.end()));
}

std::size_t SectorBasis::rank(std::span<const Count> occ) const noexcept {
  // States ahead of `occ` are those with a larger entry at the first differing site; summing
  // the tail counts over all larger values collapses to a single tail count per site.
  std::size_t r = 0;
  int remaining = N_;
  for (int k = 0; k + 1 < L_; ++k) {
    const int n = occ[static_cast<std::size_t>(k)];
    const int larger = remaining - n - 1;
    if (larger >= 0) r += tail_count(L_ - k, larger);
    remaining -= n;
    if (remaining == 0) break;
  }
  return r;
}

std::size_t SectorBasis::index_of(const OccupationVector& occ) const {
  if (occ.size() != static_cast<std::size_t>(L_)) {
    throw DimensionMismatch("index_of: occupation has " + std::to_string(occ.size()) + " sites, basis has " +
                            std::to_string(L_));
  }
  if (occ.total() != N_) {
    throw NotInSector("index_of: occupation " + occ.to_string() + " holds " + std::to_string(occ.total()) +
                      " bosons, sector has N = " + std::to_string(N_));
  }
  std::vector<Count> packed(occ.counts().begin(), occ.counts().end());
  return rank(packed);
}

SectorBasis enumerate_sector(int L, int N, std::size_t max_dimension) { return SectorBasis(L, N, max_dimension); }

}  // namespace bht
