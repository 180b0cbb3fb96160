#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bht {

/// Boson counts per lattice site, the label of a Fock state |n_1 ... n_L>.
class OccupationVector {
 public:
  OccupationVector() = default;
  explicit OccupationVector(std::vector<int> counts);

  std::size_t size() const noexcept { return counts_.size(); }
  int operator[](std::size_t site) const { return counts_[site]; }
  const std::vector<int>& counts() const noexcept { return counts_; }
  int total() const noexcept;

  /// Digit string such as "220000". Falls back to comma separation when any count exceeds 9.
  std::string to_string() const;

  friend bool operator==(const OccupationVector&, const OccupationVector&) = default;

 private:
  std::vector<int> counts_;
};

/// Number of Fock states of N bosons on L sites, C(L+N-1, N).
/// Throws InvalidArgument on L < 1 or N < 0 and std::overflow_error above 2^63-1.
std::int64_t dimension(int L, int N);

inline constexpr std::size_t kDefaultMaxSectorDimension = 2'000'000;

/// Fixed-(L, N) Fock states in strictly descending lexicographic order:
/// state 0 is |N 0 ... 0>, the last is |0 ... 0 N>.
///
/// Indexing uses combinatorial ranking, so lookup needs no hash table.
/// Immutable after construction.
class SectorBasis {
 public:
  using Count = std::uint8_t;

  SectorBasis(int L, int N, std::size_t max_dimension = kDefaultMaxSectorDimension);

  int sites() const noexcept { return L_; }
  int particles() const noexcept { return N_; }
  std::size_t size() const noexcept { return size_; }

  /// Occupation of `site` (0-based) in state `index`.
  int occupation(std::size_t index, int site) const noexcept {
    return occupations_[index * static_cast<std::size_t>(L_) + static_cast<std::size_t>(site)];
  }
  std::span<const Count> row(std::size_t index) const noexcept {
    return {occupations_.data() + index * static_cast<std::size_t>(L_), static_cast<std::size_t>(L_)};
  }

  OccupationVector state_at(std::size_t index) const;

  /// Position of `occ`. Throws DimensionMismatch on wrong length, NotInSector when the total is not N.
  std::size_t index_of(const OccupationVector& occ) const;

  /// Unchecked rank of an in-sector occupation row.
  std::size_t rank(std::span<const Count> occ) const noexcept;

 private:
  // Number of states with `m` bosons on `s` trailing sites.
  std::size_t tail_count(int s, int m) const noexcept {
    return tail_counts_[static_cast<std::size_t>(s) * static_cast<std::size_t>(N_ + 1) +
                        static_cast<std::size_t>(m)];
  }

  int L_;
  int N_;
  std::size_t size_;
  std::vector<Count> occupations_;
  std::vector<std::size_t> tail_counts_;
};

/// Convenience wrapper matching the free-function form used by the experiments.
SectorBasis enumerate_sector(int L, int N, std::size_t max_dimension = kDefaultMaxSectorDimension);

}  // namespace bht
