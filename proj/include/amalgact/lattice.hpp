#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace amalgact {

using IntVector = std::vector<std::int64_t>;

/// Subgroup of Z^d generated by a finite list of integer vectors.
///
/// Keeps a row echelon (Hermite) basis together with the unimodular
/// transform that produced it, so membership queries also return an
/// integer combination of the original generators.
class IntegerLattice {
 public:
  IntegerLattice(std::size_t dimension, std::vector<IntVector> generators);

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t rank() const noexcept { return basis_.size(); }
  const std::vector<IntVector>& generators() const noexcept { return gens_; }
  const std::vector<IntVector>& basis() const noexcept { return basis_; }

  /// Coefficients c with sum_j c_j * generators[j] == v, or nullopt when v is not in the lattice.
  std::optional<IntVector> coefficients(std::span<const std::int64_t> v) const;
  bool contains(std::span<const std::int64_t> v) const { return coefficients(v).has_value(); }

  /// [Z^d : L] when L has full rank, nullopt when the index is infinite.
  std::optional<std::int64_t> index() const;

  /// Integer relations among the generators: every c with sum_j c_j g_j == 0 is a
  /// combination of these rows.
  const std::vector<IntVector>& relations() const noexcept { return relations_; }

 private:
  std::size_t dim_;
  std::vector<IntVector> gens_;
  std::vector<IntVector> basis_;
  std::vector<std::size_t> pivots_;
  std::vector<IntVector> transform_;  // basis_[i] = sum_j transform_[i][j] * gens_[j]
  std::vector<IntVector> relations_;
};

}  // namespace amalgact
