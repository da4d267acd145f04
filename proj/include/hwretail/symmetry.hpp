#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hwretail/geometry.hpp"

namespace hwretail {

/// Bijection of zone indices {0..K-1}; (p * q)(i) = p(q(i)).
class Permutation {
 public:
  explicit Permutation(std::vector<int> image);
  static Permutation identity(int degree);

  int degree() const { return static_cast<int>(image_.size()); }
  int operator()(int i) const { return image_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& image() const { return image_; }
  bool is_identity() const;

  Permutation inverse() const;
  friend Permutation operator*(const Permutation& p, const Permutation& q);
  friend auto operator<=>(const Permutation&, const Permutation&) = default;
  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> image_;
};

/// Finite permutation group with all elements materialized in sorted order.
class PermGroup {
 public:
  /// Closes `generators` under composition. Throws ResourceLimit beyond `max_order`.
  static PermGroup generate(std::vector<Permutation> generators, int degree,
                            std::size_t max_order = 1'000'000);

  int degree() const { return degree_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<Permutation>& generators() const { return generators_; }
  const std::vector<Permutation>& elements() const { return elements_; }
  bool contains(const Permutation& p) const;

  friend std::vector<PermGroup> enumerate_subgroups(const PermGroup&, std::size_t);

 private:
  PermGroup(int degree, std::vector<Permutation> generators, std::vector<Permutation> elements)
      : degree_(degree), generators_(std::move(generators)), elements_(std::move(elements)) {}

  int degree_;
  std::vector<Permutation> generators_;
  std::vector<Permutation> elements_;
};

/// Distance-preserving symmetry group of a lattice geography: two unit
/// translations, a point-group rotation and a reflection (ring: rotation and
/// reflection). Throws Error for custom geographies.
PermGroup lattice_group(const Geography& geo);

/// Trivial group acting on `degree` points.
PermGroup trivial_group(int degree);

inline constexpr std::size_t kDefaultSubgroupCap = 1000;

/// All subgroups of G, found by repeatedly extending known subgroups with
/// cyclic subgroups until no new subgroup appears. Ordered by (order, elements).
std::vector<PermGroup> enumerate_subgroups(const PermGroup& group,
                                           std::size_t max_order = kDefaultSubgroupCap);

/// Orbits of H on {0..degree-1}, each sorted, listed by smallest member.
std::vector<std::vector<int>> orbits(const PermGroup& group);

/// Lexicographically smallest sorted image of `support` over the group.
std::vector<int> canonicalize(std::span<const int> support, const PermGroup& group);

/// Applies g to a zone set and sorts the result.
std::vector<int> apply_to_set(const Permutation& g, std::span<const int> zones);

/// Candidate support of an invariant equilibrium, unique up to symmetry.
struct SupportPattern {
  int id = 0;                      ///< 1-based, ascending (M, canonical_key)
  std::vector<int> support;        ///< 0-based zones; equals canonical_key
  int M = 0;
  std::vector<int> canonical_key;  ///< 0-based
};

/// Every orbit of every subgroup of the lattice group, deduplicated up to symmetry.
std::vector<SupportPattern> invariant_supports(const Geography& geo,
                                               std::size_t max_order = kDefaultSubgroupCap);
std::vector<SupportPattern> invariant_supports(const PermGroup& group,
                                               std::size_t max_order = kDefaultSubgroupCap);

/// Human-readable name: "uniform", "mono-centric", "duo-centric", ... "M-centric".
std::string pattern_label(int m, int zones);

/// JSON array of {id, M, label, support, canonical_key} with 1-based zones.
std::string catalog_to_json(std::span<const SupportPattern> patterns, int zones);

}  // namespace hwretail
