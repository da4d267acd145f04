#include "hwretail/symmetry.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "hwretail/error.hpp"

namespace hwretail {

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
  std::vector<char> seen(image_.size(), 0);
  for (int v : image_) {
    if (v < 0 || v >= static_cast<int>(image_.size()) || seen[static_cast<std::size_t>(v)])
      throw Error("not a permutation: image must list each index exactly once");
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

Permutation Permutation::identity(int degree) {
  std::vector<int> img(static_cast<std::size_t>(degree));
  std::iota(img.begin(), img.end(), 0);
  return Permutation(std::move(img));
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < image_.size(); ++i)
    if (image_[i] != static_cast<int>(i)) return false;
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(image_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) inv[static_cast<std::size_t>(image_[i])] = static_cast<int>(i);
  return Permutation(std::move(inv));
}

Permutation operator*(const Permutation& p, const Permutation& q) {
  if (p.degree() != q.degree()) throw Error("composing permutations of different degree");
  std::vector<int> img(q.image_.size());
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = p.image_[static_cast<std::size_t>(q.image_[i])];
  return Permutation(std::move(img));
}

namespace {

struct VectorHash {
  template <class T>
  std::size_t operator()(const std::vector<T>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
    return h;
  }
};

}  // namespace

PermGroup PermGroup::generate(std::vector<Permutation> generators, int degree, std::size_t max_order) {
  for (const auto& g : generators)
    if (g.degree() != degree) throw Error("generator degree mismatch");
  std::unordered_set<std::vector<int>, VectorHash> seen;
  std::vector<Permutation> elements{Permutation::identity(degree)};
  seen.insert(elements.front().image());
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (const auto& s : generators) {
      Permutation h = s * elements[head];
      if (seen.insert(h.image()).second) {
        elements.push_back(std::move(h));
        if (elements.size() > max_order)
          throw ResourceLimit(fmt::format("group order exceeds cap {}", max_order));
      }
    }
  }
  std::sort(elements.begin(), elements.end());
  return PermGroup(degree, std::move(generators), std::move(elements));
}

bool PermGroup::contains(const Permutation& p) const {
  return std::binary_search(elements_.begin(), elements_.end(), p);
}

PermGroup trivial_group(int degree) { return PermGroup::generate({}, degree); }

PermGroup lattice_group(const Geography& geo) {
  const int n = geo.side();
  const int k = geo.zones();
  std::vector<Permutation> gens;
  auto lattice_map = [n](auto&& f) {
    std::vector<int> img(static_cast<std::size_t>(n * n));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        auto [rr, cc] = f(r, c);
        rr = ((rr % n) + n) % n;
        cc = ((cc % n) + n) % n;
        img[static_cast<std::size_t>(r * n + c)] = rr * n + cc;
      }
    return Permutation(std::move(img));
  };
  switch (geo.kind()) {
    case LatticeKind::ring: {
      std::vector<int> rot(static_cast<std::size_t>(k)), ref(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        rot[static_cast<std::size_t>(i)] = (i + 1) % k;
        ref[static_cast<std::size_t>(i)] = (k - i) % k;
      }
      gens = {Permutation(rot), Permutation(ref)};
      break;
    }
    case LatticeKind::square_torus:
      gens = {lattice_map([](int r, int c) { return std::pair{r + 1, c}; }),
              lattice_map([](int r, int c) { return std::pair{r, c + 1}; }),
              lattice_map([](int r, int c) { return std::pair{-c, r}; }),   // 90 degrees
              lattice_map([](int r, int c) { return std::pair{c, r}; })};
      break;
    case LatticeKind::tri_torus:
      gens = {lattice_map([](int r, int c) { return std::pair{r + 1, c}; }),
              lattice_map([](int r, int c) { return std::pair{r, c + 1}; }),
              lattice_map([](int r, int c) { return std::pair{-c, r + c}; }),  // 60 degrees, axial
              lattice_map([](int r, int c) { return std::pair{c, r}; })};
      break;
    case LatticeKind::custom:
      throw Error("symmetry group of a custom geography is not supported (automorphism search not implemented)");
  }
  return PermGroup::generate(std::move(gens), k);
}

namespace {

// Subgroup bookkeeping in terms of element indices of the parent group.
class GroupTable {
 public:
  explicit GroupTable(const PermGroup& g) : n_(g.order()) {
    const auto& el = g.elements();
    mul_.resize(n_ * n_);
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b) {
        const Permutation ab = el[a] * el[b];
        auto it = std::lower_bound(el.begin(), el.end(), ab);
        mul_[a * n_ + b] = static_cast<std::uint32_t>(it - el.begin());
      }
    identity_ = static_cast<std::uint32_t>(
        std::lower_bound(el.begin(), el.end(), Permutation::identity(g.degree())) - el.begin());
  }

  std::size_t size() const { return n_; }
  std::size_t words() const { return (n_ + 63) / 64; }

  struct Subgroup {
    std::vector<std::uint64_t> bits;
    std::vector<std::uint32_t> members;
    std::vector<std::uint32_t> gens;
  };

  // Subgroup generated by `base` (already a subgroup, may be empty) and `gens`.
  Subgroup close(const Subgroup* base, std::vector<std::uint32_t> gens) const {
    Subgroup out;
    out.bits.assign(words(), 0);
    out.gens = std::move(gens);
    auto add = [&](std::uint32_t e) {
      auto& w = out.bits[e / 64];
      const std::uint64_t m = std::uint64_t{1} << (e % 64);
      if (w & m) return false;
      w |= m;
      out.members.push_back(e);
      return true;
    };
    if (base)
      for (auto e : base->members) add(e);
    else
      add(identity_);
    for (std::size_t head = 0; head < out.members.size(); ++head) {
      const std::uint32_t e = out.members[head];
      for (auto s : out.gens) add(mul_[s * n_ + e]);
    }
    std::sort(out.members.begin(), out.members.end());
    return out;
  }

  static bool has(const Subgroup& h, std::uint32_t e) { return (h.bits[e / 64] >> (e % 64)) & 1u; }

 private:
  std::size_t n_;
  std::vector<std::uint32_t> mul_;
  std::uint32_t identity_ = 0;
};

}  // namespace

std::vector<PermGroup> enumerate_subgroups(const PermGroup& group, std::size_t max_order) {
  if (group.order() > max_order)
    throw ResourceLimit(fmt::format(
        "group order {} exceeds the subgroup-enumeration cap {}; raise it with --subgroup-cap",
        group.order(), max_order));
  const GroupTable table(group);
  using Subgroup = GroupTable::Subgroup;

  std::unordered_map<std::vector<std::uint64_t>, std::size_t, VectorHash> index;
  std::vector<Subgroup> found;
  auto remember = [&](Subgroup&& h) -> bool {
    if (index.count(h.bits)) return false;
    index.emplace(h.bits, found.size());
    found.push_back(std::move(h));
    return true;
  };

  // Cyclic subgroups, one generator each.
  std::vector<std::uint32_t> cyclic_gen;
  remember(table.close(nullptr, {}));
  for (std::uint32_t g = 0; g < table.size(); ++g) {
    Subgroup c = table.close(nullptr, {g});
    if (remember(std::move(c))) cyclic_gen.push_back(g);
  }

  std::vector<std::size_t> frontier(found.size());
  std::iota(frontier.begin(), frontier.end(), std::size_t{0});
  while (!frontier.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t hi : frontier) {
      for (std::uint32_t g : cyclic_gen) {
        if (GroupTable::has(found[hi], g)) continue;
        std::vector<std::uint32_t> gens = found[hi].gens;
        gens.push_back(g);
        Subgroup j = table.close(&found[hi], std::move(gens));
        if (remember(std::move(j))) next.push_back(found.size() - 1);
      }
    }
    frontier = std::move(next);
  }

  std::sort(found.begin(), found.end(), [](const Subgroup& a, const Subgroup& b) {
    if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
    return a.members < b.members;
  });

  const auto& el = group.elements();
  std::vector<PermGroup> out;
  out.reserve(found.size());
  for (const auto& h : found) {
    std::vector<Permutation> gens, members;
    for (auto g : h.gens) gens.push_back(el[g]);
    for (auto e : h.members) members.push_back(el[e]);
    out.push_back(PermGroup(group.degree(), std::move(gens), std::move(members)));
  }
  return out;
}

std::vector<std::vector<int>> orbits(const PermGroup& group) {
  const int k = group.degree();
  std::vector<int> parent(static_cast<std::size_t>(k));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      auto& p = parent[static_cast<std::size_t>(v)];
      p = parent[static_cast<std::size_t>(p)];
      v = p;
    }
    return v;
  };
  // Generators suffice for a finite group; fall back to elements when none are recorded.
  const auto& acting = group.generators().empty() ? group.elements() : group.generators();
  for (const auto& g : acting)
    for (int i = 0; i < k; ++i) {
      const int a = find(i), b = find(g(i));
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  std::vector<std::vector<int>> classes;
  std::vector<int> slot(static_cast<std::size_t>(k), -1);
  for (int i = 0; i < k; ++i) {
    const int r = find(i);
    if (slot[static_cast<std::size_t>(r)] < 0) {
      slot[static_cast<std::size_t>(r)] = static_cast<int>(classes.size());
      classes.emplace_back();
    }
    classes[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(i);
  }
  return classes;
}

std::vector<int> apply_to_set(const Permutation& g, std::span<const int> zones) {
  std::vector<int> img;
  img.reserve(zones.size());
  for (int z : zones) img.push_back(g(z));
  std::sort(img.begin(), img.end());
  return img;
}

std::vector<int> canonicalize(std::span<const int> support, const PermGroup& group) {
  if (support.empty()) throw Error("cannot canonicalize an empty support");
  std::vector<int> best(support.begin(), support.end());
  std::sort(best.begin(), best.end());
  std::vector<int> img(best.size());
  for (const auto& g : group.elements()) {
    for (std::size_t i = 0; i < best.size(); ++i) img[i] = g(support[i]);
    std::sort(img.begin(), img.end());
    if (img < best) best = img;
  }
  return best;
}

std::vector<SupportPattern> invariant_supports(const PermGroup& group, std::size_t max_order) {
  const auto subgroups = enumerate_subgroups(group, max_order);
  std::set<std::vector<int>> raw;
  for (const auto& h : subgroups)
    for (auto& orbit : orbits(h)) raw.insert(std::move(orbit));

  std::set<std::vector<int>> keys;
  for (const auto& s : raw) keys.insert(canonicalize(s, group));

  std::vector<SupportPattern> patterns;
  for (const auto& key : keys) {
    SupportPattern p;
    p.support = key;
    p.canonical_key = key;
    p.M = static_cast<int>(key.size());
    patterns.push_back(std::move(p));
  }
  std::sort(patterns.begin(), patterns.end(), [](const SupportPattern& a, const SupportPattern& b) {
    if (a.M != b.M) return a.M < b.M;
    return a.canonical_key < b.canonical_key;
  });
  for (std::size_t i = 0; i < patterns.size(); ++i) patterns[i].id = static_cast<int>(i + 1);
  return patterns;
}

std::vector<SupportPattern> invariant_supports(const Geography& geo, std::size_t max_order) {
  return invariant_supports(lattice_group(geo), max_order);
}

std::string pattern_label(int m, int zones) {
  if (m == zones) return "uniform";
  switch (m) {
    case 1: return "mono-centric";
    case 2: return "duo-centric";
    case 3: return "tri-centric";
    case 4: return "quad-centric";
    default: return fmt::format("{}-centric", m);
  }
}

std::string catalog_to_json(std::span<const SupportPattern> patterns, int zones) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : patterns) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["M"] = p.M;
    j["label"] = pattern_label(p.M, zones);
    auto one_based = [](const std::vector<int>& v) {
      std::vector<int> out(v);
      for (auto& z : out) ++z;
      return out;
    };
    j["support"] = one_based(p.support);
    j["canonical_key"] = one_based(p.canonical_key);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace hwretail
