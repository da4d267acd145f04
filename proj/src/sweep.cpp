#include "hwretail/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "hwretail/error.hpp"
#include "hwretail/parallel.hpp"

namespace hwretail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_double(std::string_view s, std::string_view what) {
  const std::string str(s);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    throw ParseError(fmt::format("cannot parse {} '{}' as a number", what, str));
  }
  if (used != str.size()) throw ParseError(fmt::format("trailing characters in {} '{}'", what, str));
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

void check_increasing(const std::vector<double>& v, std::string_view what) {
  if (v.empty()) throw Error(fmt::format("{} grid is empty", what));
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw Error(fmt::format("{} grid must be strictly increasing", what));
}

/// Shrinks [lo, hi] around the switch of `pred` (pred(lo) != pred(hi)) and
/// returns the midpoint.
double bisect(double lo, double hi, const std::function<bool(double)>& pred, double width) {
  const bool at_lo = pred(lo);
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (pred(mid) == at_lo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Economy economy_at(const Geography& geo, double alpha, double phi) {
  return Economy(geo, ModelParams::from_phi(alpha, phi));
}

std::vector<int> winners_at(const Economy& eco, std::span<const SupportPattern> cands, double tie_tol,
                            double* f_max, int* winner_m) {
  std::vector<double> f(cands.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    f[i] = invariant_potential(eco, cands[i].support);
    best = std::max(best, f[i]);
  }
  std::vector<int> ids;
  int m = 0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (f[i] >= best - tie_tol) {
      ids.push_back(cands[i].id);
      m = std::max(m, cands[i].M);
    }
  }
  std::sort(ids.begin(), ids.end());
  if (f_max) *f_max = best;
  if (winner_m) *winner_m = m;
  return ids;
}

}  // namespace

std::vector<double> make_range(double first, double last, double step) {
  if (!(step > 0.0) || !std::isfinite(first) || !std::isfinite(last) || last < first)
    throw Error(fmt::format("invalid range {}:{}:{}", first, last, step));
  const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-6)) + 1;
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = first + static_cast<double>(i) * step;
  return v;
}

std::vector<double> make_range(std::string_view spec) {
  const auto parts = split(std::string(spec), ':');
  if (parts.size() == 1) return {parse_double(parts[0], "range")};
  if (parts.size() != 3) throw ParseError(fmt::format("range '{}' must be a:b:step", spec));
  return make_range(parse_double(parts[0], "range start"), parse_double(parts[1], "range end"),
                    parse_double(parts[2], "range step"));
}

SweepGrid::SweepGrid(std::vector<double> phi, std::vector<double> alpha)
    : phi_values(std::move(phi)), alpha_values(std::move(alpha)) {
  check_increasing(phi_values, "phi");
  check_increasing(alpha_values, "alpha");
  if (!(phi_values.front() > 0.0) || !(phi_values.back() < 1.0)) throw Error("phi grid must lie in (0, 1)");
  if (!(alpha_values.front() > 0.0)) throw Error("alpha grid must be positive");
}

SweepGrid default_grid() { return {make_range(0.01, 0.99, 0.01), make_range(1.0, 3.0, 0.05)}; }

double phi_star_closed_form(double alpha) {
  if (!(alpha > 1.0)) return kNaN;
  const double s = std::sqrt((alpha - 1.0) / alpha);
  return (1.0 - s) / (1.0 + s);
}

double phi_double_star_derived(double alpha) {
  const double a = std::pow(4.0, alpha);
  if (a < 4.0) return kNaN;
  return 0.5 * (a - 2.0 - std::sqrt(a * (a - 4.0)));
}

double phi_double_star_printed(double alpha) {
  const double a = std::pow(4.0, alpha);
  return 0.5 * (a - 2.0 - std::sqrt(a * (a - 1.0)));
}

Bifurcation bifurcation_2zone(double alpha, std::span<const double> phi_grid) {
  const Geography geo = build_ring(2);
  const std::vector<int> disp{0, 1};
  const std::vector<int> corner{0};
  const State x_disp = State::Constant(2, 0.5);
  const State x_corner = (State(2) << 1.0, 0.0).finished();

  auto eig = [&](double phi) {
    return classify_stability(economy_at(geo, alpha, phi), x_disp).interior_max_eig;
  };
  auto gap = [&](double phi) {
    const Economy eco = economy_at(geo, alpha, phi);
    return invariant_potential(eco, disp) - invariant_potential(eco, corner);
  };

  Bifurcation b{alpha, {}, kNaN, phi_star_closed_form(alpha), kNaN, phi_double_star_derived(alpha),
                phi_double_star_printed(alpha)};
  std::vector<double> eigs, gaps;
  for (double phi : phi_grid) {
    const Economy eco = economy_at(geo, alpha, phi);
    const StabilityReport d = classify_stability(eco, x_disp);
    const StabilityReport c = classify_stability(eco, x_corner);
    const double fd = invariant_potential(eco, disp);
    const double fc = invariant_potential(eco, corner);
    std::string winner = std::abs(fd - fc) <= kTieTol ? "tie" : (fd > fc ? "dispersion" : "agglomeration");
    b.rows.push_back({phi, d.verdict, c.verdict, d.interior_max_eig, fd, fc, std::move(winner)});
    eigs.push_back(d.interior_max_eig);
    gaps.push_back(fd - fc);
  }
  for (std::size_t i = 1; i < phi_grid.size(); ++i) {
    if (std::isnan(b.phi_star) && eigs[i - 1] < 0.0 && eigs[i] >= 0.0)
      b.phi_star = bisect(phi_grid[i - 1], phi_grid[i], [&](double p) { return eig(p) < 0.0; }, 1e-14);
    if (std::isnan(b.phi_double_star) && gaps[i - 1] > 0.0 && gaps[i] <= 0.0)
      b.phi_double_star = bisect(phi_grid[i - 1], phi_grid[i], [&](double p) { return gap(p) > 0.0; }, 1e-14);
  }
  return b;
}

void write_bifurcation_csv(std::ostream& os, const Bifurcation& b) {
  os << fmt::format("# alpha,{:.17g}\n", b.alpha);
  os << fmt::format("# phi_star_bisection,{:.17g}\n", b.phi_star);
  os << fmt::format("# phi_star_closed_form,{:.17g}\n", b.phi_star_closed);
  os << fmt::format("# phi_double_star_bisection,{:.17g}\n", b.phi_double_star);
  os << fmt::format("# phi_double_star_derived,{:.17g}\n", b.phi_double_star_closed);
  os << fmt::format("# phi_double_star_printed,{:.17g}\n", b.phi_double_star_printed);
  os << "phi,dispersion,corner,dispersion_eig,f_dispersion,f_corner,winner\n";
  for (const auto& r : b.rows)
    os << fmt::format("{:.10g},{},{},{:.17g},{:.17g},{:.17g},{}\n", r.phi, to_string(r.dispersion),
                      to_string(r.corner), r.dispersion_eig, r.f_dispersion, r.f_corner, r.winner);
}

namespace {

Verdict parse_verdict(const std::string& s) {
  if (s == "stable") return Verdict::stable;
  if (s == "unstable") return Verdict::unstable;
  if (s == "marginal") return Verdict::marginal;
  throw ParseError(fmt::format("unknown verdict '{}'", s));
}

}  // namespace

Bifurcation read_bifurcation_csv(std::istream& in) {
  Bifurcation b{kNaN, {}, kNaN, kNaN, kNaN, kNaN, kNaN};
  std::map<std::string, double*> keys{{"alpha", &b.alpha},
                                      {"phi_star_bisection", &b.phi_star},
                                      {"phi_star_closed_form", &b.phi_star_closed},
                                      {"phi_double_star_bisection", &b.phi_double_star},
                                      {"phi_double_star_derived", &b.phi_double_star_closed},
                                      {"phi_double_star_printed", &b.phi_double_star_printed}};
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.starts_with("# ")) {
      const auto kv = split(line.substr(2), ',');
      if (kv.size() == 2 && keys.contains(kv[0])) *keys[kv[0]] = parse_double(kv[1], kv[0]);
      continue;
    }
    if (!header) {
      if (!line.starts_with("phi,dispersion")) throw ParseError("bifurcation CSV header missing");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 7) throw ParseError(fmt::format("bifurcation row has {} fields, expected 7", f.size()));
    b.rows.push_back({parse_double(f[0], "phi"), parse_verdict(f[1]), parse_verdict(f[2]),
                      parse_double(f[3], "dispersion_eig"), parse_double(f[4], "f_dispersion"),
                      parse_double(f[5], "f_corner"), f[6]});
  }
  if (!header) throw ParseError("bifurcation CSV header missing");
  return b;
}

std::vector<PartitionCell> partition(const Geography& geo, const SweepGrid& grid,
                                     std::span<const SupportPattern> candidates, int workers, double tie_tol) {
  if (candidates.empty()) throw Error("partition needs at least one candidate pattern");
  const std::size_t np = grid.phi_values.size();
  std::vector<PartitionCell> cells(np * grid.alpha_values.size());
  parallel_for(cells.size(), workers, [&](std::size_t idx) {
    const double alpha = grid.alpha_values[idx / np];
    const double phi = grid.phi_values[idx % np];
    const Economy eco = economy_at(geo, alpha, phi);
    PartitionCell& c = cells[idx];
    c.phi = phi;
    c.alpha = alpha;
    c.winner_ids = winners_at(eco, candidates, tie_tol, &c.f_max, &c.winner_M);
  });
  return cells;
}

void write_partition_csv(std::ostream& os, std::span<const PartitionCell> cells) {
  os << "phi,alpha,winner_ids,winner_M,f_max\n";
  for (const auto& c : cells)
    os << fmt::format("{:.10g},{:.10g},{},{},{:.17g}\n", c.phi, c.alpha, fmt::join(c.winner_ids, ";"),
                      c.winner_M, c.f_max);
}

std::vector<PartitionCell> read_partition_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "phi,alpha,winner_ids,winner_M,f_max")
    throw ParseError("partition CSV header missing");
  std::vector<PartitionCell> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw ParseError(fmt::format("partition row has {} fields, expected 5", f.size()));
    PartitionCell c{parse_double(f[0], "phi"), parse_double(f[1], "alpha"), {}, 0, parse_double(f[4], "f_max")};
    for (const auto& id : split(f[2], ';')) c.winner_ids.push_back(static_cast<int>(parse_double(id, "winner id")));
    c.winner_M = static_cast<int>(parse_double(f[3], "winner_M"));
    if (c.winner_ids.empty()) throw ParseError("partition row without winners");
    cells.push_back(std::move(c));
  }
  return cells;
}

std::vector<Regime> regimes_along_phi(const Geography& geo, std::span<const PartitionCell> cells, double alpha,
                                      std::span<const SupportPattern> candidates) {
  std::vector<const PartitionCell*> row;
  for (const auto& c : cells)
    if (c.alpha == alpha) row.push_back(&c);
  std::sort(row.begin(), row.end(), [](auto* a, auto* b) { return a->phi < b->phi; });

  std::vector<Regime> out;
  for (const auto* c : row) {
    if (!out.empty() && out.back().winner_ids == c->winner_ids) {
      out.back().phi_end = c->phi;
      continue;
    }
    out.push_back({c->phi, c->phi, c->winner_ids, c->winner_M, kNaN});
  }

  auto find = [&](int id) -> const SupportPattern& {
    for (const auto& p : candidates)
      if (p.id == id) return p;
    throw Error(fmt::format("pattern id {} is not among the candidates", id));
  };
  auto lead = [&](const Regime& r) -> const SupportPattern& {
    for (int id : r.winner_ids)
      if (find(id).M == r.winner_M) return find(id);
    return find(r.winner_ids.front());
  };
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    const auto& a = lead(out[i]);
    const auto& b = lead(out[i + 1]);
    auto diff = [&](double phi) {
      const Economy eco = economy_at(geo, alpha, phi);
      return invariant_potential(eco, a.support) - invariant_potential(eco, b.support);
    };
    const double lo = out[i].phi_end;
    const double hi = out[i + 1].phi_begin;
    if (diff(lo) >= 0.0 && diff(hi) <= 0.0)
      out[i].boundary_after = bisect(lo, hi, [&](double p) { return diff(p) >= 0.0; }, 1e-12);
  }
  return out;
}

std::vector<int> distinct_winners(std::span<const PartitionCell> cells) {
  std::vector<int> ids;
  for (const auto& c : cells) ids.insert(ids.end(), c.winner_ids.begin(), c.winner_ids.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool partition_monotone(std::span<const PartitionCell> cells) {
  std::map<double, std::map<double, int>> by_alpha, by_phi;
  for (const auto& c : cells) {
    by_alpha[c.alpha][c.phi] = c.winner_M;
    by_phi[c.phi][c.alpha] = c.winner_M;
  }
  auto nonincreasing = [](const std::map<double, std::map<double, int>>& lines) {
    for (const auto& [key, line] : lines) {
      int prev = std::numeric_limits<int>::max();
      for (const auto& [pos, m] : line) {
        if (m > prev) return false;
        prev = m;
      }
    }
    return true;
  };
  return nonincreasing(by_alpha) && nonincreasing(by_phi);
}

StabilityRanges stability_ranges(const Geography& geo, double alpha, std::span<const double> phi_grid,
                                 std::span<const SupportPattern> candidates, int workers) {
  if (phi_grid.empty()) throw Error("phi grid is empty");
  if (candidates.empty()) throw Error("stability ranges need at least one candidate pattern");
  const std::size_t ng = phi_grid.size();
  const int k = geo.zones();

  std::vector<std::vector<int>> winners(ng);
  parallel_for(ng, workers, [&](std::size_t i) {
    winners[i] = winners_at(economy_at(geo, alpha, phi_grid[i]), candidates, kTieTol, nullptr, nullptr);
  });

  StabilityRanges out{alpha, std::vector<double>(phi_grid.begin(), phi_grid.end()),
                      std::vector<PatternRange>(candidates.size())};
  parallel_for(candidates.size(), workers, [&](std::size_t p) {
    const SupportPattern& pat = candidates[p];
    const State x = make_state(pat, k).state;
    auto stable_at = [&](double phi) {
      return classify_stability(economy_at(geo, alpha, phi), x).verdict == Verdict::stable;
    };
    auto winner_at = [&](double phi) {
      const auto ids = winners_at(economy_at(geo, alpha, phi), candidates, kTieTol, nullptr, nullptr);
      return std::binary_search(ids.begin(), ids.end(), pat.id);
    };
    PatternRange& r = out.patterns[p];
    r.id = pat.id;
    r.M = pat.M;
    for (std::size_t i = 0; i < ng; ++i) {
      r.verdicts.push_back(classify_stability(economy_at(geo, alpha, phi_grid[i]), x).verdict);
      r.winner.push_back(std::binary_search(winners[i].begin(), winners[i].end(), pat.id));
    }
    auto intervals = [&](auto flag, const std::function<bool(double)>& pred) {
      std::vector<PhiInterval> iv;
      for (std::size_t i = 0; i < ng;) {
        if (!flag(i)) {
          ++i;
          continue;
        }
        std::size_t j = i;
        while (j + 1 < ng && flag(j + 1)) ++j;
        const double lo = i == 0 ? phi_grid[0] : bisect(phi_grid[i - 1], phi_grid[i], pred, 1e-6);
        const double hi = j + 1 == ng ? phi_grid[ng - 1] : bisect(phi_grid[j], phi_grid[j + 1], pred, 1e-6);
        iv.push_back({lo, hi});
        i = j + 1;
      }
      return iv;
    };
    r.stable = intervals([&](std::size_t i) { return r.verdicts[i] == Verdict::stable; }, stable_at);
    r.global = intervals([&](std::size_t i) { return static_cast<bool>(r.winner[i]); }, winner_at);
  });
  return out;
}

std::string stability_ranges_to_json(const StabilityRanges& r) {
  nlohmann::ordered_json j;
  j["alpha"] = r.alpha;
  j["phi_grid"] = r.phi_grid;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : r.patterns) {
    nlohmann::ordered_json e;
    e["id"] = p.id;
    e["M"] = p.M;
    auto iv = [](const std::vector<PhiInterval>& v) {
      auto a = nlohmann::ordered_json::array();
      for (const auto& x : v) a.push_back({x.lo, x.hi});
      return a;
    };
    e["stable"] = iv(p.stable);
    e["global"] = iv(p.global);
    std::vector<std::string> verdicts;
    for (auto v : p.verdicts) verdicts.emplace_back(to_string(v));
    e["verdicts"] = verdicts;
    std::vector<bool> w(p.winner.begin(), p.winner.end());
    e["winner"] = w;
    arr.push_back(std::move(e));
  }
  j["patterns"] = std::move(arr);
  return j.dump(2) + "\n";
}

StabilityRanges stability_ranges_from_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
    StabilityRanges r{j.at("alpha").get<double>(), j.at("phi_grid").get<std::vector<double>>(), {}};
    for (const auto& e : j.at("patterns")) {
      PatternRange p{e.at("id").get<int>(), e.at("M").get<int>(), {}, {}, {}, {}};
      for (const auto& v : e.at("verdicts")) p.verdicts.push_back(parse_verdict(v.get<std::string>()));
      for (const auto& w : e.at("winner")) p.winner.push_back(w.get<bool>());
      for (const auto& iv : e.at("stable")) p.stable.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
      for (const auto& iv : e.at("global")) p.global.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
      r.patterns.push_back(std::move(p));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("invalid stability-range JSON: {}", e.what()));
  }
}

}  // namespace hwretail
