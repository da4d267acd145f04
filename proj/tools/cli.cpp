#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "hwretail/dynamics.hpp"
#include "hwretail/equilibria.hpp"
#include "hwretail/error.hpp"
#include "hwretail/figure.hpp"
#include "hwretail/parallel.hpp"
#include "hwretail/stochastic.hpp"
#include "hwretail/sweep.hpp"
#include "hwretail/symmetry.hpp"

namespace hwretail {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string geo;
  double alpha = 0;
  double phi = 0;
  double beta = 0;
  std::string grid_phi = "0.01:0.99:0.01";
  std::string grid_alpha = "1.0:3.0:0.05";
  int N = 8;
  double eta = 0.05;
  std::uint64_t jumps = 1'000'000;
  std::uint64_t seed = 1;
  double tol = kStabilityTol;
  std::string out = ".";
  int workers = default_workers();
  std::string format = "csv";
  std::string config;
  std::size_t subgroup_cap = kDefaultSubgroupCap;
  int pattern = 0;
  std::size_t samples = 0;
  std::string x0;
  std::string mode = "exact";
  std::string kind;
  std::string in;
};

struct Context {
  CLI::App* sub;
  Options& o;
  std::ostream& out;
  std::vector<std::string> outputs;

  bool given(const std::string& flag) const {
    const auto* opt = sub->get_option_no_throw(flag);
    return opt && opt->count() > 0;
  }

  fs::path dir() const { return fs::path(o.out); }

  void write(const std::string& name, std::string_view text) {
    fs::create_directories(dir());
    write_text_file(dir() / name, text);
    outputs.push_back(name);
  }

  Geography geography() const {
    if (!given("--geo")) throw UsageError("--geo is required for this command");
    return geography_from_spec(o.geo);
  }

  double alpha() const {
    if (!given("--alpha")) throw UsageError("--alpha is required for this command");
    return o.alpha;
  }

  ModelParams params() const {
    const bool has_phi = given("--phi");
    const bool has_beta = given("--beta");
    if (has_phi == has_beta) throw UsageError("give exactly one of --phi and --beta");
    try {
      return has_phi ? ModelParams::from_phi(alpha(), o.phi) : ModelParams::from_beta(alpha(), o.beta);
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }

  std::vector<double> grid(const std::string& spec, const char* what) const {
    try {
      return make_range(spec);
    } catch (const Error& e) {
      throw UsageError(fmt::format("{}: {}", what, e.what()));
    }
  }
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--geo", o.geo, "Geography: ring:K, square:n, tri:n or a JSON file");
  sub->add_option("--alpha", o.alpha, "Scale economies alpha > 0");
  auto* phi = sub->add_option("--phi", o.phi, "Freeness of travel phi in (0, 1)");
  auto* beta = sub->add_option("--beta", o.beta, "Distance decay beta > 0");
  phi->excludes(beta);
  sub->add_option("--grid-phi", o.grid_phi, "phi grid a:b:step")->capture_default_str();
  sub->add_option("--grid-alpha", o.grid_alpha, "alpha grid a:b:step")->capture_default_str();
  sub->add_option("--N", o.N, "Finite population size")->capture_default_str();
  sub->add_option("--eta", o.eta, "Logit noise level")->capture_default_str();
  sub->add_option("--jumps", o.jumps, "Simulated jumps")->capture_default_str();
  sub->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  sub->add_option("--tol", o.tol, "Stability / equilibrium tolerance")->capture_default_str();
  sub->add_option("--out", o.out, "Output directory")->capture_default_str();
  sub->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--format", o.format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--config", o.config, "JSON config file; command-line flags take precedence");
  sub->add_option("--subgroup-cap", o.subgroup_cap, "Largest group order for subgroup enumeration")
      ->capture_default_str();
}

void merge_config(CLI::App* sub, const Options& o) {
  std::ifstream in(o.config);
  if (!in) throw UsageError(fmt::format("cannot open config file '{}'", o.config));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("config file is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  auto counted = [&](const std::string& flag) {
    const auto* opt = sub->get_option_no_throw(flag);
    return opt && opt->count() > 0;
  };
  const bool cli_phi = counted("--phi"), cli_beta = counted("--beta");
  if (!cli_phi && !cli_beta && j.contains("phi") && j.contains("beta"))
    throw UsageError("config gives both phi and beta");
  for (const auto& [key, value] : j.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "config") continue;
    auto* opt = sub->get_option_no_throw("--" + name);
    if (!opt) throw UsageError(fmt::format("unknown config key '{}'", key));
    if (opt->count() > 0) continue;
    if ((name == "phi" && cli_beta) || (name == "beta" && cli_phi)) continue;
    std::string text;
    if (value.is_string())
      text = value.get<std::string>();
    else if (value.is_number() || value.is_boolean())
      text = value.dump();
    else
      throw UsageError(fmt::format("config key '{}' must be a string or number", key));
    try {
      opt->add_result(text);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(fmt::format("config key '{}': {}", key, e.what()));
    }
  }
}

ojson resolved_config(const std::string& command, const Options& o) {
  ojson c;
  c["command"] = command;
  c["geo"] = o.geo;
  c["alpha"] = o.alpha;
  c["phi"] = o.phi > 0 ? o.phi : (o.beta > 0 ? std::exp(-o.beta) : 0.0);
  c["beta"] = o.beta > 0 ? o.beta : (o.phi > 0 ? -std::log(o.phi) : 0.0);
  c["grid_phi"] = o.grid_phi;
  c["grid_alpha"] = o.grid_alpha;
  c["N"] = o.N;
  c["eta"] = o.eta;
  c["jumps"] = o.jumps;
  c["seed"] = o.seed;
  c["tol"] = o.tol;
  c["workers"] = o.workers;
  c["format"] = o.format;
  c["subgroup_cap"] = o.subgroup_cap;
  c["pattern"] = o.pattern;
  c["samples"] = o.samples;
  c["x0"] = o.x0;
  c["mode"] = o.mode;
  c["kind"] = o.kind;
  c["in"] = o.in;
  return c;
}

void write_provenance(Context& ctx, const std::string& command, double seconds) {
  ojson p;
  p["command"] = command;
  p["config"] = resolved_config(command, ctx.o);
  ojson v;
  v["hwretail"] = kVersion;
  v["eigen"] = fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  v["fmt"] = fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100);
  v["nlohmann_json"] = fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                   NLOHMANN_JSON_VERSION_PATCH);
  v["cli11"] = CLI11_VERSION;
  p["versions"] = std::move(v);
  p["seed"] = ctx.o.seed;
  p["outputs"] = ctx.outputs;
  const auto outputs = ctx.outputs;
  ctx.write(command + ".provenance.json", p.dump(2) + "\n");
  // Wall time varies between runs, so it goes to the log rather than the provenance block.
  std::ofstream log(ctx.dir() / "run.log", std::ios::app);
  log << fmt::format("{} wall_seconds={:.3f} outputs={}\n", command, seconds, fmt::join(outputs, ";"));
}

std::vector<SupportPattern> patterns_for(const Context& ctx, const Geography& geo) {
  auto patterns = invariant_supports(geo, ctx.o.subgroup_cap);
  if (ctx.given("--pattern")) {
    std::erase_if(patterns, [&](const SupportPattern& p) { return p.id != ctx.o.pattern; });
    if (patterns.empty()) throw UsageError(fmt::format("no pattern with id {}", ctx.o.pattern));
  }
  return patterns;
}

std::string one_based(std::span<const int> zones) {
  std::vector<int> v(zones.begin(), zones.end());
  for (int& z : v) ++z;
  return fmt::format("{}", fmt::join(v, ";"));
}

// ---- commands ----

void cmd_geom(Context& ctx) {
  const Geography geo = ctx.geography();
  ctx.write("geography.json", geography_to_json(geo));
  ctx.out << fmt::format("kind {}\nzones {}\nmax_distance {:g}\n", to_string(geo.kind()), geo.zones(),
                         geo.dist().maxCoeff());
  if (geo.is_lattice()) ctx.out << fmt::format("group_order {}\n", lattice_group(geo).order());
}

void cmd_enumerate(Context& ctx) {
  const Geography geo = ctx.geography();
  const auto patterns = invariant_supports(geo, ctx.o.subgroup_cap);
  ctx.out << patterns.size() << "\n";
  ctx.write("catalog.json", catalog_to_json(patterns, geo.zones()));
  if (ctx.o.format == "csv") {
    std::string csv = "id,M,label,support\n";
    for (const auto& p : patterns)
      csv += fmt::format("{},{},{},{}\n", p.id, p.M, pattern_label(p.M, geo.zones()), one_based(p.support));
    ctx.write("catalog.csv", csv);
  }
}

void cmd_stability(Context& ctx) {
  const Geography geo = ctx.geography();
  const auto patterns = patterns_for(ctx, geo);
  if (ctx.given("--grid-phi")) {
    const auto grid = ctx.grid(ctx.o.grid_phi, "--grid-phi");
    const StabilityRanges r = stability_ranges(geo, ctx.alpha(), grid, patterns, ctx.o.workers);
    ctx.write("ranges.json", stability_ranges_to_json(r));
    std::size_t never = 0;
    for (const auto& p : r.patterns) never += p.stable.empty();
    ctx.out << fmt::format("patterns {}\nnever_stable_on_grid {}\n", r.patterns.size(), never);
    return;
  }
  const Economy eco(geo, ctx.params());
  const auto states = make_states(patterns, geo.zones());
  const auto rows = stability_table(eco, states, ctx.o.tol, ctx.o.workers);
  std::map<Verdict, int> tally;
  for (const auto& r : rows) ++tally[r.report.verdict];
  if (ctx.o.format == "csv") {
    std::ostringstream os;
    write_stability_csv(os, eco, rows);
    ctx.write("stability.csv", os.str());
  } else {
    ojson arr = ojson::array();
    for (const auto& r : rows)
      arr.push_back({{"pattern_id", r.id}, {"M", r.M}, {"phi", eco.params.phi()}, {"alpha", eco.params.alpha()},
                     {"boundary_margin", r.report.boundary_margin}, {"interior_max_eig", r.report.interior_max_eig},
                     {"verdict", to_string(r.report.verdict)}, {"f", r.f}});
    ctx.write("stability.json", arr.dump(2) + "\n");
  }
  ctx.out << fmt::format("stable {}\nunstable {}\nmarginal {}\n", tally[Verdict::stable], tally[Verdict::unstable],
                         tally[Verdict::marginal]);
}

void cmd_select(Context& ctx) {
  const Geography geo = ctx.geography();
  const Economy eco(geo, ctx.params());
  const auto patterns = patterns_for(ctx, geo);
  const auto states = make_states(patterns, geo.zones());
  const Selection sel = select_global(eco, states);
  ojson j;
  j["winners"] = sel.winners;
  j["f_max"] = sel.f_max;
  ojson entries = ojson::array();
  for (const auto& e : sel.entries) entries.push_back({{"id", e.id}, {"M", e.M}, {"f", e.f}, {"g", e.g}});
  j["entries"] = std::move(entries);
  ctx.write("selection.json", j.dump(2) + "\n");
  int m = 0;
  for (const auto& e : sel.entries)
    if (std::find(sel.winners.begin(), sel.winners.end(), e.id) != sel.winners.end()) m = std::max(m, e.M);
  ctx.out << fmt::format("winners {}\nwinner_M {}\nf_max {:.12g}\n", fmt::join(sel.winners, ";"), m, sel.f_max);
}

State parse_state(const std::string& text, int zones) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError(fmt::format("--x0 entry '{}' is not a number", item));
    }
  }
  if (static_cast<int>(v.size()) != zones)
    throw UsageError(fmt::format("--x0 has {} entries, geography has {} zones", v.size(), zones));
  return Eigen::Map<const Eigen::VectorXd>(v.data(), zones);
}

void cmd_dynamics(Context& ctx) {
  const Geography geo = ctx.geography();
  const Economy eco(geo, ctx.params());
  IntegrateOptions opts;
  opts.eq_tol = ctx.o.tol;
  if (ctx.o.samples > 0) {
    opts.record = false;
    const PermGroup sym = geo.is_lattice() ? lattice_group(geo) : trivial_group(geo.zones());
    const BasinSample b = basin_sample(eco, ctx.o.samples, ctx.o.seed, sym, opts, ctx.o.workers);
    ctx.write("basins.json", basins_to_json(b, ctx.o.seed));
    ctx.out << fmt::format("clusters {}\nfailures {}\nunconverged {}\n", b.clusters.size(), b.failures,
                           b.unconverged);
    return;
  }
  const State x0 = ctx.given("--x0") ? parse_state(ctx.o.x0, geo.zones()) : dirichlet_start(geo.zones(), ctx.o.seed);
  const Trajectory t = integrate(eco, x0, opts);
  std::ostringstream os;
  write_trajectory_csv(os, t);
  ctx.write("trajectory.csv", os.str());
  std::vector<std::string> xs;
  for (Eigen::Index i = 0; i < t.final_state().size(); ++i) xs.push_back(fmt::format("{:.10g}", t.final_state()[i]));
  ctx.out << fmt::format("converged {}\nresidual {:.3g}\nfinal_time {:.10g}\nfinal_state {}\n", t.converged,
                         t.terminal_residual, t.final_time(), fmt::join(xs, ","));
}

void cmd_chain(Context& ctx) {
  const Geography geo = ctx.geography();
  const ChainSpec spec(Economy(geo, ctx.params()), ctx.o.N, ctx.o.eta);
  if (ctx.o.mode == "simulate") {
    const SimulationSummary sim = simulate(spec, ctx.o.jumps, ctx.o.seed);
    std::optional<double> tv;
    if (state_space_size(spec.N, geo.zones()) <= kDefaultStateCap) {
      const StationaryResult exact = stationary_exact(spec);
      const std::optional<PermGroup> sym = geo.is_lattice() ? std::optional(lattice_group(geo)) : std::nullopt;
      tv = total_variation(exact.space, exact.probability, empirical_measure(sim, exact.space),
                           sym ? &*sym : nullptr);
    }
    ctx.write("path.json", simulation_to_json(sim, tv));
    ctx.out << fmt::format("distinct_states {}\n", sim.occupation.size());
    if (tv) ctx.out << fmt::format("tv_to_exact {:.6g}\n", *tv);
    return;
  }
  const StationaryResult r = stationary_exact(spec);
  ctx.out << fmt::format("states {}\nsolver {}\nfixed_point_error {:.3g}\n", r.space.size(), r.solver,
                         r.fixed_point_error);
  if (ctx.o.mode == "exact") {
    std::ostringstream os;
    write_stationary_csv(os, r);
    ctx.write("stationary.csv", os.str());
    return;
  }
  const FittedPotential f = fit_fN(spec, r);
  std::ostringstream os;
  write_fitted_csv(os, r, f);
  ctx.write("fitted.csv", os.str());
  ctx.out << fmt::format("excluded_states {}\nsup_error {:.6g}\n", f.excluded, fit_sup_error(spec, r, f));
}

void cmd_bifurcate(Context& ctx) {
  const Bifurcation b = bifurcation_2zone(ctx.alpha(), ctx.grid(ctx.o.grid_phi, "--grid-phi"));
  std::ostringstream os;
  write_bifurcation_csv(os, b);
  ctx.write("bifurcation.csv", os.str());
  ctx.out << fmt::format("phi_star {:.12g}\nphi_star_closed_form {:.12g}\n", b.phi_star, b.phi_star_closed);
  ctx.out << fmt::format("phi_double_star {:.12g}\nphi_double_star_derived {:.12g}\nphi_double_star_printed {:.12g}\n",
                         b.phi_double_star, b.phi_double_star_closed, b.phi_double_star_printed);
  if (!(std::abs(b.phi_double_star_printed - b.phi_double_star_closed) <= 1e-8))
    ctx.out << "note: the printed phi** variant (4^a - 1 under the root) disagrees with the root of "
               "f(dispersion) = f(corner); the derived form (4^a - 4) is used\n";
}

void cmd_partition(Context& ctx) {
  const Geography geo = ctx.geography();
  SweepGrid grid = [&] {
    try {
      return SweepGrid(ctx.grid(ctx.o.grid_phi, "--grid-phi"), ctx.grid(ctx.o.grid_alpha, "--grid-alpha"));
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }();
  const auto patterns = invariant_supports(geo, ctx.o.subgroup_cap);
  const auto cells = partition(geo, grid, patterns, ctx.o.workers);
  if (ctx.o.format == "csv") {
    std::ostringstream os;
    write_partition_csv(os, cells);
    ctx.write("partition.csv", os.str());
  } else {
    ojson arr = ojson::array();
    for (const auto& c : cells)
      arr.push_back({{"phi", c.phi}, {"alpha", c.alpha}, {"winner_ids", c.winner_ids}, {"winner_M", c.winner_M},
                     {"f_max", c.f_max}});
    ctx.write("partition.json", arr.dump(2) + "\n");
  }
  std::string regimes = "alpha,regime,phi_begin,phi_end,winner_ids,winner_M,boundary_after\n";
  for (double a : grid.alpha_values) {
    const auto rs = regimes_along_phi(geo, cells, a, patterns);
    for (std::size_t i = 0; i < rs.size(); ++i)
      regimes += fmt::format("{:.10g},{},{:.10g},{:.10g},{},{},{:.12g}\n", a, i + 1, rs[i].phi_begin, rs[i].phi_end,
                             fmt::join(rs[i].winner_ids, ";"), rs[i].winner_M, rs[i].boundary_after);
  }
  ctx.write("regimes.csv", regimes);
  const auto winners = distinct_winners(cells);
  ctx.out << fmt::format("cells {}\ndistinct_winners {}\nwinner_ids {}\nmonotone {}\n", cells.size(), winners.size(),
                         fmt::join(winners, ";"), partition_monotone(cells));
}

void cmd_plot(Context& ctx) {
  if (ctx.o.in.empty()) throw UsageError("plot needs --in <file>");
  if (ctx.o.kind.empty()) throw UsageError("plot needs --kind bifurcation|partition|ranges");
  FigureKind kind;
  try {
    kind = parse_figure_kind(ctx.o.kind);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::ifstream in(ctx.o.in);
  if (!in) throw UsageError(fmt::format("cannot open '{}'", ctx.o.in));
  const std::string title = fs::path(ctx.o.in).stem().string();
  std::string svg;
  switch (kind) {
    case FigureKind::bifurcation: svg = bifurcation_svg(read_bifurcation_csv(in)); break;
    case FigureKind::partition_heatmap: svg = partition_svg(read_partition_csv(in), title); break;
    case FigureKind::range_chart: svg = range_chart_svg(stability_ranges_from_json(in), title); break;
  }
  const std::string name = std::string(to_string(kind)) + ".svg";
  ctx.write(name, svg);
  ctx.out << name << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Retail agglomeration as a potential game: equilibria, stability and selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  struct Command {
    const char* name;
    const char* help;
    void (*run)(Context&);
  };
  const Command commands[] = {
      {"geom", "Build a geography and write it as JSON", cmd_geom},
      {"enumerate", "Enumerate invariant patterns up to symmetry", cmd_enumerate},
      {"stability", "Classify local stability of invariant patterns (ranges with --grid-phi)", cmd_stability},
      {"select", "Global potential maximizer among invariant patterns", cmd_select},
      {"dynamics", "Integrate the replicator dynamics or sample basins (--samples)", cmd_dynamics},
      {"chain", "Finite-population logit chain: --mode exact|fit|simulate", cmd_chain},
      {"bifurcate", "Two-zone bifurcation table and thresholds", cmd_bifurcate},
      {"partition", "Partition the (phi, alpha) grid by global maximizer", cmd_partition},
      {"plot", "Render SVG from bifurcation/partition CSV or ranges JSON", cmd_plot},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, o);
    subs.emplace_back(sub, &c);
  }
  for (auto& [sub, c] : subs) {
    const std::string n = c->name;
    if (n == "stability" || n == "select") sub->add_option("--pattern", o.pattern, "Restrict to one pattern id");
    if (n == "dynamics") {
      sub->add_option("--samples", o.samples, "Basin sampling: number of Dirichlet starts");
      sub->add_option("--x0", o.x0, "Initial state, comma separated");
    }
    if (n == "chain")
      sub->add_option("--mode", o.mode, "exact, fit or simulate")
          ->check(CLI::IsMember({"exact", "fit", "simulate"}))
          ->capture_default_str();
    if (n == "plot") {
      sub->add_option("--kind", o.kind, "bifurcation, partition or ranges");
      sub->add_option("--in", o.in, "Input CSV/JSON from a previous run");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  for (auto& [sub, c] : subs) {
    if (!sub->parsed()) continue;
    Context ctx{sub, o, out, {}};
    try {
      if (ctx.given("--config")) merge_config(sub, o);
      const auto t0 = std::chrono::steady_clock::now();
      c->run(ctx);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      write_provenance(ctx, c->name, secs);
      return 0;
    } catch (const NumericalError& e) {
      err << "numerical failure: " << e.what() << "\n";
      return 1;
    } catch (const DegenerateState& e) {
      err << "numerical failure: " << e.what() << "\n";
      return 1;
    } catch (const IoError& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    } catch (const ResourceLimit& e) {
      err << "error: " << e.what() << " (raise --subgroup-cap or shrink the problem)\n";
      return 2;
    } catch (const Error& e) {
      err << "usage error: " << e.what() << "\n";
      return 2;
    } catch (const fs::filesystem_error& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("hwretail");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hwretail
