// Command-line driver: stationary vectors of irreducible Markov chains by
// bootstrap algebraic multigrid.
//
// Subcommands
//   solve     run one problem with one solver mode and print the report
//   sweep     iteration-count table over a family of problem sizes
//   spectrum  dense eigenvalue dump of a chosen iteration operator
//   fov       field-of-values boundary dump of a chosen iteration operator
//   validate  structural checks on a MatrixMarket chain
//   gen       write a generated chain to a MatrixMarket file
//
// Exit codes: 0 tolerance reached (or dump/validation succeeded), 2 solver
// finished without reaching tolerance, 1 any error.
//
// Every subcommand accepts --config FILE, a flat key=value file whose keys
// are the subcommand's long flag names. Explicit flags override file values,
// file values override built-in defaults.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bamg/chain.hpp"
#include "bamg/diagnostics.hpp"
#include "bamg/kernels.hpp"
#include "bamg/matrix_market.hpp"
#include "bamg/mle.hpp"
#include "bamg/sparse.hpp"

namespace {

using namespace bamg;

ChainKind parse_kind(const std::string& s) {
  if (s == "uniform") return ChainKind::uniform_grid;
  if (s == "tandem") return ChainKind::tandem_queue;
  if (s == "planar") return ChainKind::planar_graph;
  throw std::invalid_argument("unknown problem family: " + s);
}

CoarseningMode parse_coarsening(const std::string& s) {
  if (s == "auto") return CoarseningMode::automatic;
  if (s == "structured") return CoarseningMode::structured;
  if (s == "cr") return CoarseningMode::cr;
  throw std::invalid_argument("unknown coarsening mode: " + s);
}

// Options shared by every subcommand that needs a problem instance. The
// family string is converted after parsing so config files can set it too.
struct ProblemArgs {
  std::string problem = "uniform";
};

void add_problem_options(CLI::App* cmd, RunConfig& cfg, ProblemArgs& pa) {
  cmd->add_option("--problem", pa.problem, "Problem family")
      ->check(CLI::IsMember({"uniform", "tandem", "planar"}));
  cmd->add_option("--n", cfg.n_side,
                  "Lattice side for uniform/tandem, node count for planar");
  cmd->add_option("--seed", cfg.problem_seed, "Random seed of the problem generator");
  cmd->add_option("--input", cfg.input, "Load the chain from a MatrixMarket file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--grid-side", cfg.grid_side_hint,
                  "Lattice side of a loaded chain (enables structured coarsening)");
}

// Multilevel setup knobs, shared by solve, sweep, spectrum and fov.
struct SetupArgs {
  std::string coarsening = "auto";
};

void add_setup_options(CLI::App* cmd, RunConfig& cfg, SetupArgs& sa) {
  cmd->add_option("--setup-cycles", cfg.mle.setup_cycles, "Adaptive setup cycles");
  cmd->add_option("--max-cycles", cfg.mle.max_cycles, "Cycle cap of the adaptive eigensolver");
  cmd->add_option("--num-tvs", cfg.mle.num_tvs, "Least-squares test vectors on the finest level");
  cmd->add_option("--num-eigs", cfg.mle.num_eigs, "Eigenpairs tracked through the cycle");
  cmd->add_option("--mu", cfg.mle.mu, "Coarse visits per level (1 = V-cycle)");
  cmd->add_option("--delta", cfg.mle.delta,
                  "Relative eigenvalue movement that flags a pair unconverged");
  cmd->add_option("--setup-seed", cfg.mle.seed, "Random seed of the setup test vectors");
  cmd->add_option("--caliber", cfg.mle.ls.caliber, "Interpolation caliber");
  cmd->add_option("--max-path", cfg.mle.ls.max_path, "Neighborhood search depth cap");
  cmd->add_option("--omega", cfg.mle.smoother.omega, "Jacobi damping factor");
  cmd->add_option("--sweeps", cfg.mle.smoother.sweeps, "Jacobi sweeps per smoothing pass");
  cmd->add_option("--theta", cfg.mle.cr.theta, "Compatible-relaxation candidate threshold");
  cmd->add_option("--cr-sweeps", cfg.mle.cr.sweeps, "F-relaxation sweeps per CR stage");
  cmd->add_option("--cr-omega", cfg.mle.cr.omega, "F-relaxation damping in CR");
  cmd->add_flag("--cr-from-scratch", cfg.mle.cr_from_scratch,
                "Grow the CR coarse set from empty instead of an independent set");
  cmd->add_option("--coarsest-size", cfg.mle.coarsest_size, "Coarsest-level size bound");
  cmd->add_option("--max-levels", cfg.mle.max_levels, "Level cap (0 = until coarsest size)");
  cmd->add_option("--dense-eig-limit", cfg.mle.dense_eig_limit,
                  "Largest dimension passed to the dense eigensolver");
  cmd->add_option("--coarsening", sa.coarsening, "Coarse-grid selection strategy")
      ->check(CLI::IsMember({"auto", "structured", "cr"}));
}

void write_csv(const std::string& path, const std::function<void(std::ostream&)>& emit) {
  if (path.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  emit(out);
}

// ---------------------------------------------------------------- solve ----

struct SolveArgs {
  RunConfig cfg;
  ProblemArgs prob;
  SetupArgs setup;
  std::string mode = "mle";
  double tol = 1e-8;
};

int run_solve(SolveArgs& a) {
  a.cfg.kind = parse_kind(a.prob.problem);
  a.cfg.mle.coarsening = parse_coarsening(a.setup.coarsening);
  a.cfg.mode = parse_solve_mode(a.mode);
  a.cfg.mle.tol = a.tol;
  a.cfg.krylov.tol = a.tol;
  SolveReport rep = run(a.cfg);
  std::cout << format_report(rep);
  return rep.converged ? 0 : 2;
}

// ---------------------------------------------------------------- sweep ----

struct SweepArgs {
  RunConfig cfg;
  ProblemArgs prob;
  SetupArgs setup;
  std::vector<int> sizes{17, 33, 65, 129};
  std::string out;
  double tol = 1e-8;
};

int run_sweep(SweepArgs& a) {
  a.cfg.kind = parse_kind(a.prob.problem);
  a.cfg.mle.coarsening = parse_coarsening(a.setup.coarsening);
  a.cfg.mle.tol = a.tol;
  a.cfg.krylov.tol = a.tol;
  SweepTable table = table_sweep(a.cfg.kind, a.sizes, a.cfg);
  std::cout << format_table(table);
  if (!a.out.empty()) write_csv(a.out, [&](std::ostream& os) { write_table_csv(os, table); });
  for (const auto& c : table.cells)
    if (c.failed || c.mle_cycles < 0 || c.pgmres_iters < 0 || c.parnoldi_iters < 0) return 2;
  return 0;
}

// ------------------------------------------------------- spectrum / fov ----

struct DumpArgs {
  RunConfig cfg;
  ProblemArgs prob;
  SetupArgs setup;
  std::string op = "transition";
  index_t limit = 1200;
  int angles = 64;
  std::string out;
};

void add_dump_options(CLI::App* cmd, DumpArgs& a) {
  add_problem_options(cmd, a.cfg, a.prob);
  add_setup_options(cmd, a.cfg, a.setup);
  cmd->add_option("--operator", a.op, "Iteration operator to dump")
      ->check(CLI::IsMember({"transition", "tau-richardson", "mg-propagator",
                             "mg-preconditioned"}));
  cmd->add_option("--tau", a.cfg.tau, "Damping of the tau-Richardson operator");
  cmd->add_option("--limit", a.limit, "Largest dimension formed densely");
  cmd->add_option("--out", a.out, "Output CSV path (default: stdout)");
}

DenseMatrix build_operator(DumpArgs& a) {
  a.cfg.kind = parse_kind(a.prob.problem);
  a.cfg.mle.coarsening = parse_coarsening(a.setup.coarsening);
  ChainProblem prob = make_problem(a.cfg);
  if (a.op == "transition") return dense_gated(prob.a, a.limit);
  SparseMatrix b = identity_minus(prob.a);
  if (a.op == "tau-richardson") return dense_tau_richardson(b, a.cfg.tau, a.limit);
  MleEngine eng(b, a.cfg.mle, static_cast<index_t>(prob.grid_dim));
  eng.run_setup();
  if (a.op == "mg-propagator")
    return dense_mg_propagator(eng.hierarchy(), b, a.cfg.mle.smoother, a.limit);
  return dense_mg_preconditioned(eng.hierarchy(), b, a.cfg.mle.smoother, a.limit);
}

int run_spectrum(DumpArgs& a) {
  auto spec = spectrum_sorted(build_operator(a));
  write_csv(a.out, [&](std::ostream& os) { write_spectrum_csv(os, spec); });
  return 0;
}

int run_fov(DumpArgs& a) {
  auto pts = field_of_values_boundary(build_operator(a), a.angles);
  write_csv(a.out, [&](std::ostream& os) { write_fov_csv(os, pts); });
  return 0;
}

// ------------------------------------------------------- validate / gen ----

int run_validate(const std::string& input) {
  if (input.empty()) throw std::invalid_argument("validate needs --input");
  ChainProblem prob = load_chain(input);
  ValidationReport rep = validate(prob);
  std::cout << rep.to_string();
  return rep.ok() ? 0 : 1;
}

struct GenArgs {
  RunConfig cfg;
  ProblemArgs prob;
  std::string out;
};

int run_gen(GenArgs& a) {
  if (a.out.empty()) throw std::invalid_argument("gen needs --out");
  a.cfg.kind = parse_kind(a.prob.problem);
  ChainProblem prob = make_problem(a.cfg);
  std::string comment = std::string(chain_kind_name(prob.kind)) + " chain, n = " +
                        std::to_string(prob.n);
  write_matrix_market(prob.a, a.out, comment);
  std::cout << "wrote " << a.out << " (" << prob.n << " states)\n";
  return 0;
}

// ------------------------------------------------- app wiring + config ----

struct Cli {
  CLI::App app{
      "Stationary vectors of irreducible Markov chains by bootstrap algebraic "
      "multigrid"};
  std::string kernel = "auto";
  std::string config_path;

  SolveArgs solve_args;
  SweepArgs sweep_args;
  DumpArgs spectrum_args;
  DumpArgs fov_args;
  std::string validate_input;
  GenArgs gen_args;

  CLI::App* solve_cmd = nullptr;
  CLI::App* sweep_cmd = nullptr;
  CLI::App* spectrum_cmd = nullptr;
  CLI::App* fov_cmd = nullptr;
  CLI::App* validate_cmd = nullptr;
  CLI::App* gen_cmd = nullptr;
};

void add_config_option(CLI::App* cmd, Cli& c) {
  cmd->add_option("--config", c.config_path,
                  "Flat key=value file supplying defaults for this subcommand")
      ->check(CLI::ExistingFile);
}

void build(Cli& c) {
  c.app.require_subcommand(1);
  c.app.add_option("--kernel", c.kernel, "Force a compute-kernel variant")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  c.solve_cmd = c.app.add_subcommand("solve", "Solve one problem and print the report");
  add_config_option(c.solve_cmd, c);
  add_problem_options(c.solve_cmd, c.solve_args.cfg, c.solve_args.prob);
  add_setup_options(c.solve_cmd, c.solve_args.cfg, c.solve_args.setup);
  c.solve_cmd->add_option("--mode", c.solve_args.mode, "Solver mode")
      ->check(CLI::IsMember({"mle", "pgmres", "parnoldi", "power", "richardson"}));
  c.solve_cmd->add_option("--tol", c.solve_args.tol, "Stationary-residual tolerance");
  c.solve_cmd->add_option("--max-iters", c.solve_args.cfg.krylov.max_iters,
                          "Krylov iteration cap");
  c.solve_cmd->add_option("--tau", c.solve_args.cfg.tau, "Richardson-baseline damping");
  c.solve_cmd->add_option("--baseline-iters", c.solve_args.cfg.baseline_iters,
                          "Step cap of the power/Richardson baselines");
  c.solve_cmd->add_option("--outdir", c.solve_args.cfg.outdir,
                          "Directory for history CSV dumps");

  c.sweep_cmd = c.app.add_subcommand("sweep", "Iteration-count table over a family of sizes");
  add_config_option(c.sweep_cmd, c);
  c.sweep_cmd->add_option("--problem", c.sweep_args.prob.problem, "Problem family")
      ->check(CLI::IsMember({"uniform", "tandem", "planar"}));
  c.sweep_cmd->add_option("--sizes", c.sweep_args.sizes, "Problem sizes to run")
      ->delimiter(',');
  c.sweep_cmd->add_option("--seed", c.sweep_args.cfg.problem_seed,
                          "Random seed of the problem generator");
  add_setup_options(c.sweep_cmd, c.sweep_args.cfg, c.sweep_args.setup);
  c.sweep_cmd->add_option("--tol", c.sweep_args.tol, "Stationary-residual tolerance");
  c.sweep_cmd->add_option("--max-iters", c.sweep_args.cfg.krylov.max_iters,
                          "Krylov iteration cap");
  c.sweep_cmd->add_option("--out", c.sweep_args.out, "Also write the table as CSV");

  c.spectrum_cmd =
      c.app.add_subcommand("spectrum", "Dense eigenvalue dump of an iteration operator");
  add_config_option(c.spectrum_cmd, c);
  add_dump_options(c.spectrum_cmd, c.spectrum_args);

  c.fov_cmd = c.app.add_subcommand("fov", "Field-of-values boundary of an iteration operator");
  add_config_option(c.fov_cmd, c);
  add_dump_options(c.fov_cmd, c.fov_args);
  c.fov_cmd->add_option("--angles", c.fov_args.angles, "Boundary points to compute")
      ->check(CLI::PositiveNumber);

  c.validate_cmd = c.app.add_subcommand("validate", "Structural checks on a MatrixMarket chain");
  add_config_option(c.validate_cmd, c);
  c.validate_cmd->add_option("--input", c.validate_input, "Chain to check")
      ->check(CLI::ExistingFile);

  c.gen_cmd = c.app.add_subcommand("gen", "Write a generated chain to MatrixMarket");
  add_config_option(c.gen_cmd, c);
  c.gen_cmd->add_option("--problem", c.gen_args.prob.problem, "Problem family")
      ->check(CLI::IsMember({"uniform", "tandem", "planar"}));
  c.gen_cmd->add_option("--n", c.gen_args.cfg.n_side,
                        "Lattice side for uniform/tandem, node count for planar");
  c.gen_cmd->add_option("--seed", c.gen_args.cfg.problem_seed,
                        "Random seed of the problem generator");
  c.gen_cmd->add_option("--out", c.gen_args.out, "Output MatrixMarket path");
}

int dispatch(Cli& c) {
  if (c.kernel != "auto") {
    const auto isa = c.kernel == "avx2" ? kernels::Isa::avx2 : kernels::Isa::scalar;
    if (!kernels::set_active(isa))
      throw std::runtime_error("kernel variant not supported on this CPU: " + c.kernel);
  }
  if (c.solve_cmd->parsed()) return run_solve(c.solve_args);
  if (c.sweep_cmd->parsed()) return run_sweep(c.sweep_args);
  if (c.spectrum_cmd->parsed()) return run_spectrum(c.spectrum_args);
  if (c.fov_cmd->parsed()) return run_fov(c.fov_args);
  if (c.validate_cmd->parsed()) return run_validate(c.validate_input);
  if (c.gen_cmd->parsed()) return run_gen(c.gen_args);
  throw std::runtime_error("no subcommand given");
}

// Turns a flat key=value config file into command-line tokens for the parsed
// subcommand, skipping keys the command line already set: explicit flags
// override file values, file values override defaults.
std::vector<std::string> config_tokens(const std::string& path, CLI::App* sub) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string here = path + ":" + std::to_string(lineno);
    std::string s = CLI::detail::trim_copy(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(here + ": expected key=value, got '" + s + "'");
    std::string key = CLI::detail::trim_copy(s.substr(0, eq));
    const std::string val = CLI::detail::trim_copy(s.substr(eq + 1));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (key.empty()) throw std::invalid_argument(here + ": empty key");
    if (key == "config") throw std::invalid_argument(here + ": config files cannot nest");
    const CLI::Option* op = sub->get_option_no_throw("--" + key);
    if (op == nullptr)
      throw std::invalid_argument(here + ": unknown key '" + key + "' for subcommand '" +
                                  sub->get_name() + "'");
    if (op->count() > 0) continue;  // set on the command line, which wins
    tokens.push_back("--" + key + "=" + val);
  }
  return tokens;
}

}  // namespace

int main(int argc, char** argv) {
  Cli first;
  build(first);
  try {
    first.app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return first.app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return first.app.exit(e);
  } catch (const CLI::ParseError& e) {
    first.app.exit(e);
    return 1;
  }

  try {
    if (first.config_path.empty()) return dispatch(first);

    // Splice the file-supplied tokens in right after the subcommand name and
    // parse again on a fresh instance. Every option appears at most once in
    // the combined list (file keys the command line set are skipped), so the
    // usual no-repeat parsing rules still hold.
    CLI::App* sub = first.app.get_subcommands().front();
    std::vector<std::string> extra = config_tokens(first.config_path, sub);
    if (extra.empty()) return dispatch(first);
    std::vector<std::string> args;
    bool spliced = false;
    for (int i = 1; i < argc; ++i) {
      args.emplace_back(argv[i]);
      if (!spliced && args.back() == sub->get_name()) {
        args.insert(args.end(), extra.begin(), extra.end());
        spliced = true;
      }
    }
    std::reverse(args.begin(), args.end());  // parse(vector) consumes back to front
    Cli second;
    build(second);
    second.app.parse(args);
    return dispatch(second);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
