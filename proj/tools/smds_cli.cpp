// Command-line front end: embed, ale-embed, isomap, experiment, validate.
//
// Exit status: 0 success, 1 validate found a triangle violation, 2 parse or
// validation error, 3 solver hard error (disconnected graph). Errors print a
// single line ERROR:<code>:<detail> on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "smds/harness.hpp"
#include "smds/io.hpp"

namespace {

using smds::Error;
using smds::ErrorCode;
using smds::Index;
using Json = nlohmann::ordered_json;

constexpr const char* kSchema = "stress-mds/1";

struct CliError {
  std::string code;
  std::string detail;
  int status = 2;
};

struct Common {
  std::string input;
  std::string output;
  std::string report;
  Index dim = 2;
  double tol = 1e-9;
  Index max_iters = 0;
  std::uint64_t seed = 0;
  std::string weights = "uniform";
  std::string init = "classical";
  bool verbose = false;
};

void add_embed_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--input", c.input, "dissimilarity CSV")->required();
  cmd->add_option("--output", c.output, "configuration CSV")->required();
  cmd->add_option("--report", c.report, "JSON report (default: <output>.json)");
  cmd->add_option("--dim", c.dim, "embedding dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", c.tol, "relative stress decrease tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", c.max_iters, "iteration limit")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "seed for --init random");
  cmd->add_option("--weights", c.weights, "'uniform' or a weight-matrix CSV");
  cmd->add_option("--init", c.init, "classical or random")
      ->check(CLI::IsMember({"classical", "random"}));
  cmd->add_flag("--verbose", c.verbose, "log the stress trace to stderr");
}

smds::DissimilarityMatrix<double> read_dissimilarity(const std::string& path) {
  return smds::validate_dissimilarity(smds::io::read_csv_file(path));
}

smds::WeightMatrix<double> read_weights(const std::string& spec, Index n) {
  if (spec == "uniform") return smds::WeightMatrix<double>::uniform(n);
  const auto w = smds::WeightMatrix<double>::from_matrix(smds::io::read_csv_file(spec));
  if (w.size() != n) throw Error(ErrorCode::DimensionMismatch, "weights are not " + std::to_string(n) + "x" + std::to_string(n));
  return w;
}

smds::Configuration<double> initial_config(const smds::DissimilarityMatrix<double>& delta,
                                           const Common& c) {
  if (c.dim > delta.size() - 1)
    throw Error(ErrorCode::DimensionTooLarge, "dim must be <= n - 1");
  if (c.init == "classical") return smds::classical_mds(delta, c.dim).config;
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> gauss(0.0, std::max(delta.max_entry(), 1e-12));
  smds::Configuration<double> z(delta.size(), c.dim);
  for (Index i = 0; i < z.size(); ++i) z.data()[i] = gauss(rng);
  return z;
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path);
  out << j.dump(2) << '\n';
}

std::string report_path(const Common& c) { return c.report.empty() ? c.output + ".json" : c.report; }

void log_trace(const std::vector<double>& trace) {
  for (std::size_t k = 0; k < trace.size(); ++k)
    std::cerr << "iter " << k << " stress " << std::setprecision(17) << trace[k] << '\n';
}

Json embed_report(const std::string& command, const smds::GuttmanOperator<double>& op,
                  const smds::DissimilarityMatrix<double>& delta,
                  const smds::Configuration<double>& config, const std::vector<double>& trace,
                  Index iterations, smds::Termination termination, const Common& c) {
  Json j;
  j["schema"] = kSchema;
  j["command"] = command;
  j["n"] = delta.size();
  j["dim"] = c.dim;
  j["weights"] = c.weights;
  j["init"] = c.init;
  j["stress_trace"] = trace;
  j["final_stress"] = trace.back();
  j["iterations"] = iterations;
  j["termination"] = smds::to_string(termination);
  j["stationarity_residual"] = smds::stationarity_residual(op, delta, config);
  return j;
}

int run_embed(const Common& c) {
  const auto delta = read_dissimilarity(c.input);
  const auto weights = read_weights(c.weights, delta.size());
  const smds::GuttmanOperator<double> op(weights);
  smds::SolveOptions opts;
  opts.tol = c.tol;
  if (c.max_iters > 0) opts.max_iters = c.max_iters;
  const auto rep = smds::solve_unconstrained(op, delta, initial_config(delta, c), opts);
  if (c.verbose) log_trace(rep.stress_trace);
  smds::io::write_csv_file(c.output, rep.config);
  write_json(report_path(c), embed_report("embed", op, delta, rep.config, rep.stress_trace,
                                          rep.iterations, rep.termination, c));
  return 0;
}

int run_ale_embed(const Common& c, const std::optional<double>& k, double dykstra_tol,
                  Index dykstra_cycles, bool schedule) {
  if (!k) throw CliError{"missing-flag", "--k is required for ale-embed"};
  if (!(*k > 0)) throw CliError{"invalid-argument", "--k must be positive"};
  const auto delta = read_dissimilarity(c.input);
  const auto weights = read_weights(c.weights, delta.size());
  const smds::GuttmanOperator<double> op(weights);
  smds::AleParams p;
  p.lipschitz_k = *k;
  p.outer_tol = c.tol;
  if (c.max_iters > 0) p.outer_max_iters = c.max_iters;
  p.dykstra_tol = dykstra_tol;
  p.dykstra_max_cycles = dykstra_cycles;
  p.approximate_schedule = schedule;
  const auto rep = smds::solve_ale(op, delta, initial_config(delta, c), p);
  if (c.verbose) log_trace(rep.stress_trace);
  smds::io::write_csv_file(c.output, rep.config);
  Json j = embed_report("ale-embed", op, delta, rep.config, rep.stress_trace,
                        rep.outer_iterations, rep.termination, c);
  j["K"] = *k;
  j["max_violation_trace"] = rep.max_violation_trace;
  j["final_max_violation"] = rep.final_violation();
  j["dykstra_cycles_per_iter"] = rep.dykstra_cycles_per_iter;
  j["incomplete_projections"] = rep.incomplete_projections;
  write_json(report_path(c), j);
  return 0;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix;
}

int run_isomap(Common c, const std::optional<Index>& knn, const std::optional<double>& epsilon,
               const std::optional<Index>& embed_dim, std::string embed_output) {
  if (knn.has_value() == epsilon.has_value())
    throw CliError{"missing-flag", "exactly one of --knn or --epsilon is required"};
  const auto points = smds::io::read_csv_file(c.input);
  const auto rule = knn ? smds::GraphRule::knn(*knn) : smds::GraphRule::epsilon(*epsilon);
  const auto graph = smds::build_graph(points, rule);
  const auto delta = smds::shortest_path_dissimilarity(graph);
  if (!graph.zero_weight_edges.empty())
    std::cerr << "WARNING:zero-weight-edges:" << graph.zero_weight_edges.size() << '\n';
  smds::io::write_csv_file(c.output, delta.matrix());
  if (!embed_dim) return 0;

  c.dim = *embed_dim;
  c.input = c.output;
  c.output = embed_output.empty() ? with_suffix(c.output, ".embedding.csv") : embed_output;
  return run_embed(c);
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof())
      throw Error(ErrorCode::Parse, key + ": bad value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::Parse, key + ": empty list");
  return out;
}

template <typename T>
T parse_one(const std::string& key, const std::string& text) {
  const auto v = parse_list<T>(key, text);
  if (v.size() != 1) throw Error(ErrorCode::Parse, key + ": expected one value");
  return v.front();
}

smds::harness::EmbedMode parse_mode(const std::string& mode, double k) {
  if (mode == "unconstrained") return smds::harness::EmbedMode::unconstrained();
  if (mode == "ale") return smds::harness::EmbedMode::lipschitz(k);
  throw Error(ErrorCode::Parse, "mode must be unconstrained or ale");
}

// Keys: experiment (consistency | interpolant), manifold, sizes, seeds, mode,
// k, p, probes, lipschitz_samples, bypass_graph.
int run_experiment(const Common& c, const std::string& mode_flag, const std::optional<double>& p_flag) {
  namespace h = smds::harness;
  auto kv = read_config(c.input);
  auto take = [&](const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  const std::string experiment = take("experiment", "consistency");
  const auto manifold = h::parse_manifold(take("manifold", "interval"));
  const auto sizes = parse_list<Index>("sizes", take("sizes", "50,100,200"));
  const auto seeds = parse_list<std::uint64_t>("seeds", take("seeds", std::to_string(c.seed)));
  const double k = parse_one<double>("k", take("k", "1.2"));
  std::string mode = take("mode", "unconstrained");
  if (!mode_flag.empty()) mode = mode_flag;
  double p = parse_one<double>("p", take("p", "2"));
  if (p_flag) p = *p_flag;
  const Index probes = parse_one<Index>("probes", take("probes", "200"));
  const Index samples = parse_one<Index>("lipschitz_samples", take("lipschitz_samples", "2000"));
  const std::string bypass = take("bypass_graph", "false");
  if (bypass != "true" && bypass != "false")
    throw Error(ErrorCode::Parse, "bypass_graph must be true or false");
  if (!kv.empty()) throw Error(ErrorCode::Parse, "unknown key '" + kv.begin()->first + "'");

  std::vector<h::TrendReport> reports;
  for (const auto seed : seeds) {
    if (experiment == "consistency") {
      h::ConsistencyOptions opts;
      opts.bypass_graph = bypass == "true";
      opts.solve.tol = c.tol;
      reports.push_back(h::consistency_experiment({manifold, seed}, sizes, parse_mode(mode, k), p, opts));
    } else if (experiment == "interpolant") {
      h::InterpolantOptions opts;
      opts.lipschitz_samples = samples;
      reports.push_back(h::uniform_interpolant_experiment({manifold, seed}, sizes, k, probes, opts));
    } else {
      throw Error(ErrorCode::Parse, "experiment must be consistency or interpolant");
    }
    if (c.verbose) std::cerr << "seed " << seed << " done\n";
  }
  std::ofstream out(c.output);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + c.output);
  h::write_trend_csv(out, reports);
  return 0;
}

// Validates the matrix, then checks every triangle (or `samples` random
// ones for large n). Prints a JSON summary on stdout.
int run_validate(const Common& c, Index samples) {
  const auto delta = read_dissimilarity(c.input);
  const Index n = delta.size();
  double worst = 0;
  std::array<Index, 3> where{0, 0, 0};
  auto visit = [&](Index i, Index j, Index k) {
    const double defect = delta(i, k) - delta(i, j) - delta(j, k);
    if (defect > worst) {
      worst = defect;
      where = {i, j, k};
    }
  };
  const bool exhaustive = n <= 200;
  if (exhaustive) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k) visit(i, j, k);
  } else {
    std::mt19937_64 rng(c.seed);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    for (Index t = 0; t < samples; ++t) visit(pick(rng), pick(rng), pick(rng));
  }
  const double tol = smds::kValidationTolerance * (1 + delta.max_entry());
  Json j;
  j["schema"] = kSchema;
  j["command"] = "validate";
  j["n"] = n;
  j["valid"] = true;
  j["triangle_checks"] = exhaustive ? "all" : "sampled";
  j["max_triangle_defect"] = worst;
  j["metric"] = worst <= tol;
  if (worst > tol) j["worst_triangle"] = where;
  std::cout << j.dump() << '\n';
  return worst <= tol ? 0 : 1;
}

int fail(const std::string& code, const std::string& detail, int status) {
  std::string flat = detail;
  for (char& ch : flat)
    if (ch == '\n') ch = ' ';
  std::cerr << "ERROR:" << code << ':' << flat << '\n';
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stress-based multidimensional scaling"};
  app.require_subcommand(1);

  Common embed, ale, iso, exper, valid;
  auto* embed_cmd = app.add_subcommand("embed", "unconstrained raw-stress embedding");
  add_embed_flags(embed_cmd, embed);

  auto* ale_cmd = app.add_subcommand("ale-embed", "embedding under caps ||z_i - z_j|| <= K delta_ij");
  add_embed_flags(ale_cmd, ale);
  std::optional<double> k;
  double dykstra_tol = 1e-9;
  Index dykstra_cycles = 500;
  bool schedule = false;
  ale_cmd->add_option("--k", k, "Lipschitz cap constant K");
  ale_cmd->add_option("--dykstra-tol", dykstra_tol)->check(CLI::PositiveNumber);
  ale_cmd->add_option("--dykstra-max-cycles", dykstra_cycles)->check(CLI::PositiveNumber);
  ale_cmd->add_flag("--approximate-schedule", schedule, "cap Dykstra at 10 + iteration cycles");

  auto* iso_cmd = app.add_subcommand("isomap", "graph shortest-path dissimilarities from points");
  std::optional<Index> knn, embed_dim;
  std::optional<double> epsilon;
  std::string embed_output;
  iso_cmd->add_option("--input", iso.input, "point CSV")->required();
  iso_cmd->add_option("--output", iso.output, "dissimilarity CSV")->required();
  iso_cmd->add_option("--knn", knn, "symmetrized k-nearest-neighbor graph")->check(CLI::PositiveNumber);
  iso_cmd->add_option("--epsilon", epsilon, "epsilon-ball graph")->check(CLI::PositiveNumber);
  iso_cmd->add_option("--embed-dim", embed_dim, "also embed the result")->check(CLI::PositiveNumber);
  iso_cmd->add_option("--embed-output", embed_output, "(default: <output>.embedding.csv)");
  iso_cmd->add_option("--report", iso.report);
  iso_cmd->add_option("--tol", iso.tol)->check(CLI::PositiveNumber);
  iso_cmd->add_option("--max-iters", iso.max_iters)->check(CLI::PositiveNumber);
  iso_cmd->add_flag("--verbose", iso.verbose);

  auto* exp_cmd = app.add_subcommand("experiment", "run a harness experiment from key=value config");
  std::string mode_flag;
  std::optional<double> p_flag;
  exp_cmd->add_option("--input", exper.input, "config file")->required();
  exp_cmd->add_option("--output", exper.output, "trend CSV")->required();
  exp_cmd->add_option("--mode", mode_flag, "unconstrained or ale (overrides config)");
  exp_cmd->add_option("--p", p_flag, "discrepancy exponent (overrides config)");
  exp_cmd->add_option("--seed", exper.seed, "seed when the config lists none");
  exp_cmd->add_option("--tol", exper.tol)->check(CLI::PositiveNumber);
  exp_cmd->add_flag("--verbose", exper.verbose);

  auto* val_cmd = app.add_subcommand("validate", "check a dissimilarity CSV");
  Index samples = 100000;
  val_cmd->add_option("--input", valid.input)->required();
  val_cmd->add_option("--seed", valid.seed);
  val_cmd->add_option("--samples", samples, "random triangles when n > 200")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::RequiredError& e) {
    return fail("missing-flag", e.what(), 2);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*embed_cmd) return run_embed(embed);
    if (*ale_cmd) return run_ale_embed(ale, k, dykstra_tol, dykstra_cycles, schedule);
    if (*iso_cmd) return run_isomap(iso, knn, epsilon, embed_dim, embed_output);
    if (*exp_cmd) return run_experiment(exper, mode_flag, p_flag);
    if (*val_cmd) return run_validate(valid, samples);
  } catch (const CliError& e) {
    return fail(e.code, e.detail, e.status);
  } catch (const Error& e) {
    return fail(smds::to_string(e.code()), e.detail(),
                e.code() == ErrorCode::DisconnectedGraph ? 3 : 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 2);
  }
  return 2;
}
