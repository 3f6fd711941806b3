#include "skellamnet/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skellamnet/comb.hpp"
#include "skellamnet/discrepancy.hpp"
#include "skellamnet/errors.hpp"
#include "skellamnet/graph.hpp"
#include "skellamnet/ks.hpp"
#include "skellamnet/noise.hpp"
#include "skellamnet/rng.hpp"
#include "skellamnet/stein.hpp"
#include "skellamnet/svg_plot.hpp"

namespace skellamnet {

using nlohmann::json;

namespace {

const json& block(const json& config, const char* name) {
  static const json kEmpty = json::object();
  if (!config.is_object()) throw ConfigError("config: top level must be an object");
  if (!config.contains(name)) return kEmpty;
  const json& b = config.at(name);
  if (!b.is_object()) throw ConfigError(std::string("config: '") + name + "' must be an object");
  return b;
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

struct Global {
  std::uint64_t seed;
  std::filesystem::path out_dir;
  std::uint64_t trials;
};

Global global_of(const json& config, const RunOptions& opts) {
  const json& g = block(config, "global");
  Global out{get_or<std::uint64_t>(g, "seed", 1), get_or<std::string>(g, "output_dir", "."),
             get_or<std::uint64_t>(g, "trials", 10000)};
  if (opts.seed) out.seed = *opts.seed;
  if (opts.out_dir) out.out_dir = *opts.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(out.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out.out_dir.string() + "': " + ec.message());
  return out;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::logic_error("csv row width mismatch");
    rows_.push_back(std::move(row));
  }
  void write(const std::filesystem::path& path, CommandResult& result) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    result.files.push_back(path.string());
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text, CommandResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  result.files.push_back(path.string());
}

std::string fmt(double v) { return format_number(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double lambda_for_law(const std::string& law, double n_v) {
  if (law == "constant") return std::log(100.0);
  if (law == "log") return std::log(n_v);
  if (law == "sqrt") return std::sqrt(n_v);
  if (law == "linear") return n_v;
  throw ConfigError("unknown lambda law '" + law + "' (expected constant, log, sqrt or linear)");
}

CommandResult cmd_figure1(const json& config, const RunOptions& opts) {
  const Global glob = global_of(config, opts);
  const json& b = block(config, "figure1");
  const auto n_list = get_or<std::vector<std::uint64_t>>(b, "n_v_list", {100, 1000, 10000});
  const auto laws = get_or<std::vector<std::string>>(b, "lambda_laws", {"constant", "log", "sqrt", "linear"});
  const auto edge_law = get_or<std::string>(b, "edge_law", "n_log_n");
  if (edge_law != "n_log_n") throw ConfigError("figure1: edge_law must be 'n_log_n'");
  if (n_list.empty() || laws.empty()) throw ConfigError("figure1: n_v_list and lambda_laws must be nonempty");
  for (auto n : n_list) {
    if (n < 3) throw ConfigError("figure1: every n_v must be >= 3");
  }
  for (const auto& law : laws) lambda_for_law(law, 10.0);

  struct Cell {
    std::uint64_t n_v = 0, edges = 0, nonedges = 0;
    std::string law;
    double lambda = 0;
    EdgeKsPair ks;
    double sb = NAN, nb = NAN;
    std::string flag = "ok";
  };
  std::vector<Cell> cells;
  for (auto n : n_list) {
    for (const auto& law : laws) {
      Cell c;
      c.n_v = n;
      c.law = law;
      c.edges = static_cast<std::uint64_t>(std::llround(static_cast<double>(n) * std::log(static_cast<double>(n))));
      c.edges = std::min(c.edges, pair_count(n) - 1);
      c.nonedges = pair_count(n) - c.edges;
      c.lambda = lambda_for_law(law, static_cast<double>(n));
      cells.push_back(c);
    }
  }
  const auto count = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    Cell& c = cells[static_cast<std::size_t>(i)];
    try {
      c.ks = edge_ks_pair(c.nonedges, c.edges, c.lambda);
      c.sb = skellam_upper_bound_edges(c.n_v, c.edges, c.lambda);
      c.nb = normal_upper_bound_edges(c.ks.alpha, c.ks.beta, c.nonedges);
    } catch (const InfeasibleError&) {
      c.flag = "infeasible";
    } catch (const NumericalFailure&) {
      c.flag = "numerical_failure";
    } catch (const DomainError&) {
      c.flag = "intractable";
    }
  }

  CommandResult result;
  Csv csv({"n_v", "law", "lambda", "edges", "nonedges", "alpha", "beta", "sigma", "ks_skellam", "ks_normal",
           "skellam_bound", "normal_bound", "flag"});
  std::vector<PlotSeries> series;
  for (const auto& law : laws) {
    series.push_back({"Skellam, " + law, {}, {}, false});
    series.push_back({"normal, " + law, {}, {}, true});
  }
  for (const auto& c : cells) {
    const bool ok = c.flag == "ok";
    auto v = [&](double x) { return ok ? fmt(x) : std::string("NA"); };
    csv.add({fmt(c.n_v), c.law, fmt(c.lambda), fmt(c.edges), fmt(c.nonedges), v(c.ks.alpha), v(c.ks.beta),
             v(c.ks.sigma), v(c.ks.ks_skellam), v(c.ks.ks_normal), v(c.sb), v(c.nb), c.flag});
    if (!ok) {
      result.warnings.push_back("figure1: n_v=" + fmt(c.n_v) + " law=" + c.law + " flagged " + c.flag);
      result.exit_code = c.flag == "numerical_failure" ? kExitNumerical : std::max<int>(result.exit_code, kExitInfeasible);
      continue;
    }
    const auto li = static_cast<std::size_t>(std::find(laws.begin(), laws.end(), c.law) - laws.begin());
    series[2 * li].x.push_back(static_cast<double>(c.n_v));
    series[2 * li].y.push_back(c.ks.ks_skellam);
    series[2 * li + 1].x.push_back(static_cast<double>(c.n_v));
    series[2 * li + 1].y.push_back(c.ks.ks_normal);
  }
  csv.write(glob.out_dir / "figure1.csv", result);
  write_text(glob.out_dir / "figure1.svg",
             render_loglog_svg("KS distance of the edge discrepancy", "number of vertices n_v", "KS distance", series),
             result);
  return result;
}

CommandResult cmd_stein(const json& config, const RunOptions& opts) {
  const Global glob = global_of(config, opts);
  const json& b = block(config, "stein");
  const auto lambdas = get_or<std::vector<double>>(b, "lambda_list", {1, 2, 5, 10, 20});
  const bool exploratory = get_or<bool>(b, "exploratory_asymmetric", false);
  const auto pairs = get_or<std::vector<std::vector<double>>>(b, "asymmetric_pairs", {{1, 2}, {3, 8}, {10, 4}});
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("stein: lambda_list entries must be positive");
  }

  CommandResult result;
  Csv csv({"lambda", "delta_f_sup", "bound_156", "ratio", "lambda_times_delta_f", "argmax_x", "argmax_j", "flag"});
  for (double l : lambdas) {
    const DeltaFResult r = delta_f_sup(SkellamParams(l, l));
    const double bound = 156.0 / (2.0 * l);
    const std::string flag = r.boundary_maximizer ? "boundary" : "ok";
    if (r.boundary_maximizer) result.warnings.push_back("stein: maximizer on range boundary at lambda=" + fmt(l));
    csv.add({fmt(l), fmt(r.value), fmt(bound), fmt(r.value / bound), fmt(l * r.value), fmt(r.argmax_x),
             fmt(r.argmax_j), flag});
  }
  csv.write(glob.out_dir / "stein.csv", result);

  if (exploratory) {
    Csv asym({"lambda1", "lambda2", "delta_f_sup", "lambda_sum_times_delta_f", "argmax_x", "argmax_j", "flag"});
    for (const auto& p : pairs) {
      if (p.size() != 2 || !(p[0] > 0.0) || !(p[1] > 0.0)) {
        throw ConfigError("stein: asymmetric_pairs entries must be [lambda1, lambda2] with positive values");
      }
      const SkellamParams params(p[0], p[1]);
      const DeltaFResult r = delta_f_sup(params, SteinMode::Exploratory);
      if (r.boundary_maximizer) {
        result.warnings.push_back("stein: maximizer on range boundary at (" + fmt(p[0]) + ", " + fmt(p[1]) + ")");
      }
      asym.add({fmt(p[0]), fmt(p[1]), fmt(r.value), fmt((p[0] + p[1]) * r.value), fmt(r.argmax_x), fmt(r.argmax_j),
                r.boundary_maximizer ? "exploratory_boundary" : "exploratory"});
    }
    asym.write(glob.out_dir / "stein_asymmetric.csv", result);
  }
  return result;
}

CommandResult cmd_comb(const json& config, const RunOptions& opts) {
  const Global glob = global_of(config, opts);
  const json& b = block(config, "comb");
  std::vector<std::uint64_t> ns;
  if (b.contains("n") && b.at("n").is_array()) {
    ns = get_or<std::vector<std::uint64_t>>(b, "n", {});
  } else {
    ns = {get_or<std::uint64_t>(b, "n", 6)};
  }
  const auto nus = get_or<std::vector<double>>(b, "nu_list", {1.0, 0.5, 0.0, -1.0});
  const double target = get_or<double>(b, "target_mean", 2.0);
  const double var_target = get_or<double>(b, "variance_target", NAN);
  if (ns.empty() || nus.empty()) throw ConfigError("comb: n and nu_list must be nonempty");
  for (auto n : ns) {
    if (!(target > 0.0 && target < static_cast<double>(n))) throw ConfigError("comb: target_mean must lie in (0, n)");
  }

  CommandResult result;
  Csv csv({"n", "nu", "pi_calibrated", "mean", "variance", "variance_target", "variance_ok", "neg_assoc_checked",
           "flag"});
  for (auto n : ns) {
    for (double nu : nus) {
      try {
        const CombDist d = calibrate_comb(n, nu, target);
        std::string check = "n/a";
        if (n <= 6) check = log_supermodularity_check(n, d.pi(), nu).pass ? "pass" : "fail";
        const std::string vok = std::isnan(var_target) ? "NA" : (d.variance() <= var_target ? "yes" : "no");
        csv.add({fmt(n), fmt(nu), fmt(d.pi()), fmt(d.mean()), fmt(d.variance()), fmt(var_target), vok, check, "ok"});
      } catch (const NumericalFailure& e) {
        result.warnings.push_back(std::string("comb: ") + e.what());
        result.exit_code = kExitNumerical;
        csv.add({fmt(n), fmt(nu), "NA", "NA", "NA", fmt(var_target), "NA", "NA", "calibration_failed"});
      }
    }
  }
  csv.write(glob.out_dir / "comb.csv", result);
  return result;
}

CommandResult cmd_chains(const json& config, const RunOptions& opts) {
  const Global glob = global_of(config, opts);
  const json& b = block(config, "chains");
  const auto graph_file = get_or<std::string>(b, "graph_file", "");
  const auto n_v = get_or<std::uint64_t>(b, "n_v", 200);
  const auto seeds = get_or<std::vector<std::uint64_t>>(b, "seeds", {1});
  const double lambda = get_or<double>(b, "lambda", 3.0);
  const auto trials = get_or<std::uint64_t>(b, "trials", glob.trials);
  if (seeds.empty()) throw ConfigError("chains: seeds must be nonempty");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("chains: lambda must be >= 0");
  if (trials == 0) throw ConfigError("chains: trials must be >= 1");
  if (graph_file.empty() && n_v < 3) throw ConfigError("chains: n_v must be >= 3");

  std::optional<SparseGraph> imported;
  if (!graph_file.empty()) {
    try {
      imported = read_edge_list_file(graph_file);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("chains: ") + e.what());
    }
  }

  CommandResult result;
  Csv csv({"seed", "n_v", "edges", "c0", "c1", "c2", "c3", "alpha", "beta", "lambda1", "lambda2", "lambda_ratio",
           "mc_mean", "mc_var", "ks_vs_skellam", "sum_p2", "sum_q2", "cov_mm_term", "cov_mm_exact_term", "delta_f",
           "bound_total", "bound_total_exact_cov", "flag"});
  json rows = json::array();
  for (std::uint64_t s : seeds) {
    const SparseGraph g = imported ? *imported
                                   : erdos_renyi(n_v, std::log(static_cast<double>(n_v)) / static_cast<double>(n_v), s);
    NoiseSpec spec;
    std::string flag = "ok";
    try {
      spec = calibrate_independent(g, lambda);
    } catch (const InfeasibleError& e) {
      result.warnings.push_back(std::string("chains: seed ") + fmt(s) + ": " + e.what());
      result.exit_code = kExitInfeasible;
      csv.add({fmt(s), fmt(g.n_vertices()), fmt(g.n_edges()), "NA", "NA", "NA", "NA", "NA", "NA", "NA", "NA", "NA",
               "NA", "NA", "NA", "NA", "NA", "NA", "NA", "NA", "NA", "NA", "infeasible"});
      rows.push_back({{"seed", s}, {"flag", "infeasible"}});
      continue;
    }
    const DiscrepancySummary mc = mc_discrepancy(g, spec, Motif::TwoChain, trials, derive_seed(glob.seed, s));
    const double ks = ks_distance(mc.dist, skellam_reference(mc.lambda1, mc.lambda2));

    double delta_f = NAN;
    if (mc.lambda1 > 0.0 && mc.lambda2 > 0.0) {
      const SkellamParams params(mc.lambda1, mc.lambda2);
      const DeltaFResult r =
          delta_f_sup(params, params.symmetric() ? SteinMode::Canonical : SteinMode::Exploratory);
      delta_f = r.value;
      if (!params.symmetric()) flag = "exploratory_delta_f";
    }
    ChainBoundReport rep = chain_bound_report(g, spec.alpha, spec.beta, std::isnan(delta_f) ? 0.0 : delta_f);
    if (std::isnan(delta_f)) {
      // No approximating law to compare with; the bound is 0 only if every term is.
      const bool zero = rep.sum_p2 + rep.sum_q2 + rep.cov_mm_term == 0.0;
      rep.total = zero ? 0.0 : NAN;
      rep.total_exact_cov = rep.sum_p2 + rep.sum_q2 + rep.cov_mm_exact_term == 0.0 ? 0.0 : NAN;
      if (!zero) flag = "no_delta_f";
    }
    const double ratio = mc.lambda2 > 0.0 ? mc.lambda1 / mc.lambda2 : NAN;
    const auto& c = rep.census;
    csv.add({fmt(s), fmt(g.n_vertices()), fmt(g.n_edges()), fmt(c.c0), fmt(c.c1), fmt(c.c2), fmt(c.c3),
             fmt(spec.alpha), fmt(spec.beta), fmt(mc.lambda1), fmt(mc.lambda2), fmt(ratio), fmt(mc.mean),
             fmt(mc.variance), fmt(ks), fmt(rep.sum_p2), fmt(rep.sum_q2), fmt(rep.cov_mm_term),
             fmt(rep.cov_mm_exact_term), fmt(delta_f), fmt(rep.total), fmt(rep.total_exact_cov), flag});
    rows.push_back({{"seed", s},
                    {"n_v", g.n_vertices()},
                    {"edges", g.n_edges()},
                    {"census", {{"c0", c.c0}, {"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}}},
                    {"three_paths", rep.three_paths},
                    {"chain_pairs_shared_edge", rep.pairs_shared_edge},
                    {"chain_pairs_shared_nonedge", rep.pairs_shared_nonedge},
                    {"noise", spec},
                    {"lambda1", jnum(mc.lambda1)},
                    {"lambda2", jnum(mc.lambda2)},
                    {"lambda_ratio", jnum(ratio)},
                    {"mc", {{"trials", trials}, {"mean", jnum(mc.mean)}, {"variance", jnum(mc.variance)}}},
                    {"ks_vs_skellam", jnum(ks)},
                    {"bound",
                     {{"sum_p2", jnum(rep.sum_p2)},
                      {"sum_q2", jnum(rep.sum_q2)},
                      {"cov_mm_term", jnum(rep.cov_mm_term)},
                      {"cov_mm_exact_term", jnum(rep.cov_mm_exact_term)},
                      {"product_term", jnum(rep.product_term)},
                      {"delta_f", jnum(delta_f)},
                      {"total", jnum(rep.total)},
                      {"total_exact_cov", jnum(rep.total_exact_cov)},
                      {"caveat", rep.caveat}}},
                    {"flag", flag}});
  }
  csv.write(glob.out_dir / "chains.csv", result);
  json report = {{"command", "chains"},
                 {"schema_version", 1},
                 {"parameters",
                  {{"seed", glob.seed},
                   {"n_v", imported ? imported->n_vertices() : n_v},
                   {"graph_file", graph_file.empty() ? json(nullptr) : json(graph_file)},
                   {"lambda", lambda},
                   {"trials", trials},
                   {"seeds", seeds}}},
                 {"rows", rows}};
  write_text(glob.out_dir / "chains.json", report.dump(2) + "\n", result);
  return result;
}

CommandResult run_command(const std::string& name, const json& config, const RunOptions& opts) {
  if (name == "figure1") return cmd_figure1(config, opts);
  if (name == "stein") return cmd_stein(config, opts);
  if (name == "comb") return cmd_comb(config, opts);
  if (name == "chains") return cmd_chains(config, opts);
  throw ConfigError("unknown command '" + name + "'");
}

}  // namespace skellamnet
