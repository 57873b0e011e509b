// Command-line front end: sample point sets, run the verification suites,
// estimate tail probabilities into CSV, fit decay slopes, and render SVG
// snapshots. Exit codes: 0 = pass, 1 = a bound or invariant failed, 2 = bad
// usage or configuration.

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "vorpoly/experiments.hpp"
#include "vorpoly/svg.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_sigint(int) { g_stop.store(true); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vorpoly::precondition_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_sample(double lambda, double half, std::uint64_t seed, std::uint64_t replicate,
               std::uint64_t n, double delta, const std::string& out,
               const std::string& svg) {
  vorpoly::Intensity<2> mu;
  mu.lambda = lambda;
  if (n > 0) {
    double sub = vorpoly::ModifiedLayout::make(n, delta).sub_side;
    half = std::ceil(half / sub - 1e-9) * sub;
  }
  vorpoly::Box2 window{{-half, -half}, {half, half}};
  vorpoly::PointSet<2> ps = vorpoly::sample<2>(window, mu, seed, replicate);
  if (n > 0) ps = vorpoly::build_modified(ps, n, delta);
  if (out.empty() || out == "-") {
    vorpoly::write_points(std::cout, ps);
  } else {
    std::ofstream os(out);
    if (!os) {
      std::cerr << "cannot write " << out << "\n";
      return 2;
    }
    vorpoly::write_points(os, ps);
  }
  if (!svg.empty()) {
    vorpoly::Triangulation tr = vorpoly::delaunay(ps);
    if (!vorpoly::write_tessellation_svg(tr, svg)) {
      std::cerr << "cannot write " << svg << "\n";
      return 2;
    }
  }
  return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::uint64_t replicates,
               double lambda, double L) {
  using vorpoly::SuiteResult;
  std::vector<SuiteResult> results;
  if (suite == "full-box" || suite == "all")
    results.push_back(vorpoly::verify_full_box(seed, lambda, L, replicates));
  if (suite == "confinement" || suite == "all")
    results.push_back(vorpoly::verify_confinement_suite(seed, replicates));
  if (suite == "cluster-product" || suite == "all")
    results.push_back(vorpoly::verify_cluster_product_suite(seed, replicates));
  if (suite == "modified-invariants" || suite == "all")
    results.push_back(vorpoly::verify_modified_suite(seed, std::max<std::uint64_t>(
                                                               20, replicates / 10)));
  if (results.empty()) {
    std::cerr << "unknown suite '" << suite
              << "' (expected full-box | confinement | cluster-product | "
                 "modified-invariants | all)\n";
    return 2;
  }
  bool ok = true;
  for (const SuiteResult& sr : results) {
    for (const std::string& line : sr.lines) std::cout << "  " << line << "\n";
    std::cout << (sr.ok ? "[PASS] " : "[FAIL] ") << sr.name << "\n";
    if (!sr.ok) ok = false;
  }
  return ok ? 0 : 1;
}

int cmd_tail(const std::string& config_path, std::uint64_t seed_override,
             std::uint64_t reps_override, const std::string& out) {
  vorpoly::ExperimentConfig cfg = vorpoly::ExperimentConfig::from_json_text(slurp(config_path));
  if (seed_override != (std::uint64_t)-1) cfg.seed = seed_override;
  if (reps_override != (std::uint64_t)-1) cfg.replicates = reps_override;
  cfg.validate();
  vorpoly::set_abort_flag(&g_stop);
  std::signal(SIGINT, on_sigint);
  vorpoly::RunResult res = vorpoly::run_experiment(cfg);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty() && out != "-") {
    file.open(out);
    if (!file) {
      std::cerr << "cannot write " << out << "\n";
      return 2;
    }
    os = &file;
  }
  *os << vorpoly::csv_header() << "\n";
  for (const vorpoly::ResultRow& row : res.rows) *os << vorpoly::format_row(row) << "\n";
  os->flush();
  std::cerr << (res.ok ? "ok" : "FAIL") << ": " << res.completed << "/" << cfg.replicates
            << " replicates, " << res.censored << " censored";
  if (!res.message.empty()) std::cerr << " (" << res.message << ")";
  std::cerr << "\n";
  return res.ok ? 0 : 1;
}

int cmd_fit(const std::string& in) {
  std::vector<vorpoly::ResultRow> rows;
  auto read_stream = [&](std::istream& is) {
    std::string line;
    while (std::getline(is, line))
      if (auto row = vorpoly::parse_row(line)) rows.push_back(*row);
  };
  if (in.empty() || in == "-") {
    read_stream(std::cin);
  } else {
    std::ifstream is(in);
    if (!is) {
      std::cerr << "cannot open " << in << "\n";
      return 2;
    }
    read_stream(is);
  }
  if (rows.empty()) {
    std::cerr << "no data rows\n";
    return 2;
  }
  for (const vorpoly::GroupFit& gf : vorpoly::fit_rows(rows)) {
    std::cout << gf.label << " axis=" << gf.axis;
    if (gf.below_resolution) {
      std::cout << " below resolution (every estimate zero)\n";
    } else if (gf.fit.points < 3) {
      std::cout << " insufficient positive points (" << gf.fit.points << ")\n";
    } else {
      std::cout << " slope=" << gf.fit.slope << " r2=" << gf.fit.r2
                << " points=" << gf.fit.points << "\n";
    }
  }
  return 0;
}

int cmd_svg(const std::string& in, const std::string& out) {
  vorpoly::PointSet<2> ps;
  if (in.empty() || in == "-") {
    ps = vorpoly::read_points<2>(std::cin);
  } else {
    std::ifstream is(in);
    if (!is) {
      std::cerr << "cannot open " << in << "\n";
      return 2;
    }
    ps = vorpoly::read_points<2>(is);
  }
  vorpoly::Triangulation tr = vorpoly::delaunay(ps);
  if (!vorpoly::write_tessellation_svg(tr, out)) {
    std::cerr << "cannot write " << out << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random Voronoi tessellation laboratory"};
  app.require_subcommand(1);

  // sample
  auto* sample = app.add_subcommand("sample", "draw a point-process realization");
  double s_lambda = 1.0, s_half = 10.0, s_delta = 0.5;
  std::uint64_t s_seed = 1, s_rep = 0, s_n = 0;
  std::string s_out, s_svg;
  sample->add_option("--lambda", s_lambda, "intensity");
  sample->add_option("--half", s_half, "window half-width");
  sample->add_option("--seed", s_seed, "seed");
  sample->add_option("--replicate", s_rep, "replicate index");
  sample->add_option("--n", s_n, "density-regularised model parameter (0 = plain)");
  sample->add_option("--delta", s_delta, "tile exponent for the regularised model");
  sample->add_option("--out", s_out, "output file (- = stdout)");
  sample->add_option("--svg", s_svg, "also render the tessellation to this SVG");

  // verify
  auto* verify = app.add_subcommand("verify", "run a closed-form verification suite");
  std::string v_suite = "all";
  std::uint64_t v_seed = 1, v_reps = 2000;
  double v_lambda = 1.0, v_L = 20.0;
  verify->add_option("suite", v_suite,
                     "full-box | confinement | cluster-product | modified-invariants | all");
  verify->add_option("--seed", v_seed, "seed");
  verify->add_option("--replicates", v_reps, "replicates per suite");
  verify->add_option("--lambda", v_lambda, "intensity (full-box)");
  verify->add_option("--L", v_L, "block side (full-box)");

  // tail
  auto* tail = app.add_subcommand("tail", "estimate tail probabilities into CSV");
  std::string t_config, t_out;
  std::uint64_t t_seed = (std::uint64_t)-1, t_reps = (std::uint64_t)-1;
  tail->add_option("--config", t_config, "experiment config (JSON)")->required();
  tail->add_option("--seed", t_seed, "override config seed");
  tail->add_option("--replicates", t_reps, "override config replicates");
  tail->add_option("--out", t_out, "CSV output file (- = stdout)");

  // fit
  auto* fit = app.add_subcommand("fit", "fit decay slopes to a tail CSV");
  std::string f_in;
  fit->add_option("--in", f_in, "CSV file (- = stdin)");

  // svg
  auto* svg = app.add_subcommand("svg", "render a stored point set");
  std::string g_in, g_out = "out.svg";
  svg->add_option("--in", g_in, "points file (- = stdin)");
  svg->add_option("--out", g_out, "SVG output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sample->parsed())
      return cmd_sample(s_lambda, s_half, s_seed, s_rep, s_n, s_delta, s_out, s_svg);
    if (verify->parsed()) return cmd_verify(v_suite, v_seed, v_reps, v_lambda, v_L);
    if (tail->parsed()) return cmd_tail(t_config, t_seed, t_reps, t_out);
    if (fit->parsed()) return cmd_fit(f_in);
    if (svg->parsed()) return cmd_svg(g_in, g_out);
  } catch (const vorpoly::precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
