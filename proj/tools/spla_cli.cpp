// spla_cli: analyze a CSV, reproduce the bundled examples, run simulations.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spla/spla.hpp"
#include "spla/reproduce.hpp"

#ifndef SPLA_DATA_DIR
#define SPLA_DATA_DIR "data"
#endif

namespace {

using namespace spla;

enum Exit { Ok = 0, Usage = 1, Data = 2, Numeric = 3, GoldenFailure = 4 };

struct Options {
  bool standardize = false;
  double c_ec = 0.6;
  std::string method = "spca";
  std::string grid;
  std::string order;
  std::string format = "table";
  std::uint64_t seed = default_seed;
  std::string out;
  std::string data_dir = SPLA_DATA_DIR;
  std::string csv_path;
  std::string fixture;
  std::vector<Index> n{1000};
  std::vector<double> rho{0.0};
  Index reps = 100;
  std::vector<Index> blocks{2, 4, 6};
};

PenaltyGrid parse_grid(const std::string& s) {
  PenaltyGrid g;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.steps, &tail) != 3)
    throw Error(ErrorKind::InvalidArgument, "--grid expects lo:hi:steps, got '" + s + "'");
  if (g.steps < 1 || !(g.lo > 0.0) || !(g.lo <= g.hi)) throw Error(ErrorKind::EmptyGrid, "penalty grid is empty");
  return g;
}

SplaConfig make_config(const Options& o) {
  SplaConfig cfg;
  cfg.gate = EcGate{o.c_ec};
  cfg.method = o.method == "pmd" ? SparseMethod::Pmd : SparseMethod::Spca;
  cfg.standardize = o.standardize;
  if (!o.grid.empty()) cfg.grid = parse_grid(o.grid);
  return cfg;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw Error(ErrorKind::DataFormat, o.out + ": cannot write file");
  f << text;
}

int cmd_analyze(const Options& o) {
  const DataMatrix d = read_csv(o.csv_path);
  SplaConfig cfg = make_config(o);
  if (!o.order.empty()) cfg.block_order = parse_block_spec(o.order, d.names());
  const json j = report_json(run_spla(d, cfg));
  emit(o, o.format == "json" ? j.dump(2) + "\n" : render_table(j));
  return Ok;
}

int cmd_reproduce(const Options& o) {
  std::vector<GoldenCell> cells;
  if (o.fixture == "oecd")
    cells = reproduce_oecd(o.data_dir);
  else if (o.fixture == "exam")
    cells = reproduce_exam(o.data_dir);
  else if (o.fixture == "synthetic8")
    cells = reproduce_synthetic8(o.seed);
  else
    cells = reproduce_synthetic10(o.seed);

  bool all = true;
  json arr = json::array();
  std::ostringstream os;
  os << detail::pad("table", 12) << detail::pad("row", 28) << detail::pad("column", 20) << detail::pad("published", 11)
     << detail::pad("computed", 11) << detail::pad("accepted", 20) << "status\n";
  for (const auto& c : cells) {
    all = all && c.pass();
    arr.push_back({{"table", c.table},
                   {"row", c.row},
                   {"column", c.column},
                   {"published", c.expected},
                   {"computed", c.computed},
                   {"lo", c.lo},
                   {"hi", c.hi},
                   {"pass", c.pass()}});
    const bool flag = c.lo == c.hi;
    const std::string range =
        flag ? "yes" : "[" + detail::fixed(c.lo, 4) + ", " + detail::fixed(c.hi, 4) + "]";
    os << detail::pad(c.table, 12) << detail::pad(c.row, 28) << detail::pad(c.column, 20)
       << detail::pad(flag ? "yes" : detail::fixed(c.expected, 4), 11)
       << detail::pad(flag ? (c.computed == 1.0 ? "yes" : "no") : detail::fixed(c.computed, 4), 11)
       << detail::pad(range, 20) << (c.pass() ? "pass" : "FAIL") << "\n";
  }
  os << (all ? "all cells pass\n" : "some cells fail\n");
  const json j{{"fixture", o.fixture}, {"pass", all}, {"cells", arr}};
  emit(o, o.format == "json" ? j.dump(2) + "\n" : os.str());
  return all ? Ok : GoldenFailure;
}

std::string csv_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int cmd_simulate_rate(const Options& o) {
  const auto rows = identification_rate(BlockDesign{}, o.n, o.rho, o.reps, make_config(o), o.seed);
  std::ostringstream os;
  json arr = json::array();
  os << "detector,n,rho,c_ec,reps,rate\n";
  for (const auto& r : rows) {
    os << r.detector << "," << r.n << "," << csv_number(r.rho) << "," << csv_number(r.c_ec) << "," << r.reps << ","
       << csv_number(r.rate()) << "\n";
    arr.push_back({{"detector", r.detector},
                   {"n", r.n},
                   {"rho", r.rho},
                   {"c_ec", r.c_ec},
                   {"reps", r.reps},
                   {"successes", r.successes},
                   {"rate", r.rate()}});
  }
  emit(o, o.format == "json" ? arr.dump(2) + "\n" : os.str());
  return Ok;
}

int cmd_simulate_ec(const Options& o) {
  BlockDesign design;
  std::ostringstream os;
  json arr = json::array();
  os << "n,rho,rep,block,ec\n";
  for (Index n : o.n)
    for (double rho : o.rho) {
      design.rho = rho;
      const auto rows = ec_distribution(design, n, o.reps, o.blocks, o.seed);
      for (Index r = 0; r < rows.size(); ++r)
        for (Index k = 0; k < o.blocks.size(); ++k) {
          os << n << "," << csv_number(rho) << "," << r << "," << o.blocks[k] << "," << csv_number(rows[r][k]) << "\n";
          arr.push_back({{"n", n}, {"rho", rho}, {"rep", r}, {"block", o.blocks[k]}, {"ec", rows[r][k]}});
        }
    }
  emit(o, o.format == "json" ? arr.dump(2) + "\n" : os.str());
  return Ok;
}

int cmd_simulate_wishart(const Options& o) {
  const auto draws = random_wishart_demo(o.reps, make_config(o), o.seed);
  std::ostringstream os;
  json arr = json::array();
  os << "rep,blocks,ec\n";
  for (Index r = 0; r < draws.size(); ++r) {
    os << r << "," << draws[r].blocks << "," << csv_number(draws[r].ec) << "\n";
    arr.push_back({{"rep", r}, {"blocks", draws[r].blocks}, {"ec", draws[r].ec}});
  }
  emit(o, o.format == "json" ? arr.dump(2) + "\n" : os.str());
  return Ok;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::DataFormat:
    case ErrorKind::ConstantColumn:
    case ErrorKind::NonSymmetric:
      return Data;
    case ErrorKind::InvalidArgument:
    case ErrorKind::EmptyGrid:
      return Usage;
    default:
      return Numeric;
  }
}

void add_format(CLI::App* app, Options& o) {
  app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"table", "json"}));
  app->add_option("--out", o.out, "Write output to this path instead of standard output");
}

void add_method(CLI::App* app, Options& o) {
  app->add_option("--c-ec", o.c_ec, "EC gate threshold in (0,1)");
  app->add_option("--method", o.method, "Sparse loading method")->check(CLI::IsMember({"pmd", "spca"}));
  app->add_option("--grid", o.grid, "Penalty grid lo:hi:steps");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Sparse principal loading analysis"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Run the full analysis on a CSV file");
  analyze->add_option("csv", o.csv_path, "Input CSV (header row of names, numeric rows)")->required();
  analyze->add_flag("--standardize", o.standardize, "Analyze the correlation matrix");
  analyze->add_option("--order", o.order, "Evaluation order, e.g. \"I/Y;SCH;POP;RD,Y85,Y60\"");
  add_method(analyze, o);
  add_format(analyze, o);

  auto* reproduce = app.add_subcommand("reproduce", "Compare computed values with the published tables");
  reproduce->add_option("fixture", o.fixture, "Example to reproduce")
      ->required()
      ->check(CLI::IsMember({"oecd", "exam", "synthetic8", "synthetic10"}));
  reproduce->add_option("--data-dir", o.data_dir, "Directory holding oecd.csv and exam.csv");
  reproduce->add_option("--seed", o.seed, "Seed for the synthetic examples");
  add_format(reproduce, o);

  auto* simulate = app.add_subcommand("simulate", "Simulation experiments (CSV or JSON output)");
  simulate->require_subcommand(1);
  auto add_sim = [&](const char* name, const char* help) {
    auto* s = simulate->add_subcommand(name, help);
    s->add_option("--reps", o.reps, "Replicates per cell")->check(CLI::PositiveNumber);
    s->add_option("--seed", o.seed, "Base seed");
    add_format(s, o);
    return s;
  };
  auto* rate = add_sim("rate", "Identification rate of the block design");
  rate->add_option("--n", o.n, "Sample sizes")->delimiter(',')->check(CLI::Range(Index{2}, Index{10000000}));
  rate->add_option("--rho", o.rho, "Between-block levels in [0,1)")->delimiter(',');
  add_method(rate, o);
  auto* ec = add_sim("ec", "EC distribution of selected blocks under the true partition");
  ec->add_option("--n", o.n, "Sample sizes")->delimiter(',')->check(CLI::Range(Index{2}, Index{10000000}));
  ec->add_option("--rho", o.rho, "Between-block levels in [0,1)")->delimiter(',');
  ec->add_option("--blocks", o.blocks, "1-based blocks to evaluate")->delimiter(',');
  auto* wishart = add_sim("wishart", "Block counts and EC for random 3x3 correlation matrices");
  add_method(wishart, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? Ok : Usage;
  }

  try {
    if (*analyze) return cmd_analyze(o);
    if (*reproduce) return cmd_reproduce(o);
    if (*rate) return cmd_simulate_rate(o);
    if (*ec) return cmd_simulate_ec(o);
    if (*wishart) return cmd_simulate_wishart(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Numeric;
  }
  return Usage;
}
