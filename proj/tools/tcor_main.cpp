// tcor — report all column pairs of a dense matrix whose Pearson correlation
// reaches a threshold (or whose Euclidean distance stays under one), using
// truncated-SVD pruning so only a small candidate set is evaluated exactly.

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tcor/driver.hpp"
#include "tcor/io.hpp"
#include "tcor/types.hpp"

namespace {

// Exit codes, one per error family so scripts can tell them apart.
enum ExitCode {
  kOk = 0,
  kUsage = 1,        // bad flags or configuration
  kIo = 2,           // unreadable/missing/missized files
  kParse = 3,        // malformed file contents
  kValidation = 4,   // structurally invalid data
  kConstant = 5,     // constant columns in correlation mode
  kConvergence = 6,  // SVD did not converge
  kInternal = 10,
};

struct CliArgs {
  std::string input;
  std::string format = "csv";
  long long bin_m = 0;
  long long bin_n = 0;
  bool has_header = false;
  bool transpose = false;
  std::string mode = "cor";
  double t = -1.0;
  double d = -1.0;
  bool t_set = false;
  bool d_set = false;
  long long p0 = 10;
  long long p_max = 0;
  int threads = 0;
  bool drop_constant = false;
  std::string output;
  std::string diagnostics;
  long long budget = -1;
  double growth = 2.0;
  double improvement_floor = 0.10;
  double slack = 1e-8;
  double tol = 1e-8;
  int max_restarts = 1000;
  std::string svd_method = "auto";
  unsigned long long seed = 0x746372;
};

int resolve_threads(const CliArgs& args) {
  if (args.threads > 0) return args.threads;
  if (const char* env = std::getenv("TCOR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw tcor::ConfigError(
          "TCOR_THREADS must be a positive integer, got '" +
          std::string(env) + "'");
    }
    return static_cast<int>(v);
  }
  return 0;  // let OpenMP decide
}

tcor::DataMatrix load_input(const CliArgs& args) {
  if (args.format == "csv") {
    return tcor::load_csv(args.input, args.has_header, args.transpose);
  }
  long long m = args.bin_m;
  long long n = args.bin_n;
  if (m <= 0 || n <= 0) {
    // Sidecar: <input>.json with {"m": rows, "n": cols}.
    const std::string sidecar = args.input + ".json";
    std::ifstream in(sidecar);
    if (!in) {
      throw tcor::ConfigError(
          "binary input needs --m and --n, or a sidecar file " + sidecar);
    }
    nlohmann::json j;
    try {
      in >> j;
      m = j.at("m").get<long long>();
      n = j.at("n").get<long long>();
    } catch (const nlohmann::json::exception& e) {
      throw tcor::ParseError(sidecar + ": " + e.what());
    }
  }
  tcor::DataMatrix a = tcor::load_binary(args.input, m, n);
  if (args.transpose) {
    a.values = a.values.transpose().eval();
  }
  return a;
}

void write_results(const tcor::ThresholdedResult& res,
                   const std::vector<tcor::Index>* kept,
                   const std::string& path) {
  std::string buf;
  buf.reserve(res.entries.size() * 24 + 16);
  buf += "i,j,value\n";
  char line[96];
  for (const auto& e : res.entries) {
    const long long i =
        kept ? static_cast<long long>((*kept)[static_cast<std::size_t>(e.i)])
             : static_cast<long long>(e.i);
    const long long j =
        kept ? static_cast<long long>((*kept)[static_cast<std::size_t>(e.j)])
             : static_cast<long long>(e.j);
    const int len =
        std::snprintf(line, sizeof line, "%lld,%lld,%.17g\n", i + 1, j + 1,
                      e.value);
    buf.append(line, static_cast<std::size_t>(len));
  }
  if (path.empty()) {
    std::fwrite(buf.data(), 1, buf.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tcor::IoError("cannot open output file: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw tcor::IoError("failed writing output file: " + path);
}

void write_diagnostics(const tcor::Diagnostics& diag, tcor::Index loaded_m,
                       tcor::Index loaded_n, tcor::Index dropped, int threads,
                       const std::string& path) {
  nlohmann::json j{
      {"m", loaded_m},
      {"n", loaded_n},
      {"dropped_columns", dropped},
      {"p_final", diag.p_final},
      {"ell", diag.ell},
      {"candidate_count", diag.candidate_count},
      {"result_count", diag.result_count},
      {"savings_estimate", diag.savings_estimate},
      {"wall_seconds", diag.wall_seconds},
      {"evaluated_count", diag.evaluated_count},
      {"evaluated_fraction", diag.evaluated_fraction},
      {"step4_tests", diag.step4_tests},
      {"rounds", diag.rounds},
      {"threads", threads > 0 ? threads : omp_get_max_threads()},
  };
  std::ofstream out(path);
  if (!out) throw tcor::IoError("cannot open diagnostics file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw tcor::IoError("failed writing diagnostics file: " + path);
}

int run(const CliArgs& args) {
  if (args.mode == "cor") {
    if (!args.t_set || args.d_set) {
      throw tcor::ConfigError(
          "correlation mode needs --threshold/-t (and no --distance)");
    }
  } else {
    if (!args.d_set || args.t_set) {
      throw tcor::ConfigError(
          "distance mode needs --distance/-d (and no --threshold)");
    }
  }

  tcor::TcorConfig config;
  config.t = args.t;
  config.p0 = static_cast<tcor::Index>(args.p0);
  config.p_max = static_cast<tcor::Index>(args.p_max);
  config.growth = args.growth;
  config.candidate_budget = args.budget;
  config.improvement_floor = args.improvement_floor;
  config.slack = args.slack;
  config.threads = resolve_threads(args);
  config.svd.tol = args.tol;
  config.svd.max_restarts = args.max_restarts;
  config.svd.seed = args.seed;
  if (args.svd_method == "lanczos") {
    config.svd.method = tcor::SvdMethod::Lanczos;
  } else if (args.svd_method == "dense") {
    config.svd.method = tcor::SvdMethod::Dense;
  }

  tcor::DataMatrix a = load_input(args);
  const tcor::Index loaded_m = a.rows();
  const tcor::Index loaded_n = a.cols();

  tcor::ThresholdedResult res;
  std::optional<std::vector<tcor::Index>> kept;
  tcor::Index dropped = 0;
  if (args.mode == "cor") {
    if (args.drop_constant) {
      auto [trimmed, kept_indices] = tcor::drop_constant_columns(a);
      dropped = loaded_n - trimmed.cols();
      if (trimmed.cols() < 2) {
        throw tcor::ValidationError(
            "fewer than 2 non-constant columns remain");
      }
      res = tcor::tcor(trimmed, config);
      if (dropped > 0) kept = std::move(kept_indices);
    } else {
      res = tcor::tcor(a, config);
    }
  } else {
    res = tcor::tdist(a, args.d, config);
  }

  write_results(res, kept ? &*kept : nullptr, args.output);
  if (!args.diagnostics.empty()) {
    write_diagnostics(res.diagnostics, loaded_m, loaded_n, dropped,
                      config.threads, args.diagnostics);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "All column pairs with Pearson correlation >= t (or Euclidean "
      "distance <= d), found by truncated-SVD pruning"};
  CliArgs args;

  app.add_option("--input,-i,input", args.input, "input matrix file")
      ->required();
  app.add_option("--format,-f", args.format, "input format (default csv)")
      ->check(CLI::IsMember({"csv", "bin"}));
  app.add_option("--m", args.bin_m, "rows (bin format)");
  app.add_option("--n", args.bin_n, "columns (bin format)");
  app.add_flag("--has-header", args.has_header, "skip the first CSV line");
  app.add_flag("--transpose", args.transpose,
               "transpose after loading (variables are in rows)");
  app.add_option("--mode", args.mode, "cor or dist (default cor)")
      ->check(CLI::IsMember({"cor", "dist"}));
  app.add_option("--threshold,-t", args.t, "correlation threshold in (0,1)");
  app.add_option("--distance,-d", args.d, "distance threshold > 0");
  app.add_option("--p0", args.p0, "initial SVD rank (default 10)");
  app.add_option("--p-max", args.p_max,
                 "rank cap (default min(100, m-1, n))");
  app.add_option("--threads", args.threads,
                 "worker threads (default: TCOR_THREADS env, else all)");
  app.add_flag("--drop-constant", args.drop_constant,
               "drop constant columns instead of failing (cor mode)");
  app.add_option("--output,-o", args.output,
                 "result CSV path (default: stdout)");
  app.add_option("--diagnostics", args.diagnostics,
                 "write run diagnostics JSON here");
  app.add_option("--budget", args.budget,
                 "adjacent-candidate budget before growing rank "
                 "(default 10*n)");
  app.add_option("--growth", args.growth,
                 "rank growth factor per adaptation round (default 2)");
  app.add_option("--improvement-floor", args.improvement_floor,
                 "minimum relative shrink to keep growing (default 0.1)");
  app.add_option("--slack", args.slack,
                 "additive slack in the pruning test (default 1e-8)");
  app.add_option("--tol", args.tol, "SVD residual tolerance (default 1e-8)");
  app.add_option("--max-restarts", args.max_restarts,
                 "SVD restart limit (default 1000)");
  app.add_option("--svd", args.svd_method, "auto, lanczos, or dense")
      ->check(CLI::IsMember({"auto", "lanczos", "dense"}));
  app.add_option("--seed", args.seed, "SVD start-vector seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  args.t_set = app.count("--threshold") > 0;
  args.d_set = app.count("--distance") > 0;

  try {
    return run(args);
  } catch (const tcor::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const tcor::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const tcor::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const tcor::ConstantColumnError& e) {
    std::cerr << "error: " << e.what()
              << " (rerun with --drop-constant to skip them)\n";
    return kConstant;
  } catch (const tcor::AllColumnsConstantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConstant;
  } catch (const tcor::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const tcor::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
}
