// Benchmark of the parallel pruning/filtering kernels against their serial
// reference implementations, on the synthetic factor-model instance.  Also
// verifies that every parallel run reproduces the serial output exactly.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "tcor/io.hpp"
#include "tcor/linop.hpp"
#include "tcor/pruning.hpp"
#include "tcor/svd.hpp"
#include "tcor/synthetic.hpp"
#include "tcor/threshold.hpp"

namespace {

double time_seconds(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

bool same_entries(const std::vector<tcor::ResultEntry>& a,
                  const std::vector<tcor::ResultEntry>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].i != b[k].i || a[k].j != b[k].j || a[k].value != b[k].value) {
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial-vs-parallel kernel benchmark"};
  long long n = 20000;
  long long m = 80;
  double t = 0.99;
  long long p = 10;
  std::vector<int> thread_counts{1, 2, 4, 8};
  app.add_option("--n", n, "columns (default 20000)");
  app.add_option("--m", m, "rows (default 80)");
  app.add_option("-t", t, "correlation threshold (default 0.99)");
  app.add_option("--p", p, "truncation rank (default 10)");
  app.add_option("--threads", thread_counts,
                 "thread counts to benchmark (default 1 2 4 8)");
  CLI11_PARSE(app, argc, argv);

  tcor::SyntheticSpec spec;
  spec.n = n;
  spec.m = m;
  spec.blocks = std::max<long long>(1, n / 1250);
  std::printf("generating %lldx%lld synthetic instance...\n", m, n);
  const tcor::DataMatrix a = tcor::synthetic_factor_matrix(spec);
  const tcor::ColumnStats stats = tcor::column_stats(a);
  const auto op = tcor::CenteredScaledOperator::standardized(a, stats);
  const tcor::TruncatedSVD svd =
      tcor::truncated_svd(op, std::min<tcor::Index>(p, op.max_rank()));
  const double dist2 = 2.0 * (1.0 - t);
  const double slack = 1e-8;
  const tcor::PruningState state = tcor::make_pruning_state(svd, dist2);
  std::printf("p=%lld  ell=%lld  radius=%.3g\n",
              static_cast<long long>(svd.p),
              static_cast<long long>(state.ell), state.radius);

  tcor::CandidatePairs serial_cand;
  const double scan_serial = time_seconds([&] {
    serial_cand = tcor::generate_candidates_serial(state, dist2, slack);
  });
  tcor::ThresholdedResult serial_res;
  const double filter_serial = time_seconds([&] {
    serial_res = tcor::filter_candidates_serial(a, stats, serial_cand, t);
  });
  std::printf("candidates=%zu  results=%zu\n", serial_cand.pairs.size(),
              serial_res.entries.size());
  std::printf("\n%-22s %10.4fs (reference)\n", "scan, serial", scan_serial);
  std::printf("%-22s %10.4fs (reference)\n\n", "filter, serial",
              filter_serial);

  bool all_match = true;
  std::printf("%8s %14s %10s %14s %10s\n", "threads", "scan [s]", "speedup",
              "filter [s]", "speedup");
  for (const int threads : thread_counts) {
    tcor::CandidatePairs cand;
    const double scan_t = time_seconds(
        [&] { cand = tcor::generate_candidates(state, dist2, slack, threads); });
    tcor::ThresholdedResult res;
    const double filter_t = time_seconds(
        [&] { res = tcor::filter_candidates(a, stats, cand, t, threads); });
    const bool match =
        cand.pairs == serial_cand.pairs && same_entries(res.entries, serial_res.entries);
    all_match = all_match && match;
    std::printf("%8d %14.4f %9.2fx %14.4f %9.2fx%s\n", threads, scan_t,
                scan_serial / scan_t, filter_t, filter_serial / filter_t,
                match ? "" : "   MISMATCH");
  }
  if (!all_match) {
    std::printf("\nFAILURE: parallel output diverged from the serial "
                "reference\n");
    return 1;
  }
  std::printf("\nall parallel outputs identical to the serial reference\n");
  return 0;
}
