#include "curvemix/mixing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace curvemix {

namespace {

template <class F>
void parallel_rows(int n, F&& body) {
  unsigned hw = std::thread::hardware_concurrency();
  int workers = std::min<int>(n, hw == 0 ? 1 : static_cast<int>(hw));
  if (workers <= 1 || n < 64) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (std::thread& t : pool) t.join();
}

void renormalize(std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (std::fabs(sum - 1.0) > 1e-9)
    fail(ErrorCode::NoConvergence, "probability mass drifted to " +
                                       std::to_string(sum));
  for (double& x : v) x /= sum;
}

std::vector<double> row_times(const std::vector<double>& v,
                              const std::vector<std::vector<double>>& P) {
  const int N = static_cast<int>(v.size());
  std::vector<double> out(static_cast<std::size_t>(N), 0.0);
  for (int k = 0; k < N; ++k) {
    const double vk = v[k];
    if (vk == 0.0) continue;
    const std::vector<double>& row = P[k];
    for (int y = 0; y < N; ++y) out[y] += vk * row[y];
  }
  return out;
}

double tv_to_uniform(const std::vector<double>& v) {
  const double u = 1.0 / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += std::fabs(x - u);
  return 0.5 * s;
}

double chi_square_quantile_999(long long dof) {
  if (dof < 1) return 0.0;
  const double z = 3.0902323061678132;  // 99.9% standard normal quantile
  const double d = static_cast<double>(dof);
  const double a = 2.0 / (9.0 * d);
  const double w = 1.0 - a + z * std::sqrt(a);
  return d * w * w * w;
}

}  // namespace

std::vector<double> distribution_at(const RationalMatrix& P, int x,
                                    long long t) {
  const int N = P.rows();
  if (N < 1 || P.cols() != N)
    fail(ErrorCode::LengthMismatch, "square matrix expected");
  if (x < 0 || x >= N) fail(ErrorCode::IndexOutOfRange, "start state");
  if (t < 0) fail(ErrorCode::Usage, "need t >= 0");
  std::vector<double> v(static_cast<std::size_t>(N), 0.0);
  v[static_cast<std::size_t>(x)] = 1.0;
  if (t == 0) return v;
  const std::vector<std::vector<double>> Pd = P.to_double();
  for (long long s = 0; s < t; ++s) {
    v = row_times(v, Pd);
    renormalize(v);
  }
  return v;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size())
    fail(ErrorCode::LengthMismatch, "vectors of different length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return 0.5 * s;
}

MixingReport mixing_time(const RationalMatrix& P, double epsilon,
                         long long horizon) {
  if (epsilon <= 0.0) fail(ErrorCode::Usage, "need epsilon > 0");
  Spectrum spec = spectral_report(P);
  const int N = P.rows();

  MixingReport report;
  report.N = N;
  report.epsilon = epsilon;
  report.lambda_star = spec.lambda_star;
  if (N == 1) {
    report.tau = 0;
    report.tv_curve = {0.0};
    report.upper_bound = std::log(1.0 / epsilon);
    return report;
  }
  if (spec.gap_second <= kComparisonTol)
    fail(ErrorCode::Reducible, "second eigenvalue is 1");
  if (spec.periodic) fail(ErrorCode::Periodic, "smallest eigenvalue is -1");

  const double relax = 1.0 / (1.0 - spec.lambda_star);
  if (horizon <= 0)
    horizon = 10 * static_cast<long long>(
                       std::ceil(relax * std::log(4.0 * N)));
  report.horizon = horizon;
  report.lower_bound = 0.5 * spec.lambda_star * relax *
                       std::log(1.0 / (2.0 * epsilon));
  report.upper_bound =
      relax * (std::log(static_cast<double>(N)) + std::log(1.0 / epsilon));

  const std::vector<std::vector<double>> Pd = P.to_double();
  std::vector<std::vector<double>> M(static_cast<std::size_t>(N),
                                     std::vector<double>(N, 0.0));
  for (int i = 0; i < N; ++i) M[i][i] = 1.0;

  double previous = 1.0;
  for (long long t = 0; t <= horizon; ++t) {
    if (t > 0) {
      std::vector<std::vector<double>> next(static_cast<std::size_t>(N));
      parallel_rows(N, [&](int i) {
        next[i] = row_times(M[i], Pd);
        renormalize(next[i]);
      });
      M = std::move(next);
    }
    double worst = 0.0;
    for (int i = 0; i < N; ++i) worst = std::max(worst, tv_to_uniform(M[i]));
    if (t > 0 && worst > previous + 1e-12)
      fail(ErrorCode::BoundViolated,
           "worst-case distance increased at step " + std::to_string(t));
    previous = worst;
    report.tv_curve.push_back(worst);
    if (worst <= epsilon) {
      report.tau = t;
      return report;
    }
  }
  fail(ErrorCode::HorizonExceeded,
       "still above epsilon after " + std::to_string(horizon) + " steps");
}

BoundsVerdict check_mixing_bounds(const RationalMatrix& P, double epsilon,
                                  double tol, bool raise) {
  BoundsVerdict verdict;
  verdict.report = mixing_time(P, epsilon);
  const MixingReport& r = verdict.report;
  verdict.lower_ok =
      static_cast<double>(r.tau) >= std::ceil(r.lower_bound) - 1.0 - 1e-12;
  verdict.upper_ok = static_cast<double>(r.tau) <=
                     r.upper_bound + tol * std::max(1.0, r.upper_bound);
  verdict.pass = verdict.lower_ok && verdict.upper_ok;
  if (raise && !verdict.pass)
    fail(ErrorCode::BoundViolated,
         "tau=" + std::to_string(r.tau) + " outside [" +
             std::to_string(r.lower_bound) + ", " +
             std::to_string(r.upper_bound) + "] at epsilon " +
             std::to_string(epsilon));
  return verdict;
}

EmpiricalReport empirical_distribution(const StateSpace& space,
                                       const ChainSpec& chain,
                                       const BinaryMatrix& A0, long long T,
                                       int runs, std::uint64_t seed) {
  if (T < 0) fail(ErrorCode::Usage, "need T >= 0");
  if (runs < 1) fail(ErrorCode::Usage, "need runs >= 1");
  const int N = static_cast<int>(space.N);
  const int start = space.index_of(A0);

  EmpiricalReport report;
  report.T = T;
  report.runs = runs;
  report.counts.assign(static_cast<std::size_t>(N), 0);

  std::vector<int> endpoints(static_cast<std::size_t>(runs), 0);
  RngStream base(seed);
  parallel_rows(runs, [&](int run) {
    const std::uint64_t run_seed =
        base.split(static_cast<std::uint64_t>(run)).seed();
    BinaryMatrix end = run_chain(A0, chain, T, run_seed);
    endpoints[static_cast<std::size_t>(run)] = space.index_of(end);
  });
  for (int e : endpoints) ++report.counts[static_cast<std::size_t>(e)];

  std::vector<double> hist(static_cast<std::size_t>(N), 0.0);
  for (int s = 0; s < N; ++s)
    hist[s] = static_cast<double>(report.counts[s]) / runs;

  std::vector<double> uniform(static_cast<std::size_t>(N),
                              1.0 / static_cast<double>(N));
  report.tv_to_uniform = tv_distance(hist, uniform);
  report.tv_to_exact =
      tv_distance(hist, distribution_at(build_transition(space, chain).P,
                                        start, T));

  const double expected = static_cast<double>(runs) / N;
  double chi = 0.0;
  for (int s = 0; s < N; ++s) {
    const double d = static_cast<double>(report.counts[s]) - expected;
    chi += d * d / expected;
  }
  report.chi_square = N > 1 ? chi : 0.0;
  report.chi_square_critical = chi_square_quantile_999(N - 1);
  report.within_critical = report.chi_square <= report.chi_square_critical ||
                           N == 1;
  return report;
}

}  // namespace curvemix
