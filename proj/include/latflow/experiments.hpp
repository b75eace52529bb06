#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "latflow/flow.hpp"
#include "latflow/lattice.hpp"

namespace latflow {

constexpr std::uint64_t kWindowBudget = 100'000'000;

struct SegmentMinimum {
  IntegerVec3 vector;
  /// Equals segment_sup(line, t, vector).
  Scalar value;
  std::uint64_t candidates = 0;
};

/// ||M^{-1}||_inf for M = (1 s1; 1 s2): the factor turning a bound R on the
/// expanding coordinate at both endpoints into a bound on (bq + p1, aq + p2).
Scalar endpoint_inverse_norm(const LineSegmentSpec& line);

/// Minimizes sup_{s in I} |g_t phi(s) v|_inf over v != 0 with value <= R_cap.
/// Exhaustive over the window |q| <= R e^t, |bq + p1|, |aq + p2| <= R1 e^{-2t}
/// (one of each pair +-v). Throws BudgetError when the window is too large.
std::optional<SegmentMinimum> segment_minimum(const LineSegmentSpec& line, const FlowTime& t, const Scalar& R_cap,
                                              std::uint64_t budget = kWindowBudget);

/// True iff some v != 0 has sup over the segment strictly below R.
bool segment_below(const LineSegmentSpec& line, const FlowTime& t, const Scalar& R,
                   std::uint64_t budget = kWindowBudget);

struct TranslateSample {
  Scalar s;
  double t = 0.0;
  Scalar lambda1;
  IntegerVec3 vector;
  /// Counts aligned with the requested radii.
  std::vector<std::uint64_t> counts;
  bool certified = false;
  bool escalated = false;
  /// Set when even the escalated computation failed; lambda1 is then NaN.
  bool precision_failure = false;
  std::string note;
};

struct SampleOptions {
  bool certify = true;
  std::uint32_t stream = 0;
};

/// s_i uniform on I from Philox(seed) at counter (i, stream); per sample the
/// lattice g_t phi(s_i) Z^3 gets lambda1 and point counts.
std::vector<TranslateSample> sample_translate(const LineSegmentSpec& line, const FlowTime& t, std::size_t N,
                                              std::uint64_t seed, const std::vector<double>& radii = {},
                                              const SampleOptions& options = {});

/// Sample points s_i on I for counter (i, stream).
Scalar sample_point(const LineSegmentSpec& line, std::uint64_t seed, std::uint64_t index, std::uint32_t stream);

/// Fraction of samples with lambda1 < delta.
double escape_mass_fraction(const LineSegmentSpec& line, const FlowTime& t, double delta, std::size_t N,
                            std::uint64_t seed, std::uint32_t stream = 0);
double escape_fraction_of(const std::vector<TranslateSample>& samples, double delta);

struct EscapeObservable {
  double delta;
};
struct MeanCountObservable {
  double radius;
};
struct MeanOfObservable {
  std::function<double(double)> f;
  std::string name = "f(lambda1)";
};
using Observable = std::variant<EscapeObservable, MeanCountObservable, MeanOfObservable>;

struct TimeAverage {
  double value = 0.0;
  std::vector<double> grid;
  std::vector<double> estimates;
};

constexpr std::uint64_t kSampleBudget = 10'000'000;

/// Trapezoidal average over t in [0, T] (step <= dt, ending at T) of the
/// Monte-Carlo estimate at each t. All grid points reuse the same s_i.
TimeAverage time_average_observable(const LineSegmentSpec& line, double T, double dt, const Observable& observable,
                                    std::size_t N, std::uint64_t seed, std::uint64_t budget = kSampleBudget);
/// Same on an explicit grid; a single point returns the estimate there.
TimeAverage time_average_on_grid(const LineSegmentSpec& line, const std::vector<double>& grid,
                                 const Observable& observable, std::size_t N, std::uint64_t seed,
                                 std::uint64_t budget = kSampleBudget);

struct TrajectoryProbe {
  /// Smallest grid t with lambda1 >= delta^{1/3}.
  std::optional<double> first_entry;
  /// Start of the final run of grid points outside K, if it follows an
  /// inside point.
  std::optional<double> last_exit;
  /// The trajectory ends outside K: a candidate for delta-improvability at
  /// this horizon.
  bool tail_outside = false;
  std::vector<double> times;
  std::vector<double> lambda1;
};

TrajectoryProbe trajectory_probe(const LineSegmentSpec& line, const Scalar& s, double delta, double t_max,
                                 double dt = 0.05);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace latflow
