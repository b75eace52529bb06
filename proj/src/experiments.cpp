#include "latflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "latflow/error.hpp"
#include "latflow/parallel.hpp"
#include "latflow/rng.hpp"
#include "residual.hpp"

namespace latflow {

namespace {

using detail::DoubleDouble;

struct Candidate {
  double value;
  double err;
  std::int64_t p1, p2, q;
};

// Enumerates the window for the current bound; `visit` returns the bound to
// use from then on, or a negative number to stop.
class Window {
 public:
  Window(const LineSegmentSpec& line, double t, std::uint64_t budget)
      : a_(DoubleDouble::of(line.a_exact())),
        b_(DoubleDouble::of(line.b_exact())),
        s1_(BigFloat(line.s1_exact(), 53).to_double()),
        s2_(BigFloat(line.s2_exact(), 53).to_double()),
        smax_(std::max(std::abs(s1_), std::abs(s2_))),
        minv_(endpoint_inverse_norm(line).to_double() * (1 + 1e-12)),
        up_(std::exp(t)),
        up2_(std::exp(2 * t)),
        down_(std::exp(-t)),
        budget_(budget) {}

  /// With `precheck` the estimated window size is compared with the budget
  /// before scanning; otherwise only the candidates actually visited count.
  template <class Visit>
  std::uint64_t scan(double bound, bool precheck, Visit&& visit) const {
    check_size(bound, precheck);
    std::uint64_t count = 0;
    for (std::int64_t q = 0; static_cast<double>(q) <= bound * up_ * (1 + 1e-12); ++q) {
      const double rho = minv_ * bound / up2_;
      const double p2_cap = bound * up_ * (1 + 1e-12);
      const detail::SplitProduct sb = q == 0 ? detail::SplitProduct{} : detail::split(b_, static_cast<double>(q));
      const detail::SplitProduct sa = q == 0 ? detail::SplitProduct{} : detail::split(a_, static_cast<double>(q));
      const double k1_lo = std::ceil(-rho - sb.r - sb.err);
      const double k1_hi = std::floor(rho - sb.r + sb.err);
      double k2_lo = std::ceil(std::max(-rho - sa.r - sa.err, -p2_cap + sa.n));
      const double k2_hi = std::floor(std::min(rho - sa.r + sa.err, p2_cap + sa.n));
      if (q == 0) k2_lo = std::max(k2_lo, 0.0);
      for (double k2 = k2_lo; k2 <= k2_hi; ++k2) {
        const double p2 = k2 - sa.n;
        double lo1 = k1_lo;
        if (q == 0 && p2 == 0.0) lo1 = std::max(lo1, 1.0);
        for (double k1 = lo1; k1 <= k1_hi; ++k1) {
          if (++count > budget_) throw BudgetError("segment window exceeded its candidate budget; lower R_cap");
          const Candidate c = evaluate(q, k1 - sb.n, p2, sb.r + k1, sa.r + k2, sb.err + sa.err * smax_);
          bound = visit(c);
          if (bound < 0) return count;
        }
      }
    }
    return count;
  }

 private:
  void check_size(double bound, bool precheck) const {
    const double rho = minv_ * bound / up2_;
    const double per_q = (2 * rho + 2) * (2 * rho + 2);
    const double size = (std::floor(bound * up_) + 1) * per_q;
    if ((precheck && !(size <= static_cast<double>(budget_))) || bound * up_ > 0x1p50) {
      throw BudgetError("segment window of about " + std::to_string(size) + " candidates exceeds the budget of " +
                        std::to_string(budget_) + "; lower R_cap");
    }
  }

  Candidate evaluate(std::int64_t q, double p1, double p2, double c0, double c1, double cerr) const {
    const double at1 = std::abs(c0 + c1 * s1_);
    const double at2 = std::abs(c0 + c1 * s2_);
    const double affine = std::max(at1, at2);
    const double first = up2_ * affine;
    const double first_err = up2_ * (cerr + std::abs(c1) * smax_ * 0x1p-52 + affine * 0x1p-51);
    const double tail = down_ * std::max(std::abs(p2), static_cast<double>(q));
    const double value = std::max(first, tail);
    const double err = std::max(first_err, tail * 0x1p-51) + value * 0x1p-50;
    return {value, err, static_cast<std::int64_t>(p1), static_cast<std::int64_t>(p2), q};
  }

  DoubleDouble a_, b_;
  double s1_, s2_, smax_, minv_;
  double up_, up2_, down_;
  std::uint64_t budget_;
};

IntegerVec3 to_vec(const Candidate& c) { return make_ivec(c.p1, c.p2, c.q); }

void require_cap(const Scalar& R) {
  if (!(R > Scalar(0))) throw InvalidInput("radius must be positive");
}

}  // namespace

Scalar endpoint_inverse_norm(const LineSegmentSpec& line) {
  // (1 s1; 1 s2)^{-1} = (s2 -s1; -1 1) / (s2 - s1)
  const mpq_class& s1 = line.s1_exact();
  const mpq_class& s2 = line.s2_exact();
  const mpq_class w = s2 - s1;
  const mpq_class row1 = (abs(s1) + abs(s2)) / w;
  const mpq_class row2 = mpq_class(2) / w;
  return Scalar(std::max(row1, row2));
}

std::optional<SegmentMinimum> segment_minimum(const LineSegmentSpec& line, const FlowTime& t, const Scalar& R_cap,
                                              std::uint64_t budget) {
  require_cap(R_cap);
  const Window window(line, t.t, budget);
  const double cap = R_cap.to_double() * (1 + 1e-12);
  double best = std::numeric_limits<double>::infinity();
  std::vector<Candidate> near;
  constexpr double kTie = 1e-9;
  const std::uint64_t count = window.scan(cap, true, [&](const Candidate& c) {
    if (c.value - c.err > std::min(best, cap) * (1 + kTie)) return std::min(best * (1 + kTie), cap);
    if (c.value < best) {
      best = c.value;
      std::erase_if(near, [&](const Candidate& x) { return x.value - x.err > best * (1 + kTie); });
    }
    near.push_back(c);
    return std::min(best * (1 + kTie), cap);
  });
  std::optional<SegmentMinimum> out;
  for (const Candidate& c : near) {
    const IntegerVec3 v = to_vec(c);
    Scalar value = segment_sup(line, t, v);
    if (value > R_cap) continue;
    if (!out || value < out->value) out = SegmentMinimum{v, std::move(value), count};
  }
  if (out) out->candidates = count;
  return out;
}

bool segment_below(const LineSegmentSpec& line, const FlowTime& t, const Scalar& R, std::uint64_t budget) {
  require_cap(R);
  const Window window(line, t.t, budget);
  const double r = R.to_double();
  bool found = false;
  window.scan(r * (1 + 1e-12), false, [&](const Candidate& c) {
    if (c.value + c.err < r * (1 - 1e-15)) {
      found = true;
      return -1.0;
    }
    if (c.value - c.err >= r * (1 + 1e-15)) return r * (1 + 1e-12);
    if (segment_sup(line, t, to_vec(c)) < R) {
      found = true;
      return -1.0;
    }
    return r * (1 + 1e-12);
  });
  return found;
}

Scalar sample_point(const LineSegmentSpec& line, std::uint64_t seed, std::uint64_t index, std::uint32_t stream) {
  const double u = Philox4x32(seed).uniform(index, stream);
  const Scalar fraction = Scalar(u).convert(line.mode());
  return line.s1() + fraction * (line.s2() - line.s1());
}

std::vector<TranslateSample> sample_translate(const LineSegmentSpec& line, const FlowTime& t, std::size_t N,
                                              std::uint64_t seed, const std::vector<double>& radii,
                                              const SampleOptions& options) {
  if (N < 1) throw InvalidInput("sample_translate needs N >= 1");
  for (double r : radii) {
    if (!(r > 0.0)) throw InvalidInput("count radii must be positive");
  }
  std::vector<TranslateSample> out(N);
  parallel_for(N, [&](std::size_t i) {
    TranslateSample& sample = out[i];
    sample.s = sample_point(line, seed, i, options.stream);
    sample.t = t.t;
    const LatticeBasis3 lattice = LatticeBasis3::orbit(line, sample.s, t);
    try {
      const ShortVectorResult r = shortest_vector(lattice, options.certify);
      sample.lambda1 = r.lambda1;
      sample.vector = r.vector;
      sample.certified = r.certified;
      sample.escalated = r.escalated;
      for (double radius : radii) sample.counts.push_back(count_points(lattice, radius));
    } catch (const PrecisionError& e) {
      sample.precision_failure = true;
      sample.lambda1 = Scalar(std::numeric_limits<double>::quiet_NaN());
      sample.note = e.what();
    }
  });
  return out;
}

double escape_fraction_of(const std::vector<TranslateSample>& samples, double delta) {
  if (samples.empty()) throw InvalidInput("no samples");
  std::size_t below = 0;
  for (const auto& s : samples) {
    if (!s.precision_failure && s.lambda1.to_double() < delta) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(samples.size());
}

double escape_mass_fraction(const LineSegmentSpec& line, const FlowTime& t, double delta, std::size_t N,
                            std::uint64_t seed, std::uint32_t stream) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  SampleOptions options;
  options.stream = stream;
  return escape_fraction_of(sample_translate(line, t, N, seed, {}, options), delta);
}

TimeAverage time_average_observable(const LineSegmentSpec& line, double T, double dt, const Observable& observable,
                                    std::size_t N, std::uint64_t seed, std::uint64_t budget) {
  if (!(dt > 0.0 && dt <= T)) throw InvalidInput("time average needs 0 < dt <= T");
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-12));
  std::vector<double> grid(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) grid[k] = T * static_cast<double>(k) / static_cast<double>(steps);
  return time_average_on_grid(line, grid, observable, N, seed, budget);
}

TimeAverage time_average_on_grid(const LineSegmentSpec& line, const std::vector<double>& grid,
                                 const Observable& observable, std::size_t N, std::uint64_t seed,
                                 std::uint64_t budget) {
  if (grid.empty()) throw InvalidInput("empty time grid");
  if (N < 1) throw InvalidInput("time average needs N >= 1");
  if (static_cast<double>(grid.size()) * static_cast<double>(N) > static_cast<double>(budget)) {
    throw BudgetError("time grid x samples exceeds the budget");
  }
  std::vector<double> radii;
  if (const auto* mc = std::get_if<MeanCountObservable>(&observable)) radii.push_back(mc->radius);
  TimeAverage out;
  out.grid = grid;
  for (double t : grid) {
    const auto samples = sample_translate(line, FlowTime(t), N, seed, radii);
    double estimate = 0.0;
    if (const auto* esc = std::get_if<EscapeObservable>(&observable)) {
      estimate = escape_fraction_of(samples, esc->delta);
    } else {
      double sum = 0.0;
      for (const auto& s : samples) {
        if (std::holds_alternative<MeanCountObservable>(observable)) {
          sum += static_cast<double>(s.counts.empty() ? 0 : s.counts[0]);
        } else {
          sum += std::get<MeanOfObservable>(observable).f(s.lambda1.to_double());
        }
      }
      estimate = sum / static_cast<double>(samples.size());
    }
    out.estimates.push_back(estimate);
  }
  if (grid.size() == 1) {
    out.value = out.estimates[0];
    return out;
  }
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    integral += 0.5 * (grid[k + 1] - grid[k]) * (out.estimates[k] + out.estimates[k + 1]);
  }
  out.value = integral / (grid.back() - grid.front());
  return out;
}

TrajectoryProbe trajectory_probe(const LineSegmentSpec& line, const Scalar& s, double delta, double t_max, double dt) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  if (!(dt > 0.0 && dt <= 0.05)) throw InvalidInput("trajectory probe needs 0 < dt <= 0.05");
  if (!(t_max >= 0.0)) throw InvalidInput("t_max must be non-negative");
  const Scalar threshold(std::cbrt(delta));
  TrajectoryProbe out;
  const auto steps = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
  out.times.resize(steps + 1);
  out.lambda1.resize(steps + 1);
  std::vector<char> inside(steps + 1);
  parallel_for(steps + 1, [&](std::size_t k) {
    const double t = dt * static_cast<double>(k);
    const ShortVectorResult r = shortest_vector(LatticeBasis3::orbit(line, s, FlowTime(t)));
    out.times[k] = t;
    out.lambda1[k] = r.lambda1.to_double();
    inside[k] = r.lambda1 >= threshold ? 1 : 0;
  });
  for (std::size_t k = 0; k <= steps; ++k) {
    if (inside[k]) {
      out.first_entry = out.times[k];
      break;
    }
  }
  out.tail_outside = !inside.back();
  if (out.tail_outside) {
    std::size_t k = steps;
    while (k > 0 && !inside[k - 1]) --k;
    if (k > 0) out.last_exit = out.times[k];
  }
  return out;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("KS distance needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace latflow
