#include "erw/moment_engine.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "erw/errors.hpp"
#include "erw/gamma_toolkit.hpp"
#include "erw/summation.hpp"

namespace erw {
namespace {

using Acc = CompensatedSum<long double>;

void require_regular(double denominator, const char* name, double alpha) {
  if (std::abs(denominator) < kAlphaSingularRadius) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "closed form singular at alpha=" << alpha << ": denominator " << name
        << " vanishes";
    throw SingularityError(name, msg.str());
  }
}

// Gamma(n + shift)/Gamma(n)
double growth(std::int64_t n, double shift) {
  return std::exp(log_gamma_ratio(static_cast<double>(n), shift));
}

}  // namespace

MemoryParameter::MemoryParameter(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("memory parameter alpha must lie in [0, 1]");
  }
}

MomentRecursion::MomentRecursion(const MomentSet& ms, MemoryParameter mp)
    : ms_(ms),
      alpha_(mp.alpha()),
      s2_(ms.M2),
      st_(ms.M12),
      s3_(ms.M3),
      su_(ms.M13),
      t2_(ms.M22),
      s2t_(ms.M112),
      s4_(ms.M4),
      d_(ms.M3),
      e_(3.0L * ms.M112) {}

ExactMomentRow MomentRecursion::row() const {
  return {n_,
          static_cast<double>(s2_),
          static_cast<double>(st_),
          static_cast<double>(s3_),
          static_cast<double>(su_),
          static_cast<double>(t2_),
          static_cast<double>(s2t_),
          static_cast<double>(s4_)};
}

void MomentRecursion::advance() {
  const long double g = static_cast<long double>(alpha_) / n_;
  const long double m1 = ms_.m1;
  const long double grow2 = 1.0L + 2.0L * g;
  const long double grow3 = 1.0L + 3.0L * g;
  const long double grow4 = 1.0L + 4.0L * g;

  auto linear = [](long double grow, long double x, long double c) {
    Acc acc(grow * x);
    acc += c;
    return acc.value();
  };

  const long double s2 = linear(grow2, s2_, ms_.M2);
  const long double st = linear(grow2, st_, ms_.M12);
  const long double su = linear(grow2, su_, ms_.M13);
  const long double t2 = linear(grow2, t2_, ms_.M22);
  const long double d = linear(grow2, d_, ms_.M3);
  const long double e = linear(grow2, e_, 3.0L * ms_.M112);

  Acc s3(grow3 * s3_);
  s3 += 3.0L * g * d_;
  s3 += ms_.M3;

  Acc s2t(grow3 * s2t_);
  s2t += g * e_;
  s2t += ms_.M112;

  Acc s4(grow4 * s4_);
  s4 += 6.0L * g * s2t_;
  s4 += 4.0L * g * su_;
  s4 += -12.0L * g * m1 * (s3_ + st_);
  s4 += (12.0L * g * m1 * m1 + 6.0L * ms_.M2) * s2_;
  s4 += ms_.M4;

  s2_ = s2;
  st_ = st;
  s3_ = s3.value();
  su_ = su;
  t2_ = t2;
  s2t_ = s2t.value();
  s4_ = s4.value();
  d_ = d;
  e_ = e;
  ++n_;
}

ExactMomentTable exact_moments_upto(const MomentSet& ms, MemoryParameter mp,
                                    std::int64_t n_max) {
  if (n_max < 1) throw DomainError("exact_moments_upto: n_max must be >= 1");
  ExactMomentTable table;
  table.reserve(static_cast<std::size_t>(n_max));
  MomentRecursion rec(ms, mp);
  table.push_back(rec.row());
  while (rec.n() < n_max) {
    rec.advance();
    table.push_back(rec.row());
  }
  return table;
}

ExactMomentRow exact_moments_at(const MomentSet& ms, MemoryParameter mp,
                                std::int64_t n) {
  if (n < 1) throw DomainError("exact_moments_at: n must be >= 1");
  MomentRecursion rec(ms, mp);
  while (rec.n() < n) rec.advance();
  return rec.row();
}

double closed_form_quadratic(double coef, MemoryParameter mp, std::int64_t n) {
  const double a = mp.alpha();
  require_regular(2.0 * a - 1.0, "2*alpha-1", a);
  const double nn = static_cast<double>(n);
  return coef / (2.0 * a - 1.0) * (growth(n, 2.0 * a) / std::tgamma(2.0 * a) - nn);
}

double closed_form_cubic(double coef, MemoryParameter mp, std::int64_t n) {
  const double a = mp.alpha();
  require_regular(2.0 * a - 1.0, "2*alpha-1", a);
  require_regular(3.0 * a - 1.0, "3*alpha-1", a);
  const double nn = static_cast<double>(n);
  const double lead = 4.0 / ((3.0 * a - 1.0) * std::tgamma(3.0 * a)) * growth(n, 3.0 * a);
  const double mid = 3.0 / ((2.0 * a - 1.0) * std::tgamma(2.0 * a)) * growth(n, 2.0 * a);
  const double lin = (a + 1.0) / ((2.0 * a - 1.0) * (3.0 * a - 1.0)) * nn;
  CompensatedSum<double> acc(lead);
  acc += -mid;
  acc += lin;
  return coef * acc.value();
}

double fourth_moment_coefficient(const MomentSet& ms, MemoryParameter mp) {
  const double a = mp.alpha();
  require_regular(2.0 * a - 1.0, "2*alpha-1", a);
  require_regular(4.0 * a - 1.0, "4*alpha-1", a);
  const double u = 2.0 * a - 1.0;
  const double denom = u * u * (4.0 * a - 1.0) * std::tgamma(4.0 * a);
  // Split so that alpha = 1 reduces to exactly 1 * M4 + 0 * M2^2.
  const double c4 = 18.0 * u * u / denom;
  const double c22 = 12.0 * (1.0 - a) * (5.0 * a - 2.0) / denom;
  return c4 * ms.M4 + c22 * (ms.M2 * ms.M2);
}

ClosedFormMoments closed_form_moments(const MomentSet& ms, MemoryParameter mp,
                                      std::int64_t n) {
  if (n < 1) throw DomainError("closed_form_moments: n must be >= 1");
  ClosedFormMoments out;
  out.n = n;
  out.s2 = closed_form_quadratic(ms.M2, mp, n);
  out.st = closed_form_quadratic(ms.M12, mp, n);
  out.su = closed_form_quadratic(ms.M13, mp, n);
  out.t2 = closed_form_quadratic(ms.M22, mp, n);
  out.s3 = closed_form_cubic(ms.M3, mp, n);
  out.s2t = closed_form_cubic(ms.M112, mp, n);
  out.k4 = fourth_moment_coefficient(ms, mp);
  out.growth4 = growth(n, 4.0 * mp.alpha());
  return out;
}

LimitMoments limit_q_moments(const MomentSet& ms, MemoryParameter mp) {
  const double a = mp.alpha();
  if (!mp.superdiffusive()) {
    std::ostringstream msg;
    msg << "limit moments of Q require the superdiffusive regime alpha > 1/2"
        << " (got alpha=" << a << ")";
    throw RegimeError(msg.str());
  }
  require_regular(2.0 * a - 1.0, "2*alpha-1", a);
  LimitMoments q;
  q.q1 = 0.0;
  q.q2 = ms.M2 * (1.0 / ((2.0 * a - 1.0) * std::tgamma(2.0 * a)));
  q.q3 = ms.M3 * (4.0 / ((3.0 * a - 1.0) * std::tgamma(3.0 * a)));
  q.q4 = fourth_moment_coefficient(ms, mp);
  return q;
}

ConditionalStepMoments conditional_step_moments(const CenteredSums& sums,
                                                std::int64_t n,
                                                const MomentSet& ms,
                                                MemoryParameter mp) {
  if (n < 1) throw DomainError("conditional_step_moments: n must be >= 1");
  const double g = mp.alpha() / static_cast<double>(n);
  const double s = sums.s_tilde, t = sums.t_tilde, u = sums.u_tilde;
  const double m1 = ms.m1, m2 = ms.m2;
  ConditionalStepMoments c;
  c.centered1 = g * s;
  c.centered2 = g * t - 2.0 * g * m1 * s + ms.M2;
  c.centered3 = g * u - 3.0 * g * m1 * t + 3.0 * g * m1 * m1 * s + ms.M3;
  c.square = g * t;
  c.square_centered = g * u - g * m1 * t - g * m2 * s + ms.M12;
  c.cube = g * u;
  return c;
}

}  // namespace erw
