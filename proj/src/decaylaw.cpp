#include "bergerdeck/decaylaw.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bergerdeck/errors.hpp"

namespace bergerdeck {

namespace {

constexpr int kHullSamples = 20000;

// Upper concave hull (monotone chain) of points sorted by z.
void upper_hull(const std::vector<std::pair<double, double>>& pts, std::vector<double>& hz, std::vector<double>& hh) {
  std::vector<std::pair<double, double>> h;
  for (const auto& p : pts) {
    while (h.size() >= 2) {
      const auto& a = h[h.size() - 2];
      const auto& b = h[h.size() - 1];
      // Extended precision keeps the orientation test meaningful for the
      // subnormal abscissae produced by s^4 exp(-1/s^2).
      const long double cross =
          static_cast<long double>(b.first - a.first) * static_cast<long double>(p.second - a.second) -
          static_cast<long double>(b.second - a.second) * static_cast<long double>(p.first - a.first);
      if (cross >= 0.0L)
        h.pop_back();
      else
        break;
    }
    h.push_back(p);
  }
  for (const auto& p : h) {
    hz.push_back(p.first);
    hh.push_back(p.second);
  }
}

}  // namespace

HMap HMap::construct(const FeedbackKind& kind) {
  HMap m;
  switch (kind.type) {
    case FeedbackKind::Type::Linear: m.exponent_ = 1.0; return m;
    case FeedbackKind::Type::SqrtOdd:
    case FeedbackKind::Type::Power: {
      const double e = kind.exponent;
      m.exponent_ = e < 1.0 ? 2.0 * e / (e + 1.0) : (e > 1.0 ? 2.0 / (e + 1.0) : 1.0);
      return m;
    }
    case FeedbackKind::Type::Piecewise:
    case FeedbackKind::Type::ExpDegenerate: break;
  }

  std::vector<std::pair<double, double>> pts;
  pts.reserve(kHullSamples + 2);
  pts.emplace_back(0.0, 0.0);
  for (int i = 0; i <= kHullSamples; ++i) {
    const double s = -1.0 + 2.0 * i / kHullSamples;
    const double g = eval_feedback(kind, s);
    const double z = s * g;
    if (!(z > 0.0)) continue;
    pts.emplace_back(z, s * s + g * g);
  }
  std::sort(pts.begin(), pts.end());
  // Keep the largest value per abscissa.
  std::vector<std::pair<double, double>> uniq;
  for (const auto& p : pts) {
    if (!uniq.empty() && uniq.back().first == p.first)
      uniq.back().second = std::max(uniq.back().second, p.second);
    else
      uniq.push_back(p);
  }
  upper_hull(uniq, m.hull_z_, m.hull_h_);
  return m;
}

double HMap::operator()(double s) const {
  if (s <= 0.0) return 0.0;
  if (closed_form()) return 2.0 * std::pow(s, exponent_);
  // Relative inflation by 1e-12 absorbs rounding in the interpolation; the
  // scaled map is still concave, increasing and zero at the origin.
  constexpr double inflate = 1.0 + 1e-12;
  const auto& z = hull_z_;
  const auto& h = hull_h_;
  const std::size_t n = z.size();
  if (s >= z[n - 1]) {
    const double slope = std::max(0.0, (h[n - 1] - h[n - 2]) / (z[n - 1] - z[n - 2]));
    return inflate * (h[n - 1] + slope * (s - z[n - 1]));
  }
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(z.begin(), z.end(), s) - z.begin());
  const double w = (s - z[i - 1]) / (z[i] - z[i - 1]);
  return inflate * (h[i - 1] + w * (h[i] - h[i - 1]));
}

double HTilde::operator()(double s) const { return s <= 0.0 ? 0.0 : std::pow(s, exponent); }

HTilde h_tilde(double order, double p0) {
  if (!(order > 0.0) || !std::isfinite(order)) throw ParameterError("h_tilde: order must be positive and finite");
  const double bound = 2.0 * std::max(order, 1.0);
  if (!(p0 > bound)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "h_tilde: need p0 > 2 max(order, 1) = %.17g, got %.17g", bound, p0);
    throw ParameterError(buf);
  }
  return {(p0 - bound) / (p0 - 1.0 - order)};
}

DecaySeries ode_decay(double S0, const ScalarMap& hinv, double delta, double T, double dt) {
  if (!(S0 > 0.0) || !std::isfinite(S0)) throw ParameterError("ode_decay: S0 must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("ode_decay: delta must lie in (0, 1)");
  if (!(T >= 0.0) || !(dt > 0.0)) throw ParameterError("ode_decay: need T >= 0 and dt > 0");
  auto f = [&](double s) { return -hinv((1.0 - delta) * std::max(s, 0.0)); };

  DecaySeries out;
  out.t.push_back(0.0);
  out.S.push_back(S0);
  const long n = std::max(1L, static_cast<long>(std::ceil(T / dt - 1e-12)));
  double s = S0;
  for (long i = 0; i < n && T > 0.0; ++i) {
    const double t0 = i * dt;
    const double h = std::min(dt, T - t0);
    const double k1 = f(s);
    const double k2 = f(s + 0.5 * h * k1);
    const double k3 = f(s + 0.5 * h * k2);
    const double k4 = f(s + h * k3);
    s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.t.push_back(i + 1 == n ? T : t0 + h);
    if (!(s > 0.0)) {
      out.S.push_back(0.0);
      out.clamped = true;
      break;
    }
    out.S.push_back(s);
  }
  return out;
}

double evaluate(const DecayLaw& law, double t) {
  return std::visit(
      [t](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, Exponential>) {
          return l.s0 * std::exp(-l.c * t);
        } else if constexpr (std::is_same_v<L, AlgebraicOrigin>) {
          if (l.order < 1.0) {
            const double th = l.order;
            return std::pow(l.c * (1.0 - th) / (2.0 * th) * (t + l.c0), -2.0 * th / (1.0 - th));
          }
          const double r = l.order;
          return std::pow(l.c * (r - 1.0) / 2.0 * (t + l.c0), -2.0 / (r - 1.0));
        } else if constexpr (std::is_same_v<L, AlgebraicInfinity>) {
          if (l.order < 1.0) {
            const double th = l.order;
            return std::pow(l.c * (1.0 - th) / (l.q - 2.0) * (t + l.c0), -(l.q - 2.0) / (1.0 - th));
          }
          const double r = l.order;
          return std::pow(l.c * (r - 1.0) / (l.q - 2.0 * r) * (t + l.c0), -(l.q - 2.0 * r) / (r - 1.0));
        } else {
          return l.c2 / std::log(l.c1 * l.c2 * t + l.c0);
        }
      },
      law);
}

double composite_hinv(const DecayLaw& law, double s) {
  if (s <= 0.0) return 0.0;
  return std::visit(
      [s](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, Exponential>) {
          return l.c * s;
        } else if constexpr (std::is_same_v<L, AlgebraicOrigin>) {
          const double p = l.order < 1.0 ? (l.order + 1.0) / (2.0 * l.order) : (l.order + 1.0) / 2.0;
          return l.c * std::pow(s, p);
        } else if constexpr (std::is_same_v<L, AlgebraicInfinity>) {
          const double p = l.order < 1.0 ? (l.q - l.order - 1.0) / (l.q - 2.0)
                                         : (l.q - l.order - 1.0) / (l.q - 2.0 * l.order);
          return l.c * std::pow(s, p);
        } else {
          return l.c1 * s * s * std::exp(-l.c2 / s);
        }
      },
      law);
}

double algebraic_exponent(const DecayLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, Exponential>) {
          return 0.0;
        } else if constexpr (std::is_same_v<L, AlgebraicOrigin>) {
          return l.order < 1.0 ? 2.0 * l.order / (1.0 - l.order) : 2.0 / (l.order - 1.0);
        } else if constexpr (std::is_same_v<L, AlgebraicInfinity>) {
          return l.order < 1.0 ? (l.q - 2.0) / (1.0 - l.order) : (l.q - 2.0 * l.order) / (l.order - 1.0);
        } else {
          return std::numeric_limits<double>::quiet_NaN();
        }
      },
      law);
}

std::string describe(const DecayLaw& law) {
  char buf[160];
  std::visit(
      [&buf](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, Exponential>) {
          std::snprintf(buf, sizeof buf, "exponential S0 exp(-c t), c=%.6g", l.c);
        } else if constexpr (std::is_same_v<L, AlgebraicOrigin>) {
          std::snprintf(buf, sizeof buf, "algebraic (origin, %s=%.6g) ~ t^-%.6g", l.order < 1.0 ? "theta" : "r",
                        l.order, l.order < 1.0 ? 2.0 * l.order / (1.0 - l.order) : 2.0 / (l.order - 1.0));
        } else if constexpr (std::is_same_v<L, AlgebraicInfinity>) {
          std::snprintf(buf, sizeof buf, "algebraic (infinity, %s=%.6g, q=%.6g) ~ t^-%.6g",
                        l.order < 1.0 ? "theta" : "r", l.order, l.q,
                        l.order < 1.0 ? (l.q - 2.0) / (1.0 - l.order) : (l.q - 2.0 * l.order) / (l.order - 1.0));
        } else {
          std::snprintf(buf, sizeof buf, "logarithmic c2/ln(c1 c2 t + c0)");
        }
      },
      law);
  return buf;
}

void validate(const DecayLaw& law) {
  std::visit(
      [](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, Exponential>) {
          if (!(l.c > 0.0) || !(l.s0 > 0.0)) throw ParameterError("exponential law: need c > 0 and S0 > 0");
        } else if constexpr (std::is_same_v<L, AlgebraicOrigin>) {
          if (!(l.order > 0.0) || l.order == 1.0 || !(l.c > 0.0) || !(l.c0 > 0.0))
            throw ParameterError("algebraic law: need order > 0, order != 1, c > 0, c0 > 0");
        } else if constexpr (std::is_same_v<L, AlgebraicInfinity>) {
          if (!(l.order > 0.0) || l.order == 1.0 || !(l.c > 0.0) || !(l.c0 > 0.0))
            throw ParameterError("algebraic law: need order > 0, order != 1, c > 0, c0 > 0");
          if (!(l.q > 2.0 * std::max(l.order, 1.0))) throw ParameterError("algebraic law: need q > 2 max(order, 1)");
        } else {
          if (!(l.c1 > 0.0) || !(l.c2 > 0.0) || !(l.c0 > 1.0))
            throw ParameterError("logarithmic law: need c1, c2 > 0 and c0 > 1");
        }
      },
      law);
}

DecayLaw predicted_law(const FeedbackKind& kind, DecayRegime regime, std::optional<double> p0) {
  const OrderClass oc = classify_order(kind);
  if (regime == DecayRegime::Origin) {
    if (kind.type == FeedbackKind::Type::ExpDegenerate) return Logarithmic{};
    const double r = oc.origin;
    if (r == 1.0) return Exponential{};
    return AlgebraicOrigin{r, 1.0, 1.0};
  }
  const double r = oc.infinity;
  if (r == 1.0) return Exponential{};
  if (!p0) throw UnsupportedLawError("decay law at infinity needs the integrability index p0");
  if (!(*p0 > 2.0 * std::max(r, 1.0)))
    throw UnsupportedLawError("decay law at infinity needs p0 > 2 max(order, 1)");
  return AlgebraicInfinity{r, *p0, 1.0, 1.0};
}

std::vector<CandidateLaw> candidate_laws(const FeedbackKind& kind, std::optional<double> p0) {
  std::vector<CandidateLaw> out;
  out.push_back({"Id", Exponential{}});
  out.push_back({"h", predicted_law(kind, DecayRegime::Origin)});
  const OrderClass oc = classify_order(kind);
  if (p0 && oc.infinity != 1.0) {
    try {
      out.push_back({"h_tilde", predicted_law(kind, DecayRegime::Infinity, p0)});
    } catch (const UnsupportedLawError&) {
    }
  }
  return out;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ssr += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

}  // namespace

FitResult fit_decay(std::span<const double> t, std::span<const double> E, double tail_fraction) {
  if (t.size() != E.size()) throw ShapeError("fit: t and E lengths differ");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ParameterError("fit: tail_fraction must lie in (0, 1]");
  const std::size_t n = t.size();
  const std::size_t start = n - static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(n)));
  std::vector<double> lt, la, le;
  for (std::size_t i = start; i < n; ++i) {
    if (!(E[i] > 0.0)) break;
    lt.push_back(t[i]);
    la.push_back(std::log(t[i] + 1.0));
    le.push_back(std::log(E[i]));
  }
  if (lt.size() < 10) throw FitError("fit: fewer than 10 positive points in the tail window");

  const LineFit fe = least_squares(lt, le);
  const LineFit fa = least_squares(la, le);
  FitResult r;
  r.points = lt.size();
  r.r2_exp = fe.r2;
  r.r2_alg = fa.r2;
  r.slope_exp = fe.slope;
  r.slope_alg = fa.slope;
  if (fe.r2 >= fa.r2) {
    r.best = "exponential";
    r.rate_or_exponent = -fe.slope;
  } else {
    r.best = "algebraic";
    r.rate_or_exponent = fa.slope;
  }
  return r;
}

std::string fit_report_header() { return "preset,best_model,rate_or_exponent,r2_exp,r2_alg"; }

std::string fit_report_row(const std::string& preset, const FitResult& fit) {
  char buf[160];
  std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g", fit.rate_or_exponent, fit.r2_exp, fit.r2_alg);
  return preset + "," + fit.best + buf;
}

}  // namespace bergerdeck
