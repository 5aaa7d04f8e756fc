#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bergerdeck/model.hpp"

namespace bergerdeck {

using ScalarMap = std::function<double(double)>;

/// Concave, increasing h with h(0) = 0 and h(s g(s)) >= s^2 + g(s)^2 for
/// |s| <= 1.
///
/// Power-type feedback has the closed forms 2 s^{2 theta/(theta+1)} (theta < 1),
/// 2 s^{2/(r+1)} (r > 1) and 2 s (linear). Piecewise and ExpDegenerate get the
/// upper concave hull of the sampled pairs (s g(s), s^2 + g(s)^2), anchored at
/// the origin and linearly interpolated.
class HMap {
 public:
  static HMap construct(const FeedbackKind& kind);

  double operator()(double s) const;

  bool closed_form() const { return hull_z_.empty(); }
  /// Exponent p of h(s) = 2 s^p for the closed forms.
  double exponent() const { return exponent_; }

  /// Hull vertices (z, h(z)), empty for closed forms.
  const std::vector<double>& hull_z() const { return hull_z_; }
  const std::vector<double>& hull_h() const { return hull_h_; }

 private:
  double exponent_ = 1.0;
  std::vector<double> hull_z_;
  std::vector<double> hull_h_;
};

inline HMap construct_h(const FeedbackKind& kind) { return HMap::construct(kind); }

/// s -> s^e with e = (p0 - 2 max(order, 1)) / (p0 - 1 - order). Throws
/// ParameterError unless p0 > 2 max(order, 1).
struct HTilde {
  double exponent = 1.0;
  double operator()(double s) const;
};

HTilde h_tilde(double order, double p0);

struct DecaySeries {
  std::vector<double> t;
  std::vector<double> S;
  /// True when a step went negative and the series was cut at S = 0.
  bool clamped = false;
};

/// Classical RK4 for S' = -Hinv((1 - delta) S), S(0) = S0, on [0, T] with
/// step dt (the last step is shortened to land on T).
DecaySeries ode_decay(double S0, const ScalarMap& hinv, double delta, double T, double dt);

/// S0 exp(-c t).
struct Exponential {
  double c = 1.0;
  double s0 = 1.0;
};

/// Laws for feedback nonlinear near the origin and linear at infinity.
/// `order` is theta < 1 or r > 1.
struct AlgebraicOrigin {
  double order = 0.5;
  double c = 1.0;
  double c0 = 1.0;
};

/// Laws for feedback linear near the origin, order theta or r at infinity, with
/// integrability index q.
struct AlgebraicInfinity {
  double order = 0.5;
  double q = 4.0;
  double c = 1.0;
  double c0 = 1.0;
};

/// c2 / ln(c1 c2 t + c0), for s^3 exp(-1/s^2); needs c0 > 1.
struct Logarithmic {
  double c1 = 1.0;
  double c2 = 1.0;
  double c0 = 2.0;
};

using DecayLaw = std::variant<Exponential, AlgebraicOrigin, AlgebraicInfinity, Logarithmic>;

/// S(t).
double evaluate(const DecayLaw& law, double t);

/// The map s -> Hinv((1 - delta) s) for which `law` solves S' = -Hinv(...).
double composite_hinv(const DecayLaw& law, double s);

/// Exponent of the algebraic tail S ~ t^{-k}; 0 for exponential, NaN for
/// logarithmic.
double algebraic_exponent(const DecayLaw& law);

std::string describe(const DecayLaw& law);

/// Throws ParameterError for parameters outside the law's range.
void validate(const DecayLaw& law);

enum class DecayRegime { Origin, Infinity };

/// Closed-form family for `kind` in `regime`, with c = c0 = 1 placeholders. The
/// infinity regime needs p0. Throws UnsupportedLawError for combinations no
/// closed form covers.
DecayLaw predicted_law(const FeedbackKind& kind, DecayRegime regime, std::optional<double> p0 = std::nullopt);

struct CandidateLaw {
  std::string map;  // "Id", "h" or "h_tilde"
  DecayLaw law;
};

/// The laws induced by H ~ Id, H ~ h and (when p0 is given and the order at
/// infinity differs from 1) H ~ h_tilde. Combinations without a closed form
/// are skipped.
std::vector<CandidateLaw> candidate_laws(const FeedbackKind& kind, std::optional<double> p0 = std::nullopt);

struct FitResult {
  std::string best;  // "exponential" or "algebraic"
  double rate_or_exponent = 0.0;
  double r2_exp = 0.0;
  double r2_alg = 0.0;
  /// d log E / dt of the exponential fit.
  double slope_exp = 0.0;
  /// d log E / d log(t + 1) of the algebraic fit.
  double slope_alg = 0.0;
  std::size_t points = 0;
};

/// Least squares of log E against t and against log(t + 1) over the trailing
/// `tail_fraction` of the series. A nonpositive E cuts the window to the
/// positive prefix. For "exponential" rate_or_exponent is the rate -slope_exp;
/// for "algebraic" it is slope_alg. Throws FitError with fewer than 10 usable
/// points.
FitResult fit_decay(std::span<const double> t, std::span<const double> E, double tail_fraction = 0.5);

std::string fit_report_header();
/// "preset,best_model,rate_or_exponent,r2_exp,r2_alg" row, 17 significant digits.
std::string fit_report_row(const std::string& preset, const FitResult& fit);

}  // namespace bergerdeck
