#pragma once

#include <span>
#include <string>
#include <vector>

#include "bergerdeck/grid.hpp"

namespace bergerdeck {

/// Damping feedback g. Every kind satisfies g(0) = 0 and is nondecreasing.
struct FeedbackKind {
  enum class Type { Linear, SqrtOdd, Power, Piecewise, ExpDegenerate };

  Type type = Type::Linear;
  /// Exponent for Type::Power (theta < 1 or r > 1; 1 behaves like Linear).
  double exponent = 1.0;

  static FeedbackKind linear() { return {Type::Linear, 1.0}; }
  static FeedbackKind sqrt_odd() { return {Type::SqrtOdd, 0.5}; }
  static FeedbackKind power(double e);
  static FeedbackKind piecewise() { return {Type::Piecewise, 1.0}; }
  static FeedbackKind exp_degenerate() { return {Type::ExpDegenerate, 1.0}; }

  /// Config spelling: linear | sqrt | power:<exp> | piecewise | expdeg.
  static FeedbackKind parse(const std::string& name);
  std::string name() const;

  friend bool operator==(const FeedbackKind&, const FeedbackKind&) = default;
};

/// g(s). SqrtOdd and Power use the odd extension sign(s) |s|^e; Piecewise is
/// s^2 for s >= 0 and s^3 for s < 0; ExpDegenerate is s^3 exp(-1/s^2).
double eval_feedback(const FeedbackKind& kind, double s);

enum class Regime { Sublinear, Linear, Superlinear };
const char* to_string(Regime r);

/// Exponents r with g(s) s ~ |s|^{r+1} near the origin and at infinity.
/// Where the two signs differ (Piecewise) `origin`/`infinity` report the
/// larger exponent and the per-sign values are kept separately.
struct OrderClass {
  double origin = 1.0;
  double infinity = 1.0;
  Regime regime = Regime::Linear;
  double origin_positive = 1.0;
  double origin_negative = 1.0;
  double infinity_positive = 1.0;
  double infinity_negative = 1.0;
};

OrderClass classify_order(const FeedbackKind& kind);

/// Indicator of the damping collar a(x, y).
struct DampingField {
  std::vector<double> a;
};

/// a = 1 at nodes less than `width` cells from any edge of the rectangle
/// (j < width or J+1-j < width, k < width or K+1-k < width), 0 elsewhere.
/// Throws SizingError unless 0 <= width and 2 width < min(J, K+2).
DampingField damping_mask(const Grid& grid, int width);

/// Q = integral of u_x^2 with centred x-differences. The hinged endpoints are
/// included through the odd reflection U_{-1} = -U_1 (u = u_xx = 0).
double berger_integral(std::span<const double> u, const Grid& grid, const QuadratureWeights& weights);

/// phi(u) = -P + S Q(u).
double berger_coefficient(std::span<const double> u, const Grid& grid, const QuadratureWeights& weights, double P,
                          double S);

/// Physical configuration of the deck.
struct ModelConfig {
  double sigma = 0.2;
  double P = 1e-3;
  double S = 1e-5;
  FeedbackKind feedback = FeedbackKind::linear();
  int damping_width = 5;

  /// Throws ParameterError when sigma is outside (0, 1/2), S < 0, P is not
  /// finite or the width is negative.
  void validate() const;
};

}  // namespace bergerdeck
