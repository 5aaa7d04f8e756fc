#include "bergerdeck/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bergerdeck/errors.hpp"

namespace bergerdeck {

FeedbackKind FeedbackKind::power(double e) {
  if (!(e > 0.0) || !std::isfinite(e)) throw ParameterError("power feedback needs a positive exponent");
  return {Type::Power, e};
}

FeedbackKind FeedbackKind::parse(const std::string& name) {
  if (name == "linear") return linear();
  if (name == "sqrt") return sqrt_odd();
  if (name == "piecewise") return piecewise();
  if (name == "expdeg") return exp_degenerate();
  if (name.rfind("power:", 0) == 0) {
    const std::string arg = name.substr(6);
    double e = 0.0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), e);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || arg.empty())
      throw ParameterError("feedback: bad power exponent '" + arg + "'");
    return power(e);
  }
  throw ParameterError("feedback: unknown kind '" + name + "' (linear | sqrt | power:<exp> | piecewise | expdeg)");
}

std::string FeedbackKind::name() const {
  switch (type) {
    case Type::Linear: return "linear";
    case Type::SqrtOdd: return "sqrt";
    case Type::Piecewise: return "piecewise";
    case Type::ExpDegenerate: return "expdeg";
    case Type::Power: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "power:%.17g", exponent);
      return buf;
    }
  }
  return "linear";
}

double eval_feedback(const FeedbackKind& kind, double s) {
  switch (kind.type) {
    case FeedbackKind::Type::Linear: return s;
    case FeedbackKind::Type::SqrtOdd: return std::copysign(std::sqrt(std::abs(s)), s);
    case FeedbackKind::Type::Power: return s == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(s), kind.exponent), s);
    case FeedbackKind::Type::Piecewise: return s >= 0.0 ? s * s : s * s * s;
    case FeedbackKind::Type::ExpDegenerate: return s == 0.0 ? 0.0 : s * s * s * std::exp(-1.0 / (s * s));
  }
  return 0.0;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Sublinear: return "sublinear";
    case Regime::Linear: return "linear";
    case Regime::Superlinear: return "superlinear";
  }
  return "linear";
}

OrderClass classify_order(const FeedbackKind& kind) {
  OrderClass c;
  auto uniform = [&](double origin, double inf) {
    c.origin = c.origin_positive = c.origin_negative = origin;
    c.infinity = c.infinity_positive = c.infinity_negative = inf;
  };
  switch (kind.type) {
    case FeedbackKind::Type::Linear: uniform(1.0, 1.0); break;
    case FeedbackKind::Type::SqrtOdd: uniform(0.5, 0.5); break;
    case FeedbackKind::Type::Power: uniform(kind.exponent, kind.exponent); break;
    case FeedbackKind::Type::Piecewise:
      c.origin_positive = c.infinity_positive = 2.0;
      c.origin_negative = c.infinity_negative = 3.0;
      c.origin = c.infinity = 3.0;
      break;
    case FeedbackKind::Type::ExpDegenerate:
      // s^4 exp(-1/s^2) vanishes faster than any power at the origin.
      uniform(std::numeric_limits<double>::infinity(), 3.0);
      break;
  }
  c.regime = c.infinity < 1.0 ? Regime::Sublinear : (c.infinity > 1.0 ? Regime::Superlinear : Regime::Linear);
  return c;
}

DampingField damping_mask(const Grid& grid, int width) {
  if (width < 0) throw SizingError("damping: width must be >= 0");
  if (2 * width >= std::min(grid.J, grid.K + 2))
    throw SizingError("damping: need 2*width < min(J, K+2), width = " + std::to_string(width));
  DampingField f;
  f.a.assign(grid.n_dof(), 0.0);
  for (int k = 0; k <= grid.K + 1; ++k)
    for (int j = 1; j <= grid.J; ++j) {
      const int dxe = std::min(j, grid.J + 1 - j);
      const int dye = std::min(k, grid.K + 1 - k);
      if (dxe < width || dye < width) f.a[grid.flatten(j, k)] = 1.0;
    }
  return f;
}

double berger_integral(std::span<const double> u, const Grid& grid, const QuadratureWeights& weights) {
  if (u.size() != grid.n_dof()) throw ShapeError("berger: field length does not match grid");
  const int J = grid.J;
  const double inv2dx = 1.0 / (2.0 * grid.dx);
  auto line_integral = [&](int k) {
    const double* row = u.data() + grid.flatten(1, k);
    auto val = [&](int j) { return (j < 1 || j > J) ? 0.0 : row[j - 1]; };
    // Endpoint slopes from the odd ghosts: u_x(0) = U_1/dx, u_x(pi) = -U_J/dx.
    const double left = 2.0 * val(1) * inv2dx;
    const double right = -2.0 * val(J) * inv2dx;
    double s = weights.wx[0] * left * left + weights.wx[static_cast<std::size_t>(J + 1)] * right * right;
    for (int j = 1; j <= J; ++j) {
      const double d = (val(j + 1) - val(j - 1)) * inv2dx;
      s += weights.wx[static_cast<std::size_t>(j)] * d * d;
    }
    return s;
  };
  // Pair mirrored levels so that reflecting y -> -y leaves the sum bitwise
  // unchanged.
  const int top = grid.K + 1;
  double q = 0.0;
  for (int k = 0; k < top - k; ++k)
    q += weights.wy[static_cast<std::size_t>(k)] * line_integral(k) +
         weights.wy[static_cast<std::size_t>(top - k)] * line_integral(top - k);
  if (top % 2 == 0) q += weights.wy[static_cast<std::size_t>(top / 2)] * line_integral(top / 2);
  return q;
}

double berger_coefficient(std::span<const double> u, const Grid& grid, const QuadratureWeights& weights, double P,
                          double S) {
  return -P + S * berger_integral(u, grid, weights);
}

void ModelConfig::validate() const {
  if (!(sigma > 0.0 && sigma < 0.5)) throw ParameterError("sigma must lie in (0, 1/2)");
  if (!std::isfinite(P)) throw ParameterError("P must be finite");
  if (!(S >= 0.0) || !std::isfinite(S)) throw ParameterError("S must be finite and >= 0");
  if (damping_width < 0) throw ParameterError("damping width must be >= 0");
}

}  // namespace bergerdeck
