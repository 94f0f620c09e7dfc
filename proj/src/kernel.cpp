#include "nlpf/kernel.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <vector>

#include "nlpf/error.hpp"

namespace nlpf {
namespace {

constexpr int kSimpsonPanels = 20000;
constexpr double kQuadratureAgreement = 1e-10;

double simpson(const std::function<double(double)>& f, double a, double b,
               int panels) {
  if (panels % 2 != 0) ++panels;
  const double step = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * step);
  }
  return sum * step / 3.0;
}

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
GaussRule gauss_legendre(int n) {
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

double gauss(const std::function<double(double)>& f, double a, double b, int n) {
  const GaussRule rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

// Integral over R^n of weight(|z|) * gamma(|z|), reduced to a radial integral.
double radial_integral(const KernelSpec& spec,
                       const std::function<double(double)>& weight) {
  const double d = spec.delta();
  if (spec.dim() == 1) {
    auto f = [&](double r) { return weight(r) * kernel_eval(spec, r); };
    const double coarse = 2.0 * simpson(f, 0.0, d, kSimpsonPanels / 2);
    const double fine = 2.0 * simpson(f, 0.0, d, kSimpsonPanels);
    if (std::abs(fine - coarse) > kQuadratureAgreement * std::abs(fine)) {
      throw Error("kernel quadrature did not converge (1D Simpson)");
    }
    return fine;
  }
  auto f = [&](double r) {
    return 2.0 * std::numbers::pi * r * weight(r) * kernel_eval(spec, r);
  };
  const double coarse = gauss(f, 0.0, d, 10);
  const double fine = gauss(f, 0.0, d, 20);
  if (std::abs(fine - coarse) > kQuadratureAgreement * std::abs(fine)) {
    throw Error("kernel quadrature did not converge (2D radial Gauss)");
  }
  return fine;
}

}  // namespace

KernelSpec::KernelSpec(double epsilon, double delta, int dim, KernelFamily family)
    : epsilon_(epsilon), delta_(delta), dim_(dim), family_(family) {
  if (!(epsilon > 0.0)) throw Error("kernel epsilon must be > 0");
  if (!(delta > 0.0)) throw Error("kernel delta must be > 0");
  scale_ = scaling_constant(dim, delta);
}

double scaling_constant(int dim, double delta) {
  if (!(delta > 0.0)) throw Error("kernel delta must be > 0");
  switch (dim) {
    case 1:
      return 15.0 / (2.0 * delta * delta * delta);
    case 2:
      return 24.0 / (std::numbers::pi * delta * delta * delta * delta);
    default:
      throw Error("unsupported kernel dimension " + std::to_string(dim));
  }
}

double kernel_eval(const KernelSpec& spec, double r) {
  const double d = spec.delta();
  if (r >= d) return 0.0;
  const double t = 1.0 - (r * r) / (d * d);
  return spec.epsilon() * spec.epsilon() * spec.scale() * t;
}

double c_gamma_closed_form(const KernelSpec& spec) {
  const double e2 = spec.epsilon() * spec.epsilon();
  const double d2 = spec.delta() * spec.delta();
  switch (spec.dim()) {
    case 1:
      return 10.0 * e2 / d2;
    case 2:
      return 12.0 * e2 / d2;
    default:
      throw Error("unsupported kernel dimension");
  }
}

double c_gamma_quadrature(const KernelSpec& spec) {
  return radial_integral(spec, [](double) { return 1.0; });
}

double second_moment_check(const KernelSpec& spec) {
  const double moment = radial_integral(spec, [](double r) { return r * r; });
  const double exact = 2.0 * spec.dim() * spec.epsilon() * spec.epsilon();
  return std::abs(moment - exact) / exact;
}

double xi(const KernelSpec& spec, double c_F, bool quiet) {
  const double value = c_gamma_closed_form(spec) - c_F;
  if (value < 0.0 && !quiet) {
    std::cerr << "warning: xi = " << value
              << " < 0; the step is outside the analysed well-posedness regime\n";
  }
  return value;
}

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Polynomial:
      return "polynomial";
  }
  return "unknown";
}

}  // namespace nlpf
