#pragma once

#include <string_view>

namespace nlpf {

enum class KernelFamily { Polynomial };

/// Radial, compactly supported interaction kernel
///   gamma(r) = epsilon^2 * C(delta) * max(0, 1 - r^2/delta^2),
/// normalised so that its second moment equals 2 * dim * epsilon^2.
/// Immutable once constructed.
class KernelSpec {
 public:
  KernelSpec(double epsilon, double delta, int dim,
             KernelFamily family = KernelFamily::Polynomial);

  double epsilon() const noexcept { return epsilon_; }
  double delta() const noexcept { return delta_; }
  int dim() const noexcept { return dim_; }
  KernelFamily family() const noexcept { return family_; }

  /// Scaling constant C(delta) cached at construction.
  double scale() const noexcept { return scale_; }

 private:
  double epsilon_;
  double delta_;
  int dim_;
  KernelFamily family_;
  double scale_;
};

double scaling_constant(int dim, double delta);

double kernel_eval(const KernelSpec& spec, double r);

/// Closed form of c_gamma = int gamma(|y|) dy: 10 eps^2/delta^2 (1D),
/// 12 eps^2/delta^2 (2D). For a compactly supported kernel this is also
/// C_gamma, the integral over all of R^n.
double c_gamma_closed_form(const KernelSpec& spec);

/// c_gamma by numerical quadrature (Simpson in 1D, radial Gauss in 2D).
double c_gamma_quadrature(const KernelSpec& spec);

/// |int |z|^2 gamma(|z|) dz - 2 n eps^2| / (2 n eps^2), integral by quadrature.
double second_moment_check(const KernelSpec& spec);

/// xi = c_gamma - c_F. Writes a warning to stderr when xi < 0 unless
/// `quiet` is set.
double xi(const KernelSpec& spec, double c_F, bool quiet = false);

std::string_view to_string(KernelFamily family);

}  // namespace nlpf
