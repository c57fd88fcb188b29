#pragma once

// Single-qubit feature/template states and their N-copy images in the
// totally symmetric subspace. Occupation index k always counts the second
// basis component (down, or v1 in the v-basis).

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qtm/error.hpp"
#include "qtm/linalg.hpp"

namespace qtm {

/// Which single-qubit basis the amplitudes refer to.
enum class BasisTag { UpDown, VBasis };

inline std::string to_string(BasisTag b) {
  return b == BasisTag::UpDown ? "up-down" : "v-basis";
}

inline void require_same_basis(BasisTag a, BasisTag b, const char* where) {
  if (a != b) {
    throw BasisMismatch(std::string(where) + ": " + to_string(a) + " vs " + to_string(b));
  }
}

inline constexpr int kMaxCopies = 40;
inline constexpr double kNormTol = 1e-12;

/// Pure qubit state. In the v-basis `amp_up`/`amp_down` hold the v0/v1
/// components.
class QubitState {
 public:
  QubitState(complex amp_up, complex amp_down, BasisTag basis = BasisTag::UpDown)
      : up_(amp_up), down_(amp_down), basis_(basis) {
    const double n2 = std::norm(up_) + std::norm(down_);
    if (std::abs(n2 - 1.0) > kNormTol) {
      throw DomainError("QubitState: squared norm " + std::to_string(n2) + " != 1");
    }
  }

  complex amp_up() const noexcept { return up_; }
  complex amp_down() const noexcept { return down_; }
  BasisTag basis() const noexcept { return basis_; }

 private:
  complex up_;
  complex down_;
  BasisTag basis_;
};

/// |f>^{(x)N} expressed in the occupation-number basis, N+1 amplitudes.
struct BosonicState {
  int n_copies;
  ComplexVector amps;
  BasisTag basis;

  std::size_t dim() const noexcept { return amps.size(); }
  ComplexMatrix projector() const { return ComplexMatrix::outer(amps, amps); }
};

/// Exact binomial coefficient; exact in 64 bits for n <= 62.
inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return c;
}

inline void require_copies(int n) {
  if (n < 1 || n > kMaxCopies) {
    throw DomainError("number of copies N=" + std::to_string(n) + " outside [1, 40]");
  }
}

/// (cos(phi/2), sin(phi/2)): the great circle through the binary templates.
inline QubitState feature_state(double phi) {
  // Reduction to [0, 2pi) flips the global sign only.
  double r = std::fmod(phi, 2.0 * std::numbers::pi);
  if (r < 0.0) r += 2.0 * std::numbers::pi;
  return {std::cos(r / 2), std::sin(r / 2)};
}

inline void require_template_angle(double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
    throw DomainError("template angle theta=" + std::to_string(theta) + " outside [0, pi/2]");
  }
}

/// Binary templates g0 = (cos t/2, sin t/2), g1 = (sin t/2, cos t/2).
inline std::pair<QubitState, QubitState> template_pair(double theta) {
  require_template_angle(theta);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {QubitState{c, s}, QubitState{s, c}};
}

/// The same binary templates written in the v-basis, where the input circle
/// is the equator: g0 = (e^{-ia}, e^{ia})/sqrt2, g1 = (e^{ia}, e^{-ia})/sqrt2
/// with a = pi/4 - theta/2.
inline std::pair<QubitState, QubitState> template_pair_vbasis(double theta) {
  require_template_angle(theta);
  const double a = std::numbers::pi / 4 - theta / 2;
  const double r = 1.0 / std::numbers::sqrt2;
  const complex em = std::polar(r, -a), ep = std::polar(r, a);
  return {QubitState{em, ep, BasisTag::VBasis}, QubitState{ep, em, BasisTag::VBasis}};
}

/// Equator point (e^{-i phi/2}, e^{i phi/2})/sqrt2 in the v-basis.
inline QubitState equator_state(double phi) {
  const double r = 1.0 / std::numbers::sqrt2;
  return {std::polar(r, -phi / 2), std::polar(r, phi / 2), BasisTag::VBasis};
}

/// m-th of M equally spaced equator states, offset by `phase`, in the v-basis.
inline QubitState equatorial_state(int m, int M, double phase) {
  if (M < 2) throw DomainError("equatorial_state: M must be >= 2");
  if (m < 0 || m >= M) {
    throw IndexError("equatorial_state: m=" + std::to_string(m) + " outside [0, M)");
  }
  const double r = 1.0 / std::numbers::sqrt2;
  if (phase == 0.0) {
    return {r * cis_pi(-m, M), r * cis_pi(m, M), BasisTag::VBasis};
  }
  const double x = phase / 2 + m * std::numbers::pi / M;
  return {std::polar(r, -x), std::polar(r, x), BasisTag::VBasis};
}

/// Multi-template state (e^{-i m pi/M}, e^{i m pi/M})/sqrt2 in the up/down basis.
inline QubitState uniform_template(int m, int M) {
  if (M < 2) throw DomainError("uniform_template: M must be >= 2");
  if (m < 0 || m >= M) {
    throw IndexError("uniform_template: m=" + std::to_string(m) + " outside [0, M)");
  }
  const double r = 1.0 / std::numbers::sqrt2;
  return {r * cis_pi(-m, M), r * cis_pi(m, M), BasisTag::UpDown};
}

/// General Bloch-sphere input (e^{-i phi/2} cos(t/2), e^{i phi/2} sin(t/2)).
inline QubitState sphere_state(double polar, double azimuth) {
  return {std::polar(std::cos(polar / 2), -azimuth / 2),
          std::polar(std::sin(polar / 2), azimuth / 2), BasisTag::UpDown};
}

namespace detail {

inline complex int_pow(complex base, int exponent) {
  complex r = 1.0;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

}  // namespace detail

/// amps[k] = sqrt(C(N,k)) up^{N-k} down^k
inline BosonicState n_copy_bosonic(const QubitState& q, int n) {
  require_copies(n);
  BosonicState out{n, ComplexVector(static_cast<std::size_t>(n) + 1), q.basis()};
  const complex up = q.amp_up(), down = q.amp_down();
  for (int k = 0; k <= n; ++k) {
    const double c = std::sqrt(static_cast<double>(binomial(n, k)));
    out.amps[static_cast<std::size_t>(k)] = c * detail::int_pow(up, n - k) * detail::int_pow(down, k);
  }
  return out;
}

/// |<a|b>|^2
inline double overlap_sq(const QubitState& a, const QubitState& b) {
  require_same_basis(a.basis(), b.basis(), "overlap_sq");
  const complex z = std::conj(a.amp_up()) * b.amp_up() + std::conj(a.amp_down()) * b.amp_down();
  return std::min(1.0, std::norm(z));
}

inline double overlap_sq(const BosonicState& a, const BosonicState& b) {
  require_same_basis(a.basis, b.basis, "overlap_sq");
  return std::norm(inner(a.amps, b.amps));
}

}  // namespace qtm
