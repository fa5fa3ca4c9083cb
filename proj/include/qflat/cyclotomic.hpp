#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "qflat/error.hpp"

namespace qf {

using Rat = mpq_class;

// Parse "a" or "a/b" (optional leading '-'); canonicalizes. Rejects anything else.
Rat parse_rat(const std::string& text);
std::string rat_str(const Rat& r);

// Largest supported ambient order; bounds phi(N) and hence coefficient-vector length.
inline constexpr int kMaxOrder = 60;

class Field;
class Scalar;

// The N-th cyclotomic field Q(zeta_N), zeta_N = exp(2*pi*i/N). Interned per N;
// instances live for the process lifetime, so raw pointers to them are stable.
class Field {
 public:
  static const Field& get(int N);

  int order() const { return N_; }
  int degree() const { return phi_; }

  // zeta^k as a reduced coefficient vector (k taken mod N).
  const std::vector<Rat>& power(int k) const;

  Scalar zero() const;
  Scalar one() const;
  Scalar from_rat(const Rat& r) const;
  Scalar zeta_pow(int k) const;  // unit vector at angle 2*pi*k/N

  // Interval enclosure, with directed rounding, of sum(c_j*cos(2*pi*j/N)) or
  // sum(c_j*sin(2*pi*j/N)) at the given MPFR precision. Returns [lo, hi] as doubles
  // is not enough; results come back through the out-params as mpfr handled inside
  // the .cpp. Exposed only via Scalar sign/print helpers.

  struct Trig;  // cached per-precision cos/sin enclosures of the basis angles
  std::shared_ptr<const Trig> trig_table(int prec) const;

 private:
  explicit Field(int N);
  friend class Scalar;
  friend struct FieldRegistry;

  int N_;
  int phi_;
  std::vector<Rat> min_poly_;               // Phi_N, monic; size phi_+1
  std::vector<std::vector<Rat>> powers_;    // zeta^k reduced, k in [0, N)
  std::vector<int> conj_exponent_;          // (N - k) mod N for k in [0, N)

  mutable std::mutex trig_mu_;
  mutable std::map<int, std::shared_ptr<const Trig>> trig_;  // keyed by precision
};

enum class Sign { negative = -1, zero = 0, positive = 1 };
enum class Cmp { less = -1, equal = 0, greater = 1 };

// An element of Q(zeta_N) in canonical reduced coordinates over the power basis.
// Doubles as a point of the Euclidean plane (the complex line). Immutable in
// practice: all operations return fresh values.
class Scalar {
 public:
  Scalar() : F_(nullptr) {}
  explicit Scalar(const Field& F) : F_(&F), c_(F.degree(), Rat(0)) {}

  const Field& field() const;
  int order() const { return field().order(); }
  const std::vector<Rat>& coeffs() const { return c_; }

  bool is_zero() const;
  bool is_rational() const;  // all basis coefficients beyond zeta^0 vanish
  Rat rational_part_checked() const;

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator-() const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;  // errors on zero divisor
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

  Scalar scaled(const Rat& r) const;
  Scalar conj() const;
  Scalar rotated(int k) const;  // multiplication by zeta^k
  Scalar inverse() const;

  bool operator==(const Scalar& o) const;
  bool operator!=(const Scalar& o) const { return !(*this == o); }
  // Total order on coefficient vectors (not the real order!); for map keys.
  static int cmp_coeffwise(const Scalar& a, const Scalar& b);

  bool is_real() const;  // fixed by conjugation

  // Sign of the real / imaginary part of the complex value. Exact: zero is decided
  // on canonical coordinates, nonzero sign by adaptive-precision interval
  // refinement (terminates because a nonzero algebraic number is bounded away
  // from zero).
  Sign sign_re() const;
  Sign sign_im() const;
  // Spec operation: sign of a real-subfield element; errors if not real.
  Sign sign_real() const;

  // Exact real/imaginary parts as (real) field elements; requires 4 | N.
  Scalar re_part() const;
  Scalar im_part() const;

  Scalar norm_sq() const { return conj() * *this; }  // |z|^2, real element

  // Decimal enclosure of the real/imaginary part, deterministic, `digits` places.
  std::string re_decimal(int digits) const;
  std::string im_decimal(int digits) const;

  // Textual form q<N>:[c0, c1, ...]; parser and printer round-trip exactly.
  std::string to_text() const;
  static Scalar from_text(const std::string& text);

  // Image under the embedding Q(zeta_M) -> Q(zeta_N), M | N (zeta_M = zeta_N^{N/M}).
  Scalar embedded_into(const Field& target) const;

 private:
  friend class Field;
  const Field* F_;
  std::vector<Rat> c_;
  Scalar reduce_from(std::vector<Rat> raw) const;  // raw has arbitrary degree < N after mod
  std::string part_decimal(int digits, bool imag) const;
};

inline Scalar dot(const Scalar& u, const Scalar& v) { return (u.conj() * v).re_part(); }
inline Scalar cross(const Scalar& u, const Scalar& v) { return (u.conj() * v).im_part(); }
inline Sign dot_sign(const Scalar& u, const Scalar& v) { return (u.conj() * v).sign_re(); }
inline Sign cross_sign(const Scalar& u, const Scalar& v) { return (u.conj() * v).sign_im(); }

Cmp compare_length_sq(const Scalar& u, const Scalar& v);
// Compare a real element against a rational, exactly.
Cmp compare_real(const Scalar& x, const Rat& r);

// Rational enclosure of pi with hi - lo <= max_width.
std::pair<Rat, Rat> pi_enclosure(const Rat& max_width);

// Rigorous rational enclosure of arg(z) in [0, 2*pi), z != 0, of width <= max_width.
// Exact coordinate signs steer the branch, so the bounds never straddle the cut.
std::pair<Rat, Rat> arg_enclosure(const Scalar& z, const Rat& max_width);

inline Sign opposite(Sign s) { return static_cast<Sign>(-static_cast<int>(s)); }

}  // namespace qf
