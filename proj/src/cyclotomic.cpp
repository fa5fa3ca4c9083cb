#include "qflat/cyclotomic.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qf {

namespace {

// Dense univariate polynomials over Q, coefficient index = degree.
using Poly = std::vector<Rat>;

int pdeg(const Poly& p) {
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
    if (p[i] != 0) return i;
  return -1;
}

void ptrim(Poly& p) { p.resize(static_cast<size_t>(pdeg(p) + 1)); }

Poly pmul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  ptrim(r);
  return r;
}

// Division with remainder; b != 0.
std::pair<Poly, Poly> pdivmod(Poly a, const Poly& b) {
  int db = pdeg(b);
  if (db < 0) fail(ErrorCode::internal, "polynomial division by zero");
  ptrim(a);
  int da = pdeg(a);
  if (da < db) return {{}, a};
  Poly q(static_cast<size_t>(da - db + 1), Rat(0));
  for (int d = da; d >= db; --d) {
    if (a[static_cast<size_t>(d)] == 0) continue;
    Rat f = a[static_cast<size_t>(d)] / b[static_cast<size_t>(db)];
    q[static_cast<size_t>(d - db)] = f;
    for (int j = 0; j <= db; ++j) a[static_cast<size_t>(d - db + j)] -= f * b[static_cast<size_t>(j)];
  }
  ptrim(a);
  return {q, a};
}

Poly psub(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  ptrim(r);
  return r;
}

// Phi_N via Phi_N = (x^N - 1) / prod_{d | N, d < N} Phi_d.
Poly cyclotomic_poly(int N) {
  std::vector<Poly> phi(static_cast<size_t>(N + 1));
  for (int d = 1; d <= N; ++d) {
    if (N % d != 0) continue;
    Poly num(static_cast<size_t>(d + 1), Rat(0));
    num[0] = -1;
    num[static_cast<size_t>(d)] = 1;
    for (int e = 1; e < d; ++e) {
      if (d % e != 0) continue;
      auto [q, r] = pdivmod(num, phi[static_cast<size_t>(e)]);
      if (pdeg(r) >= 0) fail(ErrorCode::internal, "cyclotomic recursion: nonzero remainder");
      num = q;
    }
    phi[static_cast<size_t>(d)] = num;
  }
  return phi[static_cast<size_t>(N)];
}

}  // namespace

Rat parse_rat(const std::string& text) {
  size_t i = 0;
  auto digits = [&](size_t from) {
    size_t j = from;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    return j;
  };
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
  size_t num_end = digits(i);
  if (num_end == i) fail(ErrorCode::parse, "bad rational '" + text + "'");
  size_t j = num_end;
  if (j < text.size()) {
    if (text[j] != '/') fail(ErrorCode::parse, "bad rational '" + text + "'");
    size_t den_end = digits(j + 1);
    if (den_end == j + 1 || den_end != text.size()) fail(ErrorCode::parse, "bad rational '" + text + "'");
  }
  Rat r(text, 10);
  if (r.get_den() == 0) fail(ErrorCode::parse, "zero denominator in '" + text + "'");
  r.canonicalize();
  return r;
}

std::string rat_str(const Rat& r) { return r.get_str(); }

// ---------------------------------------------------------------------------
// Field

struct FieldRegistry {
  std::mutex mu;
  std::map<int, std::unique_ptr<Field>> by_order;
};

static FieldRegistry& registry() {
  static FieldRegistry* r = new FieldRegistry;
  return *r;
}

const Field& Field::get(int N) {
  if (N <= 0) fail(ErrorCode::usage, "field order must be positive");
  if (N > kMaxOrder) fail(ErrorCode::limit, "field order " + std::to_string(N) + " exceeds limit " + std::to_string(kMaxOrder));
  auto& reg = registry();
  std::lock_guard<std::mutex> lock(reg.mu);
  auto it = reg.by_order.find(N);
  if (it == reg.by_order.end()) it = reg.by_order.emplace(N, std::unique_ptr<Field>(new Field(N))).first;
  return *it->second;
}

Field::Field(int N) : N_(N) {
  min_poly_ = cyclotomic_poly(N);
  phi_ = pdeg(min_poly_);
  // zeta^k reduced mod Phi_N, built by repeated multiply-by-x.
  powers_.assign(static_cast<size_t>(N), std::vector<Rat>(static_cast<size_t>(phi_), Rat(0)));
  std::vector<Rat> cur(static_cast<size_t>(phi_), Rat(0));
  cur[0] = 1;
  for (int k = 0; k < N; ++k) {
    powers_[static_cast<size_t>(k)] = cur;
    // cur <- x*cur mod Phi
    Rat lead = cur[static_cast<size_t>(phi_ - 1)];
    for (int d = phi_ - 1; d > 0; --d) cur[static_cast<size_t>(d)] = cur[static_cast<size_t>(d - 1)];
    cur[0] = 0;
    if (lead != 0)
      for (int d = 0; d < phi_; ++d) cur[static_cast<size_t>(d)] -= lead * min_poly_[static_cast<size_t>(d)];
  }
  conj_exponent_.resize(static_cast<size_t>(N));
  for (int k = 0; k < N; ++k) conj_exponent_[static_cast<size_t>(k)] = (N - k) % N;
}

const std::vector<Rat>& Field::power(int k) const {
  k %= N_;
  if (k < 0) k += N_;
  return powers_[static_cast<size_t>(k)];
}

Scalar Field::zero() const { return Scalar(*this); }

Scalar Field::one() const {
  Scalar s(*this);
  s.c_[0] = 1;
  return s;
}

Scalar Field::from_rat(const Rat& r) const {
  Scalar s(*this);
  s.c_[0] = r;
  return s;
}

Scalar Field::zeta_pow(int k) const {
  Scalar s(*this);
  s.c_ = power(k);
  return s;
}

// ---------------------------------------------------------------------------
// Trig enclosure cache: for each basis exponent j, directed-rounding bounds on
// cos(2*pi*j/N) and sin(2*pi*j/N). The angle itself is irrational, so the bounds
// combine directed rounding of pi with a Lipschitz widening (|cos'|,|sin'| <= 1).

struct Field::Trig {
  int prec;
  int phi;
  std::vector<__mpfr_struct> vals;  // 4 per j: cos_lo, cos_hi, sin_lo, sin_hi

  mpfr_srcptr at(int j, int which) const { return &vals[static_cast<size_t>(4 * j + which)]; }

  Trig(int N, int phi_in, int prec_in) : prec(prec_in), phi(phi_in) {
    vals.resize(static_cast<size_t>(4 * phi));
    for (auto& v : vals) mpfr_init2(&v, prec);
    mpfr_t pi_lo, pi_hi, th_lo, th_hi, w, t1, t2;
    mpfr_inits2(prec, pi_lo, pi_hi, th_lo, th_hi, w, t1, t2, static_cast<mpfr_ptr>(nullptr));
    mpfr_const_pi(pi_lo, MPFR_RNDD);
    mpfr_const_pi(pi_hi, MPFR_RNDU);
    for (int j = 0; j < phi; ++j) {
      mpfr_mul_ui(th_lo, pi_lo, static_cast<unsigned long>(2 * j), MPFR_RNDD);
      mpfr_div_ui(th_lo, th_lo, static_cast<unsigned long>(N), MPFR_RNDD);
      mpfr_mul_ui(th_hi, pi_hi, static_cast<unsigned long>(2 * j), MPFR_RNDU);
      mpfr_div_ui(th_hi, th_hi, static_cast<unsigned long>(N), MPFR_RNDU);
      mpfr_sub(w, th_hi, th_lo, MPFR_RNDU);
      // cos over [th_lo, th_hi] lies within [cos(th_lo) - w, cos(th_lo) + w]
      mpfr_cos(t1, th_lo, MPFR_RNDD);
      mpfr_cos(t2, th_lo, MPFR_RNDU);
      mpfr_sub(const_cast<mpfr_ptr>(at(j, 0)), t1, w, MPFR_RNDD);
      mpfr_add(const_cast<mpfr_ptr>(at(j, 1)), t2, w, MPFR_RNDU);
      mpfr_sin(t1, th_lo, MPFR_RNDD);
      mpfr_sin(t2, th_lo, MPFR_RNDU);
      mpfr_sub(const_cast<mpfr_ptr>(at(j, 2)), t1, w, MPFR_RNDD);
      mpfr_add(const_cast<mpfr_ptr>(at(j, 3)), t2, w, MPFR_RNDU);
    }
    mpfr_clears(pi_lo, pi_hi, th_lo, th_hi, w, t1, t2, static_cast<mpfr_ptr>(nullptr));
  }
  ~Trig() {
    for (auto& v : vals) mpfr_clear(&v);
  }
  Trig(const Trig&) = delete;
  Trig& operator=(const Trig&) = delete;
};

std::shared_ptr<const Field::Trig> Field::trig_table(int prec) const {
  std::lock_guard<std::mutex> lock(trig_mu_);
  auto it = trig_.find(prec);
  if (it == trig_.end()) it = trig_.emplace(prec, std::make_shared<const Trig>(N_, phi_, prec)).first;
  return it->second;
}

namespace {

// Interval accumulation of sum_j c_j * T_j where T_j is the cached enclosure.
// which_lo/which_hi select cos (0,1) or sin (2,3).
struct PartInterval {
  mpfr_t lo, hi;
  explicit PartInterval(int prec) { mpfr_inits2(prec, lo, hi, static_cast<mpfr_ptr>(nullptr)); }
  ~PartInterval() { mpfr_clears(lo, hi, static_cast<mpfr_ptr>(nullptr)); }
  PartInterval(const PartInterval&) = delete;
  PartInterval& operator=(const PartInterval&) = delete;
};

void eval_part(const std::vector<Rat>& coeffs, const Field::Trig& trig, bool imag, PartInterval& out) {
  int prec = trig.prec;
  mpfr_set_zero(out.lo, 0);
  mpfr_set_zero(out.hi, 0);
  mpfr_t q_lo, q_hi, p, best_lo, best_hi;
  mpfr_inits2(prec, q_lo, q_hi, p, best_lo, best_hi, static_cast<mpfr_ptr>(nullptr));
  int base = imag ? 2 : 0;
  for (size_t j = 0; j < coeffs.size(); ++j) {
    const Rat& c = coeffs[j];
    if (c == 0) continue;
    mpfr_set_q(q_lo, c.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(q_hi, c.get_mpq_t(), MPFR_RNDU);
    mpfr_srcptr t_lo = trig.at(static_cast<int>(j), base);
    mpfr_srcptr t_hi = trig.at(static_cast<int>(j), base + 1);
    bool first = true;
    for (mpfr_srcptr a : {static_cast<mpfr_srcptr>(q_lo), static_cast<mpfr_srcptr>(q_hi)})
      for (mpfr_srcptr b : {t_lo, t_hi}) {
        mpfr_mul(p, a, b, MPFR_RNDD);
        if (first || mpfr_cmp(p, best_lo) < 0) mpfr_set(best_lo, p, MPFR_RNDD);
        mpfr_mul(p, a, b, MPFR_RNDU);
        if (first || mpfr_cmp(p, best_hi) > 0) mpfr_set(best_hi, p, MPFR_RNDU);
        first = false;
      }
    mpfr_add(out.lo, out.lo, best_lo, MPFR_RNDD);
    mpfr_add(out.hi, out.hi, best_hi, MPFR_RNDU);
  }
  mpfr_clears(q_lo, q_hi, p, best_lo, best_hi, static_cast<mpfr_ptr>(nullptr));
}

constexpr int kStartPrec = 64;
constexpr int kMaxPrec = 1 << 20;

}  // namespace

// ---------------------------------------------------------------------------
// Scalar

const Field& Scalar::field() const {
  if (!F_) fail(ErrorCode::usage, "uninitialized scalar");
  return *F_;
}

bool Scalar::is_zero() const {
  for (const Rat& x : c_)
    if (x != 0) return false;
  return true;
}

bool Scalar::is_rational() const {
  for (size_t j = 1; j < c_.size(); ++j)
    if (c_[j] != 0) return false;
  return true;
}

Rat Scalar::rational_part_checked() const {
  if (!is_rational()) fail(ErrorCode::usage, "scalar is not rational: " + to_text());
  return c_.empty() ? Rat(0) : c_[0];
}

Scalar Scalar::reduce_from(std::vector<Rat> raw) const {
  const Field& F = field();
  Scalar r(F);
  for (size_t e = 0; e < raw.size(); ++e) {
    if (raw[e] == 0) continue;
    if (static_cast<int>(e) < F.phi_) {
      r.c_[e] += raw[e];
    } else {
      const auto& rep = F.power(static_cast<int>(e));
      for (int d = 0; d < F.phi_; ++d) r.c_[static_cast<size_t>(d)] += raw[e] * rep[static_cast<size_t>(d)];
    }
  }
  return r;
}

static void check_same_field(const Scalar& a, const Scalar& b) {
  if (&a.field() != &b.field()) fail(ErrorCode::usage, "scalars from different fields");
}

Scalar Scalar::operator+(const Scalar& o) const {
  check_same_field(*this, o);
  Scalar r(*this);
  for (size_t j = 0; j < c_.size(); ++j) r.c_[j] += o.c_[j];
  return r;
}

Scalar Scalar::operator-(const Scalar& o) const {
  check_same_field(*this, o);
  Scalar r(*this);
  for (size_t j = 0; j < c_.size(); ++j) r.c_[j] -= o.c_[j];
  return r;
}

Scalar Scalar::operator-() const {
  Scalar r(*this);
  for (auto& x : r.c_) x = -x;
  return r;
}

Scalar Scalar::operator*(const Scalar& o) const {
  check_same_field(*this, o);
  const Field& F = field();
  std::vector<Rat> raw(static_cast<size_t>(F.N_), Rat(0));
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (size_t j = 0; j < o.c_.size(); ++j) {
      if (o.c_[j] == 0) continue;
      raw[(i + j) % static_cast<size_t>(F.N_)] += c_[i] * o.c_[j];
    }
  }
  return reduce_from(std::move(raw));
}

Scalar Scalar::inverse() const {
  const Field& F = field();
  if (is_zero()) fail(ErrorCode::usage, "division by zero scalar");
  // Extended Euclid in Q[x] against Phi_N.
  Poly r0 = F.min_poly_;
  Poly r1(c_.begin(), c_.end());
  ptrim(r1);
  Poly t0, t1{Rat(1)};
  while (pdeg(r1) > 0) {
    auto [q, r] = pdivmod(r0, r1);
    r0 = r1;
    r1 = r;
    Poly tn = psub(t0, pmul(q, t1));
    t0 = t1;
    t1 = tn;
  }
  if (pdeg(r1) != 0) fail(ErrorCode::internal, "inverse: gcd with minimal polynomial not constant");
  Rat inv_c = Rat(1) / r1[0];
  std::vector<Rat> raw(t1.size(), Rat(0));
  for (size_t i = 0; i < t1.size(); ++i) raw[i] = t1[i] * inv_c;
  return reduce_from(std::move(raw));
}

Scalar Scalar::operator/(const Scalar& o) const { return *this * o.inverse(); }

Scalar Scalar::scaled(const Rat& r) const {
  Scalar s(*this);
  for (auto& x : s.c_) x *= r;
  return s;
}

Scalar Scalar::conj() const {
  const Field& F = field();
  std::vector<Rat> raw(static_cast<size_t>(F.N_), Rat(0));
  for (size_t j = 0; j < c_.size(); ++j) {
    if (c_[j] == 0) continue;
    raw[static_cast<size_t>(F.conj_exponent_[j])] += c_[j];
  }
  return reduce_from(std::move(raw));
}

Scalar Scalar::rotated(int k) const {
  const Field& F = field();
  k %= F.N_;
  if (k < 0) k += F.N_;
  std::vector<Rat> raw(static_cast<size_t>(F.N_), Rat(0));
  for (size_t j = 0; j < c_.size(); ++j) {
    if (c_[j] == 0) continue;
    raw[(j + static_cast<size_t>(k)) % static_cast<size_t>(F.N_)] += c_[j];
  }
  return reduce_from(std::move(raw));
}

bool Scalar::operator==(const Scalar& o) const {
  check_same_field(*this, o);
  return c_ == o.c_;
}

int Scalar::cmp_coeffwise(const Scalar& a, const Scalar& b) {
  check_same_field(a, b);
  for (size_t j = 0; j < a.c_.size(); ++j) {
    int c = cmp(a.c_[j], b.c_[j]);
    if (c != 0) return c < 0 ? -1 : 1;
  }
  return 0;
}

bool Scalar::is_real() const { return *this == conj(); }

Sign Scalar::sign_re() const {
  // Re(x) = 0 iff x = -conj(x), decided on canonical coordinates.
  if (*this == -conj()) return Sign::zero;
  const Field& F = field();
  for (int prec = kStartPrec; prec <= kMaxPrec; prec *= 2) {
    auto trig = F.trig_table(prec);
    PartInterval iv(prec);
    eval_part(c_, *trig, /*imag=*/false, iv);
    if (mpfr_sgn(iv.lo) > 0) return Sign::positive;
    if (mpfr_sgn(iv.hi) < 0) return Sign::negative;
  }
  fail(ErrorCode::internal, "sign refinement did not converge for " + to_text());
}

Sign Scalar::sign_im() const {
  if (*this == conj()) return Sign::zero;
  const Field& F = field();
  for (int prec = kStartPrec; prec <= kMaxPrec; prec *= 2) {
    auto trig = F.trig_table(prec);
    PartInterval iv(prec);
    eval_part(c_, *trig, /*imag=*/true, iv);
    if (mpfr_sgn(iv.lo) > 0) return Sign::positive;
    if (mpfr_sgn(iv.hi) < 0) return Sign::negative;
  }
  fail(ErrorCode::internal, "sign refinement did not converge for " + to_text());
}

Sign Scalar::sign_real() const {
  if (!is_real()) fail(ErrorCode::usage, "sign_real on non-real scalar " + to_text());
  return sign_re();
}

Scalar Scalar::re_part() const {
  return (*this + conj()).scaled(Rat(1, 2));
}

Scalar Scalar::im_part() const {
  const Field& F = field();
  if (F.order() % 4 != 0) fail(ErrorCode::usage, "exact imaginary part needs 4 | field order");
  Scalar i_unit = F.zeta_pow(F.order() / 4);
  return (conj() - *this) * i_unit.scaled(Rat(1, 2));
}

std::string Scalar::part_decimal(int digits, bool imag) const {
  const Field& F = field();
  bool exact_zero = imag ? (*this == conj()) : (*this == -conj());
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpz_class z(0);
  if (!exact_zero) {
    Rat thr(Rat(1));
    mpz_class thr_den;
    mpz_ui_pow_ui(thr_den.get_mpz_t(), 10, static_cast<unsigned long>(digits + 2));
    thr /= Rat(thr_den);
    for (int prec = kStartPrec; prec <= kMaxPrec; prec *= 2) {
      auto trig = F.trig_table(prec);
      PartInterval iv(prec);
      eval_part(c_, *trig, imag, iv);
      mpfr_t w;
      mpfr_init2(w, prec);
      mpfr_sub(w, iv.hi, iv.lo, MPFR_RNDU);
      bool narrow = mpfr_cmp_q(w, thr.get_mpq_t()) < 0;
      mpfr_clear(w);
      if (narrow) {
        mpfr_t s;
        mpfr_init2(s, prec);
        mpfr_mul_z(s, iv.lo, scale.get_mpz_t(), MPFR_RNDN);
        mpfr_get_z(z.get_mpz_t(), s, MPFR_RNDN);
        mpfr_clear(s);
        break;
      }
    }
  }
  bool neg = z < 0;
  mpz_class az = abs(z);
  mpz_class ip = az / scale, fp = az % scale;
  std::string frac = fp.get_str();
  frac.insert(frac.begin(), static_cast<size_t>(digits) - frac.size(), '0');
  return (neg ? "-" : "") + ip.get_str() + "." + frac;
}

std::string Scalar::re_decimal(int digits) const { return part_decimal(digits, false); }
std::string Scalar::im_decimal(int digits) const { return part_decimal(digits, true); }

std::string Scalar::to_text() const {
  std::ostringstream os;
  os << 'q' << field().order() << ":[";
  for (size_t j = 0; j < c_.size(); ++j) {
    if (j) os << ", ";
    os << rat_str(c_[j]);
  }
  os << ']';
  return os.str();
}

Scalar Scalar::from_text(const std::string& text) {
  size_t i = 0;
  auto bad = [&]() -> void { fail(ErrorCode::parse, "bad scalar literal '" + text + "'"); };
  if (i >= text.size() || text[i] != 'q') bad();
  ++i;
  size_t n_end = i;
  while (n_end < text.size() && std::isdigit(static_cast<unsigned char>(text[n_end]))) ++n_end;
  if (n_end == i) bad();
  int N = std::stoi(text.substr(i, n_end - i));
  i = n_end;
  if (i >= text.size() || text[i] != ':') bad();
  ++i;
  if (i >= text.size() || text[i] != '[') bad();
  ++i;
  const Field& F = Field::get(N);
  Scalar s(F);
  for (int j = 0; j < F.degree(); ++j) {
    if (j) {
      if (i >= text.size() || text[i] != ',') bad();
      ++i;
      while (i < text.size() && text[i] == ' ') ++i;
    }
    size_t e = i;
    while (e < text.size() && text[e] != ',' && text[e] != ']') ++e;
    std::string tok = text.substr(i, e - i);
    while (!tok.empty() && tok.back() == ' ') tok.pop_back();
    s.c_[static_cast<size_t>(j)] = parse_rat(tok);
    i = e;
  }
  if (i >= text.size() || text[i] != ']' || i + 1 != text.size()) bad();
  return s;
}

Scalar Scalar::embedded_into(const Field& target) const {
  const Field& F = field();
  int M = F.order(), N = target.order();
  if (&target == &F) return *this;
  if (N % M != 0) fail(ErrorCode::usage, "no embedding: " + std::to_string(M) + " does not divide " + std::to_string(N));
  int r = N / M;
  std::vector<Rat> raw(static_cast<size_t>(N), Rat(0));
  for (size_t j = 0; j < c_.size(); ++j) {
    if (c_[j] == 0) continue;
    raw[(j * static_cast<size_t>(r)) % static_cast<size_t>(N)] += c_[j];
  }
  Scalar t(target);
  return t.reduce_from(std::move(raw));
}

static Rat mpfr_to_rat(mpfr_srcptr x) {
  mpq_class q;
  mpfr_get_q(q.get_mpq_t(), x);
  q.canonicalize();
  return q;
}

std::pair<Rat, Rat> pi_enclosure(const Rat& max_width) {
  for (int prec = kStartPrec; prec <= kMaxPrec; prec *= 2) {
    mpfr_t lo, hi;
    mpfr_inits2(prec, lo, hi, static_cast<mpfr_ptr>(nullptr));
    mpfr_const_pi(lo, MPFR_RNDD);
    mpfr_const_pi(hi, MPFR_RNDU);
    Rat rlo = mpfr_to_rat(lo), rhi = mpfr_to_rat(hi);
    mpfr_clears(lo, hi, static_cast<mpfr_ptr>(nullptr));
    if (rhi - rlo <= max_width) return {rlo, rhi};
  }
  fail(ErrorCode::internal, "pi enclosure did not converge");
}

namespace {

// Enclosure of atan2 over the box [x_lo,x_hi] x [y_lo,y_hi] with y_lo > 0 (upper
// half-plane, where atan2 is continuous and monotone in each coordinate).
std::pair<Rat, Rat> atan2_box(int prec, mpfr_srcptr y_lo, mpfr_srcptr y_hi, mpfr_srcptr x_lo,
                              mpfr_srcptr x_hi) {
  mpfr_t a, best_lo, best_hi;
  mpfr_inits2(prec, a, best_lo, best_hi, static_cast<mpfr_ptr>(nullptr));
  bool first = true;
  for (mpfr_srcptr y : {y_lo, y_hi})
    for (mpfr_srcptr x : {x_lo, x_hi}) {
      mpfr_atan2(a, y, x, MPFR_RNDD);
      if (first || mpfr_cmp(a, best_lo) < 0) mpfr_set(best_lo, a, MPFR_RNDD);
      mpfr_atan2(a, y, x, MPFR_RNDU);
      if (first || mpfr_cmp(a, best_hi) > 0) mpfr_set(best_hi, a, MPFR_RNDU);
      first = false;
    }
  Rat rlo = mpfr_to_rat(best_lo), rhi = mpfr_to_rat(best_hi);
  mpfr_clears(a, best_lo, best_hi, static_cast<mpfr_ptr>(nullptr));
  return {rlo, rhi};
}

}  // namespace

std::pair<Rat, Rat> arg_enclosure(const Scalar& z, const Rat& max_width) {
  Sign sr = z.sign_re(), si = z.sign_im();
  if (sr == Sign::zero && si == Sign::zero) fail(ErrorCode::usage, "arg of zero");
  if (si == Sign::zero) {
    if (sr == Sign::positive) return {Rat(0), Rat(0)};
    return pi_enclosure(max_width);  // arg = pi exactly, enclosed
  }
  const Field& F = z.field();
  // Upper half: arg in (0, pi). Lower half: arg = 2*pi - arg(conj z).
  const Scalar w = (si == Sign::positive) ? z : z.conj();
  for (int prec = kStartPrec; prec <= kMaxPrec; prec *= 2) {
    auto trig = F.trig_table(prec);
    PartInterval re_iv(prec), im_iv(prec);
    eval_part(w.coeffs(), *trig, /*imag=*/false, re_iv);
    eval_part(w.coeffs(), *trig, /*imag=*/true, im_iv);
    if (mpfr_sgn(im_iv.lo) <= 0) continue;  // need the whole box in the upper half
    auto [alo, ahi] = atan2_box(prec, im_iv.lo, im_iv.hi, re_iv.lo, re_iv.hi);
    if (ahi - alo > max_width / 2) continue;
    if (si == Sign::negative) {
      auto [plo, phi] = pi_enclosure(max_width / 8);
      return {plo * 2 - ahi, phi * 2 - alo};
    }
    return {alo, ahi};
  }
  fail(ErrorCode::internal, "arg enclosure did not converge");
}

Cmp compare_length_sq(const Scalar& u, const Scalar& v) {
  Scalar d = u.norm_sq() - v.norm_sq();
  return static_cast<Cmp>(d.sign_re());
}

Cmp compare_real(const Scalar& x, const Rat& r) {
  if (!x.is_real()) fail(ErrorCode::usage, "compare_real on non-real scalar");
  Scalar d = x - x.field().from_rat(r);
  return static_cast<Cmp>(d.sign_re());
}

}  // namespace qf
