#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace marked {

using Int = mpz_class;
using Rat = mpq_class;

/// Natural log of a positive integer, accurate to double precision even for
/// numbers far beyond the double range.
inline double log_int(const Int& v) {
  long exp2;
  double m = mpz_get_d_2exp(&exp2, v.get_mpz_t());
  return std::log(m) + static_cast<double>(exp2) * std::numbers::ln2_v<double>;
}

/// Natural log of a positive rational.
inline double log_rat(const Rat& q) {
  return log_int(q.get_num()) - log_int(q.get_den());
}

/// q^(1/k) as a double, for positive q; safe for huge numerators.
inline double root_k(const Rat& q, unsigned k) {
  if (sgn(q) == 0) return 0.0;
  return std::exp(log_rat(q) / static_cast<double>(k));
}

inline Rat rat_pow(const Rat& q, unsigned long e) {
  Int n, d;
  mpz_pow_ui(n.get_mpz_t(), mpq_numref(q.get_mpq_t()), e);
  mpz_pow_ui(d.get_mpz_t(), mpq_denref(q.get_mpq_t()), e);
  Rat r(n, d);
  r.canonicalize();
  return r;
}

/// Exact comparison a^p <= b^q for nonnegative rationals.
inline bool pow_leq(const Rat& a, unsigned long p, const Rat& b, unsigned long q) {
  Int lhs, rhs, t;
  mpz_pow_ui(lhs.get_mpz_t(), mpq_numref(a.get_mpq_t()), p);
  mpz_pow_ui(t.get_mpz_t(), mpq_denref(b.get_mpq_t()), q);
  lhs *= t;
  mpz_pow_ui(rhs.get_mpz_t(), mpq_numref(b.get_mpq_t()), q);
  mpz_pow_ui(t.get_mpz_t(), mpq_denref(a.get_mpq_t()), p);
  rhs *= t;
  return lhs <= rhs;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

}  // namespace marked
