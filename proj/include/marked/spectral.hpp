#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "marked/algebra.hpp"
#include "marked/free_engine.hpp"
#include "marked/rational.hpp"

namespace marked {

/// A monotone sequence of certified lower bounds on an operator norm, plus
/// a tail-extrapolated value. Raw bounds are always reported alongside the
/// fit so nothing downstream has to trust the model.
struct SpectralEstimate {
  std::vector<Rat> traces;     // traces[n-1] = tau((a* a)^n), exact
  std::vector<double> bounds;  // bounds[n-1] = traces[n-1]^(1/2n), nondecreasing
  double extrapolated = 0.0;
  double fit_exponent = 0.0;  // estimated polynomial correction exponent
  double fit_rms = 0.0;       // rms residual of the tail fit (log scale)
  int depth = 0;
  std::string method;

  double last_bound() const { return bounds.empty() ? 0.0 : bounds.back(); }
};

/// Least-squares fit of log tau_n = 2n log L - e log n + c over the last
/// third of the depths. The model is the spectral-radius tail rho^(2n) with
/// a free polynomial correction n^(-e); e is fitted rather than pinned so
/// that both tree-like (e = 3/2) and lattice-like (e = 1/2) local limits
/// extrapolate correctly.
struct TailFit {
  double value = 0.0;
  double exponent = 0.0;
  double rms = 0.0;
};

inline TailFit fit_tail(const std::vector<Rat>& traces) {
  const size_t N = traces.size();
  TailFit fit;
  if (N == 0) return fit;
  if (N < 8) {
    // too few depths for a stable three-parameter fit; fall back to the
    // deepest certified bound
    fit.value = root_k(traces[N - 1], static_cast<unsigned>(2 * N));
    return fit;
  }
  size_t window = N / 3;
  if (window < 4) window = 4;
  size_t lo = N - window + 1;  // n = lo..N

  // rows (2n, -log n, 1) -> y = log tau_n ; solve 3x3 normal equations
  long double A[3][3] = {};
  long double b[3] = {};
  for (size_t n = lo; n <= N; ++n) {
    long double r[3] = {2.0L * static_cast<long double>(n),
                        -std::log(static_cast<long double>(n)), 1.0L};
    long double y = static_cast<long double>(log_rat(traces[n - 1]));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) A[i][j] += r[i] * r[j];
      b[i] += r[i] * y;
    }
  }
  // gaussian elimination with partial pivoting
  for (int i = 0; i < 3; ++i) {
    int p = i;
    for (int k = i + 1; k < 3; ++k) {
      if (std::fabs(static_cast<double>(A[k][i])) > std::fabs(static_cast<double>(A[p][i]))) p = k;
    }
    std::swap(A[i], A[p]);
    std::swap(b[i], b[p]);
    for (int k = i + 1; k < 3; ++k) {
      long double f = A[k][i] / A[i][i];
      for (int j = i; j < 3; ++j) A[k][j] -= f * A[i][j];
      b[k] -= f * b[i];
    }
  }
  long double x[3];
  for (int i = 2; i >= 0; --i) {
    long double s = b[i];
    for (int j = i + 1; j < 3; ++j) s -= A[i][j] * x[j];
    x[i] = s / A[i][i];
  }
  fit.value = std::exp(static_cast<double>(x[0]));
  fit.exponent = static_cast<double>(x[1]);
  long double ss = 0.0L;
  for (size_t n = lo; n <= N; ++n) {
    long double pred = 2.0L * static_cast<long double>(n) * x[0] -
                       std::log(static_cast<long double>(n)) * x[1] + x[2];
    long double y = static_cast<long double>(log_rat(traces[n - 1]));
    ss += (pred - y) * (pred - y);
  }
  fit.rms = std::sqrt(static_cast<double>(ss) / static_cast<double>(window));
  return fit;
}

inline SpectralEstimate estimate_from_traces(std::vector<Rat> traces, std::string method) {
  SpectralEstimate est;
  est.depth = static_cast<int>(traces.size());
  est.traces = std::move(traces);
  est.bounds.reserve(est.traces.size());
  for (size_t n = 1; n <= est.traces.size(); ++n) {
    est.bounds.push_back(root_k(est.traces[n - 1], static_cast<unsigned>(2 * n)));
  }
  TailFit fit = fit_tail(est.traces);
  est.extrapolated = fit.value;
  est.fit_exponent = fit.exponent;
  est.fit_rms = fit.rms;
  est.method = std::move(method);
  double tol = 4 * fit.rms + 0.02 * std::fabs(fit.value) + 1e-9;
  if (!est.bounds.empty() && est.extrapolated < est.last_bound() - tol) {
    throw InvariantViolated("extrapolated norm fell below the certified lower bound");
  }
  return est;
}

/// Certified lower bounds for ||lambda_G(a)|| from the exact trace powers:
/// bound_n = tau((a* a)^n)^(1/2n).
inline SpectralEstimate operator_norm_bounds(const AlgebraElement& a, int depth,
                                             std::uint64_t support_cap = kDefaultSupportCap) {
  if (a.is_zero()) throw ConfigError("operator_norm_bounds: zero element");
  TracePowerSequence seq = power_trace_sequence(a, depth, support_cap);
  return estimate_from_traces(std::move(seq.traces), "convolution");
}

// ---------------------------------------------------------------------------
// Exact oracles on free groups.
// ---------------------------------------------------------------------------

/// Exact return probabilities p_{2n} of the simple random walk on the
/// 2m-regular tree via the radial birth-death dynamic program: from distance
/// d >= 1 one of the 2m steps moves toward the root, 2m - 1 move away.
inline std::vector<Rat> free_tree_return_oracle(int m, int depth) {
  if (m < 1) throw ConfigError("tree oracle: rank must be >= 1");
  const unsigned deg = 2 * static_cast<unsigned>(m);
  std::vector<Int> dist{Int(1)};  // dist[d] = weighted count at distance d
  std::vector<Rat> out;
  Int denom = 1;
  for (int step = 1; step <= 2 * depth; ++step) {
    std::vector<Int> next(dist.size() + 1, Int(0));
    for (size_t d = 0; d < dist.size(); ++d) {
      if (sgn(dist[d]) == 0) continue;
      if (d == 0) {
        next[1] += dist[0] * deg;
      } else {
        next[d - 1] += dist[d];
        next[d + 1] += dist[d] * (deg - 1);
      }
    }
    dist = std::move(next);
    denom *= deg;
    if (step % 2 == 0) {
      Rat p(dist[0], denom);
      p.canonicalize();
      out.push_back(p);
    }
  }
  return out;
}

/// Exact traces tau((A_X* A_X)^n) for the unsymmetrized averaging operator
/// A_X on the free group of rank `m`. Collapses to closed-walk counts on the
/// tree of K_m cliques: with s = x_1 + ... + x_m, s* s = m + T where T steps
/// between the m(m-1) elements x_j^-1 x_l; the Cayley graph of that step set
/// is the free product of m copies of K_m, whose walk is radial:
/// from the root m(m-1) edges up; from d >= 1 one down, m-2 sideways,
/// (m-1)^2 up. Finally tau((s* s)^n) = sum_k C(n,k) m^(n-k) W_k.
inline std::vector<Rat> free_averaging_trace_oracle(int m, int depth) {
  if (m < 1) throw ConfigError("averaging oracle: rank must be >= 1");
  const unsigned long um = static_cast<unsigned long>(m);
  std::vector<Int> walks{Int(1)};  // W_k = closed k-walks on the clique tree
  std::vector<Int> dist{Int(1)};
  for (int k = 1; k <= depth; ++k) {
    std::vector<Int> next(dist.size() + 1, Int(0));
    for (size_t d = 0; d < dist.size(); ++d) {
      if (sgn(dist[d]) == 0) continue;
      if (d == 0) {
        next[1] += dist[0] * (um * (um - 1));
      } else {
        next[d - 1] += dist[d];
        if (m > 2) next[d] += dist[d] * (um - 2);
        next[d + 1] += dist[d] * ((um - 1) * (um - 1));
      }
    }
    dist = std::move(next);
    walks.push_back(dist[0]);
  }
  std::vector<Rat> out;
  Int m2n = 1;
  for (int n = 1; n <= depth; ++n) {
    Int t = 0;
    Int binom = 1;  // C(n, k)
    Int mpow;
    mpz_ui_pow_ui(mpow.get_mpz_t(), um, static_cast<unsigned long>(n));  // m^(n-k)
    for (int k = 0; k <= n; ++k) {
      t += binom * mpow * walks[static_cast<size_t>(k)];
      binom = binom * (n - k) / (k + 1);
      if (k < n) mpz_divexact_ui(mpow.get_mpz_t(), mpow.get_mpz_t(), um);
    }
    m2n *= um * um;
    Rat q(t, m2n);  // tau((A* A)^n) = tau((s* s)^n) / m^(2n)
    q.canonicalize();
    out.push_back(q);
  }
  return out;
}

/// Norm estimate for the symmetrized averaging operator, i.e. the spectral
/// radius rho(G, X) of the simple random walk. Free engines use the radial
/// oracle (exact, deep); other engines go through convolution. The two
/// routes are asserted to agree exactly where both run (see the tests).
inline SpectralEstimate spectral_radius_bounds(const MarkedGroup& G, int depth,
                                               std::uint64_t support_cap = kDefaultSupportCap) {
  if (G.kind() == "free") {
    return estimate_from_traces(free_tree_return_oracle(static_cast<int>(G.rank()), depth),
                                "radial-dp");
  }
  return operator_norm_bounds(averaging_operator(G, /*symmetrized=*/true), depth, support_cap);
}

// ---------------------------------------------------------------------------
// Packed convolution kernel for free-group walks: canonical forms of short
// free words packed into 64 bits, integer walk counts. Used where the
// generic map-based convolution is memory-bound; its outputs are asserted
// equal to the generic route at overlapping depths.
// ---------------------------------------------------------------------------

class PackedFreeWalk {
 public:
  // step letters: 1..2m encode x_1, x_1^-1, x_2, ... ; 3 bits suffice for
  // ranks <= 3 at lengths <= 16; rank 4+ uses 4 bits.
  PackedFreeWalk(int rank, int max_len) : m_(rank), maxlen_(max_len) {
    bits_ = (2 * rank + 1) <= 7 ? 3 : 4;
    if ((max_len + 1) * bits_ > 58) throw ConfigError("packed word length too large");
  }

  std::uint64_t append(std::uint64_t w, unsigned letter) const {
    unsigned len = length(w);
    if (len > 0) {
      unsigned last = static_cast<unsigned>((w >> ((len - 1) * bits_)) & mask());
      if (((last - 1) ^ 1u) + 1u == letter) {  // cancel x x^-1
        return (w & ~(mask() << ((len - 1) * bits_))) - (std::uint64_t(1) << 58);
      }
    }
    return (w | (std::uint64_t(letter) << (len * bits_))) + (std::uint64_t(1) << 58);
  }

  unsigned length(std::uint64_t w) const { return static_cast<unsigned>(w >> 58); }
  std::uint64_t mask() const { return (std::uint64_t(1) << bits_) - 1; }

  std::uint64_t inverse(std::uint64_t w) const {
    unsigned len = length(w);
    std::uint64_t out = 0;
    for (unsigned i = 0; i < len; ++i) {
      unsigned letter = static_cast<unsigned>((w >> ((len - 1 - i) * bits_)) & mask());
      unsigned inv = (((letter - 1) ^ 1u) + 1u);
      out |= std::uint64_t(inv) << (i * bits_);
    }
    return out | (std::uint64_t(len) << 58);
  }

  /// Exact integer counts c_{2n} of closed 2n-step walks with uniform steps
  /// over all 2m letters, n = 1..depth; tau(M^{2n}) = c_{2n}/(2m)^{2n}.
  /// Powers are materialized only up to `table_len`; deeper traces use a
  /// three-factor split  tau(M^{2n}) = <M^K x M^{2n-2K} x M^K>.
  std::vector<Int> closed_walk_counts(int depth, int table_len) const;

 private:
  struct Table {
    std::vector<std::uint64_t> keys;  // stored as packed+1, 0 = empty
    std::vector<std::uint64_t> vals;
    size_t count = 0;
    size_t mask = 0;

    void init(size_t capacity_pow2) {
      keys.assign(capacity_pow2, 0);
      vals.assign(capacity_pow2, 0);
      mask = capacity_pow2 - 1;
      count = 0;
    }
    static std::uint64_t hash(std::uint64_t k) {
      k ^= k >> 33;
      k *= 0xff51afd7ed558ccdULL;
      k ^= k >> 33;
      k *= 0xc4ceb9fe1a85ec53ULL;
      k ^= k >> 33;
      return k;
    }
    void add(std::uint64_t key, std::uint64_t v) {
      size_t i = static_cast<size_t>(hash(key + 1)) & mask;
      for (;;) {
        if (keys[i] == 0) {
          keys[i] = key + 1;
          vals[i] = v;
          ++count;
          return;
        }
        if (keys[i] == key + 1) {
          vals[i] += v;
          return;
        }
        i = (i + 1) & mask;
      }
    }
    std::uint64_t get(std::uint64_t key) const {
      size_t i = static_cast<size_t>(hash(key + 1)) & mask;
      for (;;) {
        if (keys[i] == 0) return 0;
        if (keys[i] == key + 1) return vals[i];
        i = (i + 1) & mask;
      }
    }
  };

  int m_;
  int maxlen_;
  unsigned bits_;
};

inline std::vector<Int> PackedFreeWalk::closed_walk_counts(int depth, int table_len) const {
  const unsigned letters = 2 * static_cast<unsigned>(m_);
  const int K = std::min(depth, table_len);
  // ball sizes to size the tables
  auto ball_even = [&](int r) {
    double total = 1.0;
    double sphere = 0.0;
    for (int k = 1; k <= r; ++k) {
      sphere = (k == 1) ? letters : sphere * (letters - 1);
      if (k % 2 == r % 2) total += sphere;
    }
    return total;
  };

  Table cur;
  {
    size_t cap = 16;
    cur.init(cap);
    cur.add(0, 1);  // M^0 = identity
  }
  std::vector<Int> counts;  // counts[n-1] = c_{2n}
  counts.reserve(static_cast<size_t>(depth));

  std::vector<Table> powers;
  powers.reserve(static_cast<size_t>(K) + 1);
  powers.push_back(std::move(cur));
  for (int k = 1; k <= K; ++k) {
    const Table& prev = powers.back();
    Table next;
    size_t need = static_cast<size_t>(ball_even(k) / 0.6) + 16;
    size_t cap = 16;
    while (cap < need) cap <<= 1;
    next.init(cap);
    for (size_t i = 0; i < prev.keys.size(); ++i) {
      if (prev.keys[i] == 0) continue;
      std::uint64_t w = prev.keys[i] - 1;
      for (unsigned l = 1; l <= letters; ++l) {
        next.add(append(w, l), prev.vals[i]);
      }
    }
    powers.push_back(std::move(next));
  }

  for (int n = 1; n <= depth; ++n) {
    unsigned __int128 acc = 0;
    if (n <= K) {
      const Table& t = powers[static_cast<size_t>(n)];
      for (size_t i = 0; i < t.keys.size(); ++i) {
        if (t.keys[i] == 0) continue;
        std::uint64_t other = t.get(inverse(t.keys[i] - 1));
        acc += static_cast<unsigned __int128>(t.vals[i]) * other;
      }
    } else {
      int mid = 2 * (n - K);
      if (mid > K) throw ResourceExceeded("packed walk: depth too deep for table budget");
      const Table& big = powers[static_cast<size_t>(K)];
      const Table& small = powers[static_cast<size_t>(mid)];
      for (size_t i = 0; i < big.keys.size(); ++i) {
        if (big.keys[i] == 0) continue;
        std::uint64_t g = big.keys[i] - 1;
        for (size_t j = 0; j < small.keys.size(); ++j) {
          if (small.keys[j] == 0) continue;
          std::uint64_t gs = g;
          // append the letters of small.keys[j]-1 to g
          std::uint64_t s = small.keys[j] - 1;
          unsigned slen = length(s);
          for (unsigned p = 0; p < slen; ++p) {
            gs = append(gs, static_cast<unsigned>((s >> (p * bits_)) & mask()));
          }
          std::uint64_t other = big.get(inverse(gs));
          if (other) {
            acc += static_cast<unsigned __int128>(big.vals[i]) * small.vals[j] * other;
          }
        }
      }
    }
    Int c;
    // import the 128-bit accumulator
    std::uint64_t hi = static_cast<std::uint64_t>(acc >> 64);
    std::uint64_t lo = static_cast<std::uint64_t>(acc);
    c = Int(hi);
    c <<= 64;
    c += Int(lo);
    counts.push_back(c);
  }
  return counts;
}

/// tau(M^{2n}) for the symmetrized averaging operator on F_m via the packed
/// kernel, as exact rationals.
inline std::vector<Rat> packed_walk_traces(int m, int depth, int table_len) {
  PackedFreeWalk pw(m, std::max(depth, table_len) + 2);
  std::vector<Int> counts = pw.closed_walk_counts(depth, table_len);
  std::vector<Rat> out;
  Int denom = 1;
  for (int n = 1; n <= depth; ++n) {
    denom *= 4 * static_cast<unsigned long>(m) * static_cast<unsigned long>(m);
    Rat q(counts[static_cast<size_t>(n - 1)], denom);
    q.canonicalize();
    out.push_back(q);
  }
  return out;
}

}  // namespace marked
