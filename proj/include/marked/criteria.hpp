#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "marked/algebra.hpp"
#include "marked/cogrowth.hpp"
#include "marked/free_engine.hpp"
#include "marked/free_product_engine.hpp"
#include "marked/hn_engine.hpp"
#include "marked/lamplighter_engine.hpp"
#include "marked/spectral.hpp"

namespace marked {

// ---------------------------------------------------------------------------
// Powers averaging estimator: trace-power bounds for
//   (1/|Y|) || sum_y lambda(u y g y^-1) ||,
// with the exact termwise identities that make the estimator trustworthy:
// right-multiplying by the unitary g^-1 (conjugate sum vs commutator sum)
// and left-multiplying by a unitary u leave every tau((s* s)^n) unchanged.
// ---------------------------------------------------------------------------

struct PowersAverageReport {
  SpectralEstimate estimate;  // for the normalized averaged sum
  size_t conjugate_support = 0;
  bool identities_verified = false;
};

inline PowersAverageReport powers_average_bounds(const MarkedGroup& G, const Word& g,
                                                 const std::vector<Word>& Y, int depth,
                                                 const std::optional<Word>& u = std::nullopt,
                                                 std::uint64_t support_cap = kDefaultSupportCap) {
  if (Y.empty()) throw ConfigError("powers average: Y must be nonempty");
  GroupElement ge = G.evaluate(g);
  if (ge.is_identity()) throw ConfigError("powers average: g must be nontrivial");
  Rat w(1, static_cast<long>(Y.size()));

  AlgebraElement conj_sum(G), comm_sum(G), mult_sum(G);
  GroupElement ginv = G.inverse(ge);
  GroupElement ue = u ? G.evaluate(*u) : G.identity();
  for (const Word& y : Y) {
    GroupElement ye = G.evaluate(y);
    GroupElement c = G.multiply(G.multiply(ye, ge), G.inverse(ye));
    conj_sum.add_term(c, w);
    comm_sum.add_term(G.multiply(c, ginv), w);
    mult_sum.add_term(G.multiply(ue, c), w);
  }

  TracePowerSequence s_conj = power_trace_sequence(conj_sum, depth, support_cap);
  TracePowerSequence s_comm = power_trace_sequence(comm_sum, depth, support_cap);
  TracePowerSequence s_mult = power_trace_sequence(mult_sum, depth, support_cap);
  for (int n = 1; n <= depth; ++n) {
    if (s_conj.traces[static_cast<size_t>(n - 1)] != s_comm.traces[static_cast<size_t>(n - 1)]) {
      throw InvariantViolated("conjugate/commutator trace identity failed at n=" +
                              std::to_string(n));
    }
    if (s_conj.traces[static_cast<size_t>(n - 1)] != s_mult.traces[static_cast<size_t>(n - 1)]) {
      throw InvariantViolated("unitary left-multiplier trace identity failed at n=" +
                              std::to_string(n));
    }
  }

  PowersAverageReport rep;
  rep.conjugate_support = mult_sum.support_size();
  rep.estimate = estimate_from_traces(std::move(s_mult.traces), "convolution");
  rep.identities_verified = true;
  return rep;
}

// ---------------------------------------------------------------------------
// Termwise trace monotonicity (exact, zero tolerance).
// ---------------------------------------------------------------------------

struct MonotonicityResult {
  bool passed = true;
  int failing_depth = 0;
  std::vector<Rat> domain_traces;
  std::vector<Rat> target_traces;
};

/// Quotient monotonicity: for nonnegative a and a homomorphism eps,
/// tau_Q((eps(a)* eps(a))^n) >= tau_G((a* a)^n) for every n.
inline MonotonicityResult trace_monotonicity_check(const AlgebraElement& a,
                                                   const Homomorphism& eps, int depth,
                                                   std::uint64_t support_cap = kDefaultSupportCap) {
  if (!a.nonnegative()) throw ConfigError("trace monotonicity needs nonnegative coefficients");
  eps.verify();
  AlgebraElement b = apply_hom(eps, a);
  MonotonicityResult res;
  res.domain_traces = power_trace_sequence(a, depth, support_cap).traces;
  res.target_traces = power_trace_sequence(b, depth, support_cap).traces;
  for (int n = 1; n <= depth; ++n) {
    if (res.target_traces[static_cast<size_t>(n - 1)] <
        res.domain_traces[static_cast<size_t>(n - 1)]) {
      res.passed = false;
      res.failing_depth = n;
      break;
    }
  }
  return res;
}

/// Coefficient domination: 0 <= a <= b termwise implies
/// tau((b* b)^n) >= tau((a* a)^n).
inline MonotonicityResult trace_domination_check(const AlgebraElement& a,
                                                 const AlgebraElement& b, int depth,
                                                 std::uint64_t support_cap = kDefaultSupportCap) {
  if (!a.nonnegative() || !b.nonnegative()) {
    throw ConfigError("trace domination needs nonnegative coefficients");
  }
  for (const auto& [k, c] : a.coeffs()) {
    if (b.coefficient(GroupElement{k}) < c) {
      throw ConfigError("domination requires a <= b coefficientwise");
    }
  }
  MonotonicityResult res;
  res.domain_traces = power_trace_sequence(a, depth, support_cap).traces;
  res.target_traces = power_trace_sequence(b, depth, support_cap).traces;
  for (int n = 1; n <= depth; ++n) {
    if (res.target_traces[static_cast<size_t>(n - 1)] <
        res.domain_traces[static_cast<size_t>(n - 1)]) {
      res.passed = false;
      res.failing_depth = n;
      break;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// The rebalancing homomorphism F_k -> F_l (k >= l): x_i -> y_{j(i)} for
// i <= lq, x_i -> 1 otherwise, where k = lq + r and j(i) is the residue
// class of i - 1. Its group-ring image identity is asserted exactly:
//   eps(x_1 + ... + x_k) = q(y_1 + ... + y_l) + r 1.
// ---------------------------------------------------------------------------

struct RebalanceResult {
  long q = 0;
  long r = 0;
  Homomorphism hom;
  AlgebraElement image;  // eps(x_1 + ... + x_k)
};

inline RebalanceResult rebalance_homomorphism(long k, long l) {
  if (k < l || l < 1) throw ConfigError("rebalance needs k >= l >= 1");
  MarkedGroup Fk = make_free_group(static_cast<size_t>(k), "x");
  MarkedGroup Fl = make_free_group(static_cast<size_t>(l), "y");
  RebalanceResult res;
  res.q = k / l;
  res.r = k % l;
  res.hom.domain = Fk;
  res.hom.target = Fl;
  for (long i = 1; i <= k; ++i) {
    if (i <= l * res.q) {
      long j = (i - 1) % l;  // j(i) - 1
      res.hom.images.push_back(Word{Letter{static_cast<int>(j), +1}});
    } else {
      res.hom.images.push_back(Word{});
    }
  }
  AlgebraElement sum(Fk);
  for (long i = 0; i < k; ++i) sum.add_term(Fk.generator(static_cast<size_t>(i)), 1);
  res.image = apply_hom(res.hom, sum);

  AlgebraElement expect(Fl);
  for (long j = 0; j < l; ++j) expect.add_term(Fl.generator(static_cast<size_t>(j)), res.q);
  expect.add_term(Fl.identity(), res.r);
  if (!(res.image == expect)) {
    throw InvariantViolated("rebalance image identity failed for k=" + std::to_string(k) +
                            " l=" + std::to_string(l));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Sequence-level report of the four equivalent quantities of the
// infinitesimal-spectral-radius characterization, with per-value
// certification modes. Per-index failures are recorded, not fatal.
// ---------------------------------------------------------------------------

struct IndexReport {
  size_t index = 0;
  size_t rank = 0;
  double ax_bound = 0.0;
  std::string ax_mode;
  double rho_bound = 0.0;
  std::string rho_mode;
  std::optional<double> cheeger_ratio;  // h / (2|X|)
  std::string cheeger_mode;
  double omega_hat = 0.0;
  double omega_ratio = 0.0;  // omega_hat / |X|
  std::string girth_text;
  std::string error;
};

struct SequenceReport {
  std::vector<IndexReport> rows;
  bool ax_monotone_decreasing = true;
  bool flagged_not_infinitesimal = false;
};

inline SequenceReport infinitesimal_report(const std::vector<MarkedGroup>& groups, int depth,
                                           int cogrowth_depth = 0, int cheeger_param = 4) {
  if (cogrowth_depth <= 0) cogrowth_depth = depth;
  SequenceReport rep;
  for (size_t i = 0; i < groups.size(); ++i) {
    const MarkedGroup& G = groups[i];
    IndexReport row;
    row.index = i;
    row.rank = G.rank();
    try {
      if (G.kind() == "free") {
        SpectralEstimate ax = estimate_from_traces(
            free_averaging_trace_oracle(static_cast<int>(G.rank()), depth), "oracle");
        row.ax_bound = ax.extrapolated;
        row.ax_mode = "oracle-exact-traces";
      } else {
        SpectralEstimate ax =
            operator_norm_bounds(averaging_operator(G, /*symmetrized=*/false), depth);
        row.ax_bound = ax.extrapolated;
        row.ax_mode = "convolution-extrapolated";
      }
      SpectralEstimate rho = spectral_radius_bounds(G, depth);
      row.rho_bound = rho.extrapolated;
      row.rho_mode = rho.method;

      if (G.engine().finite()) {
        CheegerResult h = cheeger_constant(G, CheegerMode::BalancedFinite, cheeger_param);
        row.cheeger_ratio = h.value.get_d() / (2.0 * static_cast<double>(G.rank()));
        row.cheeger_mode = "balanced-exact";
      } else {
        CheegerResult h = cheeger_constant(G, CheegerMode::BallUpperInfinite,
                                           std::min(cheeger_param, 6));
        row.cheeger_ratio = h.value.get_d() / (2.0 * static_cast<double>(G.rank()));
        row.cheeger_mode = "ball-upper";
      }

      // deep cogrowth tables are cap-bound on fast-growing groups; halve the
      // depth until the DP fits, and record the depth actually used
      int cd = cogrowth_depth;
      for (;;) {
        try {
          CogrowthTable ct = cogrowth_table(G, cd, 500'000);
          row.omega_hat = ct.omega_hat;
          row.omega_ratio = ct.omega_hat / static_cast<double>(G.rank());
          row.girth_text =
              ct.girth ? std::to_string(*ct.girth) : ("> " + std::to_string(cd));
          break;
        } catch (const ResourceExceeded&) {
          if (cd <= 2) throw;
          cd /= 2;
        }
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rep.rows.push_back(std::move(row));
  }
  for (size_t i = 1; i < rep.rows.size(); ++i) {
    if (rep.rows[i].error.empty() && rep.rows[i - 1].error.empty() &&
        rep.rows[i].ax_bound > rep.rows[i - 1].ax_bound + 1e-9) {
      rep.ax_monotone_decreasing = false;
    }
  }
  if (!rep.rows.empty() && rep.rows.back().error.empty() && rep.rows.back().rho_bound > 0.9) {
    rep.flagged_not_infinitesimal = true;
  }
  return rep;
}

}  // namespace marked
