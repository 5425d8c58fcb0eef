#pragma once

#include <string>
#include <vector>

#include "marked/algebra.hpp"
#include "marked/hn_engine.hpp"
#include "marked/lamplighter_engine.hpp"
#include "marked/spectral.hpp"

namespace marked {

/// Per-n results for the H_n -> lamplighter limit experiment:
///  (i)   every H_n relator dies in the wreath product,
///  (ii)  termwise trace domination tau_{H_n}(M^{2k}) <= tau_{lamp}(M^{2k}),
///  (iii) t^{-(2n+1)} a_j t^{2n+1} is Britton-reduced with t-syllables for
///        every j (the conjugated subgroup meets A_n trivially),
///  (iv)  spectral radius estimates of both marked groups, side by side.
struct HnLimitRow {
  int n = 0;
  bool relators_ok = false;
  bool eq50_ok = false;
  bool domination_ok = false;
  std::vector<Rat> traces_hn;
  std::vector<Rat> traces_lamp;
  double rho_hn = 0.0;
  double rho_lamp = 0.0;
};

inline HnLimitRow hn_limit_row(int n, int depth,
                               std::uint64_t support_cap = kDefaultSupportCap) {
  HnLimitRow row;
  row.n = n;
  MarkedGroup H = make_hn_group(n);
  MarkedGroup L = make_lamplighter_group(n);

  // (i) generator-name-preserving map H_n -> Z_2 wr Z is a homomorphism
  Homomorphism eps;
  eps.domain = H;
  eps.target = L;
  for (size_t i = 0; i < H.rank(); ++i) {
    eps.images.push_back(Word{Letter{static_cast<int>(i), +1}});
  }
  eps.verify();  // throws InvalidHomomorphism if a relator survives
  row.relators_ok = true;

  // (iii) Britton certificates for the displaced conjugates
  row.eq50_ok = true;
  for (int j = -n; j <= n; ++j) {
    const auto& eng = dynamic_cast<const HnEngine&>(H.engine());
    Word w;
    for (int i = 0; i < 2 * n + 1; ++i) w.push_back(eng.t_letter(-1));
    w.push_back(eng.a_letter(j));
    for (int i = 0; i < 2 * n + 1; ++i) w.push_back(eng.t_letter(+1));
    BrittonDecomposition bd = britton_reduce(H, w);
    if (bd.t_syllables() == 0 || bd.is_identity()) row.eq50_ok = false;
    if (bd.t_exponent_sum != 0) {
      throw InvariantViolated("britton reduction changed the t-exponent sum");
    }
  }

  // (ii) exact termwise domination along the quotient map
  TracePowerSequence th =
      power_trace_sequence(averaging_operator(H, /*symmetrized=*/true), depth, support_cap);
  TracePowerSequence tl =
      power_trace_sequence(averaging_operator(L, /*symmetrized=*/true), depth, support_cap);
  row.traces_hn = th.traces;
  row.traces_lamp = tl.traces;
  row.domination_ok = true;
  for (int k = 1; k <= depth; ++k) {
    if (row.traces_hn[static_cast<size_t>(k - 1)] > row.traces_lamp[static_cast<size_t>(k - 1)]) {
      row.domination_ok = false;
    }
  }

  // (iv) report-only estimates (shallow depth: the deepest certified bound)
  row.rho_hn = estimate_from_traces(th.traces, "convolution").extrapolated;
  row.rho_lamp = estimate_from_traces(tl.traces, "convolution").extrapolated;
  return row;
}

inline std::vector<HnLimitRow> hn_limit_experiment(const std::vector<int>& ns, int depth,
                                                   std::uint64_t support_cap = kDefaultSupportCap) {
  std::vector<HnLimitRow> rows;
  for (int n : ns) rows.push_back(hn_limit_row(n, depth, support_cap));
  return rows;
}

}  // namespace marked
