#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "marked/ball.hpp"
#include "marked/group.hpp"
#include "marked/rational.hpp"
#include "marked/spectral.hpp"

namespace marked {

/// Known bounds for free Burnside groups B(m, n), recorded as documented
/// constants only: desk-scale verification is out of reach, since they hold
/// for odd exponents n >= 665 (Adyan). There,
///   omega(B(m, n), X_m) <= (2m - 1)^(2/3)
/// for the standard generating set, so the family has infinitesimal
/// spectral radius as m grows.
constexpr int kBurnsideMinOddExponent = 665;
constexpr double kBurnsideCogrowthExponent = 2.0 / 3.0;

/// Exact cogrowth values gamma(0..n): the number of reduced words of length
/// <= k over X^{+-1} evaluating to the identity, with the derived girth and
/// the rate estimate gamma(n)^(1/n).
struct CogrowthTable {
  int depth = 0;
  std::vector<Int> gamma;      // gamma[k], cumulative, k = 0..depth
  std::optional<int> girth;    // min k >= 1 with gamma(k) >= 2, if within depth
  double omega_hat = 1.0;      // gamma(depth)^(1/depth); underestimates omega

  Int kernel_words_of_length(int k) const {
    if (k == 0) return gamma[0] - 1 + 1;  // gamma(0) = 1 counts the empty word
    return gamma[static_cast<size_t>(k)] - gamma[static_cast<size_t>(k - 1)];
  }
};

/// DP over (group element, last letter) states; never enumerates raw words.
inline CogrowthTable cogrowth_table(const MarkedGroup& G, int depth,
                                    std::uint64_t state_cap = 5'000'000) {
  if (depth < 0) throw ConfigError("cogrowth depth must be >= 0");
  const size_t m = G.rank();
  CogrowthTable t;
  t.depth = depth;
  t.gamma.assign(static_cast<size_t>(depth) + 1, Int(0));
  t.gamma[0] = 1;

  struct State {
    GroupElement g;
    Letter last;
  };
  auto key_of = [](const GroupElement& g, Letter l) {
    std::string k = g.bytes;
    k.push_back(static_cast<char>(2 * l.gen + (l.sign < 0 ? 1 : 0)));
    return k;
  };

  std::unordered_map<std::string, Int> layer{{std::string(), Int(1)}};
  std::unordered_map<std::string, State> meta{
      {std::string(), State{G.identity(), Letter{-1, +1}}}};
  Int expected_total = 1;
  for (int k = 1; k <= depth; ++k) {
    std::unordered_map<std::string, Int> next;
    std::unordered_map<std::string, State> next_meta;
    Int total = 0;
    Int at_identity = 0;
    for (const auto& [key, cnt] : layer) {
      const State& st = meta.at(key);
      for (size_t gi = 0; gi < m; ++gi) {
        for (int s : {+1, -1}) {
          Letter l{static_cast<int>(gi), s};
          if (st.last.gen >= 0 && mutually_inverse(st.last, l)) continue;
          GroupElement h = G.engine().apply(st.g, l);
          std::string nk = key_of(h, l);
          auto it = next.find(nk);
          if (it == next.end()) {
            if (next.size() >= state_cap) {
              throw ResourceExceeded("cogrowth DP exceeded state cap");
            }
            next.emplace(nk, cnt);
            next_meta.emplace(nk, State{h, l});
          } else {
            it->second += cnt;
          }
        }
      }
    }
    for (const auto& [key, cnt] : next) {
      total += cnt;
      if (next_meta.at(key).g.is_identity()) at_identity += cnt;
    }
    // conservation: the DP must see every reduced word exactly once
    expected_total = (k == 1) ? Int(2 * static_cast<long>(m))
                              : expected_total * Int(2 * static_cast<long>(m) - 1);
    if (total != expected_total) {
      throw InvariantViolated("cogrowth conservation failed at length " + std::to_string(k));
    }
    t.gamma[static_cast<size_t>(k)] = t.gamma[static_cast<size_t>(k - 1)] + at_identity;
    if (!t.girth && t.gamma[static_cast<size_t>(k)] >= 2) t.girth = k;
    layer = std::move(next);
    meta = std::move(next_meta);
  }
  if (depth >= 1) {
    t.omega_hat = std::exp(log_int(t.gamma[static_cast<size_t>(depth)]) /
                           static_cast<double>(depth));
  }
  return t;
}

struct GirthResult {
  std::optional<int> value;  // empty: exceeds the cap
  int cap = 0;
};

/// Length of the shortest nontrivial relation of the marking, if <= cap.
inline GirthResult girth(const MarkedGroup& G, int cap, std::uint64_t state_cap = 5'000'000) {
  CogrowthTable t = cogrowth_table(G, cap, state_cap);
  return GirthResult{t.girth, cap};
}

// ---------------------------------------------------------------------------
// Grigorchuk formula report:
//   rho = (sqrt(2m-1)/2m) (sqrt(2m-1)/omega + omega/sqrt(2m-1)),  N != 1.
// Reported, never asserted: finite-depth omega-hat underestimates omega.
// ---------------------------------------------------------------------------

struct GrigorchukReport {
  int depth = 0;
  double rho_hat = 0.0;
  std::string rho_mode;        // "exact" (finite group) or "extrapolated"
  double omega_hat = 0.0;      // gamma(depth)^(1/depth)
  std::optional<double> omega_exact;  // known closed form, when available
  double rhs = 0.0;            // Grigorchuk right-hand side at best omega
  double residual = 0.0;       // rho_hat - rhs
  bool residual_exact = false;
  int girth_value = 0;
};

inline double grigorchuk_rhs(size_t m, double omega) {
  double s = std::sqrt(2.0 * static_cast<double>(m) - 1.0);
  return s / (2.0 * static_cast<double>(m)) * (s / omega + omega / s);
}

inline GrigorchukReport grigorchuk_residual_from_table(const MarkedGroup& G,
                                                       const CogrowthTable& t);

inline GrigorchukReport grigorchuk_residual(const MarkedGroup& G, int depth,
                                            std::uint64_t state_cap = 5'000'000) {
  CogrowthTable t = cogrowth_table(G, depth, state_cap);
  return grigorchuk_residual_from_table(G, t);
}

inline GrigorchukReport grigorchuk_residual_from_table(const MarkedGroup& G,
                                                       const CogrowthTable& t) {
  const int depth = t.depth;
  if (!t.girth) {
    throw NotApplicable("grigorchuk formula needs a nontrivial kernel (girth within depth)");
  }
  GrigorchukReport rep;
  rep.depth = depth;
  rep.girth_value = *t.girth;
  rep.omega_hat = t.omega_hat;
  const size_t m = G.rank();
  if (G.engine().finite()) {
    rep.rho_hat = 1.0;
    rep.rho_mode = "exact";
    // cogrowth of a finite group follows the free growth: omega = 2m-1 for
    // m >= 2; for a single generator gamma grows linearly and omega = 1
    rep.omega_exact = (m >= 2) ? 2.0 * static_cast<double>(m) - 1.0 : 1.0;
  } else {
    SpectralEstimate rho = spectral_radius_bounds(G, depth);
    rep.rho_hat = rho.extrapolated;
    rep.rho_mode = "extrapolated";
  }
  double omega = rep.omega_exact ? *rep.omega_exact : rep.omega_hat;
  rep.rhs = grigorchuk_rhs(m, omega);
  rep.residual = rep.rho_hat - rep.rhs;
  rep.residual_exact = rep.rho_mode == "exact" && rep.omega_exact.has_value() && m == 1;
  return rep;
}

// ---------------------------------------------------------------------------
// Cheeger constants in the 2|X|-regular Cayley multigraph: edges are the
// pairs (g, gx) for x in X, so involutions and repeated generators
// contribute parallel edges.
// ---------------------------------------------------------------------------

enum class CheegerMode { PaperExactFinite, BalancedFinite, BallUpperInfinite };

struct CheegerResult {
  CheegerMode mode;
  Rat value;                       // exact ratio |dF|/|F| attained
  std::vector<Word> witness;       // the attaining subset (paper/balanced)
  std::string witness_description;
  std::vector<std::pair<int, Rat>> ball_sequence;  // (radius, bound) in ball mode
};

namespace detail {

/// Crossing edges for a subset given as element byte strings.
inline std::uint64_t boundary_edges(const MarkedGroup& G, const std::set<std::string>& F) {
  std::uint64_t cross = 0;
  for (const std::string& k : F) {
    GroupElement g{k};
    for (size_t gi = 0; gi < G.rank(); ++gi) {
      GroupElement h = G.engine().apply(g, Letter{static_cast<int>(gi), +1});
      if (!F.count(h.bytes)) ++cross;  // edge (g, gx, x) leaves F
      GroupElement pre = G.engine().apply(g, Letter{static_cast<int>(gi), -1});
      if (!F.count(pre.bytes)) ++cross;  // edge (gx^-1, g, x) enters F
    }
  }
  return cross;
}

}  // namespace detail

inline CheegerResult cheeger_constant(const MarkedGroup& G, CheegerMode mode,
                                      int size_cap_or_radius,
                                      std::uint64_t element_cap = 5'000'000,
                                      std::uint64_t subset_cap = 5'000'000) {
  CheegerResult res;
  res.mode = mode;
  switch (mode) {
    case CheegerMode::PaperExactFinite: {
      if (!G.engine().finite()) {
        throw NotApplicable("paper-exact cheeger mode requires a finite group");
      }
      // the literal infimum over all finite subsets: F = G has empty boundary
      res.value = 0;
      res.witness_description = "F = G (whole group, empty boundary)";
      return res;
    }
    case CheegerMode::BalancedFinite: {
      if (!G.engine().finite()) {
        throw NotApplicable("balanced cheeger mode requires a finite group");
      }
      std::vector<GroupElement> all = enumerate_finite(G, element_cap);
      const size_t n = all.size();
      size_t max_size = n / 2;
      if (size_cap_or_radius > 0) {
        max_size = std::min<size_t>(max_size, static_cast<size_t>(size_cap_or_radius));
      }
      if (max_size == 0) throw ConfigError("balanced cheeger: size cap too small");
      // vertex-transitivity: every ratio is attained by a subset containing
      // the identity, so fix all[0] = 1 in F and enumerate the rest
      std::optional<Rat> best;
      std::vector<size_t> best_subset;
      std::vector<size_t> pick;
      std::set<std::string> F{all[0].bytes};
      std::uint64_t visited = 0;
      auto consider = [&]() {
        if (++visited > subset_cap) {
          throw ResourceExceeded("balanced cheeger subset search exceeded cap");
        }
        Rat ratio(Int(detail::boundary_edges(G, F)), Int(static_cast<long>(F.size())));
        ratio.canonicalize();
        if (!best || ratio < *best) {
          best = ratio;
          best_subset = pick;
        }
      };
      consider();
      // DFS over subsets of all[1..] of size < max_size
      std::vector<size_t> stack;
      std::function<void(size_t)> rec = [&](size_t start) {
        if (F.size() >= max_size) return;
        for (size_t i = start; i < n; ++i) {
          F.insert(all[i].bytes);
          pick.push_back(i);
          consider();
          rec(i + 1);
          pick.pop_back();
          F.erase(all[i].bytes);
        }
      };
      rec(1);
      res.value = *best;
      res.witness.push_back(Word{});  // identity
      for (size_t i : best_subset) {
        res.witness.push_back(G.engine().element_word(all[i]));
      }
      res.witness_description = "subset of size " + std::to_string(best_subset.size() + 1) +
                                " containing the identity";
      return res;
    }
    case CheegerMode::BallUpperInfinite: {
      int rmax = size_cap_or_radius;
      if (rmax < 1) throw ConfigError("ball cheeger mode needs radius >= 1");
      BallProfile ball = ball_enumerate(G, rmax, element_cap);
      // prefix balls B_r share the one enumeration
      std::vector<std::set<std::string>> members(static_cast<size_t>(rmax) + 1);
      for (const auto& [g, counts] : ball.counts) {
        int d = 0;
        while (counts[static_cast<size_t>(d)] == 0) ++d;
        for (int r = d; r <= rmax; ++r) members[static_cast<size_t>(r)].insert(g.bytes);
      }
      std::optional<Rat> best;
      for (int r = 1; r <= rmax; ++r) {
        const auto& F = members[static_cast<size_t>(r)];
        Rat ratio(Int(detail::boundary_edges(G, F)), Int(static_cast<long>(F.size())));
        ratio.canonicalize();
        res.ball_sequence.emplace_back(r, ratio);
        if (!best || ratio < *best) best = ratio;
      }
      res.value = *best;
      res.witness_description = "metric balls up to radius " + std::to_string(rmax) +
                                " (certified upper bounds)";
      return res;
    }
  }
  throw ConfigError("unknown cheeger mode");
}

/// The h <= 2|X| cap holds in every mode.
inline void assert_cheeger_cap(const MarkedGroup& G, const CheegerResult& r) {
  if (r.value > Rat(2 * static_cast<long>(G.rank()))) {
    throw InvariantViolated("cheeger value exceeded 2|X|");
  }
}

// ---------------------------------------------------------------------------
// Cheeger-Buser sandwich (both sides reported; assertions only where the
// bound directions certify them):
//   2|X|(1 - rho)/(2|X| - 1)  <=  h/(2|X|)  <=  sqrt(1 - rho^2).
// ---------------------------------------------------------------------------

struct CheegerBuserReport {
  double rho = 0.0;            // extrapolated (or exact 1 for finite groups)
  double rho_lower = 0.0;      // deepest certified lower bound for rho
  std::string rho_mode;
  double h_over_2m = 0.0;      // from the requested cheeger mode
  std::string h_mode;
  double left = 0.0;           // 2m(1 - rho)/(2m - 1)
  double right = 0.0;          // sqrt(1 - rho^2)
  bool exact_zero_case = false;  // finite group, paper mode: all sides 0
};

inline CheegerBuserReport cheeger_buser_check(const MarkedGroup& G, int depth,
                                              CheegerMode mode, int cheeger_param) {
  CheegerBuserReport rep;
  const double m = static_cast<double>(G.rank());
  CheegerResult h = cheeger_constant(G, mode, cheeger_param);
  assert_cheeger_cap(G, h);
  rep.h_over_2m = h.value.get_d() / (2.0 * m);
  rep.h_mode = mode == CheegerMode::BallUpperInfinite ? "upper-bound" : "exact";
  if (G.engine().finite()) {
    rep.rho = 1.0;
    rep.rho_lower = 1.0;
    rep.rho_mode = "exact";
  } else {
    SpectralEstimate rho = spectral_radius_bounds(G, depth);
    rep.rho = rho.extrapolated;
    rep.rho_lower = rho.last_bound();
    rep.rho_mode = "extrapolated";
  }
  rep.left = 2.0 * m * (1.0 - rep.rho) / (2.0 * m - 1.0);
  rep.right = std::sqrt(std::max(0.0, 1.0 - rep.rho * rep.rho));
  rep.exact_zero_case = G.engine().finite() && mode == CheegerMode::PaperExactFinite;
  if (rep.exact_zero_case) {
    // rho = 1 and h = 0 exactly: the sandwich holds with all sides zero
    if (h.value != 0) throw InvariantViolated("paper-mode cheeger must be 0 on finite groups");
  }
  return rep;
}

}  // namespace marked
