// Copyright 2026 The spanlift Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Discrete denotational semantics for pWHILE: commands become SubDist
// transformers over memories. Continuous samplers are replaced by declared
// per-site grid discretizations, loops by fuel-bounded unrolling where the
// still-looping remainder is mapped to the null measure. The result is a
// brute-force but exact oracle on finite supports.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spanlift/density.hpp"
#include "spanlift/dist.hpp"
#include "spanlift/error.hpp"
#include "spanlift/lang.hpp"
#include "spanlift/rational.hpp"

namespace spanlift {

// Grids are keyed by the sampled variable's name, so both programs of a
// paired judgment land their noise on identical outcomes and discretization
// error cancels across runs.
struct InterpConfig {
  std::int64_t fuel = 64;              // max loop body executions
  std::map<std::string, GridSpec> grids;
  double dust_tol = 1e-9;              // acceptable total mass loss
  Rat quantum{1, 1000000000};          // rounding pitch for overflowing reals

  void validate() const {
    if (fuel < 1) fail(Err::kInvalidParam, "fuel must be at least 1");
    if (!(dust_tol >= 0.0) || dust_tol > 1e-6)
      fail(Err::kInvalidParam, "dust_tol must lie in [0, 1e-6]");
    if (!(quantum > Rat(0)))
      fail(Err::kInvalidParam, "rounding quantum must be positive");
    for (const auto& [site, g] : grids) {
      (void)site;
      g.validate();
    }
  }
};

// Mass lost during evaluation, by cause. Pruning dust lives on the SubDist
// itself; these cover the losses the monad cannot see.
struct InterpStats {
  double residual_mass = 0;   // loop mass dropped when fuel ran out
  double dropped_tail = 0;    // density mass outside a declared grid
  double rounding_dust = 0;   // |rounded - exact| from the quantum fallback
};

// Memories travel through SubDist packed as tuple outcomes.
inline Outcome pack_memory(Memory m) { return Outcome::of_tuple(std::move(m)); }
inline const Memory& memory_of(const Outcome& o) { return o.as_tuple(); }

namespace detail {

// Assignment targets widen int values into real slots so memories always
// match their declared types.
inline Outcome coerce_outcome(const Ty& ty, Outcome v) {
  if (ty.is_vector()) {
    Outcome::Tuple t = v.as_tuple();
    for (auto& x : t) x = coerce_outcome(ty.element(), std::move(x));
    return Outcome::of_tuple(std::move(t));
  }
  if (ty.base == Base::kReal && v.is_int())
    return Outcome::of_real(Rat(v.as_int()));
  return v;
}

}  // namespace detail

// Distribution of one sampling expression at a concrete memory. `site` is
// the sampled variable's name; continuous samplers require cfg.grids[site].
inline SubDist eval_pexpr(const Context& ctx, const Memory& m, const PExpr& pe,
                          const InterpConfig& cfg, const std::string& site,
                          InterpStats* stats = nullptr) {
  Rounding rounding{cfg.quantum, stats ? &stats->rounding_dust : nullptr};
  auto arg = [&](std::size_t i) {
    return eval_expr(ctx, m, pe.args[i], &rounding).as_rat().to_double();
  };
  switch (pe.kind) {
    case PExpr::Kind::kDirac:
      return SubDist::dirac(eval_expr(ctx, m, pe.args[0], &rounding));
    case PExpr::Kind::kBern: {
      double p = arg(0);
      if (!(p >= 0.0) || !(p <= 1.0))
        fail(Err::kInvalidParam, "bern parameter outside [0, 1]", pe.line,
             pe.col);
      std::vector<SubDist::Entry> es;
      if (p > 0.0) es.emplace_back(Outcome::of_bool(true), p);
      if (p < 1.0) es.emplace_back(Outcome::of_bool(false), 1.0 - p);
      return SubDist::from_entries(std::move(es));
    }
    case PExpr::Kind::kLap:
    case PExpr::Kind::kGauss:
    case PExpr::Kind::kSinhGauss: {
      auto it = cfg.grids.find(site);
      if (it == cfg.grids.end())
        fail(Err::kMissingGrid,
             "no grid declared for sampling site '" + site + "'", pe.line,
             pe.col);
      DensityModel model;
      if (pe.kind == PExpr::Kind::kLap) {
        model = laplace_density(arg(0), arg(1));
      } else if (pe.kind == PExpr::Kind::kGauss) {
        model = gaussian_density(arg(0), arg(1));
      } else {
        model = sinh_normal_density(arg(0), arg(1), arg(2));
      }
      Discretized d = discretize_density(model, it->second);
      if (stats) stats->dropped_tail += d.dropped_tail;
      return std::move(d.dist);
    }
  }
  fail(Err::kInvalidParam, "unknown sampler", pe.line, pe.col);
}

namespace detail {

struct Split {
  std::vector<SubDist::Entry> pass;  // guard true
  std::vector<SubDist::Entry> rest;  // guard false
};

inline Split split_by_guard(const Context& ctx, const SubDist& mu,
                            const Expr& guard, const Rounding* rounding) {
  Split s;
  for (const auto& [mo, w] : mu.entries()) {
    bool b = eval_expr(ctx, memory_of(mo), guard, rounding).as_bool();
    (b ? s.pass : s.rest).emplace_back(mo, w);
  }
  return s;
}

inline SubDist eval_cmd_rec(const Context& ctx, const Cmd& c,
                            const SubDist& mu, const InterpConfig& cfg,
                            InterpStats* stats) {
  Rounding rounding{cfg.quantum, stats ? &stats->rounding_dust : nullptr};
  switch (c.kind) {
    case Cmd::Kind::kSkip:
      return mu;
    case Cmd::Kind::kAssign: {
      int slot = ctx.index_of(c.target);
      if (slot < 0)
        fail(Err::kUnboundVariable, "unbound variable: " + c.target, c.line,
             c.col);
      const Ty& ty = ctx.vars[static_cast<std::size_t>(slot)].second;
      return pushforward(mu, [&](const Outcome& mo) {
        Memory next = memory_of(mo);
        next[static_cast<std::size_t>(slot)] =
            coerce_outcome(ty, eval_expr(ctx, next, *c.rhs, &rounding));
        return pack_memory(std::move(next));
      });
    }
    case Cmd::Kind::kSample: {
      int slot = ctx.index_of(c.target);
      if (slot < 0)
        fail(Err::kUnboundVariable, "unbound variable: " + c.target, c.line,
             c.col);
      const Ty& ty = ctx.vars[static_cast<std::size_t>(slot)].second;
      std::vector<SubDist::Entry> out;
      double dust = mu.dust();
      for (const auto& [mo, w] : mu.entries()) {
        // Tail loss from discretization scales with the incoming mass.
        InterpStats local;
        SubDist d =
            eval_pexpr(ctx, memory_of(mo), *c.dist, cfg, c.target, &local);
        if (stats) {
          stats->dropped_tail += w * local.dropped_tail;
          stats->rounding_dust += local.rounding_dust;
        }
        dust += w * d.dust();
        for (const auto& [v, p] : d.entries()) {
          Memory next = memory_of(mo);
          next[static_cast<std::size_t>(slot)] = coerce_outcome(ty, v);
          out.emplace_back(pack_memory(std::move(next)), w * p);
        }
      }
      return SubDist::from_entries(std::move(out), dust, kDustTol);
    }
    case Cmd::Kind::kSeq:
      return eval_cmd_rec(ctx, c.kids[1],
                          eval_cmd_rec(ctx, c.kids[0], mu, cfg, stats), cfg,
                          stats);
    case Cmd::Kind::kIte: {
      Split s = split_by_guard(ctx, mu, *c.guard, &rounding);
      SubDist then_out = eval_cmd_rec(
          ctx, c.kids[0], SubDist::from_entries(std::move(s.pass), mu.dust()),
          cfg, stats);
      SubDist else_out = eval_cmd_rec(
          ctx, c.kids[1], SubDist::from_entries(std::move(s.rest)), cfg,
          stats);
      std::vector<SubDist::Entry> merged = then_out.entries();
      for (const auto& e : else_out.entries()) merged.push_back(e);
      return SubDist::from_entries(std::move(merged),
                                   then_out.dust() + else_out.dust());
    }
    case Cmd::Kind::kWhile: {
      std::vector<SubDist::Entry> done;
      double dust = mu.dust();
      SubDist cur = SubDist::from_entries(mu.entries());
      for (std::int64_t k = 0;; ++k) {
        Split s = split_by_guard(ctx, cur, *c.guard, &rounding);
        for (auto& e : s.rest) done.push_back(std::move(e));
        if (s.pass.empty()) break;
        if (k == cfg.fuel) {
          // Out of unrollings: still-looping mass goes to the null measure.
          double lost = 0;
          for (const auto& [_, w] : s.pass) lost += w;
          if (stats) stats->residual_mass += lost;
          break;
        }
        SubDist body_out = eval_cmd_rec(
            ctx, c.kids[0], SubDist::from_entries(std::move(s.pass)), cfg,
            stats);
        dust += body_out.dust();
        cur = SubDist::from_entries(body_out.entries());
      }
      return SubDist::from_entries(std::move(done), dust, kDustTol);
    }
  }
  fail(Err::kInvalidParam, "unknown command", c.line, c.col);
}

}  // namespace detail

// Pushes a sub-distribution over memories through a command. Output mass is
// at most the input mass; losses are itemized in `stats` and in dust().
inline SubDist eval_cmd(const Context& ctx, const Cmd& c, const SubDist& mu,
                        const InterpConfig& cfg, InterpStats* stats = nullptr) {
  cfg.validate();
  return detail::eval_cmd_rec(ctx, c, mu, cfg, stats);
}

// Projection of a memory distribution onto one declared variable.
inline SubDist project_var(const Context& ctx, const SubDist& mu,
                           const std::string& var) {
  int slot = ctx.index_of(var);
  if (slot < 0) fail(Err::kUnboundVariable, "unbound variable: " + var);
  return pushforward(mu, [&](const Outcome& mo) {
    return memory_of(mo)[static_cast<std::size_t>(slot)];
  });
}

struct OracleReport {
  std::size_t output_support_size = 0;
  double residual_mass = 0;
  double dropped_tail = 0;
  double rounding_dust = 0;   // quantum rounding plus pruning dust
  double output_mass = 0;
  bool fuel_exhausted = false;  // residual_mass > dust_tol
};

// Runs one program from a concrete input memory and summarizes the losses.
// The full output distribution lands in *out when requested.
inline OracleReport run_program(const Program& prog, const Memory& input,
                                const InterpConfig& cfg,
                                SubDist* out = nullptr) {
  cfg.validate();
  InterpStats stats;
  SubDist result = detail::eval_cmd_rec(
      prog.ctx, prog.body, SubDist::dirac(pack_memory(input)), cfg, &stats);
  OracleReport r;
  r.output_support_size = result.entries().size();
  r.residual_mass = stats.residual_mass;
  r.dropped_tail = stats.dropped_tail;
  r.rounding_dust = stats.rounding_dust + result.dust();
  r.output_mass = result.total_mass();
  r.fuel_exhausted = r.residual_mass > cfg.dust_tol;
  if (out) *out = std::move(result);
  return r;
}

struct LosslessReport {
  bool pass = true;
  double worst_deficit = 0;   // max over inputs of (input mass - output mass)
  std::size_t worst_input = 0;
};

// Empirical evidence that a program preserves mass on the given inputs.
// Evidence, not proof: certificates that rely on it record an assumption.
inline LosslessReport lossless_check(const Program& prog,
                                     const std::vector<Memory>& inputs,
                                     const InterpConfig& cfg) {
  cfg.validate();
  LosslessReport r;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    SubDist out;
    run_program(prog, inputs[i], cfg, &out);
    double deficit = 1.0 - out.total_mass();
    if (deficit > r.worst_deficit) {
      r.worst_deficit = deficit;
      r.worst_input = i;
    }
  }
  r.pass = r.worst_deficit <= cfg.dust_tol;
  return r;
}

}  // namespace spanlift
