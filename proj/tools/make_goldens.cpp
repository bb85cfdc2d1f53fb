// Copyright 2026 The spanlift Authors
// SPDX-License-Identifier: Apache-2.0
//
// Regenerates the shipped example corpus: three checked derivations with
// their programs, two Bernoulli fixtures, and the oracle input pairs.
// Every derivation is built through apply_rule itself and re-checked (both
// directly and after a JSON round trip) before anything lands on disk, so
// a corpus that fails to verify never gets written.
//
// Usage: make_goldens [output-root]   (default: examples)

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "spanlift/spanlift.hpp"

namespace {

using namespace spanlift;

// ---------------------------------------------------------------------------
// Small derivation builders. Conclusions always come from apply_rule, never
// by hand, so the emitted trees replay bit-identically in the checker.

Derivation node(const std::string& rule, std::vector<Derivation> prem,
                SideParams side, const Judgment& shape) {
  Derivation d;
  d.rule = rule;
  d.premises = std::move(prem);
  d.side = std::move(side);
  std::vector<Judgment> pj;
  pj.reserve(d.premises.size());
  for (const auto& p : d.premises) pj.push_back(p.conclusion);
  d.conclusion = apply_rule(rule, pj, d.side, shape);
  return d;
}

Judgment jshape(const Context& ctx, const Cmd& l, const Cmd& r, Assertion pre,
                Assertion post, const Flavor& f) {
  Judgment j;
  j.ctx = ctx;
  j.left = l;
  j.right = r;
  j.pre = std::move(pre);
  j.post = std::move(post);
  j.flavor = f;
  return j;
}

Derivation assn_node(const Context& ctx, const Cmd& s, Assertion post,
                     const Flavor& like) {
  return node("assn", {}, {},
              jshape(ctx, s, s, Assertion::truth(), std::move(post), like));
}

Derivation mech_node(const Context& ctx, const Cmd& s, const std::string& rule,
                     Assertion pre, Assertion post, const Flavor& like) {
  return node(rule, {}, {},
              jshape(ctx, s, s, std::move(pre), std::move(post), like));
}

Derivation weak_node(Derivation premise, Assertion pre, Assertion post,
                     const Flavor& grade) {
  Judgment shape = premise.conclusion;
  shape.pre = std::move(pre);
  shape.post = std::move(post);
  shape.flavor = grade;
  std::vector<Derivation> prem;
  prem.push_back(std::move(premise));
  return node("weak", std::move(prem), {}, shape);
}

Derivation seq_node(Derivation a, Derivation b) {
  Judgment shape = a.conclusion;  // only the context matters here
  std::vector<Derivation> prem;
  prem.push_back(std::move(a));
  prem.push_back(std::move(b));
  return node("seq", std::move(prem), {}, shape);
}

Derivation case_node(Derivation a, Derivation b) {
  Judgment shape = a.conclusion;
  std::vector<Derivation> prem;
  prem.push_back(std::move(a));
  prem.push_back(std::move(b));
  return node("case", std::move(prem), {}, shape);
}

// Splits a right-nested statement sequence into its statements.
std::vector<const Cmd*> stmts_of(const Cmd& body) {
  std::vector<const Cmd*> out;
  const Cmd* c = &body;
  while (c->kind == Cmd::Kind::kSeq) {
    out.push_back(&c->kids[0]);
    c = &c->kids[1];
  }
  out.push_back(c);
  return out;
}

Assertion rel_int(const std::string& var, CmpOp op, std::int64_t k) {
  return Assertion::rel(Expr::of_var(var), op, Expr::of_int(k));
}

// ---------------------------------------------------------------------------
// AttMean: two-record mean with one Gaussian release.
//
// The loop is deterministic, so it runs at the unit grade; the noise step
// pays alpha r^2 / 2 sigma^2 with r = 1/2 and sigma^2 = 4 at alpha = 2,
// which lands the whole program at RDP(2, 1/16).

const char kAttMeanSrc[] =
    "vars {\n"
    "  x : real[2];\n"
    "  i : int;\n"
    "  y : real;\n"
    "  z : real;\n"
    "  w : real;\n"
    "}\n"
    "i <- 0;\n"
    "y <- 0.0;\n"
    "while i < 2 bound 2 {\n"
    "  y <- y + x[i];\n"
    "  i <- i + 1;\n"
    "}\n"
    "z <- y / 2.0;\n"
    "w <-$ gauss(z, 4.0);\n";

// One record may shift by up to 1; the other is pinned.
const char kAttMeanAdj[] =
    "(abs(x[0]@1 - x[0]@2) <= 1.0 && x[1]@1 == x[1]@2) || "
    "(x[0]@1 == x[0]@2 && abs(x[1]@1 - x[1]@2) <= 1.0)";

// Loop invariant: runs advance in lockstep and the partial sums are equal
// until the differing record is consumed, after which they sit within 1.
const char kAttMeanTheta[] =
    "i@1 == i@2 && ("
    "(abs(x[0]@1 - x[0]@2) <= 1.0 && x[1]@1 == x[1]@2 && "
    "((i@1 == 0 && y@1 == y@2) || (i@1 >= 1 && abs(y@1 - y@2) <= 1.0)))"
    " || "
    "(x[0]@1 == x[0]@2 && abs(x[1]@1 - x[1]@2) <= 1.0 && "
    "((i@1 <= 1 && y@1 == y@2) || (i@1 >= 2 && abs(y@1 - y@2) <= 1.0)))"
    ")";

Derivation build_attmean(const Program& prog) {
  const Context& ctx = prog.ctx;
  const Flavor rd = Flavor::rdp(2, ExtReal(0.0));
  auto ss = stmts_of(prog.body);  // i<-0; y<-0; while; z<-y/2; w<-$gauss
  const Cmd& wh = *ss[2];
  auto bs = stmts_of(wh.kids[0]);  // y <- y + x[i]; i <- i + 1

  Assertion theta = parse_assertion(kAttMeanTheta, ctx);

  std::vector<Derivation> loop_premises;
  for (std::int64_t k = 0; k < 2; ++k) {
    Assertion want_pre = Assertion::a_and(
        Assertion::a_and(theta, rel_int("i", CmpOp::kEq, k)),
        rel_int("i", CmpOp::kLe, 2));
    Assertion want_post =
        Assertion::a_and(theta, rel_int("i", CmpOp::kGt, k));
    Derivation nbi = assn_node(ctx, *bs[1], want_post, rd);
    Derivation nby = assn_node(ctx, *bs[0], nbi.conclusion.pre, rd);
    Derivation body = seq_node(std::move(nby), std::move(nbi));
    loop_premises.push_back(
        weak_node(std::move(body), want_pre, want_post, Flavor::rdp(2, ExtReal(0.0))));
  }

  SideParams sp;
  sp.nums["n"] = 2;
  sp.variant = Expr::of_var("i");
  sp.invariant = theta;
  Derivation loop = node("while", std::move(loop_premises), sp,
                         jshape(ctx, wh, wh, Assertion::truth(),
                                Assertion::truth(), rd));

  // Noise step: |z<1> - z<2>| <= 1/2 against gauss(z, 4).
  Derivation mech = mech_node(ctx, *ss[4], "rdp-gauss",
                              parse_assertion("abs(z@1 - z@2) <= 0.5", ctx),
                              parse_assertion("w@1 == w@2", ctx), rd);
  Derivation nz = assn_node(ctx, *ss[3], mech.conclusion.pre, rd);
  Derivation tail = seq_node(std::move(nz), std::move(mech));
  Assertion tail_post = tail.conclusion.post;
  Flavor tail_grade = tail.conclusion.flavor;
  Derivation wtail =
      weak_node(std::move(tail), loop.conclusion.post, tail_post, tail_grade);

  Derivation all = seq_node(std::move(loop), std::move(wtail));
  Derivation ny0 = assn_node(ctx, *ss[1], all.conclusion.pre, rd);
  all = seq_node(std::move(ny0), std::move(all));
  Derivation ni0 = assn_node(ctx, *ss[0], all.conclusion.pre, rd);
  all = seq_node(std::move(ni0), std::move(all));

  return weak_node(std::move(all), parse_assertion(kAttMeanAdj, ctx),
                   parse_assertion("w@1 == w@2", ctx),
                   Flavor::rdp(2, ExtReal(0.0625)));
}

// ---------------------------------------------------------------------------
// Histogram: one record lands in one of three counters, then every counter
// is released through gauss(., 2). Splitting on where the differing record
// lands gives six cases; in each, exactly two counters differ by one, so
// two noisy slots pay rho/2 = 1/4 and the third is free.

const char kHistogramSrc[] =
    "vars {\n"
    "  x : int[1];\n"
    "  y : real[3];\n"
    "  z : real[3];\n"
    "  w : real;\n"
    "}\n"
    "y <- [0.0, 0.0, 0.0];\n"
    "y[x[0]] <- y[x[0]] + 1.0;\n"
    "w <-$ gauss(y[0], 2.0);\n"
    "z[0] <- w;\n"
    "w <-$ gauss(y[1], 2.0);\n"
    "z[1] <- w;\n"
    "w <-$ gauss(y[2], 2.0);\n"
    "z[2] <- w;\n";

Derivation histogram_branch(const Program& prog, int K, int L) {
  const Context& ctx = prog.ctx;
  const Flavor zc = Flavor::zcdp(0, ExtReal(0.0));
  auto ss = stmts_of(prog.body);  // 8 statements

  Assertion phi = parse_assertion("x[0]@1 == " + std::to_string(K) +
                                      " && x[0]@2 == " + std::to_string(L),
                                  ctx);
  // The counter picture after the counting phase: slot K is one higher in
  // run 1, slot L one higher in run 2, the rest agree.
  std::string yf;
  for (int j = 0; j < 3; ++j) {
    if (!yf.empty()) yf += " && ";
    std::string yj = "y[" + std::to_string(j) + "]";
    if (j == K)
      yf += yj + "@1 == (" + yj + " + 1.0)@2";
    else if (j == L)
      yf += "(" + yj + " + 1.0)@1 == " + yj + "@2";
    else
      yf += yj + "@1 == " + yj + "@2";
  }
  Assertion frame0 = Assertion::a_and(phi, parse_assertion(yf, ctx));
  Assertion frame1 = Assertion::a_and(
      frame0, parse_assertion("z[0]@1 == z[0]@2", ctx));
  Assertion frame2 = Assertion::a_and(
      frame1, parse_assertion("z[1]@1 == z[1]@2", ctx));
  const Assertion frames[3] = {frame0, frame1, frame2};

  Assertion weq = parse_assertion("w@1 == w@2", ctx);
  Assertion final_post = parse_assertion("z@1 == z@2", ctx);

  Derivation mechs[3];
  for (int j = 0; j < 3; ++j) {
    std::string yj = "y[" + std::to_string(j) + "]";
    bool noisy = j == K || j == L;
    Assertion atom =
        noisy ? parse_assertion("abs(" + yj + "@1 - " + yj + "@2) <= 1.0", ctx)
              : parse_assertion(yj + "@1 == " + yj + "@2", ctx);
    mechs[j] = mech_node(ctx, *ss[2 + 2 * j],
                         noisy ? "zcdp-gauss" : "zcdp-gauss-eq",
                         Assertion::a_and(atom, frames[j]),
                         Assertion::a_and(weq, frames[j]), zc);
  }

  auto mech_weak = [](Derivation mech, Assertion post) {
    Assertion pre = mech.conclusion.pre;
    Flavor grade = mech.conclusion.flavor;
    return weak_node(std::move(mech), std::move(pre), std::move(post), grade);
  };

  Derivation n8 = assn_node(ctx, *ss[7], final_post, zc);
  Derivation w7 = mech_weak(std::move(mechs[2]), n8.conclusion.pre);
  Derivation n6 = assn_node(ctx, *ss[5], w7.conclusion.pre, zc);
  Derivation w5 = mech_weak(std::move(mechs[1]), n6.conclusion.pre);
  Derivation n4 = assn_node(ctx, *ss[3], w5.conclusion.pre, zc);
  Derivation w3 = mech_weak(std::move(mechs[0]), n4.conclusion.pre);
  Derivation n2 = assn_node(ctx, *ss[1], w3.conclusion.pre, zc);
  Derivation n1 = assn_node(ctx, *ss[0], n2.conclusion.pre, zc);

  Derivation chain = seq_node(std::move(w7), std::move(n8));
  chain = seq_node(std::move(n6), std::move(chain));
  chain = seq_node(std::move(w5), std::move(chain));
  chain = seq_node(std::move(n4), std::move(chain));
  chain = seq_node(std::move(w3), std::move(chain));
  chain = seq_node(std::move(n2), std::move(chain));
  chain = seq_node(std::move(n1), std::move(chain));

  return weak_node(std::move(chain), phi, final_post,
                   Flavor::zcdp(0, ExtReal(0.5)));
}

Derivation build_histogram(const Program& prog) {
  const int kl[6][2] = {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  Derivation root = histogram_branch(prog, kl[0][0], kl[0][1]);
  for (int b = 1; b < 6; ++b)
    root = case_node(std::move(root),
                     histogram_branch(prog, kl[b][0], kl[b][1]));
  return root;
}

// ---------------------------------------------------------------------------
// FoldG: three adaptive Gaussian releases of 1-sensitive queries. Each loop
// iteration pays 1/(2 sigma^2) = 1/8, so the loop closes at zCDP(0, 3/8).

const char kFoldGSrc[] =
    "vars {\n"
    "  D : real[4];\n"
    "  x : real;\n"
    "  z : real;\n"
    "  i : int;\n"
    "}\n"
    "i <- 0;\n"
    "z <- 0.0;\n"
    "while i < 3 bound 3 {\n"
    "  x <- D[i];\n"
    "  z <-$ gauss(x + z, 4.0);\n"
    "  i <- i + 1;\n"
    "}\n";

const char kFoldGAdj[] =
    "abs(D[0]@1 - D[0]@2) <= 1.0 && abs(D[1]@1 - D[1]@2) <= 1.0 && "
    "abs(D[2]@1 - D[2]@2) <= 1.0 && abs(D[3]@1 - D[3]@2) <= 1.0";

Derivation build_foldg(const Program& prog) {
  const Context& ctx = prog.ctx;
  const Flavor zc = Flavor::zcdp(0, ExtReal(0.0));
  auto ss = stmts_of(prog.body);  // i<-0; z<-0; while
  const Cmd& wh = *ss[2];
  auto bs = stmts_of(wh.kids[0]);  // x <- D[i]; z <-$ gauss; i <- i + 1

  Assertion adj = parse_assertion(kFoldGAdj, ctx);
  Assertion theta = parse_assertion(
      std::string(kFoldGAdj) + " && i@1 == i@2 && z@1 == z@2", ctx);
  Assertion zeq = parse_assertion("z@1 == z@2", ctx);
  Assertion sens = parse_assertion("abs((x + z)@1 - (x + z)@2) <= 1.0", ctx);

  std::vector<Derivation> loop_premises;
  for (std::int64_t k = 0; k < 3; ++k) {
    Assertion want_pre = Assertion::a_and(
        Assertion::a_and(theta, rel_int("i", CmpOp::kEq, k)),
        rel_int("i", CmpOp::kLe, 3));
    Assertion want_post =
        Assertion::a_and(theta, rel_int("i", CmpOp::kGt, k));
    // The sampled variable re-synchronizes, so the Gaussian axiom carries
    // the loop bookkeeping as a frame.
    Assertion frame = Assertion::a_and(
        Assertion::a_and(adj, parse_assertion("i@1 == i@2", ctx)),
        rel_int("i", CmpOp::kGe, k));
    Derivation mech = mech_node(ctx, *bs[1], "zcdp-gauss",
                                Assertion::a_and(sens, frame),
                                Assertion::a_and(zeq, frame), zc);
    Derivation ni = assn_node(ctx, *bs[2], want_post, zc);
    Assertion mech_pre = mech.conclusion.pre;
    Flavor mech_grade = mech.conclusion.flavor;
    Derivation wm = weak_node(std::move(mech), std::move(mech_pre),
                              ni.conclusion.pre, mech_grade);
    Derivation nx = assn_node(ctx, *bs[0], wm.conclusion.pre, zc);
    Derivation body =
        seq_node(std::move(nx), seq_node(std::move(wm), std::move(ni)));
    loop_premises.push_back(weak_node(std::move(body), want_pre, want_post,
                                      Flavor::zcdp(0, ExtReal(0.125))));
  }

  SideParams sp;
  sp.nums["n"] = 3;
  sp.variant = Expr::of_var("i");
  sp.invariant = theta;
  Derivation loop = node("while", std::move(loop_premises), sp,
                         jshape(ctx, wh, wh, Assertion::truth(),
                                Assertion::truth(), zc));

  Derivation nz0 = assn_node(ctx, *ss[1], loop.conclusion.pre, zc);
  Derivation all = seq_node(std::move(nz0), std::move(loop));
  Derivation ni0 = assn_node(ctx, *ss[0], all.conclusion.pre, zc);
  all = seq_node(std::move(ni0), std::move(all));

  return weak_node(std::move(all), adj, zeq, Flavor::zcdp(0, ExtReal(0.375)));
}

// ---------------------------------------------------------------------------
// Verification and output.

void verify(const std::string& name, const Derivation& d, const Flavor& want) {
  Certificate c = check_derivation(d);
  if (!c.accepted) {
    std::cerr << name << ": derivation rejected at " << c.reject_path << ": "
              << c.reject_detail << "\n";
    std::exit(1);
  }
  if (!flavor_close(c.final_budget, want)) {
    std::cerr << name << ": budget " << flavor_summary(c.final_budget)
              << " but wanted " << flavor_summary(want) << "\n";
    std::exit(1);
  }
  Json j = derivation_to_json(d);
  Derivation back = derivation_from_json(j, name + " (round trip)");
  Certificate c2 = check_derivation(back);
  if (!c2.accepted) {
    std::cerr << name << ": JSON round trip rejected at " << c2.reject_path
              << ": " << c2.reject_detail << "\n";
    std::exit(1);
  }
  std::cout << name << ": ACCEPTED, budget " << flavor_summary(c.final_budget)
            << ", " << c.assumptions.size() << " assumption(s), "
            << c.extensions.size() << " extension note(s)\n";
}

void write_proof(const std::string& root, const std::string& proof_name,
                 const std::string& program_name,
                 const std::string& program_src, const Derivation& d) {
  write_text_file(root + "/programs/" + program_name, program_src);
  ProofFile pf;
  pf.left = {"../programs/" + program_name, sha256_hex(program_src)};
  pf.right = pf.left;
  pf.derivation = d;
  write_text_file(root + "/proofs/" + proof_name,
                  proof_to_json(pf).dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  std::string root = argc > 1 ? argv[1] : "examples";
  try {
    for (const char* sub : {"/programs", "/proofs", "/dists", "/inputs"})
      std::filesystem::create_directories(root + sub);

    Program attmean = parse_program(kAttMeanSrc);
    typecheck_program(attmean);
    Derivation d_attmean = build_attmean(attmean);
    verify("attmean", d_attmean, Flavor::rdp(2, ExtReal(0.0625)));
    write_proof(root, "attmean_rdp.json", "attmean.pw", kAttMeanSrc,
                d_attmean);

    Program histogram = parse_program(kHistogramSrc);
    typecheck_program(histogram);
    Derivation d_histogram = build_histogram(histogram);
    verify("histogram", d_histogram, Flavor::zcdp(0, ExtReal(0.5)));
    write_proof(root, "histogram_zcdp.json", "histogram.pw", kHistogramSrc,
                d_histogram);

    Program foldg = parse_program(kFoldGSrc);
    typecheck_program(foldg);
    Derivation d_foldg = build_foldg(foldg);
    verify("foldg", d_foldg, Flavor::zcdp(0, ExtReal(0.375)));
    write_proof(root, "foldg_zcdp.json", "foldg.pw", kFoldGSrc, d_foldg);

    // Bernoulli fixtures for the divergence subcommand.
    write_text_file(
        root + "/dists/bern_half.json",
        dist_to_json(SubDist::from_entries({{Outcome::of_bool(true), 0.5},
                                            {Outcome::of_bool(false), 0.5}}))
                .dump(2) +
            "\n");
    write_text_file(
        root + "/dists/bern_quarter.json",
        dist_to_json(SubDist::from_entries({{Outcome::of_bool(true), 0.25},
                                            {Outcome::of_bool(false), 0.75}}))
                .dump(2) +
            "\n");

    // Adjacent dataset pairs for the empirical oracle on foldg.pw: every
    // row moves by at most one.
    Json pairs = Json::array();
    auto pair = [&](Json l, Json r) {
      pairs.push_back(Json{{"left", Json{{"D", std::move(l)}}},
                           {"right", Json{{"D", std::move(r)}}}});
    };
    pair(Json::array({0, 1, 2, 1}), Json::array({1, 1, 2, 1}));
    pair(Json::array({2, 0, 1, 0}), Json::array({1, 1, 2, 0}));
    pair(Json::array({0, 0, 0, 0}), Json::array({0, 0, 0, 0}));
    pair(Json::array({"1/2", 1, "3/2", 2}), Json::array({"3/2", 0, "1/2", 2}));
    Json inputs{{"pre", kFoldGAdj},
                {"post", "z@1 == z@2"},
                {"pairs", std::move(pairs)}};
    write_text_file(root + "/inputs/foldg_pairs.json",
                    inputs.dump(2) + "\n");

    std::cout << "corpus written under " << root << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
