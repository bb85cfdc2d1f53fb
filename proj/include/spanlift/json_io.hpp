// Copyright 2026 The spanlift Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON encodings for the on-disk formats: sub-distributions, proof files,
// certificates, oracle and accountant reports. Programs and assertions are
// stored as surface syntax and re-parsed on load, so a proof file is
// readable (and editable) with ordinary tools. Proof files pin the exact
// program sources they talk about through a SHA-256 digest.

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spanlift/accountant.hpp"
#include "spanlift/dist.hpp"
#include "spanlift/divergences.hpp"
#include "spanlift/error.hpp"
#include "spanlift/interp.hpp"
#include "spanlift/lang.hpp"
#include "spanlift/logic.hpp"
#include "spanlift/numerics.hpp"
#include "spanlift/rational.hpp"

namespace spanlift {

using Json = nlohmann::json;

inline constexpr char kToolVersion[] = "0.1.0";

// Doubles arriving through JSON are snapped to this pitch so hand-written
// decimal fixtures land on the same outcomes as the interpreter's grids.
// Exact values can always be spelled as "num/den" strings instead.
inline const Rat kJsonQuantum{1, 1000000000};

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), enough to fingerprint program sources.

namespace jsondetail {

inline std::uint32_t rotr(std::uint32_t x, int n) {
  return (x >> n) | (x << (32 - n));
}

inline std::string sha256_hex(const std::string& data) {
  static const std::uint32_t kRound[64] = {
      0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
      0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
      0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
      0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
      0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
      0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
      0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
      0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
      0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
      0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
      0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
  std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  std::vector<unsigned char> msg(data.begin(), data.end());
  const std::uint64_t bitlen = static_cast<std::uint64_t>(msg.size()) * 8;
  msg.push_back(0x80);
  while (msg.size() % 64 != 56) msg.push_back(0);
  for (int i = 7; i >= 0; --i)
    msg.push_back(static_cast<unsigned char>((bitlen >> (8 * i)) & 0xff));
  for (std::size_t off = 0; off < msg.size(); off += 64) {
    std::uint32_t w[64];
    for (int t = 0; t < 16; ++t)
      w[t] = (static_cast<std::uint32_t>(msg[off + 4 * t]) << 24) |
             (static_cast<std::uint32_t>(msg[off + 4 * t + 1]) << 16) |
             (static_cast<std::uint32_t>(msg[off + 4 * t + 2]) << 8) |
             static_cast<std::uint32_t>(msg[off + 4 * t + 3]);
    for (int t = 16; t < 64; ++t) {
      const std::uint32_t s0 =
          rotr(w[t - 15], 7) ^ rotr(w[t - 15], 18) ^ (w[t - 15] >> 3);
      const std::uint32_t s1 =
          rotr(w[t - 2], 17) ^ rotr(w[t - 2], 19) ^ (w[t - 2] >> 10);
      w[t] = w[t - 16] + s0 + w[t - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
    std::uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int t = 0; t < 64; ++t) {
      const std::uint32_t big1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const std::uint32_t ch = (e & f) ^ (~e & g);
      const std::uint32_t t1 = hh + big1 + ch + kRound[t] + w[t];
      const std::uint32_t big0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      const std::uint32_t t2 = big0 + maj;
      hh = g;
      g = f;
      f = e;
      e = d + t1;
      d = c;
      c = b;
      b = a;
      a = t1 + t2;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
    h[5] += f;
    h[6] += g;
    h[7] += hh;
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (std::uint32_t word : h)
    for (int i = 7; i >= 0; --i) out += hex[(word >> (4 * i)) & 0xf];
  return out;
}

[[noreturn]] inline void bad(const std::string& where, const std::string& what) {
  fail(Err::kSyntaxError, where + ": " + what);
}

inline const Json& field(const Json& j, const char* key,
                         const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing key '") + key + "'");
  return *it;
}

inline double num_field(const Json& j, const char* key,
                        const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number()) bad(where, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

inline std::string str_field(const Json& j, const char* key,
                             const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_string()) bad(where, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace jsondetail

inline std::string sha256_hex(const std::string& data) {
  return jsondetail::sha256_hex(data);
}

// ---------------------------------------------------------------------------
// Files and raw JSON.

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::kIoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(Err::kIoError, "read failed on " + path);
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::kIoError, "cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) fail(Err::kIoError, "write failed on " + path);
}

inline Json parse_json_text(const std::string& text, const std::string& where) {
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded())
    fail(Err::kSyntaxError, where + ": not valid JSON");
  return j;
}

inline Json load_json_file(const std::string& path) {
  return parse_json_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Scalars: extended reals and rationals.

inline Json ext_to_json(const ExtReal& x) {
  if (x.is_pos_inf()) return Json("inf");
  if (x.is_neg_inf()) return Json("-inf");
  return Json(x.value());
}

inline ExtReal ext_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return ExtReal::pos_inf();
    if (s == "-inf") return ExtReal::neg_inf();
    jsondetail::bad(where, "expected a number, \"inf\", or \"-inf\"");
  }
  if (!j.is_number()) jsondetail::bad(where, "expected an extended real");
  return ExtReal(j.get<double>());
}

inline Rat rat_from_string(const std::string& s, const std::string& where) {
  std::int64_t num = 0, den = 1;
  std::size_t slash = s.find('/');
  try {
    std::size_t used = 0;
    num = std::stoll(s.substr(0, slash), &used);
    if (used != (slash == std::string::npos ? s.size() : slash))
      jsondetail::bad(where, "bad rational '" + s + "'");
    if (slash != std::string::npos) {
      den = std::stoll(s.substr(slash + 1), &used);
      if (used != s.size() - slash - 1)
        jsondetail::bad(where, "bad rational '" + s + "'");
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    jsondetail::bad(where, "bad rational '" + s + "'");
  }
  return Rat(num, den);
}

inline Rat rat_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) return rat_from_string(j.get<std::string>(), where);
  if (j.is_number_integer()) return Rat(j.get<std::int64_t>());
  if (j.is_number()) return round_to_quantum(j.get<double>(), kJsonQuantum);
  jsondetail::bad(where, "expected a rational (number or \"num/den\")");
}

// ---------------------------------------------------------------------------
// Outcomes and sub-distributions.

inline Json outcome_to_json(const Outcome& o) {
  if (o.is_bool()) return Json(o.as_bool());
  if (o.is_int()) return Json(o.as_int());
  if (o.is_real()) return Json(o.as_real().to_string());
  Json arr = Json::array();
  for (const Outcome& k : o.as_tuple()) arr.push_back(outcome_to_json(k));
  return arr;
}

// Booleans and integers map onto themselves; strings carry exact rationals;
// bare floats are snapped to the JSON quantum; arrays become tuples.
inline Outcome outcome_from_json(const Json& j, const std::string& where) {
  if (j.is_boolean()) return Outcome::of_bool(j.get<bool>());
  if (j.is_number_integer()) return Outcome::of_int(j.get<std::int64_t>());
  if (j.is_string() || j.is_number()) return Outcome::of_real(rat_from_json(j, where));
  if (j.is_array()) {
    std::vector<Outcome> kids;
    kids.reserve(j.size());
    for (const Json& k : j) kids.push_back(outcome_from_json(k, where));
    return Outcome::of_tuple(std::move(kids));
  }
  jsondetail::bad(where, "expected an outcome");
}

inline Json dist_to_json(const SubDist& d) {
  Json support = Json::array();
  for (const auto& [o, m] : d.entries())
    support.push_back(Json{{"outcome", outcome_to_json(o)}, {"mass", m}});
  Json j{{"support", std::move(support)}};
  if (d.dust() > 0) j["dust"] = d.dust();
  return j;
}

inline SubDist dist_from_json(const Json& j, const std::string& where) {
  const Json& support = jsondetail::field(j, "support", where);
  if (!support.is_array()) jsondetail::bad(where, "'support' must be an array");
  std::vector<SubDist::Entry> entries;
  entries.reserve(support.size());
  for (const Json& row : support) {
    const Json& o = jsondetail::field(row, "outcome", where);
    entries.emplace_back(outcome_from_json(o, where),
                         jsondetail::num_field(row, "mass", where));
  }
  double dust = 0;
  if (j.contains("dust")) {
    if (!j["dust"].is_number()) jsondetail::bad(where, "'dust' must be a number");
    dust = j["dust"].get<double>();
  }
  return SubDist::from_entries(std::move(entries), dust);
}

inline SubDist load_dist_file(const std::string& path) {
  return dist_from_json(load_json_file(path), path);
}

// ---------------------------------------------------------------------------
// Privacy flavors.

inline Json flavor_to_json(const Flavor& f) {
  switch (f.kind) {
    case FlavorKind::kDP:
      return Json{{"kind", "dp"}, {"eps", f.eps}, {"delta", f.delta}};
    case FlavorKind::kRDP:
      return Json{{"kind", "rdp"}, {"alpha", f.alpha}, {"rho", ext_to_json(f.rho)}};
    case FlavorKind::kZCDP:
      return Json{{"kind", "zcdp"}, {"xi", f.xi}, {"rho", ext_to_json(f.rho)}};
    case FlavorKind::kTCDP:
      return Json{{"kind", "tcdp"}, {"omega", f.omega}, {"rho", ext_to_json(f.rho)}};
  }
  fail(Err::kInvalidParam, "unknown flavor kind");
}

inline Flavor flavor_from_json(const Json& j, const std::string& where) {
  const std::string kind = jsondetail::str_field(j, "kind", where);
  Flavor f;
  if (kind == "dp") {
    f = Flavor::dp(jsondetail::num_field(j, "eps", where),
                   jsondetail::num_field(j, "delta", where));
  } else if (kind == "rdp") {
    f = Flavor::rdp(jsondetail::num_field(j, "alpha", where),
                    ext_from_json(jsondetail::field(j, "rho", where), where));
  } else if (kind == "zcdp") {
    f = Flavor::zcdp(jsondetail::num_field(j, "xi", where),
                     ext_from_json(jsondetail::field(j, "rho", where), where));
  } else if (kind == "tcdp") {
    f = Flavor::tcdp(jsondetail::num_field(j, "omega", where),
                     ext_from_json(jsondetail::field(j, "rho", where), where));
  } else {
    jsondetail::bad(where, "unknown flavor kind '" + kind + "'");
  }
  f.validate();
  return f;
}

// ---------------------------------------------------------------------------
// Contexts, commands, and assertions travel as surface syntax.

inline std::string ctx_to_text(const Context& ctx) {
  std::string out = "vars {";
  for (const auto& [name, ty] : ctx.vars)
    out += " " + name + " : " + ty_name(ty) + ";";
  out += " }";
  return out;
}

inline Context ctx_from_text(const std::string& text) {
  return parse_program(text + "\nskip;").ctx;
}

inline std::string cmd_to_text(const Cmd& c) {
  std::string out;
  print_cmd_into(c, out, "");
  return out;
}

inline Cmd cmd_from_text(const std::string& src, const std::string& ctx_text) {
  return parse_program(ctx_text + "\n" + src).body;
}

// ---------------------------------------------------------------------------
// Judgments and derivations.

inline Json side_to_json(const SideParams& s) {
  Json j = Json::object();
  if (!s.nums.empty()) {
    Json nums = Json::object();
    for (const auto& [k, v] : s.nums) nums[k] = v;
    j["nums"] = std::move(nums);
  }
  if (s.variant) j["variant"] = print_expr(*s.variant);
  if (s.invariant) j["invariant"] = print_assertion(*s.invariant);
  if (!s.label.empty()) j["label"] = s.label;
  return j;
}

// There is no stand-alone expression parser, so the variant is smuggled
// through a throwaway relational assertion and unwrapped again.
inline Expr expr_from_text(const std::string& src, const Context& ctx,
                           const std::string& where) {
  Assertion a = parse_assertion("(" + src + ")@1 == 0", ctx);
  if (a.kind != AssnKind::kRel) jsondetail::bad(where, "bad expression " + src);
  return a.left;
}

inline SideParams side_from_json(const Json& j, const Context& ctx,
                                 const std::string& where) {
  SideParams s;
  if (j.is_null()) return s;
  if (!j.is_object()) jsondetail::bad(where, "'side' must be an object");
  if (j.contains("nums")) {
    const Json& nums = j["nums"];
    if (!nums.is_object()) jsondetail::bad(where, "'nums' must be an object");
    for (auto it = nums.begin(); it != nums.end(); ++it) {
      if (!it.value().is_number())
        jsondetail::bad(where, "side number '" + it.key() + "' must be numeric");
      s.nums[it.key()] = it.value().get<double>();
    }
  }
  if (j.contains("variant"))
    s.variant = expr_from_text(jsondetail::str_field(j, "variant", where), ctx,
                               where);
  if (j.contains("invariant"))
    s.invariant =
        parse_assertion(jsondetail::str_field(j, "invariant", where), ctx);
  if (j.contains("label")) s.label = jsondetail::str_field(j, "label", where);
  return s;
}

inline Json judgment_to_json(const Judgment& jd) {
  return Json{{"ctx", ctx_to_text(jd.ctx)},
              {"left", cmd_to_text(jd.left)},
              {"right", cmd_to_text(jd.right)},
              {"pre", print_assertion(jd.pre)},
              {"post", print_assertion(jd.post)},
              {"flavor", flavor_to_json(jd.flavor)}};
}

inline Judgment judgment_from_json(const Json& j, const std::string& where) {
  const std::string ctx_text = jsondetail::str_field(j, "ctx", where);
  Judgment jd;
  jd.ctx = ctx_from_text(ctx_text);
  jd.left = cmd_from_text(jsondetail::str_field(j, "left", where), ctx_text);
  jd.right = cmd_from_text(jsondetail::str_field(j, "right", where), ctx_text);
  jd.pre = parse_assertion(jsondetail::str_field(j, "pre", where), jd.ctx);
  jd.post = parse_assertion(jsondetail::str_field(j, "post", where), jd.ctx);
  jd.flavor = flavor_from_json(jsondetail::field(j, "flavor", where), where);
  return jd;
}

inline Json derivation_to_json(const Derivation& d) {
  Json premises = Json::array();
  for (const Derivation& p : d.premises) premises.push_back(derivation_to_json(p));
  Json j{{"rule", d.rule},
         {"conclusion", judgment_to_json(d.conclusion)},
         {"premises", std::move(premises)}};
  Json side = side_to_json(d.side);
  if (!side.empty()) j["side"] = std::move(side);
  return j;
}

inline Derivation derivation_from_json(const Json& j, const std::string& where) {
  Derivation d;
  d.rule = jsondetail::str_field(j, "rule", where);
  d.conclusion =
      judgment_from_json(jsondetail::field(j, "conclusion", where), where);
  if (j.contains("side"))
    d.side = side_from_json(j["side"], d.conclusion.ctx, where);
  if (j.contains("premises")) {
    const Json& ps = j["premises"];
    if (!ps.is_array()) jsondetail::bad(where, "'premises' must be an array");
    d.premises.reserve(ps.size());
    for (const Json& p : ps) d.premises.push_back(derivation_from_json(p, where));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Proof files: a derivation plus content-addressed program references.

struct ProgramRef {
  std::string path;    // relative to the proof file's directory
  std::string sha256;  // digest of the program source bytes
};

struct ProofFile {
  ProgramRef left;
  ProgramRef right;
  Derivation derivation;
};

inline Json proof_to_json(const ProofFile& pf) {
  auto ref = [](const ProgramRef& r) {
    return Json{{"path", r.path}, {"sha256", r.sha256}};
  };
  return Json{{"format", "spanlift-proof"},
              {"version", 1},
              {"programs", Json{{"left", ref(pf.left)}, {"right", ref(pf.right)}}},
              {"derivation", derivation_to_json(pf.derivation)}};
}

inline ProofFile proof_from_json(const Json& j, const std::string& where) {
  using jsondetail::field;
  using jsondetail::str_field;
  if (j.contains("format") && j["format"] != "spanlift-proof")
    jsondetail::bad(where, "not a spanlift proof file");
  const Json& programs = field(j, "programs", where);
  auto ref = [&](const char* key) {
    const Json& r = field(programs, key, where);
    return ProgramRef{str_field(r, "path", where), str_field(r, "sha256", where)};
  };
  ProofFile pf;
  pf.left = ref("left");
  pf.right = ref("right");
  pf.derivation = derivation_from_json(field(j, "derivation", where), where);
  return pf;
}

inline std::string dir_of(const std::string& path) {
  std::size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

// Loads and verifies one referenced program: the digest must match the bytes
// on disk, and the source must parse and typecheck.
inline Program load_program_ref(const ProgramRef& ref,
                                const std::string& base_dir) {
  const std::string path =
      ref.path.empty() || ref.path.front() == '/' ? ref.path
                                                  : base_dir + "/" + ref.path;
  const std::string src = read_text_file(path);
  const std::string digest = sha256_hex(src);
  if (digest != ref.sha256)
    fail(Err::kIoError, path + ": sha256 mismatch (file " + digest +
                            ", proof expects " + ref.sha256 + ")");
  Program p = parse_program(src);
  typecheck_program(p);
  return p;
}

// ---------------------------------------------------------------------------
// Certificates and reports.

inline Json certificate_to_json(const Certificate& c, bool strict) {
  Json j{{"verdict", c.accepted ? "ACCEPTED" : "REJECTED"},
         {"strict", strict},
         {"assumptions", c.assumptions},
         {"extensions", c.extensions},
         {"tool_version", kToolVersion}};
  j["budget"] = c.accepted ? flavor_to_json(c.final_budget) : Json(nullptr);
  j["reject"] = c.accepted ? Json(nullptr)
                           : Json{{"path", c.reject_path},
                                  {"code", err_name(c.reject_code)},
                                  {"detail", c.reject_detail}};
  return j;
}

inline Json sup_certificate_to_json(const SupCertificate& c) {
  return Json{{"value", ext_to_json(c.value)},
              {"argmax_alpha", ext_to_json(c.argmax_alpha)},
              {"grid_points", c.grid_points},
              {"refined", c.refined},
              {"bracket_lo", c.bracket_lo},
              {"bracket_hi", c.bracket_hi}};
}

inline const char* family_name(DivFamily f) {
  switch (f) {
    case DivFamily::kDp: return "dp";
    case DivFamily::kRenyi: return "renyi";
    case DivFamily::kZcdp: return "zcdp";
    case DivFamily::kTcdp: return "tcdp";
  }
  fail(Err::kInvalidParam, "unknown divergence family");
}

inline const char* family_param_key(DivFamily f) {
  switch (f) {
    case DivFamily::kDp: return "eps";
    case DivFamily::kRenyi: return "alpha";
    case DivFamily::kZcdp: return "xi";
    case DivFamily::kTcdp: return "omega";
  }
  fail(Err::kInvalidParam, "unknown divergence family");
}

inline Json divergence_record(const DivergenceSpec& spec, const ExtReal& value,
                              const std::optional<SupCertificate>& cert) {
  return Json{{"family", family_name(spec.family)},
              {"params", Json{{family_param_key(spec.family), spec.param}}},
              {"value", ext_to_json(value)},
              {"certificate",
               cert ? sup_certificate_to_json(*cert) : Json(nullptr)}};
}

inline Json oracle_report_to_json(const OracleReport& r) {
  return Json{{"output_support_size", r.output_support_size},
              {"residual_mass", r.residual_mass},
              {"rounding_dust", r.rounding_dust},
              {"dropped_tail", r.dropped_tail},
              {"output_mass", r.output_mass},
              {"fuel_exhausted", r.fuel_exhausted}};
}

inline Json validation_report_to_json(const ValidationReport& r) {
  return Json{{"pass", r.pass},
              {"max_observed", ext_to_json(r.max_observed)},
              {"budget", ext_to_json(r.budget)},
              {"slack", r.slack},
              {"worst_pair", r.worst_pair},
              {"observed", [&] {
                 Json arr = Json::array();
                 for (double x : r.observed) arr.push_back(ext_to_json(ExtReal(x)));
                 return arr;
               }()}};
}

// ---------------------------------------------------------------------------
// Input pairs for the empirical oracle.

inline Outcome coerce_outcome(const Json& v, const Ty& ty,
                              const std::string& where) {
  if (ty.is_vector()) {
    if (!v.is_array() || static_cast<std::int64_t>(v.size()) != ty.dim)
      jsondetail::bad(where, "expected an array of length " +
                                 std::to_string(ty.dim));
    std::vector<Outcome> kids;
    kids.reserve(v.size());
    for (const Json& k : v) kids.push_back(coerce_outcome(k, ty.element(), where));
    return Outcome::of_tuple(std::move(kids));
  }
  switch (ty.base) {
    case Base::kBool:
      if (!v.is_boolean()) jsondetail::bad(where, "expected a boolean");
      return Outcome::of_bool(v.get<bool>());
    case Base::kInt:
      if (!v.is_number_integer()) jsondetail::bad(where, "expected an integer");
      return Outcome::of_int(v.get<std::int64_t>());
    case Base::kReal:
      return Outcome::of_real(rat_from_json(v, where));
  }
  fail(Err::kInvalidParam, "unknown base type");
}

inline Memory memory_from_json(const Json& j, const Context& ctx,
                               const std::string& where) {
  if (!j.is_object()) jsondetail::bad(where, "memory must be an object");
  Memory m = zero_memory(ctx);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const int idx = ctx.index_of(it.key());
    if (idx < 0) jsondetail::bad(where, "unknown variable '" + it.key() + "'");
    m[static_cast<std::size_t>(idx)] =
        coerce_outcome(it.value(), ctx.vars[static_cast<std::size_t>(idx)].second,
                       where + ": " + it.key());
  }
  return m;
}

inline Json memory_to_json(const Memory& m, const Context& ctx) {
  Json j = Json::object();
  for (std::size_t i = 0; i < ctx.vars.size(); ++i)
    j[ctx.vars[i].first] = outcome_to_json(m[i]);
  return j;
}

inline std::vector<std::pair<Memory, Memory>> input_pairs_from_json(
    const Json& j, const Context& ctx, const std::string& where) {
  const Json& pairs = jsondetail::field(j, "pairs", where);
  if (!pairs.is_array()) jsondetail::bad(where, "'pairs' must be an array");
  std::vector<std::pair<Memory, Memory>> out;
  out.reserve(pairs.size());
  for (const Json& p : pairs)
    out.emplace_back(
        memory_from_json(jsondetail::field(p, "left", where), ctx, where),
        memory_from_json(jsondetail::field(p, "right", where), ctx, where));
  return out;
}

inline Json input_pairs_to_json(
    const std::vector<std::pair<Memory, Memory>>& pairs, const Context& ctx) {
  Json arr = Json::array();
  for (const auto& [l, r] : pairs)
    arr.push_back(Json{{"left", memory_to_json(l, ctx)},
                       {"right", memory_to_json(r, ctx)}});
  return Json{{"pairs", std::move(arr)}};
}

// ---------------------------------------------------------------------------
// Accountant plans and reports.

inline Json plan_to_json(const CompositionPlan& p) {
  Json steps = Json::array();
  for (const PrivacyBudget& s : p.steps) steps.push_back(flavor_to_json(s));
  return Json{{"strategy", strategy_name(p.strategy)},
              {"delta", p.delta},
              {"alpha", p.alpha},
              {"steps", std::move(steps)}};
}

inline CompositionPlan plan_from_json(const Json& j, const std::string& where) {
  CompositionPlan p;
  const std::string name = jsondetail::str_field(j, "strategy", where);
  bool found = false;
  for (auto s : {CompositionPlan::Strategy::kNaiveDp,
                 CompositionPlan::Strategy::kAdvancedDp,
                 CompositionPlan::Strategy::kZcdpThenConvert,
                 CompositionPlan::Strategy::kRdpThenConvert}) {
    if (name == strategy_name(s)) {
      p.strategy = s;
      found = true;
    }
  }
  if (!found) jsondetail::bad(where, "unknown strategy '" + name + "'");
  if (j.contains("delta")) p.delta = jsondetail::num_field(j, "delta", where);
  if (j.contains("alpha")) p.alpha = jsondetail::num_field(j, "alpha", where);
  const Json& steps = jsondetail::field(j, "steps", where);
  if (!steps.is_array()) jsondetail::bad(where, "'steps' must be an array");
  for (const Json& s : steps) p.steps.push_back(flavor_from_json(s, where));
  return p;
}

inline Json account_report_to_json(const AccountReport& r) {
  return Json{{"route", r.route},
              {"epsilon", r.budget.eps},
              {"delta", r.budget.delta},
              {"budget", flavor_to_json(r.budget)},
              {"intermediate",
               r.intermediate ? flavor_to_json(*r.intermediate) : Json(nullptr)},
              {"notes", r.notes}};
}

inline Json foldg_to_json(const FoldGComparison& c) {
  return Json{{"k", c.k},
              {"sigma", c.sigma},
              {"delta1", c.delta1},
              {"delta2", c.delta2},
              {"delta_total", c.delta_total},
              {"per_step_epsilon", c.per_step_epsilon},
              {"epsilon_zcdp", c.epsilon_zcdp},
              {"epsilon_zcdp_total", c.epsilon_zcdp_total},
              {"epsilon_adv", c.epsilon_adv},
              {"inequality_asserted", c.inequality_asserted},
              {"zcdp_wins", c.zcdp_wins}};
}

}  // namespace spanlift
