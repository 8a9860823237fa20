// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if any
// criterion fails.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "tvb/tvb.hpp"

using namespace tvb;
using io::Json;

namespace {

using Clock = std::chrono::steady_clock;

std::string sample(const std::string& name) { return std::string(TVB_SAMPLES_DIR) + "/" + name; }

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

Json run_cli(const std::vector<std::string>& args, int& code) {
  std::ostringstream out, err;
  code = cli::dispatch(args, out, err);
  return code == 0 ? io::parse(out.str()) : Json();
}

std::vector<IncidenceData> all_incidences(int objects) {
  std::vector<IncidenceData> out;
  for (int d = 0; d <= objects; ++d) {
    const int dp = objects - d;
    for (unsigned mask = 0; mask < (1u << (d * dp)); ++mask) {
      std::vector<std::pair<int, int>> pairs;
      for (int b = 0; b < d * dp; ++b)
        if (mask >> b & 1u) pairs.emplace_back(b / dp + 1, b % dp + 1);
      out.emplace_back(d, dp, pairs);
    }
  }
  return out;
}

long binomial(int n, int k) {
  long c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// --- criteria ---------------------------------------------------------------

Check murphy_fans() {
  Check c;
  int code = 0;
  Json j = run_cli({"murphy", "fan", "--n", "3"}, code);
  c.expect(code == 0, "murphy fan --n 3 failed");
  if (!c.ok) return c;
  Fan f3 = io::fan_from_json(j);
  c.expect(f3.rays().size() == 8, "n=3 ray count");
  c.expect(f3.max_cones().size() == 12, "n=3 cone count");
  c.expect(is_smooth(f3), "n=3 not unimodular");
  c.expect(!validate_fan(f3), "n=3 fan invalid");
  c.expect(is_complete(f3), "n=3 not complete");
  Json j4 = run_cli({"murphy", "fan", "--n", "4"}, code);
  c.expect(code == 0 && j4["rays"].size() == 20, "n=4 ray count");
  for (int n = 2; n <= 6; ++n) {
    long expected = n + 1;
    for (int k = 3; k <= n; ++k) expected += binomial(n + 1, k);
    c.expect(static_cast<long>(build_murphy_fan(n, FanMode::Materialized).fan().rays().size()) == expected,
             "ray count n=" + std::to_string(n));
  }
  return c;
}

Check membership_oracle() {
  Check c;
  std::size_t total = 0;
  for (int n = 3; n <= 5; ++n) {
    auto h = build_murphy_fan(n, FanMode::Materialized);
    const auto& faces = h.fan().faces();
    const std::size_t rays = h.fan().rays().size();
    std::size_t checked = 0;
    std::vector<std::size_t> pick;
    std::function<void(std::size_t)> go = [&](std::size_t start) {
      if (!pick.empty()) {
        std::vector<RayLabel> labels;
        for (auto r : pick) labels.push_back(h.label_of(r));
        c.expect(cone_membership(n, labels) == (faces.count(RaySet(pick.begin(), pick.end())) == 1),
                 "membership mismatch n=" + std::to_string(n));
        ++checked;
      }
      if (pick.size() == 3) return;
      for (std::size_t r = start; r < rays; ++r) {
        pick.push_back(r);
        go(r + 1);
        pick.pop_back();
      }
    };
    go(0);
    std::size_t expected = rays + rays * (rays - 1) / 2 + rays * (rays - 1) * (rays - 2) / 6;
    c.expect(checked == expected, "subset count n=" + std::to_string(n));
    total += checked;
  }
  if (c.ok) c.detail = std::to_string(total) + " ray subsets checked";
  return c;
}

Check chern_rule() {
  Check c;
  for (int n = 2; n <= 3; ++n) {
    auto h = build_murphy_fan(n, FanMode::Materialized);
    for (const auto& inc : all_incidences(n + 1))
      c.expect(!validate_chern(h.fan(), to_explicit(murphy_chern(inc, h), h)), "exhaustive n=" + std::to_string(n));
  }
  std::mt19937_64 rng(7);
  for (int n = 4; n <= 5; ++n) {
    std::size_t pairs = 0;
    for (int d = 0; d <= n + 1; ++d) {
      const int dp = n + 1 - d;
      std::vector<std::pair<int, int>> inc;
      for (int i = 1; i <= d; ++i)
        for (int k = 1; k <= dp; ++k)
          if (std::bernoulli_distribution(0.4)(rng)) inc.emplace_back(i, k);
      auto report = validate_chern_sampled(MurphyChern(IncidenceData(d, dp, inc), n), 200, 100 + d);
      c.expect(!report.violation, "sampled violation n=" + std::to_string(n));
      pairs += report.pairs_checked;
    }
    c.expect(pairs >= 1000, "fewer than 1000 sampled pairs");
  }
  // the four displayed multisets on Cone(rho_1, rho_2, rho_123)
  const Flag sigma{1, 2, {RayLabel::of(std::vector<int>{1, 2, 3})}};
  auto sorted = [](std::vector<Character> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  c.expect(MurphyChern(IncidenceData(2, 2, {}), 3).characters(sigma) == sorted({{0, 0, 0}, {1, 0, -1}, {0, 1, -1}}),
           "two points");
  c.expect(MurphyChern(IncidenceData(1, 3, {{1, 1}}), 3).characters(sigma) ==
               sorted({{0, 0, 0}, {0, 1, -1}, {1, 1, -2}}),
           "point on line");
  c.expect(MurphyChern(IncidenceData(1, 3, {}), 3).characters(sigma) == sorted({{1, 0, -1}, {0, 1, -1}, {0, 1, -1}}),
           "point off line");
  c.expect(MurphyChern(IncidenceData(0, 4, {}), 3).characters(sigma) == sorted({{1, 0, -1}, {0, 1, -1}, {1, 1, -2}}),
           "two lines");
  return c;
}

Check klyachko_round_trip() {
  Check c;
  const RationalField q;
  IncidenceData inc(2, 1, {{1, 1}});
  auto h = build_murphy_fan(2, FanMode::Materialized);
  Configuration<RationalField> config(q, {{1, 0, 0}, {0, 0, 1}}, {{0, 0, 1}});
  c.expect(check_configuration(config, inc), "configuration does not realize I");
  const auto filt = forced_filtration(h, config);
  auto res = check_compatibility(h.fan(), filt);
  c.expect(res.index() == 0, "forced filtrations incompatible");
  if (!c.ok) return c;
  const auto& a = std::get<0>(res);
  c.expect(a.chern().chars == to_explicit(murphy_chern(inc, h), h).chars, "characters differ from the rule");
  for (const auto& s : a.cones)
    for (auto r : s.cone)
      for (Int j : {0, 1, 2, 3}) {
        Rows<RationalField> vecs;
        for (std::size_t t = 0; t < s.chars.size(); ++t)
          if (pairing(s.chars[t], h.fan().ray(r)) >= j) vecs.push_back(s.basis[t]);
        c.expect(Subspace<RationalField>::span(q, 3, vecs) == filt.at(r, j), "basis does not reproduce filtration");
      }
  return c;
}

Check moduli_vs_incidence() {
  Check c;
  int code = 0;
  Json r2 = run_cli({"murphy", "verify", "--incidence", sample("pair.json"), "--field", "2"}, code);
  c.expect(code == 0 && r2["moduli_count"] == 84 && r2["incidence_count"] == 84, "pair over F_2 is not 84");
  Json r3 = run_cli({"murphy", "verify", "--incidence", sample("pair.json"), "--field", "3"}, code);
  c.expect(code == 0 && r3["moduli_count"] == 468 && r3["incidence_count"] == 468, "pair over F_3 is not 468");
  std::size_t swept = 0;
  for (int objects = 2; objects <= 5; ++objects)
    for (const auto& inc : all_incidences(objects)) {
      auto r = verify_equivalence(inc, 2, {}, objects == 2);
      c.expect(r.equal, "sweep mismatch");
      ++swept;
    }
  c.detail = c.ok ? std::to_string(swept) + " incidence data swept" : c.detail;
  return c;
}

Check audits() {
  Check c;
  for (const auto& inc : all_incidences(4))
    c.expect(!audit_pairwise(make_murphy_instance(inc, FanMode::Materialized)), "n=3 audit");
  c.expect(!audit_pairwise(make_murphy_instance(fano_incidence())), "n=13 audit");
  c.expect(binomial(14, 3) == 364, "triple count");
  return c;
}

Check fano() {
  Check c;
  auto f2 = enumerate_c_i(fano_incidence(), 2);
  c.expect(!f2.empty(), "no Fano configuration over F_2");
  c.expect(f2.size() == 168, "expected 168 labelled Fano planes");
  if (!f2.empty()) std::cout << "        witness over F_2: " << io::configuration_to_json(f2.front()).dump() << "\n";
  c.expect(enumerate_c_i(fano_incidence(), 3).empty(), "Fano configuration over F_3");
  return c;
}

Check divisors() {
  Check c;
  for (std::size_t n = 1; n <= 5; ++n) {
    auto g = class_group(projective_fan(n));
    c.expect(g.free_rank == 1 && g.torsion.empty(), "Cl(P^" + std::to_string(n) + ")");
  }
  c.expect(class_group(build_murphy_fan(3, FanMode::Materialized).fan()).free_rank == 5, "Cl(X_3)");
  Fan p112(2, {{1, 0}, {0, 1}, {-1, -2}}, {{0, 1}, {1, 2}, {2, 0}});
  TDivisor d;
  for (std::size_t r = 0; r < 3; ++r) d.coeffs.push_back(p112.ray(r) == LatticeVector{1, 0} ? 1 : 0);
  auto one = is_cartier(p112, d);
  c.expect(std::holds_alternative<NotCartier>(one), "D_(1,0) reported Cartier");
  if (auto* nc = std::get_if<NotCartier>(&one))
    c.expect(nc->obstruction == std::vector<Rat>{1, make_rat(-1, 2)}, "obstruction is not (1,-1/2)");
  for (auto& x : d.coeffs) x *= 2;
  auto two = is_cartier(p112, d);
  c.expect(std::holds_alternative<SupportFunction>(two), "2D reported not Cartier");
  if (auto* s = std::get_if<SupportFunction>(&two)) {
    bool found = false;
    for (const auto& m : s->local) found = found || m == Character{2, -1};
    c.expect(found, "m = (2,-1) missing");
  }
  return c;
}

Check properties() {
  Check c;
  const std::string cmd = std::string("\"") + TVB_PROPERTY_TESTS + "\" --gtest_brief=1 > /dev/null 2>&1";
  c.expect(std::system(cmd.c_str()) == 0, "property_tests failed");
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "murphy fan counts, unimodular, valid, complete", 10, murphy_fans},
      {2, "cone membership agrees with the face lattice", 60, membership_oracle},
      {3, "Chern rule compatibility and displayed multisets", 300, chern_rule},
      {4, "Klyachko round trip over Q", 60, klyachko_round_trip},
      {5, "moduli equals incidence: 84, 468, sweep over F_2", 300, moduli_vs_incidence},
      {6, "pairwise audit for n=3 and n=13", 60, audits},
      {7, "Fano plane over F_2 and F_3", 600, fano},
      {8, "class groups and Cartier data", 60, divisors},
      {9, "property invariants with fixed seeds", 600, properties},
  };
  int failures = 0;
  for (const auto& k : criteria) {
    const auto start = Clock::now();
    Check c;
    try {
      c = k.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (secs > k.limit_seconds) {
      c.ok = false;
      c.detail = "took longer than " + std::to_string(static_cast<int>(k.limit_seconds)) + " s";
    }
    std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion " << k.id << ": " << k.name << " (" << secs << " s)";
    if (!c.detail.empty()) std::cout << " - " << c.detail;
    std::cout << "\n";
    failures += !c.ok;
  }
  return failures == 0 ? 0 : 1;
}
