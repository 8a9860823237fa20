#pragma once

// Command-line front end. All results go to stdout (or --out) as canonical
// JSON; a one-line summary goes to stderr. Exit codes: 0 success, 1 a check
// failed, 2 usage, parse or budget errors.

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tvb/json_io.hpp"
#include "tvb/tvb.hpp"

namespace tvb::cli {

using io::Json;

enum Exit : int { kOk = 0, kFailed = 1, kUsage = 2 };

inline Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return io::parse(ss.str());
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

inline std::vector<Int> parse_ints(const std::string& text) {
  std::vector<Int> out;
  for (const auto& s : split(text, ',')) {
    Rat r = parse_rational(s);
    if (boost::multiprecision::denominator(r) != 1) throw ParseError("'" + s + "' is not an integer");
    out.push_back(boost::multiprecision::numerator(r));
  }
  return out;
}

inline std::vector<Rat> parse_rats(const std::string& text) {
  std::vector<Rat> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_rational(s));
  return out;
}

/// "2" or "Fp:2".
inline std::uint32_t parse_prime(const std::string& text) {
  std::string digits = text.rfind("Fp:", 0) == 0 ? text.substr(3) : text;
  try {
    std::size_t used = 0;
    unsigned long v = std::stoul(digits, &used);
    if (used != digits.size()) throw std::invalid_argument(digits);
    return PrimeField(static_cast<std::uint32_t>(v)).modulus();
  } catch (const std::logic_error&) {
    throw ParseError("field must be a prime, got '" + text + "'");
  }
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(std::vector<std::string> args);

 private:
  void emit(const Json& j, const std::string& path = {}) {
    const std::string text = io::dump(j);
    if (path.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write '" + path + "'");
    f << text;
  }

  Json violation_json(const FanViolation& v) {
    static const char* kinds[] = {"NOT_SIMPLICIAL", "NESTED_MAXIMAL_CONES", "BAD_INTERSECTION"};
    Json j;
    j["valid"] = false;
    j["kind"] = kinds[static_cast<int>(v.kind)];
    j["first"] = io::rayset_to_json(v.first);
    j["second"] = io::rayset_to_json(v.second);
    j["intersection"] = io::rayset_to_json(v.intersection);
    j["message"] = v.message;
    return j;
  }

  SearchOptions search_options() const {
    SearchOptions o;
    o.strategy = brute_ ? SearchOptions::Strategy::Brute : SearchOptions::Strategy::Backtrack;
    o.workers = workers_;
    if (budget_ > 0) o.budget = budget_;
    return o;
  }

  std::ostream& out_;
  std::ostream& err_;

  // Shared option storage; each subcommand binds the ones it uses.
  std::string fan_path_, out_path_, incidence_path_, chern_path_, filtration_path_, config_path_, report_path_;
  std::string coeffs_, point_, cone_, label_, field_ = "2";
  int n_ = 0, projective_ = 0;
  long long ray_ = -1;
  bool lazy_ = false, brute_ = false, degenerate_ = false, explicit_ = false, count_only_ = false;
  unsigned workers_ = 1;
  unsigned long long budget_ = 0;
  std::size_t samples_ = 1000;
  std::uint64_t seed_ = 1;
};

inline int Runner::run(std::vector<std::string> args) {
  CLI::App app{"Toric vector bundles, blown-up fans and incidence schemes", "tvb"};
  app.set_version_flag("--version", std::string("schema ") + io::kSchemaVersion);
  app.require_subcommand(1);
  std::function<int()> action;

  auto add_search_flags = [&](CLI::App* c) {
    c->add_flag("--brute", brute_, "Enumerate exhaustively without pruning");
    c->add_option("--workers", workers_, "Worker threads")->check(CLI::Range(1u, 256u));
    c->add_option("--budget", budget_, "Maximum number of search nodes");
  };

  // ---- fan ---------------------------------------------------------------
  auto* fan = app.add_subcommand("fan", "Simplicial fans")->require_subcommand(1);
  {
    auto* c = fan->add_subcommand("build", "Canonical fan JSON from a raw fan file or P^n");
    auto* in = c->add_option("--input", fan_path_, "Fan JSON (any ray order)");
    auto* pn = c->add_option("--projective", projective_, "Fan of P^n")->check(CLI::Range(1, 62));
    in->excludes(pn);
    c->add_option("--out", out_path_);
    c->callback([&, in, pn] {
      action = [&, in, pn] {
        if (!*in && !*pn) throw CLI::RequiredError("--input or --projective");
        Fan f = *pn ? projective_fan(static_cast<std::size_t>(projective_)) : io::fan_from_json(read_json(fan_path_));
        emit(io::fan_to_json(f), out_path_);
        err_ << f.rays().size() << " rays, " << f.max_cones().size() << " maximal cones\n";
        return kOk;
      };
    });
  }
  {
    auto* c = fan->add_subcommand("subdivide", "Star subdivision at a smooth cone");
    c->add_option("--fan", fan_path_)->required();
    c->add_option("--cone", cone_, "Comma-separated ray indices")->required();
    c->add_option("--out", out_path_);
    c->callback([&] {
      action = [&] {
        Fan f = io::fan_from_json(read_json(fan_path_));
        RaySet cone;
        for (const auto& v : parse_ints(cone_)) cone.push_back(static_cast<std::size_t>(v));
        Fan g = star_subdivide(f, cone);
        emit(io::fan_to_json(g), out_path_);
        err_ << "subdivided " << to_string(cone) << ": " << g.rays().size() << " rays\n";
        return kOk;
      };
    });
  }
  {
    auto* c = fan->add_subcommand("validate", "Check the fan axioms");
    c->add_option("--fan", fan_path_)->required();
    c->callback([&] {
      action = [&] {
        Fan f = io::fan_from_json(read_json(fan_path_));
        if (auto v = validate_fan(f)) {
          emit(violation_json(*v));
          err_ << "invalid: " << v->message << "\n";
          return kFailed;
        }
        emit(Json{{"valid", true}});
        err_ << "valid fan\n";
        return kOk;
      };
    });
  }
  {
    auto* c = fan->add_subcommand("smooth", "Check that every maximal cone is unimodular");
    c->add_option("--fan", fan_path_)->required();
    c->callback([&] {
      action = [&] {
        Fan f = io::fan_from_json(read_json(fan_path_));
        Json bad = Json::array();
        for (const auto& cone : f.max_cones())
          if (!is_unimodular(f.generators(cone))) bad.push_back(io::rayset_to_json(cone));
        const bool smooth = is_smooth(f);
        Json j;
        j["smooth"] = smooth;
        j["singular_cones"] = bad;
        emit(j);
        err_ << (smooth ? "smooth\n" : "not smooth\n");
        return smooth ? kOk : kFailed;
      };
    });
  }
  {
    auto* c = fan->add_subcommand("complete", "Check that the support is all of N_R");
    c->add_option("--fan", fan_path_)->required();
    c->callback([&] {
      action = [&] {
        Fan f = io::fan_from_json(read_json(fan_path_));
        const bool complete = is_complete(f);
        emit(Json{{"complete", complete}});
        err_ << (complete ? "complete\n" : "not complete\n");
        return complete ? kOk : kFailed;
      };
    });
  }

  // ---- murphy ------------------------------------------------------------
  auto* murphy = app.add_subcommand("murphy", "Blown-up fans and incidence data")->require_subcommand(1);
  {
    auto* c = murphy->add_subcommand("fan", "The blown-up fan for n");
    c->add_option("--n", n_)->required()->check(CLI::Range(2, kMaxLabelN));
    c->add_flag("--lazy", lazy_, "Rays and counts only");
    c->add_option("--out", out_path_);
    c->callback([&] {
      action = [&] {
        if (lazy_) {
          emit(io::lazy_murphy_fan_to_json(n_), out_path_);
          err_ << murphy_ray_count(n_) << " rays, " << murphy_max_cone_count(n_) << " maximal cones (lazy)\n";
          return kOk;
        }
        auto h = build_murphy_fan(n_, FanMode::Materialized);
        emit(io::fan_to_json(h.fan()), out_path_);
        err_ << h.fan().rays().size() << " rays, " << h.fan().max_cones().size() << " maximal cones\n";
        return kOk;
      };
    });
  }
  {
    auto* c = murphy->add_subcommand("chern", "Chern datum attached to incidence data");
    c->add_option("--incidence", incidence_path_)->required();
    c->add_flag("--explicit", explicit_, "List characters on every maximal cone (n <= 6)");
    c->add_option("--samples", samples_, "Adjacent cone pairs checked when n > 4");
    c->add_option("--seed", seed_);
    c->add_option("--out", out_path_);
    c->callback([&] {
      action = [&] {
        IncidenceData inc = io::incidence_from_json(read_json(incidence_path_));
        const int n = inc.objects() - 1;
        auto h = build_murphy_fan(n, explicit_ || n <= 4 ? FanMode::Materialized : FanMode::Lazy);
        MurphyChern rule = murphy_chern(inc, h);
        std::string summary;
        bool ok = true;
        if (h.materialized()) {
          ChernDatum datum = to_explicit(rule, h);
          auto v = validate_chern(h.fan(), datum);
          ok = !v;
          summary = ok ? "compatible on all " + std::to_string(h.fan().max_cones().size()) + " maximal cones"
                       : "violation: " + v->describe();
          emit(explicit_ ? io::chern_to_json(h.fan(), datum) : io::murphy_rule_to_json(inc), out_path_);
        } else {
          auto report = validate_chern_sampled(rule, samples_, seed_);
          ok = !report.violation;
          summary = ok ? "compatible on " + std::to_string(report.pairs_checked) + " sampled adjacent pairs"
                       : "violation across a sampled facet";
          emit(io::murphy_rule_to_json(inc), out_path_);
        }
        err_ << summary << "\n";
        return ok ? kOk : kFailed;
      };
    });
  }
  {
    auto* c = murphy->add_subcommand("equations", "Compile the rank conditions into atoms");
    c->add_option("--incidence", incidence_path_)->required();
    c->add_flag("--degenerate", degenerate_, "Accept d + d' = 2");
    c->add_option("--out", out_path_);
    c->callback([&] {
      action = [&] {
        IncidenceData inc = io::incidence_from_json(read_json(incidence_path_));
        auto m = make_murphy_instance(inc, FanMode::Lazy, degenerate_);
        ConditionSet cs = generate_conditions(m);
        emit(io::conditions_to_json(cs), out_path_);
        err_ << cs.atoms().size() << " atoms\n";
        return kOk;
      };
    });
  }
  {
    auto* c = murphy->add_subcommand("verify", "Compare moduli solutions with C_I over F_p");
    c->add_option("--incidence", incidence_path_)->required();
    c->add_option("--field", field_, "Prime p (or Fp:p)");
    c->add_option("--report", report_path_, "Write the report here instead of stdout");
    c->add_flag("--degenerate", degenerate_, "Accept d + d' = 2");
    add_search_flags(c);
    c->callback([&] {
      action = [&] {
        IncidenceData inc = io::incidence_from_json(read_json(incidence_path_));
        auto r = verify_equivalence(inc, parse_prime(field_), search_options(), degenerate_);
        emit(io::verify_report_to_json(inc, r), report_path_);
        err_ << "moduli " << r.moduli_count << " " << (r.equal ? "=" : "!=") << " incidence " << r.incidence_count
             << "\n";
        return r.equal ? kOk : kFailed;
      };
    });
  }
  {
    auto* c = murphy->add_subcommand("audit", "Pairwise audit: no cone holds three original rays");
    auto* inc_opt = c->add_option("--incidence", incidence_path_);
    auto* n_opt = c->add_option("--n", n_)->check(CLI::Range(2, kMaxLabelN));
    inc_opt->excludes(n_opt);
    c->add_flag("--degenerate", degenerate_, "Accept d + d' = 2");
    c->callback([&, inc_opt, n_opt] {
      action = [&, inc_opt, n_opt] {
        if (!*inc_opt && !*n_opt) throw CLI::RequiredError("--incidence or --n");
        IncidenceData inc = *inc_opt ? io::incidence_from_json(read_json(incidence_path_)) : IncidenceData(n_ + 1, 0, {});
        auto m = make_murphy_instance(inc, FanMode::Lazy, degenerate_);
        auto v = audit_pairwise(m);
        Json j;
        j["n"] = m.n();
        j["pairwise"] = !v;
        if (v) {
          j["rays"] = v->rays;
          j["message"] = v->message;
        }
        emit(j);
        err_ << (v ? "audit failed: " + v->message : std::string("pairwise audit passed")) << "\n";
        return v ? kFailed : kOk;
      };
    });
  }

  // ---- divisor -----------------------------------------------------------
  auto* divisor = app.add_subcommand("divisor", "Torus-invariant divisors")->require_subcommand(1);
  {
    auto* c = divisor->add_subcommand("cartier", "Cartier test with local data");
    c->add_option("--fan", fan_path_)->required();
    c->add_option("--coeffs", coeffs_, "Comma-separated coefficients, one per ray")->required();
    c->callback([&] {
      action = [&] {
        Fan f = io::fan_from_json(read_json(fan_path_));
        auto res = is_cartier(f, TDivisor{parse_ints(coeffs_)});
        if (const auto* s = std::get_if<SupportFunction>(&res)) {
          emit(io::support_function_to_json(f, *s));
          err_ << "Cartier\n";
          return kOk;
        }
        const auto& bad = std::get<NotCartier>(res);
        Json j;
        j["cartier"] = false;
        j["cone"] = io::rayset_to_json(bad.cone);
        j["obstruction"] = Json::array();
        for (const auto& x : bad.obstruction) j["obstruction"].push_back(io::rat_to_json(x));
        emit(j);
        err_ << "not Cartier on cone " << to_string(bad.cone) << "\n";
        return kFailed;
      };
    });
  }
  {
    auto* c = divisor->add_subcommand("classgroup", "Class group of the toric variety");
    c->add_option("--fan", fan_path_)->required();
    c->callback([&] {
      action = [&] {
        Fan f = io::fan_from_json(read_json(fan_path_));
        ClassGroup g = class_group(f);
        Json j;
        j["free_rank"] = io::int_to_json(g.free_rank);
        j["torsion"] = Json::array();
        for (const auto& t : g.torsion) j["torsion"].push_back(io::int_to_json(t));
        emit(j);
        err_ << "Z^" << g.free_rank;
        for (const auto& t : g.torsion) err_ << " + Z/" << t;
        err_ << "\n";
        return kOk;
      };
    });
  }
  {
    auto* c = divisor->add_subcommand("support", "Evaluate the support function of a Cartier divisor");
    c->add_option("--fan", fan_path_)->required();
    c->add_option("--coeffs", coeffs_)->required();
    c->add_option("--point", point_, "Comma-separated rationals")->required();
    c->callback([&] {
      action = [&] {
        Fan f = io::fan_from_json(read_json(fan_path_));
        auto res = is_cartier(f, TDivisor{parse_ints(coeffs_)});
        const auto* s = std::get_if<SupportFunction>(&res);
        if (!s) {
          err_ << "divisor is not Cartier\n";
          return kFailed;
        }
        Rat v = evaluate_support(*s, f, parse_rats(point_));
        emit(Json{{"value", io::rat_to_json(v)}});
        err_ << "phi = " << to_string(v) << "\n";
        return kOk;
      };
    });
  }

  // ---- bundle ------------------------------------------------------------
  auto* bundle = app.add_subcommand("bundle", "Toric vector bundles")->require_subcommand(1);
  {
    auto* c = bundle->add_subcommand("check-compat", "Compatibility of filtrations, recovering characters");
    c->add_option("--fan", fan_path_)->required();
    c->add_option("--filtration", filtration_path_)->required();
    c->add_option("--out", out_path_);
    c->callback([&] {
      action = [&] {
        Fan f = io::fan_from_json(read_json(fan_path_));
        auto filt = io::any_filtration_from_json(read_json(filtration_path_));
        return std::visit(
            [&](const auto& fl) {
              auto res = check_compatibility(f, fl);
              emit(io::compatibility_to_json(res, fl.field()), out_path_);
              const bool ok = res.index() == 0;
              err_ << (ok ? "compatible\n" : "incompatible: " + std::get<Incompatible>(res).reason + "\n");
              return ok ? kOk : kFailed;
            },
            filt);
      };
    });
  }
  {
    auto* c = bundle->add_subcommand("signature", "Jump/dimension signature of a ray's filtration");
    c->add_option("--chern", chern_path_, "Explicit or rule-based Chern JSON")->required();
    c->add_option("--fan", fan_path_, "Fan for an explicit datum");
    c->add_option("--ray", ray_, "Ray index (explicit datum)");
    c->add_option("--label", label_, "Comma-separated subset of 1..n+1 (rule datum)");
    c->callback([&] {
      action = [&] {
        Json cj = read_json(chern_path_);
        Signature sig;
        if (cj.contains("rule")) {
          if (io::required<std::string>(cj, "rule") != "murphy") throw ParseError("unknown Chern rule");
          if (label_.empty()) throw CLI::RequiredError("--label");
          IncidenceData inc = io::incidence_from_json(io::required_node(cj, "incidence"));
          const int n = inc.objects() - 1;
          std::vector<int> members;
          for (const auto& v : parse_ints(label_)) members.push_back(static_cast<int>(v));
          sig = filtration_signature(MurphyChern(inc, n), RayLabel::of(members));
        } else {
          if (fan_path_.empty() || ray_ < 0) throw CLI::RequiredError("--fan and --ray");
          Fan f = io::fan_from_json(read_json(fan_path_));
          sig = filtration_signature(f, io::chern_from_json(f, cj), static_cast<std::size_t>(ray_));
        }
        emit(io::signature_to_json(sig));
        err_ << sig.size() << " jumps\n";
        return kOk;
      };
    });
  }

  // ---- incidence ---------------------------------------------------------
  auto* incidence = app.add_subcommand("incidence", "Incidence schemes over F_p")->require_subcommand(1);
  {
    auto* c = incidence->add_subcommand("enumerate", "All realizations of I over F_p");
    c->add_option("--incidence", incidence_path_)->required();
    c->add_option("--field", field_, "Prime p (or Fp:p)");
    c->add_flag("--count-only", count_only_, "Omit the configuration list");
    c->add_option("--out", out_path_);
    add_search_flags(c);
    c->callback([&] {
      action = [&] {
        IncidenceData inc = io::incidence_from_json(read_json(incidence_path_));
        const std::uint32_t p = parse_prime(field_);
        auto all = enumerate_c_i(inc, p, search_options());
        Json j;
        j["field"] = "Fp:" + std::to_string(p);
        j["count"] = all.size();
        if (!count_only_) {
          j["configurations"] = Json::array();
          for (const auto& cfg : all) j["configurations"].push_back(io::configuration_to_json(cfg));
        }
        emit(j, out_path_);
        err_ << all.size() << " configurations over F_" << p << "\n";
        return kOk;
      };
    });
  }
  {
    auto* c = incidence->add_subcommand("check", "Does a configuration realize I exactly?");
    c->add_option("--incidence", incidence_path_)->required();
    c->add_option("--config", config_path_)->required();
    c->callback([&] {
      action = [&] {
        IncidenceData inc = io::incidence_from_json(read_json(incidence_path_));
        Json cj = read_json(config_path_);
        auto field = io::field_from_string(io::required<std::string>(cj, "field"));
        const bool ok = std::visit(
            [&](const auto& f) { return check_configuration(io::configuration_from_json(f, cj), inc); }, field);
        emit(Json{{"realizes", ok}});
        err_ << (ok ? "configuration realizes I\n" : "configuration does not realize I\n");
        return ok ? kOk : kFailed;
      };
    });
  }

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out_, err_);
    return code == 0 ? kOk : kUsage;
  }
  try {
    return action ? action() : kUsage;
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const BudgetExceeded& e) {
    err_ << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err_ << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err_ << "error: malformed input: " << e.what() << "\n";
    return kUsage;
  }
}

/// Runs one invocation; args exclude the program name.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  Runner r(out, err);
  return r.run(args);
}

}  // namespace tvb::cli
