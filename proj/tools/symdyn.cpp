// Command-line surface: parse a system config, dispatch one operation, and
// print a deterministic JSON report (optional CSV table via --out).

#include <CLI11.hpp>
#include <json.hpp>

#include "symdyn/entropy.hpp"
#include "symdyn/markers.hpp"
#include "symdyn/markov.hpp"
#include "symdyn/recfam.hpp"
#include "symdyn/subshift.hpp"
#include "symdyn/towers.hpp"
#include "symdyn/varprin.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::json;  // std::map backing: keys serialize sorted
using namespace symdyn;

namespace {

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

struct LoadedSystem {
  Subshift X;
  std::string digest;
  std::string type;
};

void require_fields(const json& j, const std::vector<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ValidationError("config: unknown field '" + it.key() + "'");
  }
}

LoadedSystem load_system(const std::string& path, std::uint64_t cap_states) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: parse error: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ValidationError("config: missing string field 'type'");
  const std::string type = j["type"];
  LoadedSystem sys{Subshift::full_shift(2), hex64(fnv1a(text)), type};
  if (type == "full") {
    require_fields(j, {"type", "alphabet"});
    int ell = j.value("alphabet", 2);
    sys.X = Subshift::full_shift(ell);
  } else if (type == "sft") {
    require_fields(j, {"type", "alphabet", "forbidden"});
    if (!j.contains("alphabet")) throw ValidationError("config: sft needs 'alphabet'");
    int ell = j["alphabet"];
    std::vector<Word> forb;
    for (const auto& f : j.value("forbidden", json::array())) {
      if (!f.is_string()) throw ValidationError("config: forbidden words must be strings");
      forb.push_back(word_from_string(f.get<std::string>()));
    }
    sys.X = Subshift::sft(ell, forb);
  } else if (type == "substitution") {
    require_fields(j, {"type", "rules"});
    if (!j.contains("rules") || !j["rules"].is_array())
      throw ValidationError("config: substitution needs 'rules' as an array of words");
    std::vector<Word> rules;
    for (const auto& r : j["rules"]) rules.push_back(word_from_string(r.get<std::string>()));
    sys.X = Subshift::substitution(rules);
  } else if (type == "sturmian") {
    require_fields(j, {"type", "p", "q", "intercept"});
    if (!j.contains("p") || !j.contains("q"))
      throw ValidationError("config: sturmian needs convergent fields 'p' and 'q'");
    Rational t = j.contains("intercept")
                     ? rational_from_string(j["intercept"].get<std::string>())
                     : Rational(0);
    sys.X = Subshift::sturmian(j["p"].get<long>(), j["q"].get<long>(), t);
  } else {
    throw ValidationError("config: unknown type '" + type + "'");
  }
  sys.X.set_cap(cap_states);
  return sys;
}

// deterministic rational chains over the compiled vertex presentation:
// out-edges weighted 1, r, r^2, ... in successor order, then normalized
MarkovMeasure<Rational> weighted_chain(const Subshift& X, long ratio, const std::string& name) {
  const VertexShift& vs = X.vertex_shift();
  const std::size_t n = vs.states.size();
  std::vector<std::vector<Rational>> P(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    Rational total(0), w(1);
    std::vector<int> succ = vs.out[i];
    std::sort(succ.begin(), succ.end());
    for (std::size_t r = 0; r < succ.size(); ++r) {
      P[i][succ[r]] = w;
      total += w;
      w *= ratio;
    }
    for (std::size_t jj = 0; jj < n; ++jj) P[i][jj] /= total;
  }
  return markov_measure_blocks(X, vs.block_len, vs.states, P, name);
}

std::vector<MarkovMeasure<Rational>> default_rational_family(const Subshift& X) {
  return {weighted_chain(X, 1, "uniform-edges"), weighted_chain(X, 2, "tilt-2"),
          weighted_chain(X, 3, "tilt-3")};
}

double parse_alpha(const std::string& s) {
  if (s == "sqrt2") return std::sqrt(2.0);
  if (s == "sqrt2m1") return std::sqrt(2.0) - 1.0;
  if (s == "golden") return (std::sqrt(5.0) - 1.0) / 2.0;
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("unrecognized frequency spec '" + s + "'");
  }
}

SequenceSpec parse_sequence(const std::string& s) {
  if (s == "squares") return SequenceSpec::squares();
  auto split = [](const std::string& body) {
    std::vector<long> out;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stol(tok));
    return out;
  };
  if (s.rfind("arith:", 0) == 0) {
    auto v = split(s.substr(6));
    if (v.size() != 2) throw ValidationError("arith sequence needs 'arith:start,step'");
    return SequenceSpec::arithmetic(v[0], v[1]);
  }
  if (s.rfind("lacunary:", 0) == 0) {
    auto v = split(s.substr(9));
    if (v.size() != 1) throw ValidationError("lacunary sequence needs 'lacunary:base'");
    return SequenceSpec::lacunary(v[0]);
  }
  if (s.rfind("list:", 0) == 0) return SequenceSpec::explicit_list(split(s.substr(5)));
  throw ValidationError("unrecognized sequence spec '" + s + "'");
}

json rational_json(const Rational& q) {
  json j;
  j["exact"] = rational_to_string(q);
  j["value"] = to_double(q);
  return j;
}

std::string iso_timestamp() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct ReportWriter {
  json report;
  std::string out_path;
  std::string csv;
  bool timestamp = true;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void finish() {
    report["versions"] = {{"symdyn", "0.1.0"}};
    if (timestamp) {
      report["timestamp"] = iso_timestamp();
      report["wall_time_ms"] =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                t0)
              .count();
    }
    std::cout << report.dump(2) << "\n";
    if (!out_path.empty()) {
      std::ofstream f(out_path);
      if (!f) throw ValidationError("cannot open output file " + out_path);
      f << csv;
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-scale symbolic dynamics toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path;
  std::uint64_t cap_states = std::uint64_t(1) << 24;
  int resolution = 1, precision = 192;
  std::uint64_t seed = 1;
  bool no_timestamp = false;
  app.add_option("--config", config_path, "system config (JSON)");
  app.add_option("--out", out_path, "CSV table output path");
  app.add_option("--cap-states", cap_states, "enumeration cap");
  app.add_option("--resolution", resolution, "working resolution");
  app.add_option("--precision", precision, "fixed-point bits for circle distances");
  app.add_flag("--no-timestamp", no_timestamp, "suppress timestamp and wall time");
  app.add_option("--seed", seed, "seed for declared deterministic sampling");

  // entropy
  auto* c_entropy = app.add_subcommand("entropy", "cover entropy with spectral cross-check");
  int n_max = 12;
  std::string cover_spec, partition_spec;
  c_entropy->add_option("--n-max", n_max, "horizon for the growth rate");
  c_entropy->add_option("--cover", cover_spec, "cover as 'blk,blk;blk' cylinder families");
  c_entropy->add_option("--partition", partition_spec, "partition as cylinder families");

  // lemma
  auto* c_lemma = app.add_subcommand("lemma", "low-entropy word counting bound");
  int l_ell = 2, l_nmin = 1, l_nmax = 16, l_k = 1;
  double l_h = 0.4, l_eps = 0.2;
  c_lemma->add_option("--ell", l_ell);
  c_lemma->add_option("--n-min", l_nmin);
  c_lemma->add_option("--n-max", l_nmax);
  c_lemma->add_option("--k", l_k);
  c_lemma->add_option("--rate", l_h, "entropy rate h in the bound exp(n(h+eps))");
  c_lemma->add_option("--eps", l_eps);

  // varprinciple
  auto* c_var = app.add_subcommand("varprinciple", "max-min/min-max entropy vs cover entropy");
  int v_res = 2, v_cover_n = 12, v_part_n = 6;
  std::string v_schedule = "1:256,2:4096";
  c_var->add_option("--partition-resolution", v_res);
  c_var->add_option("--n-max", v_cover_n);
  c_var->add_option("--partition-n-max", v_part_n);
  c_var->add_option("--schedule", v_schedule, "good-point schedule 'K:N,K:N' ('' to skip)");

  // tower
  auto* c_tower = app.add_subcommand("tower", "tower constructions and return times");
  long t_two = 0, t_nest = 0, t_rohlin = 0, t_lmax = 0;
  std::string t_base, t_delta = "1/2";
  c_tower->add_option("--two-heights", t_two, "build the {N, N+1} tower for this N");
  c_tower->add_option("--nest", t_nest, "nest the two-height tower to heights [n, n+4N]");
  c_tower->add_option("--return-base", t_base, "cylinder word for a return-time profile");
  c_tower->add_option("--l-max", t_lmax, "largest return time in the profile");
  c_tower->add_option("--rohlin", t_rohlin, "build the universal Rohlin tower for this n");
  c_tower->add_option("--delta", t_delta, "Rohlin leakage bound (rational)");

  // recur
  auto* c_recur = app.add_subcommand("recur", "visit-time sets and return masses");
  std::string r_u, r_v, r_poincare;
  long r_horizon = 64, r_jmax = 20, r_corr = 0;
  c_recur->add_option("--u", r_u, "source cylinder word");
  c_recur->add_option("--v", r_v, "target cylinder word");
  c_recur->add_option("--horizon", r_horizon);
  c_recur->add_option("--poincare", r_poincare, "base word for return masses along squares");
  c_recur->add_option("--j-max", r_jmax);
  c_recur->add_option("--correlation", r_corr, "correlation window for the --poincare base");

  // weyl
  auto* c_weyl = app.add_subcommand("weyl", "exponential-sum averages and recurrence");
  std::string w_alpha = "sqrt2m1", w_seq = "squares";
  long w_n = 100000, w_jmax = 10000;
  double w_eps = 0.0;
  bool w_two_pi = false;
  c_weyl->add_option("--alpha", w_alpha, "frequency: sqrt2|sqrt2m1|golden|number");
  c_weyl->add_option("--sequence", w_seq, "squares|arith:a,d|lacunary:b|list:...");
  c_weyl->add_option("--n", w_n);
  c_weyl->add_flag("--two-pi", w_two_pi, "multiply the frequency by 2*pi");
  c_weyl->add_option("--recurrence-eps", w_eps, "also search the least recurrent term");
  c_weyl->add_option("--j-max", w_jmax);

  // classify
  auto* c_classify = app.add_subcommand("classify", "transitivity and mixing flags");
  long cl_horizon = 64;
  int cl_upe = 0;
  c_classify->add_option("--horizon", cl_horizon);
  c_classify->add_option("--upe-resolution", cl_upe, "two-element-cover witness resolution");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }

    ReportWriter out;
    out.out_path = out_path;
    out.timestamp = !no_timestamp;
    json& rep = out.report;
    rep["caps"] = {{"cap_states", cap_states}};
    rep["parameters"] = json::object();
    rep["tolerances"] = json::object();

    auto need_system = [&]() {
      if (config_path.empty()) throw ValidationError("--config is required for this command");
      LoadedSystem sys = load_system(config_path, cap_states);
      rep["config_digest"] = sys.digest;
      rep["parameters"]["system"] = sys.type;
      return sys;
    };

    if (*c_entropy) {
      rep["command"] = "entropy";
      LoadedSystem sys = need_system();
      CoverSpec U = generating_cover(sys.X);
      if (!cover_spec.empty())
        U = make_cover(sys.X, parse_cylinder_family(sys.X, cover_spec));
      else if (!partition_spec.empty())
        U = cover_of_partition(make_partition(sys.X, parse_cylinder_family(sys.X, partition_spec)));
      rep["parameters"]["n_max"] = n_max;
      auto ce = cover_entropy(sys.X, U, n_max);
      json res;
      res["per_n"] = ce.per_n;
      res["estimate"] = ce.estimate;
      res["upper_bound"] = ce.upper_bound;
      res["diff_estimate"] = ce.diff_estimate;
      out.csv = "n,per_n\n";
      for (std::size_t i = 0; i < ce.per_n.size(); ++i)
        out.csv += std::to_string(i + 1) + "," + std::to_string(ce.per_n[i]) + "\n";
      if (sys.X.has_vertex_shift()) {
        double hs = sft_entropy(sys.X);
        res["sft_entropy"] = hs;
        res["estimate_vs_spectral"] = std::abs(ce.estimate - hs);
      }
      rep["tolerances"]["estimate_vs_spectral"] = 0.05;
      rep["results"] = res;
      out.finish();
      return 0;
    }

    if (*c_lemma) {
      rep["command"] = "lemma";
      rep["parameters"] = {{"ell", l_ell}, {"n_min", l_nmin}, {"n_max", l_nmax},
                           {"k", l_k},     {"h", l_h},        {"eps", l_eps}};
      auto table = lemma_table(l_ell, l_nmin, l_nmax, l_k, l_h, l_eps, cap_states);
      json rows = json::array();
      out.csv = "n,count,bound,holds\n";
      for (const auto& r : table.rows) {
        rows.push_back({{"n", r.n}, {"count", r.count}, {"bound", r.bound}, {"holds", r.holds}});
        out.csv += std::to_string(r.n) + "," + std::to_string(r.count) + "," +
                   std::to_string(r.bound) + "," + (r.holds ? "1" : "0") + "\n";
      }
      rep["results"] = {{"rows", rows}, {"threshold", table.threshold}};
      rep["tolerances"]["count_comparison"] = "exact";
      out.finish();
      return 0;
    }

    if (*c_var) {
      rep["command"] = "varprinciple";
      LoadedSystem sys = need_system();
      CoverSpec U = generating_cover(sys.X);
      rep["parameters"]["partition_resolution"] = v_res;
      rep["parameters"]["n_max"] = v_cover_n;
      std::vector<MarkovMeasure<double>> family{parry_measure(sys.X)};
      for (const auto& mu : default_rational_family(sys.X))
        family.push_back(to_double_measure(mu));
      auto vr = evaluate_h_check(sys.X, U, family, v_res, v_cover_n, v_part_n);
      json res;
      res["h_top_estimate"] = vr.h_top_estimate;
      res["h_check"] = vr.h_check;
      res["h_hat"] = vr.h_hat;
      res["family"] = vr.family_names;
      res["partition_count"] = vr.partition_count;
      res["matrix"] = vr.matrix;
      rep["tolerances"]["chain"] = vr.tol;
      out.csv = "measure,min_over_partitions\n";
      for (std::size_t m = 0; m < vr.matrix.size(); ++m)
        out.csv += vr.family_names[m] + "," +
                   std::to_string(*std::min_element(vr.matrix[m].begin(), vr.matrix[m].end())) +
                   "\n";
      if (!v_schedule.empty()) {
        std::vector<std::pair<int, long>> schedule;
        std::stringstream ss(v_schedule);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          auto colon = tok.find(':');
          if (colon == std::string::npos)
            throw ValidationError("schedule entries look like 'K:N'");
          schedule.push_back({std::stoi(tok.substr(0, colon)), std::stol(tok.substr(colon + 1))});
        }
        auto ar = attain_cover_entropy(sys.X, U, schedule, 0.05, seed);
        json att;
        att["attained"] = ar.attained;
        att["final_lower_bound"] = ar.final_lower_bound;
        att["final_rates"] = ar.final_rates;
        json stages = json::array();
        for (const auto& st : ar.stages)
          stages.push_back({{"K", st.K},
                            {"N", st.N},
                            {"defect", rational_to_string(st.empirical.defect)}});
        att["stages"] = stages;
        res["attain"] = att;
        rep["tolerances"]["attain"] = ar.tol;
      }
      rep["results"] = res;
      out.finish();
      return 0;
    }

    if (*c_tower) {
      rep["command"] = "tower";
      LoadedSystem sys = need_system();
      auto family = default_rational_family(sys.X);
      json res;
      if (t_two > 0) {
        rep["parameters"]["two_heights_N"] = t_two;
        auto tw = kr_two_heights(sys.X, family[0], t_two);
        json jt;
        jt["marker"] = word_to_string(tw.marker);
        jt["gap"] = tw.gap;
        jt["base_mass"] = tw.base_mass;
        auto off = two_height_offsets(tw.gap, tw.N);
        jt["column_offsets_at_min_height"] = off;
        res["two_heights"] = jt;
        out.csv = "offset\n";
        for (long o : off) out.csv += std::to_string(o) + "\n";
        if (t_nest > 0) {
          rep["parameters"]["nest_n"] = t_nest;
          auto nt = nest_tower(sys.X, tw, t_nest);
          res["nest"] = {{"marker_length", nt.marker.size()},
                         {"gap", nt.gap},
                         {"t", nt.t},
                         {"height_window", {t_nest, t_nest + 4 * tw.N}}};
        }
      }
      if (!t_base.empty()) {
        long lmax = t_lmax > 0 ? t_lmax : 32;
        rep["parameters"]["return_base"] = t_base;
        rep["parameters"]["l_max"] = lmax;
        auto prof = return_times(sys.X, cylinder(sys.X, word_from_string(t_base)), family[0], lmax);
        json heights = json::object();
        out.csv = "height,mass\n";
        for (const auto& [l, m] : prof.masses) {
          heights[std::to_string(l)] = rational_json(m);
          out.csv += std::to_string(l) + "," + rational_to_string(m) + "\n";
        }
        res["return_times"] = {{"base_mass", rational_json(prof.base_mass)},
                               {"masses", heights},
                               {"residual", rational_json(prof.residual)}};
      }
      if (t_rohlin > 0) {
        rep["parameters"]["rohlin_n"] = t_rohlin;
        rep["parameters"]["delta"] = t_delta;
        auto tw = universal_rohlin(sys.X, t_rohlin, rational_from_string(t_delta), family);
        json jr;
        jr["marker"] = word_to_string(tw.marker);
        jr["required_disjoint_iterates"] = tw.N;
        jr["gap"] = tw.gap;
        jr["disjoint_verified"] = tw.disjoint_verified;
        jr["explicit_pieces"] = tw.pieces.size();
        json cov = json::object();
        for (const auto& [name, c] : tw.coverage) cov[name] = rational_json(c);
        jr["coverage"] = cov;
        res["rohlin"] = jr;
      }
      if (res.empty())
        throw ValidationError("tower: pick --two-heights, --return-base, or --rohlin");
      rep["tolerances"]["tower_checks"] = "exact";
      rep["results"] = res;
      out.finish();
      return 0;
    }

    if (*c_recur) {
      rep["command"] = "recur";
      LoadedSystem sys = need_system();
      json res;
      if (!r_u.empty() && !r_v.empty()) {
        rep["parameters"]["u"] = r_u;
        rep["parameters"]["v"] = r_v;
        rep["parameters"]["horizon"] = r_horizon;
        auto s = n_set(sys.X, cylinder(sys.X, word_from_string(r_u)),
                       cylinder(sys.X, word_from_string(r_v)), r_horizon);
        auto cls = classify_window(s);
        res["n_set"] = {{"elements", s.elements()},
                        {"syndetic_gap", cls.syndetic_gap},
                        {"thick_run", cls.thick_run},
                        {"ip_depth", cls.ip_depth},
                        {"horizon", cls.H}};
        out.csv = "n\n";
        for (long n : s.elements()) out.csv += std::to_string(n) + "\n";
      }
      if (!r_poincare.empty()) {
        rep["parameters"]["poincare_base"] = r_poincare;
        rep["parameters"]["j_max"] = r_jmax;
        auto mu = default_rational_family(sys.X)[0];
        CylinderUnion B = cylinder(sys.X, word_from_string(r_poincare));
        auto rm = poincare_return_masses(sys.X, mu, B, SequenceSpec::squares(), r_jmax);
        json masses = json::array();
        for (std::size_t i = 0; i < rm.masses.size(); ++i)
          masses.push_back({{"time", rm.times[i]}, {"mass", rational_json(rm.masses[i])}});
        res["poincare"] = {{"masses", masses}, {"positive_found", rm.positive_found}};
        if (r_corr > 0) {
          auto cr = matrix_coefficient(sys.X, mu, B, r_corr);
          json vals = json::array();
          for (const auto& v : cr.values) vals.push_back(rational_json(v));
          res["correlation"] = {{"values", vals},
                                {"limsup_tail", cr.limsup_tail},
                                {"rigidity_evidence", cr.rigidity_evidence}};
        }
      }
      if (res.empty()) throw ValidationError("recur: pick --u/--v or --poincare");
      rep["tolerances"]["memberships"] = "exact";
      rep["results"] = res;
      out.finish();
      return 0;
    }

    if (*c_weyl) {
      rep["command"] = "weyl";
      double alpha = parse_alpha(w_alpha);
      if (w_two_pi) alpha *= 2.0 * M_PI;
      SequenceSpec s = parse_sequence(w_seq);
      rep["parameters"] = {{"alpha", alpha}, {"sequence", w_seq}, {"n", w_n},
                           {"precision_bits", precision}};
      auto wr = weyl_average(s, alpha, w_n);
      json res;
      res["magnitude"] = wr.magnitude;
      res["error_bound"] = wr.error_bound;
      out.csv = "n,magnitude\n" + std::to_string(w_n) + "," + std::to_string(wr.magnitude) + "\n";
      if (w_eps > 0) {
        rep["parameters"]["recurrence_eps"] = w_eps;
        auto rr = rotation_recurrence(parse_alpha(w_alpha), w_eps, s, w_jmax, precision);
        res["recurrence"] = {{"found", rr.found},
                             {"d", rr.d},
                             {"index", rr.index},
                             {"distance", rr.distance}};
      }
      rep["tolerances"]["sum_error"] = wr.error_bound;
      rep["results"] = res;
      out.finish();
      return 0;
    }

    if (*c_classify) {
      rep["command"] = "classify";
      LoadedSystem sys = need_system();
      rep["parameters"]["horizon"] = cl_horizon;
      auto c = classify_sft(sys.X, cl_horizon);
      json res;
      res["transitive"] = c.transitive;
      res["period"] = c.period;
      res["mixing"] = c.mixing;
      res["weak_mixing"] = c.weak_mixing;
      res["product_irreducible"] = c.product_irreducible;
      json te = json::array();
      out.csv = "symbol,syndetic_gap\n";
      for (const auto& [a, gap] : c.te_evidence) {
        te.push_back({{"symbol", a}, {"syndetic_gap", gap}});
        out.csv += std::to_string(a) + "," + std::to_string(gap) + "\n";
      }
      res["te_evidence"] = te;
      if (cl_upe > 0) {
        rep["parameters"]["upe_resolution"] = cl_upe;
        auto w = upe_witness(sys.X, cl_upe);
        res["upe_witness"] = {{"min_entropy", w.min_entropy},
                              {"block1", word_to_string(w.block1)},
                              {"block2", word_to_string(w.block2)}};
      }
      rep["tolerances"]["flags"] = "exact";
      rep["results"] = res;
      out.finish();
      return 0;
    }

    throw ValidationError("no subcommand selected");
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 3;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition unmet: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
