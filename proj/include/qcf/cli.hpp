#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcf/catalog.hpp"
#include "qcf/numeric.hpp"

namespace qcf {

enum class Format { text, json, tsv };

struct RunConfig {
  int order = 40;
  int depth = 8;
  int points = 3;
  std::uint64_t seed = 0;
  std::optional<ParamPoint> params;
  Weights weights;
  std::optional<Rational> at_q;
  Format format = Format::text;
  std::optional<std::string> output_path;
  int perturb = 0;
  bool timing = false;
  unsigned threads = 0;
};

class UsageError : public QcfError {
 public:
  using QcfError::QcfError;
};

namespace cli_detail {

inline std::vector<std::pair<std::string, std::string>> split_assignments(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("expected key=value, got '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

// "a=1/3,b=1/5,l=1/7"; omitted parameters are 0.
inline ParamPoint parse_params(const std::string& text) {
  ParamPoint p;
  for (const auto& [k, v] : split_assignments(text)) {
    const Rational r = parse_rational(v);
    if (k == "a") p.a = r;
    else if (k == "b") p.b = r;
    else if (k == "l" || k == "lambda") p.lambda = r;
    else throw UsageError("unknown parameter '" + k + "'");
  }
  return p;
}

inline Weights parse_weights(const std::string& text) {
  Weights w;
  for (const auto& [k, v] : split_assignments(text)) {
    int x = 0;
    try {
      x = std::stoi(v);
    } catch (const std::exception&) {
      throw UsageError("weight must be an integer: '" + v + "'");
    }
    if (k == "a") w.a = x;
    else if (k == "b") w.b = x;
    else if (k == "l" || k == "lambda") w.lambda = x;
    else throw UsageError("unknown parameter '" + k + "'");
  }
  return w;
}

// NAME[:shift], shift defaulting to 0 (1 for C).
inline std::pair<Family, int> parse_family_spec(const std::string& text) {
  const auto colon = text.find(':');
  const auto f = parse_family(text.substr(0, colon));
  if (!f) throw UsageError("unknown family '" + text.substr(0, colon) + "'");
  int shift = *f == Family::C ? 1 : 0;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      shift = std::stoi(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("bad shift in '" + text + "'");
    }
  }
  if (shift < 0 || (*f == Family::C && shift < 1)) throw UsageError("shift out of range in '" + text + "'");
  return {*f, shift};
}

inline void validate(const RunConfig& cfg) {
  if (cfg.order < 4) throw UsageError("--order must be at least 4");
  if (cfg.depth < 1) throw UsageError("--depth must be at least 1");
  if (cfg.points < 1) throw UsageError("--points must be at least 1");
}

inline void emit(const RunConfig& cfg, const std::string& body, std::ostream& out) {
  if (cfg.output_path) {
    std::ofstream f(*cfg.output_path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + *cfg.output_path);
    f << body;
  } else {
    out << body;
  }
}

inline std::string status_word(Status s) {
  switch (s) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::skipped: return "SKIP";
  }
  return "?";
}

inline std::string text_report(const RunReport& rr, bool timing) {
  std::ostringstream os;
  for (const auto& r : rr.reports) {
    os << status_word(r.status) << "  " << r.id;
    if (const IdentityEntry* e = lookup(r.id)) os << "  [" << e->title << "]";
    os << "  " << params_text(r.params) << "  N=" << r.order << " depth=" << r.depth;
    if (r.first_mismatch_power) os << "  first mismatch at q^" << *r.first_mismatch_power;
    if (!r.comparison.empty()) os << " (" << r.comparison << ")";
    if (!r.reason.empty()) os << "  reason: " << r.reason;
    if (!r.note.empty()) os << "  note: " << r.note;
    if (timing) os << "  " << std::fixed << std::setprecision(1) << r.elapsed_ms << " ms";
    os << "\n";
  }
  os << "summary: pass=" << rr.summary.pass << " fail=" << rr.summary.fail << " skip=" << rr.summary.skip << "\n";
  return os.str();
}

// Every entry (or one) with its links at fixed points.
inline RunReport run_at_points(const std::vector<const IdentityEntry*>& entries, const std::vector<ParamPoint>& pts,
                               const RunConfig& cfg) {
  RunReport rr;
  rr.run = {cfg.seed, static_cast<int>(pts.size()), cfg.order, cfg.depth};
  const Perturbation perturb{cfg.perturb, 1};
  for (const IdentityEntry* e : entries) {
    const std::size_t n = e->parameter_free ? 1 : pts.size();
    for (std::size_t i = 0; i < n; ++i) rr.reports.push_back(verify(*e, pts[i], cfg.order, cfg.depth, perturb));
    for (const auto& l : e->links)
      for (std::size_t i = 0; i < n; ++i) rr.reports.push_back(check_reduction(*e, l, pts[i], cfg.order, cfg.depth));
  }
  rr.summary = summarize(rr.reports);
  return rr;
}

inline int cmd_verify(const std::string& id, const RunConfig& cfg, std::ostream& out) {
  RunReport rr;
  if (id == "all" && !cfg.params) {
    rr = verify_all(cfg.seed, cfg.points, cfg.order, cfg.depth, Perturbation{cfg.perturb, 1}, cfg.threads);
  } else {
    std::vector<const IdentityEntry*> entries;
    if (id == "all") {
      for (const auto& e : register_all()) entries.push_back(&e);
    } else {
      const IdentityEntry* e = lookup(id);
      if (!e) throw UsageError("unknown identity '" + id + "'");
      entries.push_back(e);
    }
    const std::vector<ParamPoint> pts = cfg.params ? std::vector<ParamPoint>{*cfg.params}
                                                   : sample_params(cfg.seed, cfg.points);
    rr = run_at_points(entries, pts, cfg);
  }
  switch (cfg.format) {
    case Format::text: emit(cfg, text_report(rr, cfg.timing), out); break;
    case Format::json: emit(cfg, to_json(rr, cfg.timing).dump(2) + "\n", out); break;
    case Format::tsv: emit(cfg, to_tsv(rr), out); break;
  }
  if (cfg.output_path)
    out << "summary: pass=" << rr.summary.pass << " fail=" << rr.summary.fail << " skip=" << rr.summary.skip << "\n";
  return rr.summary.fail == 0 ? 0 : 1;
}

inline ParamPoint point_or_sample(const RunConfig& cfg) {
  return cfg.params ? *cfg.params : sample_params(cfg.seed, 1).front();
}

inline int cmd_expand(const std::string& num_spec, const std::string& den_spec, const RunConfig& cfg,
                      std::ostream& out) {
  const auto [fn, sn] = parse_family_spec(num_spec);
  const auto [fd, sd] = parse_family_spec(den_spec);
  const GradedPoint g = graded(point_or_sample(cfg), cfg.weights);
  const QSeries num = build_family(fn, sn, g, cfg.order);
  const QSeries den = build_family(fd, sd, g, cfg.order);
  if (num[0] != 1 || den[0] != 1) throw UsageError("both series need constant term 1");
  const ExpansionTrace t = euler_expand(num, den, cfg.depth);
  if (cfg.format == Format::json) {
    emit(cfg, trace_json(t).dump(2) + "\n", out);
  } else {
    std::string body = render_trace(t);
    if (t.stop == StopReason::precision_exhausted) body += "precision exhausted before the requested depth\n";
    emit(cfg, body, out);
  }
  return t.stop == StopReason::precision_exhausted ? 1 : 0;
}

inline int cmd_approximants(const std::string& id, const RunConfig& cfg, bool order_given, std::ostream& out) {
  const IdentityEntry* e = lookup(id);
  if (!e) throw UsageError("unknown identity '" + id + "'");
  if (!e->cf) throw UsageError(id + " is not a continued-fraction identity");
  const ParamPoint p = point_or_sample(cfg);
  CFrac cf = e->cf->fraction(p);
  if (cfg.perturb > 0) cf = perturbed(cf, cfg.perturb, 1);
  constexpr int max_auto_order = 200;
  const int order = order_given ? cfg.order : std::max(8, std::min(max_auto_order, contact_bound(cf, cfg.depth, max_auto_order)));
  const QSeries target = e->cf->target(p, order);
  const auto apps = approximants(cf, cfg.depth, order);

  std::optional<NumericCF> ncf;
  std::optional<int> worpitzky;
  std::string worpitzky_note;
  if (cfg.at_q) {
    ncf = numeric_at(cf, *cfg.at_q);
    try {
      worpitzky = worpitzky_index(*ncf);
    } catch (const HorizonExceeded& ex) {
      worpitzky_note = ex.what();
    }
  }
  std::vector<double> values;
  if (ncf)
    for (int n = 1; n <= cfg.depth; ++n) values.push_back(numeric_value(*ncf, n));

  if (cfg.format == Format::json) {
    nlohmann::json j = approximant_table_json(cf, target, cfg.depth, order);
    j["id"] = id;
    if (!e->parameter_free) j["params"] = {{"a", p.a.get_str()}, {"b", p.b.get_str()}, {"l", p.lambda.get_str()}};
    if (ncf) {
      j["at_q"] = cfg.at_q->get_str();
      j["worpitzky_index"] = worpitzky ? nlohmann::json(*worpitzky) : nlohmann::json(nullptr);
      for (int n = 1; n <= cfg.depth; ++n) {
        auto& row = j["rows"][static_cast<std::size_t>(n - 1)];
        row["value"] = values[static_cast<std::size_t>(n - 1)];
        if (n > 1) row["delta"] = std::abs(values[static_cast<std::size_t>(n - 1)] - values[static_cast<std::size_t>(n - 2)]);
      }
    }
    emit(cfg, j.dump(2) + "\n", out);
    return 0;
  }

  std::ostringstream os;
  os << "# " << id << "  " << (e->parameter_free ? std::string("-") : to_string(p)) << "  order=" << order << "\n";
  if (ncf) {
    os << "# q=" << cfg.at_q->get_str() << "  worpitzky_index=";
    if (worpitzky) os << *worpitzky;
    else os << "none (" << worpitzky_note << ")";
    os << "\n";
  }
  os << "n\tfirst_mismatch";
  if (ncf) os << "\tvalue\tdelta";
  os << "\n";
  for (int n = 1; n <= cfg.depth; ++n) {
    const auto mm = first_mismatch(apps[static_cast<std::size_t>(n - 1)], target);
    os << n << "\t" << (mm ? std::to_string(*mm) : ">" + std::to_string(order));
    if (ncf) {
      const double v = values[static_cast<std::size_t>(n - 1)];
      os << "\t" << std::setprecision(17) << v << "\t";
      if (n > 1) os << std::setprecision(3) << std::scientific << std::abs(v - values[static_cast<std::size_t>(n - 2)])
                    << std::defaultfloat;
    }
    os << "\n";
  }
  emit(cfg, os.str(), out);
  return 0;
}

inline int cmd_euclid(const std::string& text, std::ostream& out) {
  const auto r = try_parse_rational(text);
  if (!r || sgn(*r) <= 0) throw UsageError("euclid needs a positive rational p/q, got '" + text + "'");
  const auto qs = euclid_cf(r->get_num(), r->get_den());
  out << render_quotients(qs) << "\n";
  out << "reconstructed: " << euclid_value(qs).get_str() << "\n";
  return 0;
}

}  // namespace cli_detail

/// Entry point shared by the executable and the tests. Exit codes: 0 all
/// pass, 1 verification failure, 2 usage error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Exact q-series and continued-fraction identity checker", "qcf"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string params_text, weights_text, at_q_text, format_text = "text", output;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--order", cfg.order, "truncation order N (inclusive)");
    sub->add_option("--depth", cfg.depth, "continued-fraction depth");
    sub->add_option("--seed", cfg.seed, "parameter sampling seed");
    sub->add_option("--params", params_text, "explicit parameters, e.g. a=1/3,b=1/5,l=1/7");
    sub->add_option("--weights", weights_text, "q-grading weights, e.g. a=1,b=1");
    sub->add_option("--format", format_text, "text|json|tsv")->check(CLI::IsMember({"text", "json", "tsv"}));
    sub->add_option("--output", output, "write the report to this file");
    sub->add_option("--perturb", cfg.perturb, "add 1 to the lowest coefficient of this partial numerator");
  };

  std::string verify_id, approx_id, euclid_arg, num_spec, den_spec;
  CLI::App* verify = app.add_subcommand("verify", "verify one identity or all");
  verify->add_option("id", verify_id, "identity id or 'all'")->required();
  add_common(verify);
  verify->add_option("--points", cfg.points, "sample points per identity");
  verify->add_flag("--timing", cfg.timing, "include elapsed times");
  verify->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");

  CLI::App* expand = app.add_subcommand("expand", "Euler-expand a ratio of two family series");
  expand->add_option("--num", num_spec, "numerator family NAME[:shift]")->required();
  expand->add_option("--den", den_spec, "denominator family NAME[:shift]")->required();
  add_common(expand);

  CLI::App* approx = app.add_subcommand("approximants", "table of approximants of a continued-fraction identity");
  approx->add_option("id", approx_id, "identity id")->required();
  add_common(approx);
  approx->add_option("--at-q", at_q_text, "rational q with |q| < 1 for numeric values");

  CLI::App* euclid = app.add_subcommand("euclid", "classical continued fraction of a positive rational");
  euclid->add_option("fraction", euclid_arg, "p/q")->required();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*euclid) return cmd_euclid(euclid_arg, out);
    if (!params_text.empty()) cfg.params = parse_params(params_text);
    if (!weights_text.empty()) cfg.weights = parse_weights(weights_text);
    if (!at_q_text.empty()) {
      cfg.at_q = parse_rational(at_q_text);
      if (abs(*cfg.at_q) >= 1) throw UsageError("--at-q needs |q| < 1");
    }
    cfg.format = format_text == "json" ? Format::json : format_text == "tsv" ? Format::tsv : Format::text;
    if (!output.empty()) cfg.output_path = output;
    if (cfg.perturb < 0) throw UsageError("--perturb must be a positive element index");
    validate(cfg);
    if (*verify) return cmd_verify(verify_id, cfg, out);
    if (*expand) return cmd_expand(num_spec, den_spec, cfg, out);
    if (*approx) {
      if (approx->count("--format") == 0) cfg.format = Format::tsv;
      return cmd_approximants(approx_id, cfg, approx->count("--order") > 0, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const QcfError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace qcf
