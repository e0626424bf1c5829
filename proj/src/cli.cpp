#include "qld/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "qld/errors.hpp"
#include "qld/mc_harness.hpp"
#include "qld/moment_engine.hpp"
#include "qld/rate_bounds.hpp"
#include "qld/selftest.hpp"

namespace qld::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string> kCommands = {"fig1", "fig2", "rate", "bound", "mc", "selftest"};
const std::vector<std::string> kBoundKinds = {"chernoff", "compact", "markov", "fat-markov",
                                              "lower",    "fat-upper-mc", "eta-asym", "xi",
                                              "fixed-a"};

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_count(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec == std::errc() && ptr == end) return v;
  // Accept integral values written in scientific form, e.g. 1e7.
  const double d = parse_double(s, what);
  if (d < 0.0 || d != std::floor(d) || d > 9.0e18) {
    throw ConfigError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return static_cast<std::uint64_t>(d);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string join_doubles(const std::vector<double>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += format_double(v[i]);
  }
  return s;
}

// Column suffix: "0.5" -> "05", "1" -> "1".
std::string short_label(double q) {
  std::string s = format_double(q);
  std::erase(s, '.');
  return s;
}

// Column suffix with two decimals: 0.6 -> "060", 0.65 -> "065".
std::string fixed_label(double q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", q);
  std::string s(buf);
  std::erase(s, '.');
  return s;
}

RunConfig defaults_for(const std::string& command) {
  RunConfig c;
  c.command = command;
  if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
    c.seed = parse_count(env, kSeedEnvVar);
  }
  if (command == "fig1") {
    c.model = "uniform:0:1";
    c.q = {0.5};
    c.x = {0.5, 1.0, 101};
  } else if (command == "fig2") {
    c.model = "student:3";
    c.q = {0.6, 0.65};
    c.n = 5;
    c.a = 5.0;
    c.x = {4.0, 20.0, 161};
    c.samples = 10'000'000;
  } else if (command == "rate") {
    c.model = "uniform:0:1";
    c.q = {0.5};
    c.regime = "compact";
    c.x = {0.55, 0.95, 9};
  } else if (command == "bound") {
    c.model = "uniform:0:1";
    c.q = {0.5};
  } else if (command == "mc") {
    c.model = "qexp:0.5";
    c.samples = 1'000'000;
  }
  return c;
}

bool needs_a(const std::string& kind) {
  return kind == "markov" || kind == "fat-markov" || kind == "fat-upper-mc" ||
         kind == "fixed-a";
}

void validate(const RunConfig& c) {
  if (c.command == "selftest") return;
  const DistributionModel model = parse_model(c.model);
  if (c.n < 1) throw ConfigError("--n must be >= 1");
  if (c.workers < 1) throw ConfigError("--workers must be >= 1");
  if (c.x.steps < 1) throw ConfigError("--x needs at least one point");
  if (c.x.steps > 1 && !(c.x.hi > c.x.lo)) throw ConfigError("--x requires lo < hi");
  for (double q : c.q) {
    if (!(q > 0.0 && q < 1.0)) {
      throw ConfigError("--q values must lie strictly inside (0,1), got " + format_double(q));
    }
  }
  if (c.a && !(*c.a > 0.0)) throw ConfigError("--a must be positive");

  if (c.command == "fig1") {
    if (c.q.size() != 1) throw ConfigError("fig1 takes a single --q");
  } else if (c.command == "fig2") {
    if (c.q.empty()) throw ConfigError("fig2 needs at least one --q");
    if (!c.a) throw ConfigError("fig2 needs --a");
    if (!(c.x.lo > 0.0)) throw ConfigError("fig2 lower bound needs x > 0");
    if (c.mc && c.samples < 1000) throw ConfigError("--samples must be >= 1000");
    for (double q : c.q) {
      const Deformation d(q);
      if (admissible_a_max(model, d, Regime::FatTail) == ExtReal(0.0)) {
        std::ostringstream os;
        os << "E exp_q(aX) diverges for " << model.name() << " at q = " << format_double(q);
        if (const auto* t = std::get_if<StudentT>(&model.kind())) {
          os << "; convergence requires q < 1 - 1/nu = " << format_double(1.0 - 1.0 / t->nu);
        }
        throw ConfigError(os.str());
      }
    }
  } else if (c.command == "rate") {
    if (c.regime != "compact" && c.regime != "fat" && c.regime != "classical") {
      throw ConfigError("--regime must be compact, fat or classical");
    }
    if (c.regime != "classical" && c.q.size() != 1) throw ConfigError("rate takes a single --q");
  } else if (c.command == "bound") {
    if (std::find(kBoundKinds.begin(), kBoundKinds.end(), c.kind) == kBoundKinds.end()) {
      throw ConfigError("--kind must be one of chernoff, compact, markov, fat-markov, lower, "
                        "fat-upper-mc, eta-asym, xi, fixed-a");
    }
    if (c.x.steps != 1) throw ConfigError("bound takes a single --x value");
    if (c.q.size() != 1) throw ConfigError("bound takes a single --q");
    if (needs_a(c.kind) && !c.a) throw ConfigError("--kind " + c.kind + " needs --a");
    if (c.kind == "fat-upper-mc" && c.samples < 1000) {
      throw ConfigError("--samples must be >= 1000");
    }
  } else if (c.command == "mc") {
    if (c.samples < 1000) throw ConfigError("--samples must be >= 1000");
  }
}

void write_header(std::ostringstream& os, const RunConfig& c) {
  os << "# format_version=" << c.format_version << '\n';
  os << "# command=" << c.command << '\n';
  os << "# config=";
  const auto args = serialize(c);
  for (std::size_t i = 0; i < args.size(); ++i) os << (i ? " " : "") << args[i];
  os << '\n';
  os << "# seed=" << c.seed << '\n';
}

double log_value(ExtReal v) { return v.is_infinite() ? kInf : std::log(v.value()); }

MCOptions mc_options(const RunConfig& c) { return {c.samples, c.seed, c.workers}; }

}  // namespace

GridSpec GridSpec::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) {
    const double v = parse_double(parts[0], "--x");
    return {v, v, 1};
  }
  if (parts.size() != 3) throw ConfigError("--x expects lo:hi:steps or a single value");
  GridSpec g{parse_double(parts[0], "--x lo"), parse_double(parts[1], "--x hi"),
             static_cast<int>(parse_count(parts[2], "--x steps"))};
  if (g.steps < 1) throw ConfigError("--x steps must be >= 1");
  return g;
}

std::vector<double> GridSpec::points() const {
  if (steps == 1) return {lo};
  std::vector<double> p(steps);
  for (int i = 0; i < steps; ++i) p[i] = lo + (hi - lo) * i / (steps - 1);
  p.back() = hi;
  return p;
}

std::string GridSpec::to_string() const {
  if (steps == 1 && lo == hi) return format_double(lo);
  return format_double(lo) + ":" + format_double(hi) + ":" + std::to_string(steps);
}

std::string format_double(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

DistributionModel parse_model(std::string_view spec) {
  const auto parts = split(spec, ':');
  const std::string_view name = parts[0];
  try {
    if (name == "uniform") {
      if (parts.size() == 1) return DistributionModel::uniform();
      if (parts.size() == 3) {
        return DistributionModel::uniform(parse_double(parts[1], "uniform lo"),
                                          parse_double(parts[2], "uniform hi"));
      }
    } else if (name == "qexp") {
      if (parts.size() == 2 || parts.size() == 3) {
        const Deformation d(parse_double(parts[1], "qexp q"));
        const double scale = parts.size() == 3 ? parse_double(parts[2], "qexp scale") : 1.0;
        return DistributionModel::q_exponential(d, scale);
      }
    } else if (name == "student" || name == "student-t") {
      if (parts.size() == 2) {
        const auto nu = parse_count(parts[1], "student nu");
        if (nu < 1 || nu > 1000000) throw ConfigError("Student-t nu must be a positive integer");
        return DistributionModel::student_t(static_cast<int>(nu));
      }
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid model '") + std::string(spec) + "': " + e.what());
  }
  throw ConfigError("unknown model '" + std::string(spec) +
                    "' (expected uniform[:lo:hi], qexp:q[:scale] or student:nu)");
}

std::vector<std::string> serialize(const RunConfig& c) {
  std::vector<std::string> a{c.command};
  if (c.command == "selftest") {
    a.insert(a.end(), {"--seed", std::to_string(c.seed), "--workers", std::to_string(c.workers)});
    if (!c.out.empty()) a.insert(a.end(), {"--out", c.out});
    return a;
  }
  a.insert(a.end(), {"--model", c.model});
  if (!c.q.empty()) a.insert(a.end(), {"--q", join_doubles(c.q, ',')});
  a.insert(a.end(), {"--n", std::to_string(c.n)});
  if (c.a) a.insert(a.end(), {"--a", format_double(*c.a)});
  a.insert(a.end(), {"--x", c.x.to_string()});
  a.insert(a.end(), {"--samples", std::to_string(c.samples)});
  a.insert(a.end(), {"--seed", std::to_string(c.seed)});
  a.insert(a.end(), {"--workers", std::to_string(c.workers)});
  if (!c.out.empty()) a.insert(a.end(), {"--out", c.out});
  if (c.raw) a.push_back("--raw");
  if (c.mc) a.push_back("--mc");
  if (!c.kind.empty()) a.insert(a.end(), {"--kind", c.kind});
  if (!c.regime.empty()) a.insert(a.end(), {"--regime", c.regime});
  return a;
}

namespace {

struct RawFlags {
  std::string model, q, n, a, x, samples, seed, out, workers, kind, regime;
  bool raw = false;
  bool mc = false;
};

void add_common(CLI::App* sc, RawFlags& f) {
  sc->add_option("--model", f.model, "uniform[:lo:hi] | qexp:q[:scale] | student:nu");
  sc->add_option("--q", f.q, "deformation q in (0,1); comma-separated list for fig2");
  sc->add_option("--n", f.n, "number of summands");
  sc->add_option("--a", f.a, "fixed a for fixed-a bounds");
  sc->add_option("--x", f.x, "lo:hi:steps grid or a single value");
  sc->add_option("--samples", f.samples, "Monte Carlo batches");
  sc->add_option("--seed", f.seed, "master seed (default from QLD_SEED)");
  sc->add_option("--out", f.out, "output path; stdout when omitted");
  sc->add_option("--workers", f.workers, "worker threads; never changes results");
  sc->add_flag("--raw", f.raw, "fig2: raw values instead of natural logs");
  sc->add_flag("--mc", f.mc, "fig2: add the Monte Carlo column");
  sc->add_option("--kind", f.kind,
                 "bound kind: chernoff|compact|markov|fat-markov|lower|fat-upper-mc|eta-asym|"
                 "xi|fixed-a");
  sc->add_option("--regime", f.regime, "rate regime: compact|fat|classical");
}

RunConfig parse_impl(const std::vector<std::string>& args, CLI::App& app, RawFlags& f) {
  app.require_subcommand(1);
  const char* help[] = {"deformed vs standard Chernoff bound for the uniform mean",
                        "lower bound and fixed-a envelopes for Student-t sums",
                        "rate function over an x grid",
                        "a single bound value",
                        "Monte Carlo tail of the sample mean",
                        "built-in consistency checks"};
  for (std::size_t i = 0; i < kCommands.size(); ++i) {
    add_common(app.add_subcommand(kCommands[i], help[i]), f);
  }
  std::vector<const char*> argv{"qld"};
  for (const auto& s : args) argv.push_back(s.c_str());
  app.parse(static_cast<int>(argv.size()), argv.data());

  std::string command;
  for (const auto* sc : app.get_subcommands()) command = sc->get_name();
  RunConfig c = defaults_for(command);
  if (!f.model.empty()) c.model = f.model;
  if (!f.q.empty()) {
    c.q.clear();
    for (auto part : split(f.q, ',')) c.q.push_back(parse_double(part, "--q"));
  }
  if (!f.n.empty()) {
    const auto n = parse_count(f.n, "--n");
    if (n < 1 || n > 100'000'000) throw ConfigError("--n must be in [1, 1e8]");
    c.n = static_cast<int>(n);
  }
  if (!f.a.empty()) c.a = parse_double(f.a, "--a");
  if (!f.x.empty()) c.x = GridSpec::parse(f.x);
  if (!f.samples.empty()) c.samples = parse_count(f.samples, "--samples");
  if (!f.seed.empty()) c.seed = parse_count(f.seed, "--seed");
  if (!f.out.empty()) c.out = f.out;
  if (!f.workers.empty()) c.workers = static_cast<unsigned>(parse_count(f.workers, "--workers"));
  if (!f.kind.empty()) c.kind = f.kind;
  if (!f.regime.empty()) c.regime = f.regime;
  c.raw = f.raw;
  c.mc = f.mc;
  if ((c.command == "bound" || c.command == "mc") && f.x.empty()) {
    throw ConfigError(c.command + " needs --x");
  }
  validate(c);
  return c;
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"q-deformed large-deviation bounds"};
  RawFlags f;
  try {
    return parse_impl(args, app, f);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
}

std::string cmd_fig1(const RunConfig& c) {
  const DistributionModel model = parse_model(c.model);
  const Deformation d(c.q.front());
  const auto xs = c.x.points();
  const BoundCurve deformed = tabulate(
      BoundKind::CompactDeformed, c.n, d.q(), std::nullopt, xs,
      [&](double x) { return ExtReal(compact_deformed_bound(x, c.n, model, d)); }, c.workers);
  const BoundCurve standard = tabulate(
      BoundKind::ChernoffStandard, c.n, 1.0, std::nullopt, xs,
      [&](double x) { return ExtReal(chernoff_standard(x, c.n, model).value); }, c.workers);

  std::ostringstream os;
  write_header(os, c);
  os << "x,bound_q" << short_label(d.q()) << ",bound_q1\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    os << format_double(xs[i]) << ',' << format_double(deformed.grid[i].second.value()) << ','
       << format_double(standard.grid[i].second.value()) << '\n';
  }
  return os.str();
}

std::string cmd_fig2(const RunConfig& c) {
  const DistributionModel model = parse_model(c.model);
  const auto xs = c.x.points();
  const double a = *c.a;
  const BoundCurve lower = tabulate(
      BoundKind::LowerSum, c.n, 1.0, std::nullopt, xs,
      [&](double x) { return ExtReal(lower_bound_sum(x, c.n, model)); }, c.workers);
  std::vector<BoundCurve> uppers;
  for (double q : c.q) {
    const Deformation d(q);
    uppers.push_back(tabulate(
        BoundKind::FixedAAsymptotic, c.n, q, a, xs,
        [&](double x) { return fixed_a_asymptotic(x, c.n, a, model, d); }, c.workers));
  }
  std::vector<MCEstimate> mc;
  if (c.mc) mc = estimate_curve(model, c.n, xs, mc_options(c));

  std::ostringstream os;
  write_header(os, c);
  os << "# x-range default 4:20 is a choice; +inf marks x where an envelope is trivial\n";
  os << "# upper curves are asymptotic envelopes n exp_q*(...) and are not clamped to 1\n";
  const std::string prefix = c.raw ? "" : "log_";
  os << "x," << prefix << "lower";
  for (double q : c.q) os << ',' << prefix << "upper_q" << fixed_label(q);
  if (c.mc) os << ',' << prefix << "mc,mc_stderr";
  os << '\n';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto emit = [&](ExtReal v) {
      os << ',' << format_double(c.raw ? v.value() : log_value(v));
    };
    os << format_double(xs[i]);
    emit(lower.grid[i].second);
    for (const auto& u : uppers) emit(u.grid[i].second);
    if (c.mc) {
      const double p = mc[i].p_hat;
      os << ',' << format_double(c.raw ? p : (p > 0.0 ? std::log(p) : -kInf));
      os << ',' << format_double(mc[i].std_error);
    }
    os << '\n';
  }
  return os.str();
}

std::string cmd_rate(const RunConfig& c) {
  const DistributionModel model = parse_model(c.model);
  std::ostringstream os;
  write_header(os, c);
  os << "x,I,theta_star,a_star\n";
  for (double x : c.x.points()) {
    RateResult r;
    if (c.regime == "classical") {
      const auto cr = classical_rate_function(x, model);
      if (!cr) {
        throw DomainError("classical rate unavailable: " + model.name() +
                          " has no finite moment-generating function");
      }
      r = *cr;
    } else {
      const Regime regime = c.regime == "fat" ? Regime::FatTail : Regime::CompactSupport;
      r = rate_function(x, model, Deformation(c.q.front()), regime);
    }
    os << format_double(x) << ',' << format_double(r.rate.value()) << ','
       << format_double(r.theta_star) << ',' << format_double(r.a_star) << '\n';
  }
  return os.str();
}

std::string cmd_bound(const RunConfig& c) {
  const DistributionModel model = parse_model(c.model);
  const Deformation d(c.q.front());
  const double x = c.x.lo;
  const double a = c.a.value_or(0.0);
  ExtReal value;
  std::string err_col;
  std::string note;
  if (c.kind == "chernoff") {
    const ChernoffBound b = chernoff_standard(x, c.n, model);
    value = b.value;
    if (!b.ldp_available) note = "ldp_unavailable";
  } else if (c.kind == "compact") {
    value = compact_deformed_bound(x, c.n, model, d);
  } else if (c.kind == "markov") {
    value = markov_fixed_a_bound(x, c.n, a, model, d);
  } else if (c.kind == "fat-markov") {
    value = fat_markov_bound(x, c.n, a, model, d);
  } else if (c.kind == "lower") {
    value = lower_bound_sum(x, c.n, model);
  } else if (c.kind == "fat-upper-mc") {
    const auto est = fat_upper_bound_mc(x, c.n, a, model, d, mc_options(c));
    if (est) {
      value = est->p_hat;
      err_col = format_double(est->std_error);
    } else {
      value = 1.0;
      note = "unavailable_x_below_threshold";
    }
  } else if (c.kind == "eta-asym") {
    value = eta_n_asymptotic(x, c.n, d);
    note = "asymptotic";
  } else if (c.kind == "xi") {
    value = xi_asymptotic(x, c.n, model, d);
    note = "asymptotic";
  } else {
    value = fixed_a_asymptotic(x, c.n, a, model, d);
    note = "asymptotic";
  }
  std::ostringstream os;
  write_header(os, c);
  os << "kind,x,n,q,a,value,stderr,note\n";
  os << c.kind << ',' << format_double(x) << ',' << c.n << ',' << format_double(d.q()) << ','
     << (c.a ? format_double(*c.a) : "") << ',' << format_double(value.value()) << ','
     << err_col << ',' << note << '\n';
  return os.str();
}

std::string cmd_mc(const RunConfig& c) {
  const DistributionModel model = parse_model(c.model);
  const auto xs = c.x.points();
  const auto est = estimate_curve(model, c.n, xs, mc_options(c));
  std::ostringstream os;
  write_header(os, c);
  os << "x,n,p_hat,stderr,upper_3sigma,samples,seed\n";
  for (const auto& e : est) {
    os << format_double(e.x) << ',' << e.n << ',' << format_double(e.p_hat) << ','
       << format_double(e.std_error) << ',' << format_double(e.upper_3sigma()) << ','
       << e.samples << ',' << e.seed << '\n';
  }
  return os.str();
}

std::string cmd_selftest(const RunConfig& c, bool& passed) {
  const auto results = run_selftest(c.seed, c.workers);
  std::ostringstream os;
  os << "check,status,detail\n";
  passed = true;
  for (const auto& r : results) {
    os << r.name << ',' << (r.pass ? "PASS" : "FAIL") << ',' << r.detail << '\n';
    passed = passed && r.pass;
  }
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto fail = [&](const char* kind, const std::string& msg, int code) {
    err << "error: kind=" << kind << " message=" << msg << '\n';
    return code;
  };
  RunConfig c;
  {
    CLI::App app{"q-deformed large-deviation bounds"};
    RawFlags f;
    try {
      c = parse_impl(args, app, f);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      return fail("config", e.what(), 2);
    } catch (const ConfigError& e) {
      return fail("config", e.what(), 2);
    }
  }

  std::string text;
  int status = 0;
  try {
    if (c.command == "fig1") text = cmd_fig1(c);
    else if (c.command == "fig2") text = cmd_fig2(c);
    else if (c.command == "rate") text = cmd_rate(c);
    else if (c.command == "bound") text = cmd_bound(c);
    else if (c.command == "mc") text = cmd_mc(c);
    else {
      bool passed = false;
      text = cmd_selftest(c, passed);
      status = passed ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    return fail("config", e.what(), 2);
  } catch (const DivergenceError& e) {
    return fail("divergence", e.what(), 3);
  } catch (const DomainError& e) {
    return fail("domain", e.what(), 3);
  } catch (const RangeError& e) {
    return fail("range", e.what(), 3);
  } catch (const NumericalError& e) {
    return fail("numerical", e.what(), 4);
  }

  if (c.out.empty() || c.out == "-") {
    out << text;
  } else {
    std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
    file << text;
    file.close();
    if (!file) return fail("io", "cannot write " + c.out, 5);
  }
  return status;
}

}  // namespace qld::cli
