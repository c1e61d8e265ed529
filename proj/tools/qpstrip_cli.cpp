#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "qpstrip/cocycle.hpp"
#include "qpstrip/config.hpp"
#include "qpstrip/corpus.hpp"
#include "qpstrip/longrange.hpp"
#include "qpstrip/measures.hpp"
#include "qpstrip/splitting.hpp"
#include "qpstrip/weyl.hpp"

namespace fs = std::filesystem;
using namespace qps;

namespace {

struct Context {
  json cfg;
  std::string base_dir = ".";
  std::string out_dir = ".";
  unsigned seed = 1;
  std::string hash;
};

std::string footer(const Context& ctx) {
  return "# config_hash=" + ctx.hash + "\n# version=" + QPSTRIP_VERSION + "\n";
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

const json& section(const Context& ctx, const char* name) {
  static const json empty = json::object();
  return ctx.cfg.contains(name) ? ctx.cfg.at(name) : empty;
}

std::vector<double> read_grid(const json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("config: missing grid ") + key);
  const json& g = j.at(key);
  std::vector<double> out;
  if (g.is_array()) {
    for (const auto& v : g) out.push_back(v.get<double>());
  } else if (g.is_object()) {
    int points = g.at("points").get<int>();
    if (points == 1) out.push_back(g.at("from").get<double>());
    else if (points > 1) out = linspace(g.at("from").get<double>(), g.at("to").get<double>(), points);
  } else if (g.is_number()) {
    out.push_back(g.get<double>());
  }
  if (out.empty()) throw DomainError(std::string("config: empty grid ") + key);
  return out;
}

StripSpec strip_of(const Context& ctx) {
  if (ctx.cfg.contains("strip")) return parse_strip(ctx.cfg.at("strip"), ctx.base_dir);
  if (ctx.cfg.contains("operator")) return fold_to_strip(parse_operator(ctx.cfg.at("operator"), ctx.base_dir));
  throw DomainError("config: needs an operator or a strip");
}

OperatorSpec operator_of(const Context& ctx) {
  if (!ctx.cfg.contains("operator")) throw DomainError("config: needs an operator");
  return parse_operator(ctx.cfg.at("operator"), ctx.base_dir);
}

Phase theta_of(const json& j, int d) {
  Phase t = Phase::Zero(d);
  if (j.contains("theta")) t(0) = j.at("theta").get<double>();
  return t;
}

std::string out_path(const Context& ctx, const std::string& name) {
  fs::create_directories(ctx.out_dir);
  return (fs::path(ctx.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
  std::cout << path << "\n";
}

// Runs row(i) for every grid point; failures become nan rows with an error column.
template <class Row>
int grid_csv(const Context& ctx, const std::string& file, const std::string& header, long n, int ncols, Row&& row) {
  std::vector<std::vector<double>> vals(n);
  std::vector<std::string> errs(n);
  for_each_index(n, Exec::Parallel, [&](long i) {
    try {
      vals[i] = row(i);
    } catch (const Error& e) {
      errs[i] = e.what();
    }
  });
  std::ostringstream os;
  os << header << ",error\n";
  bool failed = false;
  for (long i = 0; i < n; ++i) {
    std::vector<double> v = vals[i];
    if (!errs[i].empty()) {
      failed = true;
      v.resize(ncols, std::nan(""));
      v[0] = vals[i].empty() ? v[0] : vals[i][0];
    }
    for (int c = 0; c < ncols; ++c) os << (c ? "," : "") << num(c < static_cast<int>(v.size()) ? v[c] : std::nan(""));
    os << "," << (errs[i].empty() ? "" : quote(errs[i])) << "\n";
  }
  os << footer(ctx);
  write_text(out_path(ctx, file), os.str());
  return failed ? 2 : 0;
}

int cmd_lyapunov(const Context& ctx) {
  const json& j = section(ctx, "lyapunov");
  StripSpec s = strip_of(ctx);
  auto E = read_grid(j, "E");
  long N = j.value("N", 10000L);
  int samples = j.value("samples", 8);
  double y = j.value("y", 0.0);
  const int n = 2 * s.m();
  std::string header = "E";
  for (int i = 1; i <= n; ++i) header += ",L" + std::to_string(i);
  header += ",spread";
  return grid_csv(ctx, "lyapunov.csv", header, static_cast<long>(E.size()), n + 2, [&](long i) {
    auto est = lyapunov_spectrum(schrodinger_cocycle(s, E[i], y), N, samples, -1, Exec::Serial);
    std::vector<double> row{E[i]};
    row.insert(row.end(), est.exponents.begin(), est.exponents.end());
    row.push_back(est.spread);
    return row;
  });
}

int cmd_ids(const Context& ctx) {
  const json& j = section(ctx, "ids");
  auto E = read_grid(j, "E");
  long N = j.value("N", 2048L);
  int samples = j.value("samples", 32);
  IdsTable t = ctx.cfg.contains("strip") ? ids_strip(strip_of(ctx), E, N, samples) : ids(operator_of(ctx), E, N, samples);
  std::string path = out_path(ctx, "ids.csv");
  write_ids_csv(t, path, footer(ctx));
  std::cout << path << "\n";
  return 0;
}

int cmd_weyl(const Context& ctx) {
  const json& j = section(ctx, "weyl");
  StripSpec s = strip_of(ctx);
  auto E = read_grid(j, "E");
  auto eps = read_grid(j, "eps");
  Phase t = theta_of(j, s.dim());
  const long n = static_cast<long>(E.size() * eps.size());
  return grid_csv(ctx, "weyl.csv", "E,eps,trace_direct,trace_expansion,bound,agrees,bound_holds", n, 7, [&](long i) {
    double e = E[i / eps.size()], ep = eps[i % eps.size()];
    ImMTrace tr = im_m_trace(weyl_data(s, cplx(e, ep), t));
    return std::vector<double>{e, ep, tr.direct, tr.expansion, tr.bound, tr.agrees ? 1.0 : 0.0, tr.bound_holds ? 1.0 : 0.0};
  });
}

int cmd_splitting(const Context& ctx) {
  const json& j = section(ctx, "splitting");
  StripSpec s = strip_of(ctx);
  auto E = read_grid(j, "E");
  long N = j.value("N", 2000L);
  Phase t = theta_of(j, s.dim());
  return grid_csv(ctx, "splitting.csv", "E,du,dc,ds,gap,vertical_angle,inverse_vertical_angle,in_Gs,in_Gu",
                  static_cast<long>(E.size()), 9, [&](long i) {
                    Splitting sp = detect_splitting(schrodinger_cocycle(s, E[i]), t, N);
                    return std::vector<double>{E[i], double(sp.dims.u), double(sp.dims.c), double(sp.dims.s), sp.gap,
                                               vertical_angle(sp), inverse_vertical_angle(sp),
                                               critical_set_test(sp) ? 1.0 : 0.0,
                                               critical_set_test(sp, kAngleFloor, Bundle::Unstable) ? 1.0 : 0.0};
                  });
}

int cmd_subordinacy(const Context& ctx) {
  const json& j = section(ctx, "subordinacy");
  OperatorSpec op = operator_of(ctx);
  double k = j.value("plane_wave", 0.25);
  // a plane wave of frequency k solves the free equation at the symbol value
  double E = j.contains("E") ? j.at("E").get<double>() : op.hopping.symbol(k).real();
  double phase = j.value("phase", 0.0);
  std::vector<long> R;
  for (double r : read_grid(j, "R")) R.push_back(static_cast<long>(r));
  WindowVec phi{0, CVec::Ones(1)};
  auto rep = subordinacy_probe(op, E, [&](long n) { return cplx(std::cos(kTwoPi * k * n + phase)); }, phi, R,
                               j.value("alpha", 1.0));
  json out = to_json(rep);
  out["config_hash"] = ctx.hash;
  out["version"] = QPSTRIP_VERSION;
  write_text(out_path(ctx, "subordinacy.json"), out.dump(2) + "\n");
  return rep.holds ? 0 : 3;
}

int cmd_duality(const Context& ctx) {
  const json& j = section(ctx, "duality");
  OperatorSpec op = operator_of(ctx);
  double x = j.value("x", 0.1);
  long N = j.value("N", 1000L);
  long window = j.value("window", 256L);
  DualEigen de = dual_localized_eigenvector(op, x, N);
  json out;
  out["E"] = de.E;
  out["config_hash"] = ctx.hash;
  out["version"] = QPSTRIP_VERSION;
  bool ok = true;
  for (long w = window; w >= 16; w /= 2) {
    DualVector r = restrict_cube(de.vec, std::min(w, N));
    DualityCheck c = duality_check(op, r, de.E, x, -w, w, 1.0);
    out["rows"].push_back({{"window", w}, {"residual", c.residual}, {"shell_l1", c.shell_l1}, {"bound", c.bound},
                           {"holds", c.holds}});
    ok = ok && c.holds;
  }
  out["holds"] = ok;
  write_text(out_path(ctx, "duality.json"), out.dump(2) + "\n");
  return ok ? 0 : 3;
}

int cmd_thouless(const Context& ctx) {
  const json& j = section(ctx, "thouless");
  const bool strip_mode = ctx.cfg.contains("strip");
  StripSpec s = strip_of(ctx);
  std::vector<cplx> energies;
  for (const auto& e : j.at("energies")) energies.emplace_back(e.at(0).get<double>(), e.size() > 1 ? e.at(1).get<double>() : 0.0);
  if (energies.empty()) throw DomainError("config: empty energy list");
  const json& ij = j.contains("ids") ? j.at("ids") : json::object();
  auto grid = read_grid(ij, "E");
  long size = ij.value("N", 2048L);
  int samples = ij.value("samples", 32);
  long N = j.value("N", 20000L);
  int lsamples = j.value("samples", 8);
  IdsTable table;
  OperatorSpec op;
  if (strip_mode) {
    table = ids_strip(s, grid, size, samples);
  } else {
    op = operator_of(ctx);
    table = ids(op, grid, size, samples);
  }
  const int k = strip_mode ? s.m() : op.hopping.range();
  return grid_csv(ctx, "thouless.csv", "E_re,E_im,log_potential,lyap_sum,residual", static_cast<long>(energies.size()), 5,
                  [&](long i) {
                    cplx z = energies[i];
                    double ls = upper_lyapunov_sum(schrodinger_cocycle(s, z), k, N, lsamples, Exec::Serial).value;
                    double r = strip_mode ? thouless_residual(s, z, table, ls) : thouless_residual(op, z, table, ls);
                    return std::vector<double>{z.real(), z.imag(), log_potential(table, z), ls, r};
                  });
}

int cmd_corpus(const Context& ctx) {
  const json& j = section(ctx, "corpus");
  auto entries = run_corpus(j.value("filter", std::string()));
  json m = corpus_manifest(entries);
  m["config_hash"] = ctx.hash;
  m["version"] = QPSTRIP_VERSION;
  write_text(out_path(ctx, "corpus.json"), m.dump(2) + "\n");
  return m["pass"].get<bool>() ? 0 : 3;
}

int cmd_verify(const Context& ctx) {
  const json& j = section(ctx, "verify");
  StripSpec s = strip_of(ctx);
  auto E = read_grid(j, "E");
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> G;
  const int m = s.m();
  json report;
  bool ok = true;
  auto record = [&](const std::string& name, double value, double tol) {
    bool pass = std::isfinite(value) && value <= tol;
    report["checks"].push_back({{"check", name}, {"value", value}, {"tol", tol}, {"pass", pass}});
    ok = ok && pass;
  };
  for (double e : E) {
    Phase t = Phase::Constant(s.dim(), U(rng));
    Cocycle c = schrodinger_cocycle(s, e);
    CMat a = c.at(t);
    std::string tag = " E=" + num(e);
    record("symplectic" + tag, (a.adjoint() * c.form->S * a - c.form->S).norm(), 1e-12);
    CVec x(2 * m), y(2 * m), v(2 * m);
    for (int i = 0; i < 2 * m; ++i) {
      x(i) = cplx(G(rng), G(rng));
      y(i) = cplx(G(rng), G(rng));
      v(i) = cplx(G(rng), G(rng));
    }
    auto tr = wronskian_orbit(s.C, strip_solution(s, e, t, x, 200), strip_solution(s, e, t, y, 200), 1e-10);
    record("wronskian" + tag, tr.max_deviation / tr.tolerance, 1.0);
    cplx mono = monotonicity_check(s, e, t, v);
    double ref = monotonicity_reference(s, e, t, v);
    record("monotonicity" + tag, std::abs(mono - ref) / std::max(1.0, std::abs(ref)), 1e-10);
    WeylData w = weyl_data(s, cplx(e, 0.1), t);
    ImMTrace it = im_m_trace(w);
    record("im M expansion" + tag, std::abs(it.expansion - it.direct) / std::max(1.0, std::abs(it.direct)), 1e-8);
    record("im M bound" + tag, it.direct - it.bound, 0.0);
    CMat g(2 * m, 2 * m);
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) g.block(p * m, q * m, m, m) = green_block(s, cplx(e, 0.1), t, p, q, 801);
    record("weyl oracle" + tag, (w.M_z - g).norm() / g.norm(), 1e-2);
  }
  report["pass"] = ok;
  report["config_hash"] = ctx.hash;
  report["version"] = QPSTRIP_VERSION;
  write_text(out_path(ctx, "verify.json"), report.dump(2) + "\n");
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-periodic strip operator toolkit"};
  app.require_subcommand(1);
  std::string config, out = ".";
  int jobs = 0;
  unsigned seed = 1;
  app.add_option("--config", config, "JSON config file");
  app.add_option("--out", out, "output directory");
  app.add_option("--jobs", jobs, "OpenMP threads (0 = runtime default)");
  app.add_option("--seed", seed, "seed for randomized checks");
  app.set_version_flag("--version", std::string(QPSTRIP_VERSION));
  const std::vector<std::pair<std::string, int (*)(const Context&)>> commands = {
      {"lyapunov", cmd_lyapunov}, {"ids", cmd_ids},           {"weyl", cmd_weyl},         {"splitting", cmd_splitting},
      {"subordinacy", cmd_subordinacy}, {"duality", cmd_duality}, {"thouless", cmd_thouless}, {"verify", cmd_verify},
      {"corpus", cmd_corpus}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name, name + " run")->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  try {
    Context ctx;
    ctx.out_dir = out;
    ctx.seed = seed;
    if (!config.empty()) {
      ctx.cfg = load_json_file(config);
      ctx.base_dir = fs::path(config).parent_path().string();
      if (ctx.base_dir.empty()) ctx.base_dir = ".";
    }
    ctx.hash = config_hash(ctx.cfg);
    set_jobs(jobs);
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) return fn(ctx);
    return 1;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
