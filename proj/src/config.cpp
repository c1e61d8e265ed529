#include "qpstrip/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qps {

namespace {

Phase read_phase(const json& j, const char* key, double fallback, int dim) {
  if (!j.contains(key)) return Phase::Constant(dim, fallback);
  const json& v = j.at(key);
  if (v.is_number()) return Phase::Constant(1, v.get<double>());
  if (!v.is_array() || v.empty()) throw DomainError(std::string("config: ") + key + " must be a number or a list");
  Phase p(static_cast<long>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) p(static_cast<long>(i)) = v[i].get<double>();
  return p;
}

std::vector<int> read_index(const json& k) {
  if (k.is_number_integer()) return {k.get<int>()};
  if (k.is_array()) return k.get<std::vector<int>>();
  throw DomainError("config: Fourier index must be an integer or an integer list");
}

CMat read_matrix(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw DomainError("config: matrix must be a list of rows");
  const long r = static_cast<long>(j.size()), c = static_cast<long>(j[0].size());
  CMat m(r, c);
  for (long i = 0; i < r; ++i) {
    if (static_cast<long>(j[i].size()) != c) throw DomainError("config: ragged matrix");
    for (long k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

}  // namespace

OperatorSpec parse_operator(const json& j, const std::string& base_dir) {
  try {
    OperatorSpec spec;
    if (!j.contains("hopping")) throw DomainError("config: missing hopping");
    for (const auto& e : j.at("hopping")) {
      if (!e.is_array() || e.size() < 2) throw DomainError("config: hopping entries are [k, re, im]");
      int k = e[0].get<int>();
      double im = e.size() > 2 ? e[2].get<double>() : 0.0;
      spec.hopping.w[k] += cplx(e[1].get<double>(), im);
    }
    if (j.contains("hopping_tail")) {
      const json& t = j.at("hopping_tail");
      spec.hopping = HoppingSeq::with_power_tail(spec.hopping, t.value("amplitude", 1.0), t.value("power", 4.0),
                                                 t.value("tol", 1e-12));
    }
    spec.hopping.validate();
    PotentialSpec& p = spec.potential;
    p.epsilon = j.value("epsilon", 1.0);
    if (j.contains("potential")) {
      const json& pj = j.at("potential");
      if (pj.contains("fourier")) {
        p.kind = PotentialSpec::Kind::QuasiPeriodic;
        for (const auto& e : pj.at("fourier")) {
          if (!e.is_array() || e.size() < 2) throw DomainError("config: fourier entries are [k, re, im]");
          double im = e.size() > 2 ? e[2].get<double>() : 0.0;
          p.fourier.push_back({read_index(e[0]), cplx(e[1].get<double>(), im)});
        }
      } else if (pj.contains("sequence")) {
        p.kind = PotentialSpec::Kind::Explicit;
        std::filesystem::path path = pj.at("sequence").get<std::string>();
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        std::ifstream in(path);
        if (!in) throw DomainError("config: cannot read potential sequence " + path.string());
        double v;
        while (in >> v) p.sequence.push_back(v);
        p.first = pj.value("first", 0L);
      } else {
        throw DomainError("config: potential needs fourier or sequence");
      }
    } else {
      p.epsilon = 0.0;
    }
    int d = 1;
    if (!p.fourier.empty()) d = static_cast<int>(p.fourier[0].k.size());
    p.alpha = read_phase(j, "alpha", kGolden, d);
    p.theta = read_phase(j, "theta", 0.0, static_cast<int>(p.alpha.size()));
    p.validate();
    return spec;
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
}

StripSpec parse_strip(const json& j, const std::string& base_dir) {
  try {
    if (j.contains("fold")) return fold_to_strip(parse_operator(j.at("fold"), base_dir));
    StripSpec s;
    if (!j.contains("C")) throw DomainError("config: strip needs C");
    s.C = read_matrix(j.at("C"));
    if (j.contains("C_im")) s.C += kI * read_matrix(j.at("C_im"));
    int d = 1;
    if (j.contains("V"))
      for (const auto& t : j.at("V")) {
        MatrixTerm term;
        term.k = t.contains("k") ? read_index(t.at("k")) : std::vector<int>{0};
        d = static_cast<int>(term.k.size());
        term.c = read_matrix(t.at("re")).cast<cplx>();
        if (t.contains("im")) term.c += kI * read_matrix(t.at("im"));
        s.V.push_back(term);
      }
    s.alpha = read_phase(j, "alpha", kGolden, d);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
}

json operator_to_json(const OperatorSpec& spec) {
  json j;
  j["hopping"] = json::array();
  for (const auto& [k, w] : spec.hopping.w) j["hopping"].push_back({k, w.real(), w.imag()});
  if (spec.potential.kind == PotentialSpec::Kind::QuasiPeriodic) {
    json f = json::array();
    for (const auto& t : spec.potential.fourier) f.push_back({t.k, t.c.real(), t.c.imag()});
    j["potential"] = {{"fourier", f}};
  }
  j["alpha"] = std::vector<double>(spec.potential.alpha.data(), spec.potential.alpha.data() + spec.potential.alpha.size());
  j["theta"] = std::vector<double>(spec.potential.theta.data(), spec.potential.theta.data() + spec.potential.theta.size());
  j["epsilon"] = spec.potential.epsilon;
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError(std::string("config parse error: ") + e.what());
  }
}

std::string config_hash(const json& j) {
  std::string s = j.dump();
  unsigned long long h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

}  // namespace qps
