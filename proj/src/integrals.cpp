#include "qgf/integrals.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

#include "qgf/errors.hpp"
#include "qgf/jordan_wigner.hpp"

namespace qgf {

MolecularIntegrals::MolecularIntegrals(int n_orb, int n_elec)
    : n_orb_(n_orb),
      n_elec_(n_elec),
      h_(Eigen::MatrixXd::Zero(n_orb, n_orb)),
      eri_(static_cast<std::size_t>(n_orb) * n_orb * n_orb * n_orb, 0.0) {
  if (n_orb <= 0) throw RangeError("orbital count must be positive");
  if (2 * n_orb > kMaxQubits) throw ResourceError("too many orbitals for the qubit register");
  if (n_elec < 0 || n_elec > 2 * n_orb) throw RangeError("electron count outside [0, 2*NORB]");
}

void MolecularIntegrals::set_h(int p, int q, double v) {
  h_(p, q) = v;
  h_(q, p) = v;
}

void MolecularIntegrals::set_eri(int p, int q, int r, int s, double v) {
  const auto at = [this](int a, int b, int c, int d) -> double& {
    return eri_[((static_cast<std::size_t>(a) * n_orb_ + b) * n_orb_ + c) * n_orb_ + d];
  };
  at(p, q, r, s) = v;
  at(q, p, r, s) = v;
  at(p, q, s, r) = v;
  at(q, p, s, r) = v;
  at(r, s, p, q) = v;
  at(s, r, p, q) = v;
  at(r, s, q, p) = v;
  at(s, r, q, p) = v;
}

void MolecularIntegrals::validate(double tol) const {
  if ((h_ - h_.transpose()).cwiseAbs().maxCoeff() > tol) throw RangeError("one-electron matrix not symmetric");
  const int n = n_orb_;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = eri(p, q, r, s);
          if (std::abs(v - eri(q, p, r, s)) > tol || std::abs(v - eri(p, q, s, r)) > tol ||
              std::abs(v - eri(r, s, p, q)) > tol) {
            throw RangeError("two-electron integrals lack 8-fold symmetry");
          }
        }
}

// ---------------------------------------------------------------------------
// FCIDUMP

namespace {

double parse_number(std::string token, std::size_t line) {
  for (char& c : token) {
    if (c == 'D' || c == 'd') c = 'E';
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ParseError("non-numeric token '" + token + "'", line);
  }
  if (used != token.size()) throw ParseError("non-numeric token '" + token + "'", line);
  return v;
}

int parse_index(const std::string& token, std::size_t line) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(token, &used);
  } catch (const std::exception&) {
    throw ParseError("non-numeric index '" + token + "'", line);
  }
  if (used != token.size()) throw ParseError("non-numeric index '" + token + "'", line);
  return v;
}

bool header_value(const std::string& header, const std::string& key, int& value) {
  const std::regex re("(^|[^A-Za-z0-9_])" + key + R"(\s*=\s*(-?\d+))", std::regex::icase);
  std::smatch match;
  if (!std::regex_search(header, match, re)) return false;
  value = std::stoi(match[2].str());
  return true;
}

}  // namespace

MolecularIntegrals parse_fcidump(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::string header;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    header += line;
    header += '\n';
    std::string upper = line;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const auto first = upper.find_first_not_of(" \t");
    const bool slash_only = first != std::string::npos && upper[first] == '/' &&
                            upper.find_first_not_of(" \t", first + 1) == std::string::npos;
    if (upper.find("&END") != std::string::npos || slash_only) {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw ParseError("FCIDUMP header has no end marker", line_no);

  int norb = 0;
  int nelec = 0;
  int ms2 = 0;
  if (!header_value(header, "NORB", norb)) throw ParseError("header lacks NORB", line_no);
  if (!header_value(header, "NELEC", nelec)) throw ParseError("header lacks NELEC", line_no);
  if (!header_value(header, "MS2", ms2)) throw ParseError("header lacks MS2", line_no);
  if (norb <= 0) throw ParseError("NORB must be positive", line_no);

  MolecularIntegrals ints(norb, nelec);
  ints.set_ms2(ms2);

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() != 5) throw ParseError("expected 'value i j k l'", line_no);
    const double v = parse_number(tokens[0], line_no);
    int idx[4];
    for (int k = 0; k < 4; ++k) {
      idx[k] = parse_index(tokens[k + 1], line_no);
      if (idx[k] < 0 || idx[k] > norb) {
        throw ParseError("orbital index " + tokens[k + 1] + " outside [0, NORB]", line_no);
      }
    }
    const auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      ints.set_e_nucl(v);
    } else if (k == 0 && l == 0) {
      if (i == 0 || j == 0) throw ParseError("one-electron entry needs two orbital indices", line_no);
      ints.set_h(i - 1, j - 1, v);
    } else if (i == 0 || j == 0 || k == 0 || l == 0) {
      // Orbital-energy lines (i 0 0 0) are not needed; eps is derived from h and eri.
      if (j == 0 && k == 0 && l == 0) continue;
      throw ParseError("malformed index pattern", line_no);
    } else {
      ints.set_eri(i - 1, j - 1, k - 1, l - 1, v);
    }
  }
  return ints;
}

MolecularIntegrals read_fcidump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open FCIDUMP '" + path.string() + "'");
  return parse_fcidump(in);
}

void write_fcidump(std::ostream& out, const MolecularIntegrals& ints, double threshold) {
  const int n = ints.n_orb();
  out << " &FCI NORB=" << n << ",NELEC=" << ints.n_elec() << ",MS2=" << ints.ms2() << ",\n";
  out << "  ORBSYM=";
  for (int p = 0; p < n; ++p) out << "1,";
  out << "\n  ISYM=1,\n &END\n";
  out << std::setprecision(17);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l <= k; ++l) {
          if (i * (i + 1) / 2 + j < k * (k + 1) / 2 + l) continue;
          const double v = ints.eri(i, j, k, l);
          if (v == 0.0 || (threshold > 0.0 && std::abs(v) < threshold)) continue;
          out << v << ' ' << i + 1 << ' ' << j + 1 << ' ' << k + 1 << ' ' << l + 1 << '\n';
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = ints.h()(i, j);
      if (v == 0.0 || (threshold > 0.0 && std::abs(v) < threshold)) continue;
      out << v << ' ' << i + 1 << ' ' << j + 1 << " 0 0\n";
    }
  out << ints.e_nucl() << " 0 0 0 0\n";
}

// ---------------------------------------------------------------------------

OrbitalEnergies hf_orbital_energies(const MolecularIntegrals& ints) {
  if (ints.n_elec() % 2 != 0) {
    throw RangeError("closed-shell orbital energies need an even electron count, got " +
                     std::to_string(ints.n_elec()));
  }
  OrbitalEnergies out;
  out.n_occ = ints.n_elec() / 2;
  out.eps.resize(ints.n_orb());
  for (int p = 0; p < ints.n_orb(); ++p) {
    double e = ints.h()(p, p);
    for (int q = 0; q < out.n_occ; ++q) e += 2.0 * ints.eri(p, p, q, q) - ints.eri(p, q, q, p);
    out.eps(p) = e;
  }
  return out;
}

double hf_total_energy(const MolecularIntegrals& ints, const OrbitalEnergies& eps) {
  double e = ints.e_nucl();
  for (int p = 0; p < eps.n_occ; ++p) e += ints.h()(p, p) + eps.eps(p);
  return e;
}

PauliSum build_qubit_hamiltonian(const MolecularIntegrals& ints) {
  const int n_orb = ints.n_orb();
  const int n = 2 * n_orb;
  std::vector<PauliSum> create;
  std::vector<PauliSum> annihilate;
  for (int m = 0; m < n; ++m) {
    create.push_back(jw_creation(m, n));
    annihilate.push_back(jw_annihilation(m, n));
  }
  // excitation[m][k] = a_m^dagger a_k
  std::vector<std::vector<PauliSum>> excitation(n);
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) excitation[m].push_back((create[m] * annihilate[k]).prune(1e-15));
  }

  PauliSum ham(PauliTerm(n, ints.e_nucl()));
  for (int p = 0; p < n_orb; ++p)
    for (int q = 0; q < n_orb; ++q) {
      const double v = ints.h()(p, q);
      if (v == 0.0) continue;
      for (int s = 0; s < 2; ++s) {
        PauliSum t = excitation[spin_orbital(p, s)][spin_orbital(q, s)];
        ham += t *= v;
      }
    }

  // 1/2 sum (pq|rs) a+_{p s} a+_{r t} a_{s' t} a_{q s}
  //   = 1/2 sum (pq|rs) [E_{pq} E_{rs} - delta_{qr} E_{ps}]  per spin pair.
  for (int p = 0; p < n_orb; ++p)
    for (int q = 0; q < n_orb; ++q)
      for (int r = 0; r < n_orb; ++r)
        for (int s = 0; s < n_orb; ++s) {
          const double v = ints.eri(p, q, r, s);
          if (v == 0.0) continue;
          for (int sa = 0; sa < 2; ++sa)
            for (int sb = 0; sb < 2; ++sb) {
              const int mp = spin_orbital(p, sa);
              const int mq = spin_orbital(q, sa);
              const int mr = spin_orbital(r, sb);
              const int ms = spin_orbital(s, sb);
              PauliSum t = excitation[mp][mq] * excitation[mr][ms];
              if (mq == mr) t -= excitation[mp][ms];
              ham += t *= 0.5 * v;
            }
        }
  return ham.prune(1e-14);
}

// ---------------------------------------------------------------------------

namespace {

double param(const ModelParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

MolecularIntegrals builtin_model(std::string_view name, const ModelParams& params) {
  if (name == "single_level") {
    const double eps = param(params, "eps", -1.0);
    const double nelec = param(params, "nelec", 2.0);
    MolecularIntegrals ints(1, static_cast<int>(nelec));
    ints.set_h(0, 0, eps);
    return ints;
  }
  if (name == "hubbard_dimer") {
    const double t = param(params, "t", 1.0);
    const double u = param(params, "U", 2.0);
    MolecularIntegrals ints(2, 2);
    // Bonding (0) and antibonding (1) combinations of the two sites.
    ints.set_h(0, 0, -t);
    ints.set_h(1, 1, t);
    const double c[2][2] = {{M_SQRT1_2, M_SQRT1_2}, {M_SQRT1_2, -M_SQRT1_2}};  // c[site][orbital]
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        for (int r = 0; r < 2; ++r)
          for (int s = 0; s < 2; ++s) {
            double v = 0.0;
            for (int site = 0; site < 2; ++site) v += u * c[site][p] * c[site][q] * c[site][r] * c[site][s];
            ints.set_eri(p, q, r, s, v);
          }
    return ints;
  }
  throw RangeError("unknown built-in model '" + std::string(name) + "'");
}

MolecularIntegrals load_system(std::string_view source) {
  constexpr std::string_view prefix = "builtin:";
  if (source.substr(0, prefix.size()) != prefix) return read_fcidump(std::filesystem::path(source));

  std::string rest(source.substr(prefix.size()));
  std::stringstream ss(rest);
  std::string name;
  std::getline(ss, name, ',');
  ModelParams params;
  for (std::string kv; std::getline(ss, kv, ',');) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("model parameter '" + kv + "' is not key=value", 0);
    params[kv.substr(0, eq)] = parse_number(kv.substr(eq + 1), 0);
  }
  return builtin_model(name, params);
}

}  // namespace qgf
