#include "qgf/gf_io.hpp"

#include <cstdio>
#include <ostream>

#include "qgf/errors.hpp"
#include "qgf/units.hpp"

namespace qgf {

namespace {

nlohmann::json complex_matrix(const Eigen::MatrixXcd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json poles(const std::vector<PoleResidue>& list) {
  auto out = nlohmann::json::array();
  for (const auto& p : list) {
    out.push_back({{"omega_Ha", p.omega}, {"omega_eV", ha_to_ev(p.omega)}, {"B", complex_matrix(p.b)}});
  }
  return out;
}

nlohmann::json energy(double ha) { return {{"Ha", ha}, {"eV", ha_to_ev(ha)}}; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

nlohmann::json to_json(const TransitionData& t) {
  nlohmann::json j;
  j["provenance"] = t.sampled ? nlohmann::json{{"mode", "sampled"}, {"nmeas", t.nmeas}, {"seed", t.seed}}
                              : nlohmann::json{{"mode", "exact"}};
  j["n_modes"] = t.n_modes;
  j["e_gs"] = energy(t.e_gs);
  j["degeneracy_tol_Ha"] = kDegeneracyTol;
  j["offdiag_fill"] = "B(m',m) = conj(B(m,m')), raw estimates without symmetrisation";
  j["electron"] = poles(t.electron);
  j["hole"] = poles(t.hole);
  return j;
}

nlohmann::json to_json(const GmReport& r) {
  nlohmann::json j;
  j["E_HF"] = energy(r.e_hf);
  j["dE1"] = energy(r.delta_e1);
  j["dE2"] = energy(r.delta_e2);
  j["dE2_residue"] = energy(r.delta_e2_residue);
  j["E_GM"] = energy(r.e_gm);
  j["mu"] = energy(r.mu);
  j["contour_nodes_per_edge"] = r.contour_nodes;
  j["gamma"] = {complex_matrix(r.gamma[0]), complex_matrix(r.gamma[1])};
  return j;
}

void write_spectrum_csv(std::ostream& out, std::span<const double> omega_ev, std::span<const double> a_per_ev) {
  if (omega_ev.size() != a_per_ev.size()) throw DimensionError("spectrum columns differ in length");
  out << "omega_eV,A_per_eV\n";
  for (std::size_t i = 0; i < omega_ev.size(); ++i) out << fmt(omega_ev[i]) << ',' << fmt(a_per_ev[i]) << '\n';
}

void write_self_energy_csv(std::ostream& out, std::span<const double> omega_ev, std::span<const cplx> tr_sigma_ev) {
  if (omega_ev.size() != tr_sigma_ev.size()) throw DimensionError("self-energy columns differ in length");
  out << "omega_eV,ReTrSigma_eV,ImTrSigma_eV\n";
  for (std::size_t i = 0; i < omega_ev.size(); ++i) {
    out << fmt(omega_ev[i]) << ',' << fmt(tr_sigma_ev[i].real()) << ',' << fmt(tr_sigma_ev[i].imag()) << '\n';
  }
}

}  // namespace qgf
