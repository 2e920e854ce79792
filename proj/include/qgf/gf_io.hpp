#pragma once

#include <iosfwd>
#include <span>

#include <json.hpp>

#include "qgf/greens.hpp"

namespace qgf {

/// Complex numbers become [re, im]; energies are given in Hartree and eV.
nlohmann::json to_json(const TransitionData& t);
nlohmann::json to_json(const GmReport& r);

/// Header "omega_eV,A_per_eV".
void write_spectrum_csv(std::ostream& out, std::span<const double> omega_ev, std::span<const double> a_per_ev);

/// Header "omega_eV,ReTrSigma_eV,ImTrSigma_eV".
void write_self_energy_csv(std::ostream& out, std::span<const double> omega_ev, std::span<const cplx> tr_sigma_ev);

}  // namespace qgf
