#ifndef MSLAB_SERIALIZE_HPP
#define MSLAB_SERIALIZE_HPP

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mslab/anomaly_ledger.hpp"
#include "mslab/ed_oracle.hpp"
#include "mslab/edge_ensemble.hpp"
#include "mslab/gaussian_core.hpp"
#include "mslab/wire_algebra.hpp"

namespace mslab {

nlohmann::json to_json(const IntMatrix& m);
nlohmann::json to_json(const IntVector& v);
nlohmann::json to_json(const Modulation& f);
nlohmann::json to_json(const WireArray& a);

// {block, bound, basis[], rank, symmetric_basis[], symmetric_rank,
//  kernel_rank, saturated, solution_count, truncated, vertices[],
//  fully_gapped, exhaustive}
nlohmann::json gap_scan_record(const std::string& block, const WireArray& array, const VertexEnumeration& en,
                               const GappingResult& gap);

nlohmann::json to_json(const AnomalyMatrix& a);
nlohmann::json to_json(const FluxReport& f);
nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const HierarchyReport& h);

// {matrix, per_region{label: {global, local}}, flux{g: ...},
//  closed_realizable, open_realizable, violations[]}
nlohmann::json anomaly_report(const ChannelSet& set);

nlohmann::json to_json(const FitRecord& f);
nlohmann::json to_json(const EnsembleSpec& s);
// {fit_model, exponent_or_length, r2, margin, n_valid_samples, ...}
nlohmann::json correlator_summary(const CorrelatorEstimate& e);
// distance,mean_re,mean_im,stderr
void write_correlator_csv(std::ostream& os, const CorrelatorEstimate& e);
// winding,particles,delta_q,gap
void write_spectral_flow_csv(std::ostream& os, const std::vector<SpectralFlowRow>& rows);

nlohmann::json to_json(const SymmetryCheck& c);

// Fixed-width, round-trip formatting used by every CSV writer.
std::string format_double(double x);

}  // namespace mslab

#endif  // MSLAB_SERIALIZE_HPP
