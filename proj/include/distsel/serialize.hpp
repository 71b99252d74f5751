#pragma once

#include <json.hpp>

#include "distsel/clustering.hpp"
#include "distsel/dataset.hpp"
#include "distsel/density.hpp"
#include "distsel/dip.hpp"
#include "distsel/distances.hpp"
#include "distsel/gmm.hpp"

namespace distsel {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Wraps a payload object with the top-level schema tag.
Json with_schema(Json body);

Json to_json(const DataMatrix& data);
Json to_json(const LabelVector& labels);
Json to_json(const Partition& partition);
Json to_json(const ValidationReport& report);
Json to_json(const ContrastReport& report);
Json to_json(const DipResult& dip);
Json to_json(const DensityEstimate& density);
Json to_json(const MdPlotSpec& spec);
Json to_json(const GmmModel& model);
Json to_json(const FitResult& fit);
Json to_json(const BayesBoundaries& boundaries);
Json to_json(const GofResult& gof);
Json to_json(const QqData& qq);
Json to_json(const ModeSelection& selection);
Json to_json(const Dendrogram& dendrogram);
Json to_json(const Eq5Report& report);

// Summary statistics of a distance feature: size, min, median, max.
Json summarize(const DistanceFeature& df);

DataMatrix data_matrix_from_json(const Json& j);
LabelVector labels_from_json(const Json& j);

// {weights, means, sds[, loglik, n]}. Weights must sum to 1 within 1e-6;
// violations throw InvalidArgument.
GmmModel gmm_model_from_json(const Json& j);
inline constexpr double kWeightSumTolerance = 1e-6;

// Readers for persisted results; the inverse of the matching to_json.
DipResult dip_from_json(const Json& j);
DensityEstimate density_from_json(const Json& j);
FitResult fit_from_json(const Json& j);
BayesBoundaries boundaries_from_json(const Json& j);
GofResult gof_from_json(const Json& j);
QqData qq_from_json(const Json& j);
Partition partition_from_json(const Json& j);
Eq5Report eq5_from_json(const Json& j);

} // namespace distsel
