#pragma once

#include "sres/core.hpp"
#include "sres/forward_model.hpp"

namespace sres {

/// Largest operator handled by the dense SVD path, in rows x active columns.
inline constexpr long kDenseSvdLimit = 4096L * 4096L;
/// Largest row count handled at all (beyond the dense limit the Gram matrix P P^T is used).
inline constexpr int kConditioningMaxRows = 4096;

/// sigma_max / sigma_min of P over its active columns. Returns +infinity when
/// sigma_min < 1e-12 sigma_max. Small operators use a dense SVD; wide ones use the
/// eigenvalues of P P^T, which cannot resolve condition numbers beyond about 1e7.
/// Throws AnalysisError if P has more than kConditioningMaxRows rows.
double condition_number(const ProjectionOperator& P);

/// Operator of a tile x tile superpixel window centred in a display large enough that
/// no footprint of the window reaches a panel border. Pitch, gaps and sr_factor come
/// from `base`; its panel size is ignored.
ProjectionOperator conditioning_tile(const DisplayGeometry& base, const DiffuserModel& model, int tile);

} // namespace sres
