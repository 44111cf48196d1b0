#pragma once

// Machine-readable records for point queries and Monte Carlo runs.

#include <iosfwd>

#include <json.hpp>

#include "uwcrb/crb.hpp"
#include "uwcrb/montecarlo.hpp"

namespace uwcrb {

nlohmann::json to_json(const CrbReport& report);
nlohmann::json to_json(const BoundValidationReport& report);

void write_text(std::ostream& out, const CrbReport& report);

inline constexpr const char* kMonteCarloCsvHeader =
    "trials,excluded,D_true,mean_D_hat,empirical_bias,empirical_variance,empirical_mse,crb_d,"
    "efficiency_ratio,standard_error_of_variance,z_d_variance";

/// Header line plus one record.
void write_csv(std::ostream& out, const BoundValidationReport& report);

}  // namespace uwcrb
