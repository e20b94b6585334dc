#pragma once

#include <string>

#include "whittlekit/arm.hpp"
#include "whittlekit/ewisc.hpp"
#include "whittlekit/learner.hpp"
#include "whittlekit/oracle.hpp"

namespace whittlekit {

// Arm interchange schema:
// {"num_states": S, "p_passive": [[...]], "p_active": [[...]],
//  "r_passive": [...], "r_active": [...], "discount": beta?}
// Matrices are row-major; "discount" is omitted for average-reward arms.

Arm arm_from_json_text(const std::string& text);
std::string arm_to_json_text(const Arm& arm, int indent = 2);
Arm load_arm(const std::string& path);
void save_arm(const Arm& arm, const std::string& path);

std::string index_computation_to_json_text(const IndexComputation& c, bool indexable,
                                           int indent = 2);
std::string verdict_to_json_text(const IndexabilityVerdict& v, int indent = 2);
std::string lambda_scan_to_json_text(const LambdaScan& scan, int indent = 2);

/// Trace CSV: header t,state,estimate,truth,abs_error,indexable,ewisc_ms
/// with one row per (recorded step, state). Floats are printed with 17
/// significant digits so identical runs produce byte-identical files.
std::string trace_to_csv(const LearningTrace& trace, const Vector* truth);

/// Metrics CSV: t,min_err,median_err,max_err.
std::string metrics_to_csv(const std::vector<ErrorMetricsRow>& rows);

/// 17-significant-digit float formatting used in every CSV.
std::string format_double(double x);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace whittlekit
