#pragma once

#include <string>

#include "rik/interpolation.hpp"
#include "rik/majorization.hpp"
#include "rik/measure.hpp"
#include "rik/operators.hpp"
#include "rik/spaces.hpp"

// JSON wire formats.
//
// StepFunction   {"alpha":"1"|"inf","breakpoints":[...],"values":[...],
//                 "tail":x,"sup_only":bool?}
// NormSpec       {"variant":"L1"|"LInf"|"L1+LInf"|"Lp"|"Mstar"|"M",
//                 "p":x?,"phi":{"form":"power","a":x}|
//                              {"form":"table","t":[...],"v":[...]}}
// TransferMatrix {"n":int,"rows":[[...],...],"kind":"ds"|"dss"}
// Certificates and operator expressions are tagged objects mirroring the
// in-memory types; see the from_/to_ pairs below.

namespace rik {

std::string to_json(const StepFunction& x);
StepFunction step_function_from_json(const std::string& text);

std::string to_json(const NormSpec& spec);
NormSpec norm_spec_from_json(const std::string& text);

std::string to_json(const TransferMatrix& m);
TransferMatrix transfer_matrix_from_json(const std::string& text);

std::string to_json(const MajorizationCertificate& cert);

std::string to_json(const OperatorExpr& op);
OperatorExpr operator_expr_from_json(const std::string& text);

std::string to_json(const SubstochasticCertificate& cert);

std::string to_json(const OperatorNormEstimate& est);

// K-profile CSV: header "t,K" plus one node row per line.
std::string kprofile_csv(const KProfile& profile);

}  // namespace rik
