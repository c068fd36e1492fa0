#pragma once

#include "json.hpp"

#include "aal/dlm.hpp"
#include "aal/line_model.hpp"
#include "aal/qot.hpp"

namespace aal {

// JSON has no infinity; +inf is written as the string "inf".
nlohmann::json number_or_inf(double v);
double number_or_inf(const nlohmann::json& j);

void to_json(nlohmann::json& j, const FiberSpan& f);
void to_json(nlohmann::json& j, const Amplifier& a);
void to_json(nlohmann::json& j, const TransceiverMode& m);
void from_json(const nlohmann::json& j, TransceiverMode& m);
void to_json(nlohmann::json& j, const ModeEvaluation& e);
void to_json(nlohmann::json& j, const ElementQot& e);
void to_json(nlohmann::json& j, const QotReport& r);
void to_json(nlohmann::json& j, const PowerProfile& p);
void to_json(nlohmann::json& j, const LinkFit& f);
void from_json(const nlohmann::json& j, LinkFit& f);
void to_json(nlohmann::json& j, const DlmDiagnostics& d);
void to_json(nlohmann::json& j, const MarginPoint& p);

}  // namespace aal
