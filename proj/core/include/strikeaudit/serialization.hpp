// Copyright 2026 The StrikeAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef STRIKEAUDIT_SERIALIZATION_HPP_
#define STRIKEAUDIT_SERIALIZATION_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "strikeaudit/audit.hpp"
#include "strikeaudit/logreg.hpp"
#include "strikeaudit/subset_select.hpp"
#include "strikeaudit/tree_opt.hpp"

namespace strikeaudit {

// JSON documents. Readers throw SchemaError on malformed input. Object keys
// are emitted sorted, so equal values always serialize to equal bytes.

// {support: [names], beta, intercept, ridge, diagnostics}
nlohmann::json model_to_json(const LogisticModel& model,
                             std::span<const std::string> columns);
LogisticModel model_from_json(const nlohmann::json& doc,
                              std::span<const std::string> columns);

// {feature_names, root}; an internal node is {feature, n, n_struck, left,
// right} and a leaf is {leaf: {n, n_struck}}.
nlohmann::json tree_to_json(const Tree& tree);
Tree tree_from_json(const nlohmann::json& doc);

nlohmann::json subset_path_to_json(const SubsetPath& path);
SubsetPath subset_path_from_json(const nlohmann::json& doc);

nlohmann::json importance_to_json(const ImportanceProfile& profile);
ImportanceProfile importance_from_json(const nlohmann::json& doc);

nlohmann::json findings_to_json(std::span<const DisparityFinding> findings);
std::vector<DisparityFinding> findings_from_json(const nlohmann::json& doc);

nlohmann::json audit_config_to_json(const AuditConfig& cfg);
// Fields absent from `doc` keep the values already in `cfg`.
void audit_config_from_json(const nlohmann::json& doc, AuditConfig& cfg);

nlohmann::json report_to_json(const AuditReport& report);
AuditReport report_from_json(const nlohmann::json& doc);

// Pretty-printed JSON with a trailing newline.
std::string dump_json(const nlohmann::json& doc);

// CSV exports. Numbers use the shortest round-trip form.
void write_curve_csv(const SubsetPath& path, std::ostream& out);  // k,cv_auc_mean,cv_auc_sd
void write_importance_csv(const ImportanceProfile& profile, std::ostream& out);
void write_disparity_csv(std::span<const DisparityFinding> findings, std::ostream& out);

// Plain-text summary tables of a report.
std::string render_report_text(const AuditReport& report);

std::string format_number(double value);

}  // namespace strikeaudit

#endif  // STRIKEAUDIT_SERIALIZATION_HPP_
