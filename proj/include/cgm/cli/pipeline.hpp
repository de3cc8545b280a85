#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "cgm/cli/config.hpp"

namespace cgm {

/// Exit codes: 0 success, 1 a postcondition (e.g. a constraint bound) failed.
/// Configuration and I/O problems are thrown as cgm::Error.
int cmd_generate(const PipelineConfig& config, std::ostream& log);
int cmd_train(const PipelineConfig& config, std::ostream& log);
int cmd_sample(const PipelineConfig& config, std::ostream& log);
int cmd_validate(const PipelineConfig& config, std::ostream& log);
int cmd_surrogate(const PipelineConfig& config, std::ostream& log);
int cmd_report(const PipelineConfig& config, std::ostream& log);

/// Constraint recorded in a dataset directory's meta.txt, or nullopt if the
/// directory has none.
std::optional<ConstraintSpec> read_dataset_constraint(const std::filesystem::path& dir, const VolumeEnforcement& how);

} // namespace cgm
