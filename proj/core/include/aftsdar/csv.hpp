#pragma once

#include <string>

#include "aftsdar/survival_data.hpp"

namespace aftsdar {

/// Read a dataset CSV. The header must contain exactly one of `time`
/// (positive raw times, natural log applied) or `logtime` (taken
/// verbatim), plus `status` (0/1); every other column is a covariate in
/// file order. Malformed cells are InputErrors carrying row and column
/// coordinates (1-based, header is row 1).
SurvivalDataset read_dataset_csv(const std::string& path);

/// Write a dataset in the same layout, with a `logtime` column so the
/// round trip is transform-free.
void write_dataset_csv(const std::string& path, const SurvivalDataset& dataset);

}  // namespace aftsdar
