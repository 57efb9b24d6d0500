#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>

#include "ebae/ensemble.hpp"

namespace ebae {

/// Columns: variant, MAE, MMRE, Pred25, LSD, MBRE, MIBRE, SA, Delta, SA5,
/// fallback_count, kept. SA and SA5 are fractions.
void write_variants_csv(std::ostream& out, std::span<const EvalSummary> summaries,
                        std::span<const FilterVerdict> verdicts);

std::string render_summary(const PipelineReport& report);

/// Writes every report artifact into an existing directory.
void write_report_files(const PipelineReport& report, const std::filesystem::path& dir);

/// Builds the report in a sibling temporary directory, then renames it onto
/// `out` (replacing a previous report).
void write_report(const PipelineReport& report, const std::filesystem::path& out);

/// Runs `fill` on a fresh temporary directory and renames it onto `out`.
void write_directory_atomically(const std::filesystem::path& out,
                                const std::function<void(const std::filesystem::path&)>& fill);

/// Writes a single file through a temporary sibling and rename.
void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& fill);

}  // namespace ebae
