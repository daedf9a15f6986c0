#ifndef IMPURE_SAMPLING_HPP
#define IMPURE_SAMPLING_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "impure/densities.hpp"
#include "impure/population.hpp"

namespace impure {

enum class SamplingMode {
  exact_count,  ///< exactly prevalence * s positives, then shuffled
  bernoulli,    ///< each label positive independently with probability prevalence
};

enum class FileFormat { csv, json };

/// Draws a labeled synthetic population. Densities without a sampler get a
/// rejection sampler over their support box.
EmpiricalPopulation sample_population(const Density& positive, const Density& negative,
                                      double prevalence, std::size_t size,
                                      std::uint64_t seed,
                                      SamplingMode mode = SamplingMode::exact_count);

/// Infers the format from the extension (.json, otherwise csv).
FileFormat format_for_path(const std::filesystem::path& path);

/// CSV: comma-separated decimals, optional header row, one point per row. A
/// header column named "label" is read as hidden labels.
/// JSON: {"dim": m, "points": [[...], ...], "prevalence": optional}.
EmpiricalPopulation load_population(const std::filesystem::path& path, FileFormat format);
EmpiricalPopulation load_population(const std::filesystem::path& path);

/// Writes with 17 significant digits so that loading reproduces every
/// coordinate bitwise. Hidden labels are written as a "label" column (CSV) or
/// "labels" array (JSON) when present and `include_labels` is set.
void save_population(const EmpiricalPopulation& population,
                     const std::filesystem::path& path, FileFormat format,
                     bool include_labels = true);

}  // namespace impure

#endif  // IMPURE_SAMPLING_HPP
