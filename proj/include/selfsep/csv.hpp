#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "selfsep/types.hpp"

namespace selfsep {

// Shortest decimal rendering that round-trips the exact double value.
std::string format_double(double value);

double parse_double(std::string_view text);
uint64_t parse_u64(std::string_view text);

// Splits one CSV line on commas.  Fields never contain commas or quotes in
// any of the formats written here, so no quoting dialect is needed.
std::vector<std::string_view> split_fields(std::string_view line);

// Writes contents to a temporary file in the target's directory and renames
// it into place, so readers never observe a partially written file.
void atomic_write_file(const std::filesystem::path& path,
                       std::string_view contents);

inline constexpr std::string_view kDatasetHeader =
    "encounter_id,fidelity,s1_x,s1_y,s1_vx,s1_vy,s2_x,s2_y,s2_vx,s2_vy,a1,a2,"
    "seed";

std::string dataset_to_csv(const Dataset& data);
Dataset dataset_from_csv(std::istream& in);

void write_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

// One cached ensemble row: a dataset record plus the weight combination the
// simulation ran under.
struct EnsembleRow {
  DatasetRecord record;
  UtilityWeights weights;
};

inline constexpr std::string_view kEnsembleHeader =
    "encounter_id,fidelity,s1_x,s1_y,s1_vx,s1_vy,s2_x,s2_y,s2_vx,s2_vy,a1,a2,"
    "seed,w1,w2";

std::string ensemble_rows_to_csv(const std::vector<EnsembleRow>& rows);
std::vector<EnsembleRow> ensemble_rows_from_csv(std::istream& in);

void write_ensemble_rows(const std::vector<EnsembleRow>& rows,
                         const std::filesystem::path& path);
std::vector<EnsembleRow> read_ensemble_rows(const std::filesystem::path& path);

}  // namespace selfsep
