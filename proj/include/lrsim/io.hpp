#pragma once

// Plain-text CSV formats for datasets and posterior draws. Doubles are
// written with 17 significant digits so every file round-trips exactly.

#include <filesystem>
#include <string>
#include <vector>

#include "lrsim/datagen.hpp"
#include "lrsim/sampler.hpp"

namespace lrsim {

inline constexpr const char* kDatasetMagic = "# lrsim-dataset v1";
inline constexpr const char* kDrawsMagic = "# lrsim-draws v1";

std::string format_double(double v);
double parse_double(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

/// Header lines "# key=value" followed by a column line and one record per line:
/// X flattened row-major (columns x_r_c, 1-based) then y.
void write_dataset(const std::filesystem::path& path, const LabeledDataset& data);
std::string dataset_to_string(const LabeledDataset& data);

/// Throws ConfigError naming the path when it cannot be opened, and
/// InvalidParameter on malformed content.
LabeledDataset read_dataset(const std::filesystem::path& path);
LabeledDataset dataset_from_string(const std::string& text);

/// Columns: seed, iteration, M, beta (';'-separated, variable length),
/// gamma_1..gamma_d, B_r_c row-major, r_n.
std::string draws_to_string(const std::vector<PosteriorDraw>& draws, Index d);
void write_draws(const std::filesystem::path& path, const std::vector<PosteriorDraw>& draws, Index d);
std::vector<PosteriorDraw> draws_from_string(const std::string& text);
std::vector<PosteriorDraw> read_draws(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace lrsim
