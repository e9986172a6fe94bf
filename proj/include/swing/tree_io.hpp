#pragma once

#include <filesystem>
#include <string>

#include "swing/tree_pricer.hpp"

namespace swing {

/// Writes grid_k.csv (codebook format), transition_k.csv, payoffs.csv and
/// manifest.json into `dir`, creating it when needed.
void save_tree(const QuantTree& tree, const std::filesystem::path& dir, const std::string& manifest_json);

/// Reads a directory written by save_tree; the tree is validated.
QuantTree load_tree(const std::filesystem::path& dir);

std::string load_manifest(const std::filesystem::path& dir);

void write_matrix_csv(std::ostream& os, const Matrix& m);
Matrix read_matrix_csv(std::istream& is);

}  // namespace swing
