#pragma once

#include <filesystem>
#include <string>

#include "shapley/models.hpp"

namespace shapley {

// Model files are JSON documents:
//
//   {"format": "tree_ensemble", "version": 1, "base_score": <real>,
//    "trees": [{"feature": [...], "threshold": [...], "left": [...], "right": [...],
//               "leaf_value": [...], "cover": [...]}, ...]}
//
//   {"format": "linear", "version": 1, "beta0": <real>, "beta": [...]}
//
// Leaves carry feature = -1 and left = right = -1. Reals are written with shortest
// round-trip precision, so save/load is bit-exact.

std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace shapley
