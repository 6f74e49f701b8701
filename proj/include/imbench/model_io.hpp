#pragma once

#include <filesystem>
#include <string>

#include "imbench/classifiers.hpp"

namespace imbench {

/// JSON text describing a trained model:
///   {"format": "imbench-model", "version": 1, "model": M}
/// where M is {"kind": K, "dim": d, ...} and K is one of constant, cart,
/// random_forest, gradient_boosting, one_nn, averaging_ensemble, rusboost.
/// Trees are stored as parallel arrays feature/threshold/left/right/value.
/// Reals are written with round-trip precision, so a reloaded model scores
/// bit-identically.
std::string serialize_model(const Model& model);
ModelPtr deserialize_model(const std::string& text);

void save_model(const Model& model, const std::filesystem::path& path);
ModelPtr load_model(const std::filesystem::path& path);

}  // namespace imbench
