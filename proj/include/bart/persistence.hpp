#pragma once

#include <string>

#include "bart/sampler.hpp"

namespace bart {

inline constexpr std::uint32_t kArchiveVersion = 1;

// Archive layout: magic, format version, then length-prefixed CRC-checked
// sections (metadata JSON, tree/sigma^2 draws, optional traces). Numeric
// payloads are little-endian raw doubles, so a load reproduces predictions
// bit for bit, and writing is canonical: save(load(f)) == f.
void save_model(const PosteriorEnsemble& ensemble, const std::string& path);
PosteriorEnsemble load_model(const std::string& path);

// Lossless JSON rendering of an archive's contents (debugging aid).
std::string export_model_json(const PosteriorEnsemble& ensemble);

}  // namespace bart
