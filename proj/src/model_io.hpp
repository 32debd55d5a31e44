// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "recommend.hpp"

namespace gasrec {

// Versioned model file (magic "GRECv1", little-endian): dimensions, pipeline
// configuration, normalization parameters, slope normalizer, then all weight
// tensors row-major. Carries everything recommend-time inference needs, so
// load(save(b)) == b bitwise.
void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

}  // namespace gasrec
