// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <variant>

#include "bitmm/tensor.hpp"

namespace bitmm {

// BTSR container, version 1, little-endian throughout:
//   magic "BTSR" | version u32 = 1 | kind u8 | rows u64 | cols u64 | payload
// payload by kind:
//   0 dense  raw f32 values, row-major
//   1 bit    words_per_row u64, then rows*words_per_row u64 words
//   2 csr    nnz u64, row_ptr u64[rows+1], col_idx u64[nnz], vals f32[nnz]
enum class TensorKind : std::uint8_t { dense = 0, bit = 1, csr = 2 };

void store_tensor(const std::string& path, const DenseMatrix& m);
void store_tensor(const std::string& path, const BitMatrix& m);
void store_tensor(const std::string& path, const CsrMatrix& m);

using LoadedTensor = std::variant<DenseMatrix, BitMatrix, CsrMatrix>;
LoadedTensor load_tensor(const std::string& path);

// Typed loads; throw IoError when the stored kind differs.
DenseMatrix load_dense(const std::string& path);
BitMatrix load_bit(const std::string& path);
CsrMatrix load_csr(const std::string& path);

// A plane triple is stored as three bit containers plus a JSON sidecar
// holding the scales:  <prefix>.t.btsr  <prefix>.h.btsr  <prefix>.m.btsr
// <prefix>.json = {"s": <scale>, "gamma": <scale or null>}
void store_thm_planes(const std::string& prefix, const ThmPlanes& p);
ThmPlanes load_thm_planes(const std::string& prefix);

}  // namespace bitmm
