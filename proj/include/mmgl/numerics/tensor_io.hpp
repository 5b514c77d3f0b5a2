#pragma once

#include <filesystem>
#include <string>

#include "mmgl/numerics/tensor.hpp"

namespace mmgl {

// "EMB1" layout: magic, u32 LE rows, u32 LE cols, rows*cols LE float32, row-major.
// Used for embedding tables, token matrices and parameter checkpoints alike.

std::string encode_emb1(const Tensor& t);
Tensor decode_emb1(std::string_view bytes, const std::string& origin = "<memory>");

void write_emb1(const std::filesystem::path& path, const Tensor& t);
Tensor read_emb1(const std::filesystem::path& path);

}  // namespace mmgl
