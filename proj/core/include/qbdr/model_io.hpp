#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qbdr/mapph.hpp"

namespace qbdr {

// Model file:
//   {"n": 2, "C": 5,
//    "blocks": {"A_minus1": [[..]], "A0": [[..]], "A1": [[..]], "B0": [[..]], "C0": [[..]]},
//    "reward": {"g": [[..], ...]}}          // optional, C+1 rows of length n
// Matrices are row-major nested arrays.
struct ModelFile {
    QbdBlocks blocks;
    std::optional<RewardSpec> reward;
};

// Parse errors carry the line and column of the offending byte.
ModelFile parse_model(const std::string& text);
ModelFile load_model(const std::string& path);
std::string dump_model(const ModelFile& model);

// MAP/PH parameter file:
//   {"map": {"D0": [[..]], "D1": [[..]]}, "ph": {"tau": [..], "T": [[..]]}, "C": 5}
struct MapPhFile {
    MapParams map;
    PhParams ph;
    int C = 1;
};

MapPhFile parse_mapph(const std::string& text);
MapPhFile load_mapph(const std::string& path);
std::string dump_mapph(const MapPhFile& params);

std::string read_text_file(const std::string& path);

// Random level-independent QBD: every entry of A-1 and A1 and every
// off-diagonal entry of A0, B0 and C0 is uniform on [0, 1]; diagonals make the
// rows conservative.
QbdBlocks random_model(int n, int C, std::uint64_t seed);

} // namespace qbdr
