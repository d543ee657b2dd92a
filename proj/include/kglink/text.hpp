#pragma once

#include <string>
#include <vector>

namespace kglink {

// Lowercases and splits on any run of non-alphanumeric characters
// (ASCII classification); empty pieces are dropped.
//   "U.S.-based (2021)" -> ["u","s","based","2021"]
std::vector<std::string> tokenize(const std::string& text);

}  // namespace kglink
