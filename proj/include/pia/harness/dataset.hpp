#pragma once

#include <string>
#include <vector>

#include "pia/model/detector.hpp"

namespace pia::harness {

struct Dataset {
  std::vector<model::VideoInput> videos;

  std::size_t count(Label label) const;
};

// Loads every video of the index whose split matches (empty split = all),
// reading each referenced cache once. A group is valid when all of its frames
// are valid and carry an identity. Throws InvalidDataset.
Dataset load_dataset(const std::string& index_path, const std::string& split = "");

// Throws InvalidDataset unless the set is non-empty and holds both labels.
void require_both_classes(const Dataset& dataset, const std::string& what);

}  // namespace pia::harness
