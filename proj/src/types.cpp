#include "pia/types.hpp"

#include "pia/errors.hpp"

namespace pia {

std::string to_string(Label label) { return label == Label::kFake ? "fake" : "real"; }

Label label_from_string(const std::string& text) {
  if (text == "real") return Label::kReal;
  if (text == "fake") return Label::kFake;
  throw InvalidInput("unknown label '" + text + "'");
}

}  // namespace pia
