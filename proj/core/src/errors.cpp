#include "attn/errors.hpp"

namespace attn {
namespace {

std::string describe(const std::vector<std::string>& groups) {
  std::string msg = "groups missing labels:";
  for (const auto& g : groups) {
    msg += ' ';
    msg += g;
  }
  return msg;
}

}  // namespace

UnlabeledGroupsError::UnlabeledGroupsError(std::vector<std::string> groups)
    : ValidationError(describe(groups)), groups_(std::move(groups)) {}

}  // namespace attn
