#pragma once

#include <stdexcept>
#include <string>

namespace viewprop {

enum class errc {
    invalid_depth,
    behind_camera,
    dimension_mismatch,
    degenerate_fit,
    degenerate_scene,
    degenerate_homography,
    empty_input,
    load_failure,
    invalid_argument,
};

/// All throwing paths in the library use this type; code() distinguishes
/// the failure class programmatically, what() carries context.
class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string &message) : std::runtime_error(message), code_(code) {}
    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

inline void require(bool condition, errc code, const std::string &message) {
    if (!condition) throw Error(code, message);
}

} // namespace viewprop
