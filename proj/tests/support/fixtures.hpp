#pragma once

#include <string>

#include "doctest.h"
#include "files.hpp"
#include "mmgl/error.hpp"

namespace fixture {

template <typename F>
mmgl::Errc error_code(F&& f) {
  try {
    f();
  } catch (const mmgl::Error& e) {
    return e.code();
  }
  FAIL("expected an mmgl::Error");
  return mmgl::Errc::Io;
}

template <typename F>
std::string error_message(F&& f) {
  try {
    f();
  } catch (const mmgl::Error& e) {
    return e.what();
  }
  FAIL("expected an mmgl::Error");
  return {};
}

}  // namespace fixture
