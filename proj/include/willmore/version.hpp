/// \file version.hpp
#pragma once

namespace willmore {

inline constexpr const char* version_string = "1.0.0";

}  // namespace willmore
