#pragma once

namespace ilg {

inline constexpr const char* kGeneratorVersion = "1.0.0";

}  // namespace ilg
