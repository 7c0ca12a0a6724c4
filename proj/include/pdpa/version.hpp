#pragma once

namespace pdpa {

inline constexpr const char* kArtifactName = "pdpa";
inline constexpr const char* kVersion = "1.0.0";

} // namespace pdpa
