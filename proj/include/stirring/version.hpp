#pragma once

namespace stirring {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Version tag carried by every persisted record and config document.
inline constexpr const char* kSchemaId = "stirring-lab/1";

}  // namespace stirring
