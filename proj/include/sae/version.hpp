#pragma once

namespace sae
{
inline constexpr const char* kVersion = "0.1.0";
}
