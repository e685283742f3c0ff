#pragma once

namespace isoband {

/// Selects the OpenMP kernel or its serial reference. Both produce
/// bit-identical results.
enum class Execution { serial, parallel };

}  // namespace isoband
