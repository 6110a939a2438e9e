#pragma once

namespace trunclab {

// serial kernels are the reference; parallel ones must match them bit for bit
enum class Exec { serial, parallel };

}  // namespace trunclab
