#pragma once

#include <string>
#include <vector>

namespace quadstack {

// Entry point behind the quadstack binary; args excludes argv[0].
// Returns the process exit status.
int dispatch(const std::vector<std::string>& args);

}  // namespace quadstack
