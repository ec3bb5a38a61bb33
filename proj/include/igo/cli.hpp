#pragma once

namespace igo {

// Full command-line entry point. Returns the process exit status: 0 on
// success, nonzero with a one-line stderr diagnostic naming the
// originating module on any error.
int cli_main(int argc, char** argv);

}  // namespace igo
