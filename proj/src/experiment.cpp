#include "hoplab/experiment.hpp"

namespace hoplab {}  // placeholder until the runner lands
