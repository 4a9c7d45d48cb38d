#pragma once

#include "scfdma/allocation.hpp"
#include "scfdma/assignment.hpp"
#include "scfdma/baselines.hpp"
#include "scfdma/channel.hpp"
#include "scfdma/complexity.hpp"
#include "scfdma/config_io.hpp"
#include "scfdma/dual.hpp"
#include "scfdma/error.hpp"
#include "scfdma/harness.hpp"
#include "scfdma/jamsc.hpp"
#include "scfdma/patterns.hpp"
#include "scfdma/report_io.hpp"
#include "scfdma/solver.hpp"
#include "scfdma/sumax.hpp"
#include "scfdma/verify.hpp"
