#pragma once

#include "polyurn/config_json.hpp"
#include "polyurn/detect.hpp"
#include "polyurn/experiment.hpp"
#include "polyurn/growth.hpp"
#include "polyurn/kernels.hpp"
#include "polyurn/polygon.hpp"
#include "polyurn/presets.hpp"
#include "polyurn/psi_checks.hpp"
#include "polyurn/rng.hpp"
#include "polyurn/ruin.hpp"
#include "polyurn/state.hpp"
#include "polyurn/stats.hpp"
#include "polyurn/table.hpp"
#include "polyurn/urn.hpp"
#include "polyurn/verify.hpp"
#include "polyurn/walker.hpp"
