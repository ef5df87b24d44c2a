#pragma once

// Umbrella header: the whole contrastive-explanation engine.

#include "rulefoil/domain.hpp"
#include "rulefoil/engine.hpp"
#include "rulefoil/errors.hpp"
#include "rulefoil/explain.hpp"
#include "rulefoil/fact.hpp"
#include "rulefoil/fixtures.hpp"
#include "rulefoil/history.hpp"
#include "rulefoil/rephrase.hpp"
#include "rulefoil/scenario.hpp"
#include "rulefoil/scoring.hpp"
#include "rulefoil/service.hpp"
#include "rulefoil/time.hpp"
#include "rulefoil/topsis.hpp"
