#pragma once

// Umbrella header: willingness to pay, insurance demand, and insurer
// risk-reduction policy under dual (rank-dependent, utility-linear) choice.

#include "dualrisk/distortion.hpp"
#include "dualrisk/errors.hpp"
#include "dualrisk/insurance.hpp"
#include "dualrisk/lottery.hpp"
#include "dualrisk/oracle.hpp"
#include "dualrisk/policy.hpp"
#include "dualrisk/wtp.hpp"
