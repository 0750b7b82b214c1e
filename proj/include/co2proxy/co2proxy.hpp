#pragma once

#include "co2proxy/config.hpp"
#include "co2proxy/crisis.hpp"
#include "co2proxy/error.hpp"
#include "co2proxy/format.hpp"
#include "co2proxy/market.hpp"
#include "co2proxy/panel.hpp"
#include "co2proxy/parallel.hpp"
#include "co2proxy/policy.hpp"
#include "co2proxy/quant.hpp"
#include "co2proxy/scenario.hpp"
#include "co2proxy/settlement.hpp"
#include "co2proxy/technology.hpp"
#include "co2proxy/timeutil.hpp"
