#pragma once

#include "urbanfreight/errors.hpp"
#include "urbanfreight/core_model.hpp"
#include "urbanfreight/scheme_engine.hpp"
#include "urbanfreight/allocation_optimizer.hpp"
#include "urbanfreight/sensitivity.hpp"
#include "urbanfreight/scenario.hpp"
#include "urbanfreight/report.hpp"
